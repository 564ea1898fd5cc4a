//! The firm solver against an exhaustive lattice search written from scratch.

use regret_cap::firm::FirmSolver;
use regret_cap::market::PiecewiseFn;
use regret_cap::suites::{oracle_case, OracleCase};
use regret_cap::{best_responses, constants, optimal_policy, random, Market, Policy, TieBreak};

/// Revenue of the four lattice-friendly rules, spelled out by hand.
fn revenue(pol: &Policy, q: f64, p: f64) -> f64 {
    match *pol {
        Policy::LaissezFaire => q * p,
        Policy::PriceCap { k } => q * p.min(k),
        Policy::LumpSum { q_tilde, s } => q * p + if q >= q_tilde { s } else { 0.0 },
        Policy::OptimalCapSubsidy { k, s } => (q * k).min(q * p + s),
        _ => unreachable!("oracle covers the simple rules only"),
    }
}

fn brute_force(case: &OracleCase, pol: &Policy, n: usize) -> f64 {
    let cells = (n - 1) as f64;
    let value = |q: f64| {
        let step = case.breaks.iter().filter(|&&b| b < q).count();
        case.heights[step]
    };
    let cost = |q: f64| match (q > 0.0, case.tier) {
        (false, _) => 0.0,
        (true, Some((th, jump))) if q > th => case.fixed + jump,
        (true, _) => case.fixed,
    };
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        let q = i as f64 / cells;
        let (v, c) = (value(q), cost(q));
        for j in 0..n {
            let p = j as f64 / cells;
            if p > v {
                break;
            }
            best = best.max(revenue(pol, q, p) - c);
        }
    }
    best
}

fn lattice_policies() -> [Policy; 4] {
    [
        Policy::LaissezFaire,
        Policy::PriceCap { k: 0.5 },
        Policy::LumpSum { q_tilde: 0.5, s: 0.2 },
        Policy::OptimalCapSubsidy { k: 0.5, s: 0.1 },
    ]
}

#[test]
fn solver_matches_lattice_search() {
    let n = 1001;
    let mut rng = random::rng(11);
    let solver = FirmSolver::default();
    for i in 0..60 {
        let case = oracle_case(&mut rng, n).unwrap();
        for pol in lattice_policies() {
            let got = solver.best_profit(&pol, &case.market);
            let want = brute_force(&case, &pol, n);
            assert!((got - want).abs() < 1e-6, "case {i} {}: solver {got} vs lattice {want}", pol.id());
        }
    }
}

#[test]
fn no_lattice_point_beats_the_solver() {
    let n = 401;
    let solver = FirmSolver::default();
    for (i, m) in random::mixed_markets(40, 5, 1.0).unwrap().iter().enumerate() {
        for pol in lattice_policies() {
            let got = solver.best_profit(&pol, m);
            for a in 0..n {
                let q = a as f64 / (n - 1) as f64;
                let v = m.demand().at(q);
                let c = m.cost().at(q);
                for b in 0..n {
                    let p = b as f64 / (n - 1) as f64;
                    if p > v {
                        break;
                    }
                    let profit = revenue(&pol, q, p) - c;
                    assert!(profit <= got + 1e-9, "market {i} {}: ({q}, {p}) earns {profit} > {got}", pol.id());
                }
            }
        }
    }
}

#[test]
fn reported_responses_are_feasible_and_optimal() {
    let c = constants(0.5, 1.0).unwrap();
    let pol = optimal_policy(&c, c.s_alpha).unwrap();
    for m in random::mixed_markets(30, 3, 1.0).unwrap() {
        let best = FirmSolver::default().best_profit(&pol, &m);
        for o in best_responses(&pol, &m, 0.5, TieBreak::All) {
            assert!(o.p <= m.demand().at(o.q) + 1e-12, "price above demand at ({}, {})", o.q, o.p);
            let profit = revenue(&pol, o.q, o.p) - m.cost().at(o.q);
            assert!((profit - best).abs() <= 1e-9, "tied response earns {profit}, best {best}");
            assert!((o.revenue - revenue(&pol, o.q, o.p)).abs() < 1e-12);
        }
    }
}

#[test]
fn ties_follow_the_requested_order() {
    let c = constants(0.0, 1.0).unwrap();
    let pol = optimal_policy(&c, 0.0).unwrap();
    let m = Market::new(PiecewiseFn::flat_demand(1.0).unwrap(), PiecewiseFn::fixed_cost(0.5).unwrap(), 1.0).unwrap();
    let against = best_responses(&pol, &m, 0.0, TieBreak::AgainstRegulator);
    let favour = best_responses(&pol, &m, 0.0, TieBreak::ForRegulator);
    assert!((against[0].rgrt - 0.5).abs() < 1e-12);
    assert_eq!(against[0].q, 0.0);
    assert!(favour[0].rgrt.abs() < 1e-12);
    assert_eq!(favour[0].q, 1.0);
    let all = best_responses(&pol, &m, 0.0, TieBreak::All);
    assert!(all.windows(2).all(|w| (w[0].q, w[0].p) <= (w[1].q, w[1].p)));
}

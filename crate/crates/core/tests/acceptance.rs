//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::f64::consts::E;
use std::time::{Duration, Instant};

use rand::Rng;
use regret_cap::adversary::{certify_lower_bound, sweep_upper_bound, DEFAULT_RESOLUTION, LOWER_TOL, UPPER_TOL};
use regret_cap::analysis::{
    full_information_regret, necessary_conditions, profit_floor_slack, r_alpha_numeric, surplus_bound_check,
};
use regret_cap::suites::{converse_probes, CONVERSE_DELTA};
use regret_cap::{constants, optimal_policy, random, AlphaConstants, Policy};

const SEED: u64 = 7;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(failures: Vec<String>, summary: String) -> Verdict {
    if failures.is_empty() {
        Verdict { ok: true, detail: summary }
    } else {
        let shown: Vec<_> = failures.iter().take(6).cloned().collect();
        let more = failures.len().saturating_sub(shown.len());
        let mut detail = shown.join("; ");
        if more > 0 {
            detail.push_str(&format!("; ... {more} more"));
        }
        Verdict { ok: false, detail }
    }
}

fn alpha_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

/// Constants written out from their defining formulas.
fn reference(alpha: f64) -> (f64, f64, f64, f64) {
    let k = 1.0 / (2.0 - alpha);
    if alpha <= 0.5 {
        (k, (1.0 - alpha) * k, 1.0, alpha * k)
    } else {
        let root = (alpha * alpha + 4.0 * alpha).sqrt();
        let q = (1.0 - (alpha + root) / 2.0).exp();
        let r = (2.0 + alpha - root) * q / (2.0 * (2.0 - alpha));
        (k, r, q, r)
    }
}

fn constants_table() -> Verdict {
    let mut fails = Vec::new();
    let started = Instant::now();
    for alpha in alpha_grid() {
        let c = constants(alpha, 1.0).unwrap();
        let (k, r, q, s) = reference(alpha);
        for (name, got, want) in [("k", c.k_alpha, k), ("r", c.r_alpha, r), ("q", c.q_alpha, q), ("s", c.s_alpha, s)] {
            if (got - want).abs() > 1e-12 {
                fails.push(format!("alpha={alpha} {name}: {got} vs {want}"));
            }
        }
        if alpha <= 0.5 && c.q_alpha != 1.0 {
            fails.push(format!("alpha={alpha}: q={} not 1", c.q_alpha));
        }
    }
    let c0 = constants(0.0, 1.0).unwrap();
    if (c0.k_alpha, c0.r_alpha, c0.s_alpha) != (0.5, 0.5, 0.0) {
        fails.push(format!("alpha=0 spot values {c0:?}"));
    }
    let c1 = constants(1.0, 1.0).unwrap();
    if (c1.r_alpha - 0.205881).abs() > 1e-5 || (c1.q_alpha - 0.539003).abs() > 1e-5 {
        fails.push(format!("alpha=1: r={} q={}", c1.r_alpha, c1.q_alpha));
    }
    let took = started.elapsed();
    if took > Duration::from_secs(1) {
        fails.push(format!("took {took:?}"));
    }
    verdict(fails, format!("21 alphas, r_1={:.6}, q_1={:.6}", c1.r_alpha, c1.q_alpha))
}

fn maximin() -> Verdict {
    let mut fails = Vec::new();
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    for alpha in alpha_grid() {
        let num = r_alpha_numeric(alpha, 1.0, 2001).unwrap();
        let gap = (num.value - reference(alpha).1).abs();
        worst = worst.max(gap);
        if gap > 1e-6 {
            fails.push(format!("alpha={alpha}: numeric {} gap {gap:e}", num.value));
        }
    }
    let took = started.elapsed();
    if took > Duration::from_secs(30) {
        fails.push(format!("took {took:?}"));
    }
    verdict(fails, format!("worst gap {worst:.2e} in {took:.1?}"))
}

const CERT_ALPHAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

fn optimality() -> Verdict {
    let mut fails = Vec::new();
    let started = Instant::now();
    let mut worst_upper = f64::NEG_INFINITY;
    for alpha in CERT_ALPHAS {
        let c = constants(alpha, 1.0).unwrap();
        for s in [c.s_alpha, c.r_alpha] {
            let pol = optimal_policy(&c, s).unwrap();
            let lower = certify_lower_bound(&pol, &c, DEFAULT_RESOLUTION).unwrap();
            let upper = sweep_upper_bound(&pol, &c, 1000, SEED).unwrap();
            worst_upper = worst_upper.max(upper.upper_sweep.regret - c.r_alpha);
            if lower.lower_bound.regret < c.r_alpha - LOWER_TOL {
                fails.push(format!("alpha={alpha} s={s}: lower {}", lower.lower_bound.regret));
            }
            if upper.upper_sweep.regret > c.r_alpha + UPPER_TOL {
                fails.push(format!(
                    "alpha={alpha} s={s}: upper {} via {}",
                    upper.upper_sweep.regret, upper.upper_sweep.scenario.label
                ));
            }
        }
    }
    let took = started.elapsed();
    if took > Duration::from_secs(120) {
        fails.push(format!("took {took:?}"));
    }
    verdict(fails, format!("10 rules, largest excess over r {worst_upper:.2e}, {took:.1?}"))
}

fn perturbed(c: &AlphaConstants) -> Vec<Policy> {
    let d = CONVERSE_DELTA;
    let mut out = vec![
        Policy::LaissezFaire,
        Policy::price_cap(0.3).unwrap(),
        Policy::price_cap(0.7).unwrap(),
        Policy::lump_sum(0.5, 0.2).unwrap(),
        optimal_policy(c, c.s_alpha).unwrap(),
        Policy::cap_subsidy(c.k_alpha + d, c.s_alpha).unwrap(),
        Policy::cap_subsidy(c.k_alpha - d, c.s_alpha).unwrap(),
        Policy::cap_subsidy(c.k_alpha, c.r_alpha + d).unwrap(),
    ];
    if c.s_alpha >= d {
        out.push(Policy::cap_subsidy(c.k_alpha, c.s_alpha - d).unwrap());
    }
    out
}

fn lower_bound() -> Verdict {
    let mut fails = Vec::new();
    let started = Instant::now();
    let mut n = 0;
    for alpha in [0.0, 0.75] {
        let c = constants(alpha, 1.0).unwrap();
        for pol in perturbed(&c) {
            n += 1;
            let rep = certify_lower_bound(&pol, &c, DEFAULT_RESOLUTION).unwrap();
            if rep.lower_bound.regret < c.r_alpha - LOWER_TOL {
                fails.push(format!("alpha={alpha} {}: {}", pol.id(), rep.lower_bound.regret));
            }
        }
    }
    let took = started.elapsed();
    if took > Duration::from_secs(120) {
        fails.push(format!("took {took:?}"));
    }
    verdict(fails, format!("{n} rules at alpha 0 and 0.75, {took:.1?}"))
}

fn separation() -> Verdict {
    let mut fails = Vec::new();
    let c = constants(0.0, 1.0).unwrap();
    let mut seen = Vec::new();
    for k in [0.3, 0.7] {
        let rep = certify_lower_bound(&Policy::price_cap(k).unwrap(), &c, DEFAULT_RESOLUTION).unwrap();
        let w = &rep.lower_bound;
        seen.push(format!("cap {k}: {:.6} via {}", w.regret, w.scenario.label));
        if !(w.regret >= 0.7 - 1e-6 && w.regret > c.r_alpha) {
            fails.push(format!("cap {k}: lower bound {}", w.regret));
        }
    }
    verdict(fails, seen.join(", "))
}

fn full_information() -> Verdict {
    let mut fails = Vec::new();
    let markets = random::mixed_markets(100, SEED, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for (i, m) in markets.iter().enumerate() {
        let alpha = [0.0, 0.5, 1.0][i % 3];
        let r = full_information_regret(m, alpha).unwrap();
        worst = worst.max(r);
        if r > 1e-9 {
            fails.push(format!("market #{i}: regret {r}"));
        }
    }
    verdict(fails, format!("100 markets, largest regret {worst:.2e}"))
}

fn surplus_and_profit_bounds() -> Verdict {
    let mut fails = Vec::new();
    let mut rng = random::rng(SEED);
    let mut floor: f64 = f64::INFINITY;
    for i in 0..1000 {
        let m = random::mixed_market(&mut rng, 1.0).unwrap();
        let (q_bar, p_bar) = if i % 10 == 0 {
            (0.0, 1.0)
        } else {
            let q: f64 = rng.gen_range(0.0..1.0);
            let (lo, hi) = (m.demand().sup_right_of(q).max(0.0), m.demand().at(q));
            (q, lo + rng.gen_range(0.0..=1.0) * (hi - lo))
        };
        let rep = surplus_bound_check(&m, q_bar, p_bar).unwrap();
        if rep.lhs > rep.rhs + 1e-8 {
            fails.push(format!("market #{i}: surplus bound {} > {}", rep.lhs, rep.rhs));
        }
        let slack = profit_floor_slack(&m);
        floor = floor.min(slack);
        if slack < -1e-8 {
            fails.push(format!("market #{i}: profit {slack} below OPT - 1/e"));
        }
    }
    verdict(fails, format!("1000 markets, tightest profit slack {floor:.3e} (1/e = {:.6})", 1.0 / E))
}

fn necessary_conditions_and_converse() -> Verdict {
    let mut fails = Vec::new();
    let mut margins = Vec::new();
    for alpha in CERT_ALPHAS {
        let c = constants(alpha, 1.0).unwrap();
        for s in [c.s_alpha, 0.5 * (c.s_alpha + c.r_alpha), c.r_alpha] {
            let audit = necessary_conditions(&optimal_policy(&c, s).unwrap(), &c, 2001);
            if !audit.all_hold() {
                fails.push(format!("alpha={alpha} s={s}: optimal rule fails the audit {audit:?}"));
            }
        }
        for (prop, pol) in converse_probes(&c, CONVERSE_DELTA).unwrap() {
            let audit = necessary_conditions(&pol, &c, 201);
            let caught = match prop {
                "price-cap" => !audit.price_cap.holds,
                "subsidy" => !audit.subsidy.holds,
                _ => !audit.subsidy_cap.holds,
            };
            if !caught {
                fails.push(format!("alpha={alpha}: audit misses the {prop} perturbation"));
            }
            let rep = certify_lower_bound(&pol, &c, DEFAULT_RESOLUTION).unwrap();
            let excess = rep.lower_bound.regret - c.r_alpha;
            margins.push(format!("{alpha}/{prop} +{excess:.4}"));
            if !(excess > 0.01) {
                fails.push(format!(
                    "alpha={alpha} {prop}: regret {:.6} exceeds r by only {excess:.6}",
                    rep.lower_bound.regret
                ));
            }
        }
    }
    verdict(fails, margins.join(", "))
}

fn laissez_faire_ceiling() -> Verdict {
    let c = constants(1.0, 1.0).unwrap();
    let rep = sweep_upper_bound(&Policy::LaissezFaire, &c, 1000, SEED).unwrap();
    let w = &rep.upper_sweep;
    let fails = if w.regret > 1.0 / E + 1e-6 {
        vec![format!("regret {} via {}", w.regret, w.scenario.label)]
    } else {
        Vec::new()
    };
    verdict(fails, format!("largest regret {:.9} (1/e = {:.9}) over {} scenarios", w.regret, 1.0 / E, rep.scenarios))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("constants table", constants_table),
        ("maximin cross-check", maximin),
        ("optimality certification", optimality),
        ("universal lower bound", lower_bound),
        ("suboptimality separation", separation),
        ("full-information rule", full_information),
        ("surplus bound and profit floor", surplus_and_profit_bounds),
        ("necessary conditions and converse", necessary_conditions_and_converse),
        ("laissez-faire ceiling", laissez_faire_ceiling),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let started = Instant::now();
        let v = run();
        let status = if v.ok { "PASS" } else { "FAIL" };
        failed += usize::from(!v.ok);
        println!("{status} [{}] {name} ({:.1?}): {}", i + 1, started.elapsed(), v.detail);
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

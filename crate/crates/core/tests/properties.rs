use proptest::prelude::*;
use proptest::test_runner::RngSeed;

use regret_cap::analysis::policy_regret;
use regret_cap::{constants, optimal_policy, outcome, random, Market, Policy};

/// Seeded so that every run draws the same cases.
fn fixed(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(7),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn market(seed: u64) -> Market {
    random::mixed_market(&mut random::rng(seed), 1.0).unwrap()
}

/// Composite Simpson rule on each segment, away from the demand's own integrator.
fn simpson(m: &Market, q: f64) -> f64 {
    let mut total = 0.0;
    for seg in m.demand().segments() {
        let (a, b) = (seg.lo, seg.hi.min(q));
        if b <= a {
            continue;
        }
        let n = 200;
        let h = (b - a) / n as f64;
        let mut s = seg.value(a) + seg.value(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * seg.value(a + i as f64 * h);
        }
        total += s * h / 3.0;
    }
    total
}

proptest! {
    #![proptest_config(fixed(64))]

    #[test]
    fn constants_are_ordered_and_scale(alpha in 0.0..=1.0f64, v_bar in 0.1..10.0f64) {
        let c = constants(alpha, v_bar).unwrap();
        let unit = constants(alpha, 1.0).unwrap();
        prop_assert!(0.0 <= c.s_alpha && c.s_alpha <= c.r_alpha + 1e-15 && c.r_alpha <= c.k_alpha);
        prop_assert!(((1.0 - alpha) * c.k_alpha - (v_bar - c.k_alpha)).abs() < 1e-12 * v_bar);
        prop_assert!((c.r_alpha - v_bar * unit.r_alpha).abs() < 1e-12 * v_bar);
        prop_assert_eq!(c.q_alpha, unit.q_alpha);
        prop_assert!(c.q_alpha > 0.0 && c.q_alpha <= 1.0);
    }

    #[test]
    fn regret_accounting_adds_up(seed in any::<u64>(), alpha in 0.0..=1.0f64, q in 0.0..=1.0f64, t in 0.0..=1.0f64) {
        let m = market(seed);
        let p = t * m.demand().at(q);
        let o = outcome(&Policy::LaissezFaire, &m, alpha, q, p).unwrap();
        let tol = 1e-9;
        prop_assert!((o.rgrt - (o.dstr + (1.0 - alpha) * o.fp)).abs() < tol);
        prop_assert!((o.cs + o.fp - m.surplus(q)).abs() < tol);
        prop_assert!((o.opt - o.dstr - m.surplus(q)).abs() < tol);
        prop_assert!(o.dstr >= -tol);
        prop_assert!(o.cs >= -tol, "consumers pay at most their value");
    }

    #[test]
    fn integral_matches_quadrature(seed in any::<u64>(), q in 0.0..=1.0f64) {
        let m = market(seed);
        let exact = m.total_value(q).unwrap();
        prop_assert!((exact - simpson(&m, q)).abs() < 1e-6, "{exact} vs {}", simpson(&m, q));
    }
}

proptest! {
    #![proptest_config(fixed(48))]

    #[test]
    fn optimal_rule_keeps_regret_below_the_bound(seed in any::<u64>(), a in 0usize..5, mid in any::<bool>()) {
        let alpha = [0.0, 0.25, 0.5, 0.75, 1.0][a];
        let c = constants(alpha, 1.0).unwrap();
        let s = if mid { 0.5 * (c.s_alpha + c.r_alpha) } else { c.s_alpha };
        let pol = optimal_policy(&c, s).unwrap();
        let m = random::sweep_market(&mut random::rng(seed), 1.0).unwrap();
        let r = policy_regret(&pol, &m, alpha);
        prop_assert!(r <= c.r_alpha + 1e-6, "regret {r} above {}", c.r_alpha);
    }

    #[test]
    fn unregulated_regret_stays_below_one_over_e(seed in any::<u64>()) {
        let m = market(seed);
        let r = policy_regret(&Policy::LaissezFaire, &m, 1.0);
        prop_assert!(r <= 1.0 / std::f64::consts::E + 1e-8, "regret {r}");
    }
}

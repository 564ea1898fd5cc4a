//! Verification suites run by `regret-cap verify`.
//!
//! Each suite draws its inputs from a seeded generator, evaluates them in parallel
//! and reduces in input order, so a given seed always yields the same report.

use rand::Rng;
use rayon::prelude::*;

use crate::adversary::{self, certify, certify_lower_bound, Label, SearchConfig, LOWER_TOL, UPPER_TOL};
use crate::analysis::{
    full_information_regret, constants, profit_floor_slack, surplus_bound_check, maximin_branches, r_alpha_numeric,
    necessary_conditions, AlphaConstants,
};
use crate::error::{Error, Result};
use crate::firm::{FirmSolver, TieBreak};
use crate::market::{Market, PiecewiseFn};
use crate::policy::{optimal_policy, Policy, Revenue};
use crate::random;

pub const DEFAULT_SEED: u64 = 7;

/// Size of the perturbation used by the converse probes, relative to `v_bar`.
pub const CONVERSE_DELTA: f64 = 0.05;

pub const SUITES: [&str; 13] = [
    "constants",
    "maximin",
    "full-information",
    "surplus-bound",
    "profit-floor",
    "necessary-conditions",
    "necessary-conditions-converse",
    "overproduction",
    "hardcap",
    "subsidy-monotone",
    "firm-oracle",
    "lower-bound",
    "optimality",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Number of random instances; `None` uses the suite's default.
    pub count: Option<usize>,
    pub v_bar: f64,
    /// Points per axis for grids (maximin, audits, adversary libraries).
    pub grid: Option<usize>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: DEFAULT_SEED,
            count: None,
            v_bar: 1.0,
            grid: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub failures: Vec<String>,
    /// Smallest margin seen; negative margins are failures.
    pub worst_margin: f64,
    pub notes: Vec<String>,
}

struct Tally {
    name: &'static str,
    checked: usize,
    failures: Vec<String>,
    worst: f64,
    notes: Vec<String>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            checked: 0,
            failures: Vec::new(),
            worst: f64::INFINITY,
            notes: Vec::new(),
        }
    }

    /// Records a check that passes when `margin >= 0`.
    fn check(&mut self, margin: f64, what: impl FnOnce() -> String) {
        self.checked += 1;
        self.worst = self.worst.min(margin);
        if !(margin >= 0.0) {
            self.failures.push(format!("{} (margin {margin:e})", what()));
        }
    }

    fn flag(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.check(if ok { 0.0 } else { -1.0 }, what);
    }

    fn done(self) -> SuiteReport {
        SuiteReport {
            name: self.name.to_string(),
            passed: self.failures.is_empty(),
            checked: self.checked,
            failures: self.failures,
            worst_margin: if self.checked == 0 { 0.0 } else { self.worst },
            notes: self.notes,
        }
    }
}

pub fn run(name: &str, opts: &SuiteOptions) -> Result<SuiteReport> {
    match name {
        "constants" => constants_suite(opts),
        "maximin" => maximin_suite(opts),
        "full-information" => full_information_suite(opts),
        "surplus-bound" => surplus_bound_suite(opts),
        "profit-floor" => profit_floor_suite(opts),
        "necessary-conditions" => necessary_conditions_suite(opts),
        "necessary-conditions-converse" => converse_suite(opts),
        "overproduction" => overproduction_suite(opts),
        "hardcap" => hardcap_suite(opts),
        "subsidy-monotone" => subsidy_monotone_suite(opts),
        "firm-oracle" => firm_oracle_suite(opts),
        "lower-bound" => lower_bound_suite(opts),
        "optimality" => optimality_suite(opts),
        other => Err(Error::Input {
            context: "verify".into(),
            message: format!("unknown suite `{other}`; known: {}", SUITES.join(", ")),
        }),
    }
}

/// `{0, 0.05, ..., 1}`.
pub fn alpha_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

/// The five weights used by the certification suites.
pub const CERT_ALPHAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

fn constants_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut t = Tally::new("constants");
    let v_bar = opts.v_bar;
    for alpha in alpha_grid() {
        let c = constants(alpha, v_bar)?;
        let tol = 1e-12 * v_bar;
        t.check(tol - ((1.0 - alpha) * c.k_alpha - (v_bar - c.k_alpha)).abs(), || {
            format!("alpha={alpha}: (1-alpha) k != v_bar - k")
        });
        t.check((c.s_alpha).min(c.r_alpha - c.s_alpha).min(c.k_alpha - c.r_alpha) + tol, || {
            format!("alpha={alpha}: ordering 0 <= s <= r <= k")
        });
        t.flag((c.q_alpha == 1.0) == (alpha <= 0.5), || {
            format!("alpha={alpha}: q_alpha={} on the wrong branch", c.q_alpha)
        });
        if alpha > 0.5 {
            let p = alpha * c.k_alpha / (1.0 - c.q_alpha.ln());
            let (a, b) = maximin_branches(alpha, c.k_alpha, c.q_alpha, p);
            t.check(1e-9 * v_bar - (a - b).abs(), || format!("alpha={alpha}: branches differ at the argmax"));
            t.check(1e-9 * v_bar - (a.min(b) - c.r_alpha).abs(), || {
                format!("alpha={alpha}: branch value differs from r_alpha")
            });
        }
    }
    Ok(t.done())
}

fn maximin_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut t = Tally::new("maximin");
    let grid = opts.grid.unwrap_or(2001);
    let alphas = alpha_grid();
    let solved: Vec<Result<_>> = alphas
        .par_iter()
        .map(|&a| r_alpha_numeric(a, opts.v_bar, grid))
        .collect();
    for (&alpha, s) in alphas.iter().zip(solved) {
        let s = s?;
        let c = constants(alpha, opts.v_bar)?;
        t.check(1e-6 * opts.v_bar - (s.value - c.r_alpha).abs(), || {
            format!("alpha={alpha}: numeric {} vs closed form {}", s.value, c.r_alpha)
        });
        if alpha > 0.5 {
            t.check(1e-4 - (s.q - c.q_alpha).abs(), || {
                format!("alpha={alpha}: argmax q {} vs q_alpha {}", s.q, c.q_alpha)
            });
        }
    }
    Ok(t.done())
}

fn full_information_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut t = Tally::new("full-information");
    let markets = random::mixed_markets(opts.count.unwrap_or(100), opts.seed, opts.v_bar)?;
    let alphas = [0.0, 0.5, 1.0];
    let regrets: Vec<Result<f64>> = markets
        .par_iter()
        .enumerate()
        .map(|(i, m)| full_information_regret(m, alphas[i % 3]))
        .collect();
    for (i, r) in regrets.into_iter().enumerate() {
        let r = r?;
        t.check(1e-9 * opts.v_bar - r, || format!("market #{i}: regret {r}"));
    }
    Ok(t.done())
}

fn surplus_bound_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut t = Tally::new("surplus-bound");
    let count = opts.count.unwrap_or(1000);
    let v_bar = opts.v_bar;
    let mut rng = random::rng(opts.seed);
    let mut cases = Vec::with_capacity(count);
    for i in 0..count {
        let m = random::mixed_market(&mut rng, v_bar)?;
        let (q_bar, p_bar) = if i % 10 == 0 {
            (0.0, v_bar)
        } else {
            let q: f64 = rng.gen_range(0.0..1.0);
            let sup = m.demand().sup_right_of(q).max(0.0);
            let at = m.demand().at(q);
            let p = match rng.gen_range(0..3) {
                0 => sup,
                1 => at,
                _ => sup + rng.gen_range(0.0..=1.0) * (at - sup),
            };
            (q, p)
        };
        cases.push((m, q_bar, p_bar));
    }
    let results: Vec<Result<_>> = cases
        .par_iter()
        .map(|(m, q, p)| surplus_bound_check(m, *q, *p))
        .collect();
    for (i, r) in results.into_iter().enumerate() {
        let r = r?;
        t.check(r.rhs + 1e-8 * v_bar - r.lhs, || {
            format!("case #{i}: lhs {} > rhs {}", r.lhs, r.rhs)
        });
    }
    Ok(t.done())
}

fn profit_floor_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut t = Tally::new("profit-floor");
    let markets = random::mixed_markets(opts.count.unwrap_or(1000), opts.seed, opts.v_bar)?;
    let slack: Vec<f64> = markets.par_iter().map(profit_floor_slack).collect();
    for (i, s) in slack.into_iter().enumerate() {
        t.check(s + 1e-8 * opts.v_bar, || format!("market #{i}: profit falls {} short", -s));
    }
    Ok(t.done())
}

fn optimal_family(c: &AlphaConstants) -> Result<Vec<Policy>> {
    let mid = 0.5 * (c.s_alpha + c.r_alpha);
    [c.s_alpha, mid, c.r_alpha]
        .into_iter()
        .map(|s| optimal_policy(c, s))
        .collect()
}

fn necessary_conditions_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut t = Tally::new("necessary-conditions");
    let grid = opts.grid.unwrap_or(2001);
    for alpha in CERT_ALPHAS {
        let c = constants(alpha, opts.v_bar)?;
        for pol in optimal_family(&c)? {
            let a = necessary_conditions(&pol, &c, grid);
            let margin = a.price_cap.margin.min(a.subsidy.margin).min(a.subsidy_cap.margin);
            t.check(margin + 1e-9 * opts.v_bar, || format!("alpha={alpha} {}: {a:?}", pol.id()));
        }
    }
    // The audit must also catch rules that are not optimal.
    let c0 = constants(0.0, opts.v_bar)?;
    let lf = necessary_conditions(&Policy::LaissezFaire, &c0, grid);
    t.flag(!lf.price_cap.holds, || "laissez-faire passes the price-cap property at alpha=0".into());
    let c = constants(0.25, opts.v_bar)?;
    let cap = necessary_conditions(&Policy::price_cap(0.3 * opts.v_bar)?, &c, grid);
    t.flag(!cap.subsidy.holds, || "unsubsidized cap passes the subsidy property at alpha=0.25".into());
    Ok(t.done())
}

/// The three perturbations of the optimal rule, each breaking one property.
/// The subsidy cut only exists when `s_alpha >= delta`.
pub fn converse_probes(c: &AlphaConstants, delta: f64) -> Result<Vec<(&'static str, Policy)>> {
    let d = delta * c.v_bar;
    let base = optimal_policy(c, c.s_alpha)?;
    let mut out = vec![
        (
            "price-cap",
            Policy::spike(base.clone(), c.q_alpha, c.v_bar, c.q_alpha * (c.k_alpha + d))?,
        ),
        ("subsidy-cap", Policy::spike(base, 1.0, 0.0, c.r_alpha + d)?),
    ];
    if c.s_alpha >= d {
        out.insert(1, ("subsidy", Policy::cap_subsidy(c.k_alpha, c.s_alpha - d)?));
    }
    Ok(out)
}

fn converse_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut t = Tally::new("necessary-conditions-converse");
    let res = opts.grid.unwrap_or(adversary::DEFAULT_RESOLUTION);
    for alpha in CERT_ALPHAS {
        let c = constants(alpha, opts.v_bar)?;
        for (prop, pol) in converse_probes(&c, CONVERSE_DELTA)? {
            let audit = necessary_conditions(&pol, &c, 201);
            let broken = match prop {
                "price-cap" => !audit.price_cap.holds,
                "subsidy" => !audit.subsidy.holds,
                _ => !audit.subsidy_cap.holds,
            };
            t.flag(broken, || format!("alpha={alpha}: audit misses the {prop} perturbation"));
            let rep = certify_lower_bound(&pol, &c, res)?;
            let excess = rep.lower_bound.regret - c.r_alpha;
            t.check(excess - LOWER_TOL * opts.v_bar, || {
                format!("alpha={alpha}: {prop} perturbation not separated from r_alpha")
            });
            t.notes.push(format!(
                "alpha={alpha} {prop}: regret {} exceeds r_alpha by {} via {}",
                rep.lower_bound.regret, excess, rep.lower_bound.scenario.label
            ));
        }
    }
    Ok(t.done())
}

fn overproduction_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut t = Tally::new("overproduction");
    let res = opts.grid.unwrap_or(41);
    for alpha in CERT_ALPHAS {
        let c = constants(alpha, opts.v_bar)?;
        for pol in optimal_family(&c)? {
            let Policy::OptimalCapSubsidy { s, .. } = pol else { unreachable!() };
            let lib: Vec<_> = adversary::proof_library(&pol, &c, res)?
                .into_iter()
                .filter(|x| x.label == Label::Overproduction)
                .collect();
            // (q, p) pays the most the firm can get on W_{q,p} unless selling more
            // units at a lower price pays better; the equality needs the former.
            let found: Vec<(f64, f64, bool)> = lib
                .par_iter()
                .map(|x| {
                    let expected = x.params.fixed - x.params.q * x.params.p;
                    let solver = FirmSolver::default();
                    let best = solver.best_profit(&pol, &x.market) <= 1e-9 * opts.v_bar;
                    (solver.regret(&pol, &x.market, alpha), expected, best)
                })
                .collect();
            for (x, (got, want, best)) in lib.iter().zip(found) {
                if best {
                    t.check(1e-12 * opts.v_bar - (got - want).abs(), || {
                        format!("alpha={alpha} {} at {:?}: regret {got} vs {want}", pol.id(), x.params)
                    });
                }
                t.check(s + 1e-12 * opts.v_bar - got, || {
                    format!("alpha={alpha} {} at {:?}: regret {got} above s", pol.id(), x.params)
                });
            }
        }
    }
    Ok(t.done())
}

fn hardcap_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut t = Tally::new("hardcap");
    let res = opts.grid.unwrap_or(21);
    let solver = FirmSolver::default();
    let tol = 1e-9 * opts.v_bar;
    for alpha in [0.0, 0.5, 0.75, 1.0] {
        let c = constants(alpha, opts.v_bar)?;
        for s in [c.s_alpha, c.r_alpha] {
            let soft = optimal_policy(&c, s)?;
            let hard = Policy::hard_cap(soft.clone(), c.k_alpha)?;
            let lib = adversary::proof_library(&soft, &c, res)?;
            let problems: Vec<Vec<String>> = lib
                .par_iter()
                .map(|x| {
                    let m = &x.market;
                    let mut bad = Vec::new();
                    let a = solver.best_responses(&soft, m, alpha, TieBreak::All);
                    let b = solver.best_responses(&hard, m, alpha, TieBreak::All);
                    let (best_a, best_b) = (a[0].fp, b[0].fp);
                    let value = |q: f64| m.demand().integral_to(q);
                    for o in &a {
                        let p = o.p.min(c.k_alpha);
                        match hard.revenue_at(o.q, p) {
                            Revenue::Amount(r) => {
                                if (r - m.cost().at(o.q) - best_b).abs() > tol {
                                    bad.push(format!("({}, {}) not a best response under the hard cap", o.q, p));
                                }
                                if ((value(o.q) - r) - o.cs).abs() > tol {
                                    bad.push(format!("consumer surplus differs at q={}", o.q));
                                }
                            }
                            Revenue::Rejected => bad.push(format!("({}, {p}) rejected", o.q)),
                        }
                    }
                    for o in &b {
                        let r = soft.revenue_at(o.q, o.p).amount().unwrap_or(f64::NEG_INFINITY);
                        if (r - m.cost().at(o.q) - best_a).abs() > tol {
                            bad.push(format!("({}, {}) not a best response without the hard cap", o.q, o.p));
                        }
                    }
                    bad
                })
                .collect();
            for (x, bad) in lib.iter().zip(problems) {
                t.flag(bad.is_empty(), || {
                    format!("alpha={alpha} s={s} {} {:?}: {}", x.label, x.params, bad.join("; "))
                });
            }
        }
    }
    Ok(t.done())
}

fn subsidy_monotone_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut t = Tally::new("subsidy-monotone");
    let res = opts.grid.unwrap_or(21);
    let solver = FirmSolver::default();
    for alpha in CERT_ALPHAS {
        let c = constants(alpha, opts.v_bar)?;
        let mut subsidies = vec![0.0, c.s_alpha, 0.5 * (c.s_alpha + c.r_alpha), c.r_alpha];
        subsidies.dedup();
        for w in subsidies.windows(2) {
            let (lo, hi) = (Policy::cap_subsidy(c.k_alpha, w[0])?, Policy::cap_subsidy(c.k_alpha, w[1])?);
            let lib = adversary::proof_library(&lo, &c, res)?;
            let qmax = |pol: &Policy, m: &Market| {
                solver
                    .best_responses(pol, m, alpha, TieBreak::All)
                    .iter()
                    .map(|o| o.q)
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            let pairs: Vec<(f64, f64)> = lib
                .par_iter()
                .map(|x| (qmax(&lo, &x.market), qmax(&hi, &x.market)))
                .collect();
            for (x, (a, b)) in lib.iter().zip(pairs) {
                t.check(b - a + 1e-9, || {
                    format!("alpha={alpha} s {}->{} {} {:?}: max quantity {a} -> {b}", w[0], w[1], x.label, x.params)
                });
            }
        }
    }
    Ok(t.done())
}

/// A market whose every kink, under the oracle policies, sits on the lattice
/// `i / (n - 1)` in both quantity and price (with `v_bar = 1`).
pub struct OracleCase {
    pub breaks: Vec<f64>,
    pub heights: Vec<f64>,
    pub fixed: f64,
    /// `(threshold, jump)` of a two-tier cost, if any.
    pub tier: Option<(f64, f64)>,
    pub market: Market,
}

/// Policies the lattice cases are built for: cap `1/2`, subsidy `1/10`, lump sum
/// `1/5` from `q = 1/2`.
pub fn oracle_policies() -> Vec<Policy> {
    vec![
        Policy::LaissezFaire,
        Policy::PriceCap { k: 0.5 },
        Policy::LumpSum { q_tilde: 0.5, s: 0.2 },
        Policy::OptimalCapSubsidy { k: 0.5, s: 0.1 },
    ]
}

pub fn oracle_case<R: Rng>(rng: &mut R, n: usize) -> Result<OracleCase> {
    let cells = n - 1;
    if cells % 10 != 0 {
        return Err(Error::Domain {
            what: "lattice",
            value: n as f64,
            domain: "1 + multiple of 10",
        });
    }
    let cap = cells / 2;
    // The top-up budget 0.1 meets price k - m/cells at q = (0.1 cells^2 / m) / cells,
    // a lattice point when m divides 0.1 cells^2 (or beyond q = 1 when m is small).
    let budget = cells * cells / 10;
    let allowed: Vec<usize> = (1..=cap)
        .filter(|&m| m * cells < budget || budget % m == 0)
        .collect();
    let steps = rng.gen_range(1..=6usize);
    let mut heights: Vec<f64> = (0..steps)
        .map(|_| {
            let idx = if rng.gen_bool(0.4) {
                rng.gen_range(cap + 1..=cells)
            } else {
                cap - allowed[rng.gen_range(0..allowed.len())]
            };
            idx as f64 / cells as f64
        })
        .collect();
    heights.sort_by(|a, b| b.total_cmp(a));
    let mut cut_idx: Vec<usize> = Vec::new();
    while cut_idx.len() + 1 < steps {
        let c = rng.gen_range(1..cells);
        if !cut_idx.contains(&c) {
            cut_idx.push(c);
        }
    }
    cut_idx.sort_unstable();
    let breaks: Vec<f64> = cut_idx.iter().map(|&c| c as f64 / cells as f64).collect();
    let fixed = rng.gen_range(0.0..0.5);
    let tier = if rng.gen_bool(0.5) {
        Some((rng.gen_range(1..cells) as f64 / cells as f64, rng.gen_range(0.0..0.5)))
    } else {
        None
    };
    let demand = PiecewiseFn::step_demand(&breaks, &heights)?;
    let cost = match tier {
        None => PiecewiseFn::fixed_cost(fixed)?,
        Some((th, jump)) => {
            let base = PiecewiseFn::two_tier_cost(th, jump)?;
            PiecewiseFn::new(crate::market::Role::Cost, base.segments().to_vec(), fixed)?
        }
    };
    let market = Market::new(demand, cost, 1.0)?;
    Ok(OracleCase {
        breaks,
        heights,
        fixed,
        tier,
        market,
    })
}

/// Best profit over every lattice point `(i, j) / (n - 1)` with `p <= V(q)`.
/// Evaluates demand and cost from the case description, not from the market.
pub fn oracle_best_profit(case: &OracleCase, pol: &Policy, n: usize) -> f64 {
    let cells = (n - 1) as f64;
    let demand = |q: f64| {
        let i = case.breaks.partition_point(|&b| b < q);
        case.heights[i]
    };
    let cost = |q: f64| {
        if q == 0.0 {
            0.0
        } else {
            case.fixed + case.tier.map_or(0.0, |(th, jump)| if q > th { jump } else { 0.0 })
        }
    };
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        let q = i as f64 / cells;
        let top = demand(q);
        let c = cost(q);
        for j in 0..n {
            let p = j as f64 / cells;
            if p > top {
                break;
            }
            if let Revenue::Amount(r) = pol.revenue_at(q, p) {
                best = best.max(r - c);
            }
        }
    }
    best
}

fn firm_oracle_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut t = Tally::new("firm-oracle");
    let n = opts.grid.unwrap_or(4001);
    let count = opts.count.unwrap_or(200);
    let mut rng = random::rng(opts.seed);
    let cases: Vec<OracleCase> = (0..count)
        .map(|_| oracle_case(&mut rng, n))
        .collect::<Result<_>>()?;
    let policies = oracle_policies();
    let solver = FirmSolver::default();
    let gaps: Vec<Vec<(f64, f64)>> = cases
        .par_iter()
        .map(|case| {
            policies
                .iter()
                .map(|pol| (solver.best_profit(pol, &case.market), oracle_best_profit(case, pol, n)))
                .collect()
        })
        .collect();
    for (i, row) in gaps.into_iter().enumerate() {
        for (pol, (solver_best, oracle)) in policies.iter().zip(row) {
            t.check(1e-6 - (solver_best - oracle).abs(), || {
                format!("case #{i} {}: solver {solver_best} vs oracle {oracle}", pol.id())
            });
        }
    }
    Ok(t.done())
}

/// Rules checked against the universal lower bound, optimal rule included.
pub fn lower_bound_policies(c: &AlphaConstants) -> Result<Vec<Policy>> {
    let v = c.v_bar;
    let d = CONVERSE_DELTA * v;
    let mut out = vec![
        Policy::LaissezFaire,
        Policy::price_cap(0.3 * v)?,
        Policy::price_cap(0.7 * v)?,
        Policy::lump_sum(0.5, 0.2 * v)?,
        optimal_policy(c, c.s_alpha)?,
        Policy::cap_subsidy(c.k_alpha + d, c.s_alpha)?,
        Policy::cap_subsidy(c.k_alpha - d, c.s_alpha)?,
        Policy::cap_subsidy(c.k_alpha, c.r_alpha + d)?,
    ];
    if c.s_alpha >= d {
        out.push(Policy::cap_subsidy(c.k_alpha, c.s_alpha - d)?);
    }
    Ok(out)
}

fn lower_bound_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut t = Tally::new("lower-bound");
    let res = opts.grid.unwrap_or(adversary::DEFAULT_RESOLUTION);
    for alpha in [0.0, 0.75] {
        let c = constants(alpha, opts.v_bar)?;
        for pol in lower_bound_policies(&c)? {
            let rep = certify_lower_bound(&pol, &c, res)?;
            t.check(rep.lower_bound.regret - (c.r_alpha - LOWER_TOL * c.v_bar), || {
                format!("alpha={alpha} {}: lower bound {}", pol.id(), rep.lower_bound.regret)
            });
        }
    }
    Ok(t.done())
}

fn optimality_suite(opts: &SuiteOptions) -> Result<SuiteReport> {
    let mut t = Tally::new("optimality");
    let res = opts.grid.unwrap_or(adversary::DEFAULT_RESOLUTION);
    let count = opts.count.unwrap_or(1000);
    for alpha in CERT_ALPHAS {
        let c = constants(alpha, opts.v_bar)?;
        for s in [c.s_alpha, c.r_alpha] {
            let pol = optimal_policy(&c, s)?;
            let rep = certify(&pol, &c, &SearchConfig::with_resolution(res), count, opts.seed)?;
            t.check(rep.lower_bound.regret - (c.r_alpha - LOWER_TOL * c.v_bar), || {
                format!("alpha={alpha} s={s}: lower bound {}", rep.lower_bound.regret)
            });
            t.check(c.r_alpha + UPPER_TOL * c.v_bar - rep.upper_sweep.regret, || {
                format!("alpha={alpha} s={s}: sweep {}", rep.upper_sweep.regret)
            });
        }
    }
    Ok(t.done())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_input_error() {
        assert!(matches!(run("nope", &SuiteOptions::default()), Err(Error::Input { .. })));
    }

    #[test]
    fn oracle_cases_stay_on_the_lattice() {
        let mut rng = random::rng(1);
        for _ in 0..50 {
            let case = oracle_case(&mut rng, 101).unwrap();
            for h in &case.heights {
                assert!((h * 100.0 - (h * 100.0).round()).abs() < 1e-9);
            }
        }
    }
}

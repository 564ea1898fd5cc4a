//! Closed-form constants of the optimal regulation, the numerical maximin that
//! re-derives them, and checks of the surrounding inequalities.

use crate::error::{check_unit, Error, Result};
use crate::firm::{FirmSolver, TieBreak};
use crate::market::{Market, OPT_GRID};
use crate::numeric::{golden_max, linspace, maximize_interval};
use crate::policy::{Policy, Revenue};

/// Constants of the optimal policy for a profit weight `alpha`.
///
/// `k_alpha` is the per-unit price cap, `r_alpha` the minimax regret, `q_alpha` the
/// quantity at which the lower bound is attained and `s_alpha` the least subsidy
/// cap an optimal policy must offer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaConstants {
    pub alpha: f64,
    pub v_bar: f64,
    pub k_alpha: f64,
    pub r_alpha: f64,
    pub q_alpha: f64,
    pub s_alpha: f64,
}

impl AlphaConstants {
    pub fn new(alpha: f64, v_bar: f64) -> Result<Self> {
        check_unit("alpha", alpha)?;
        if !(v_bar.is_finite() && v_bar > 0.0) {
            return Err(Error::Domain {
                what: "v_bar",
                value: v_bar,
                domain: "(0, inf)",
            });
        }
        let k_alpha = v_bar / (2.0 - alpha);
        let (r_alpha, q_alpha, s_alpha) = if alpha <= 0.5 {
            (
                v_bar * (1.0 - alpha) / (2.0 - alpha),
                1.0,
                v_bar * alpha / (2.0 - alpha),
            )
        } else {
            let root = (alpha * (alpha + 4.0)).sqrt();
            let q = (1.0 - 0.5 * (alpha + root)).exp();
            let r = v_bar * (2.0 + alpha - root) * q / (2.0 * (2.0 - alpha));
            (r, q, r)
        };
        Ok(AlphaConstants {
            alpha,
            v_bar,
            k_alpha,
            r_alpha,
            q_alpha,
            s_alpha,
        })
    }
}

/// Free-function form of [`AlphaConstants::new`].
pub fn constants(alpha: f64, v_bar: f64) -> Result<AlphaConstants> {
    AlphaConstants::new(alpha, v_bar)
}

/// `q ln q`, continuously extended by 0 at `q = 0`.
#[inline]
pub fn q_log_q(q: f64) -> f64 {
    if q <= 0.0 {
        0.0
    } else {
        q * q.ln()
    }
}

/// The two regret branches of the lower bound at `(q, p)`: underproduction
/// `(1 - alpha) q k - q p ln q` and overproduction `q (k - p)`.
#[inline]
pub fn maximin_branches(alpha: f64, k: f64, q: f64, p: f64) -> (f64, f64) {
    let under = (1.0 - alpha) * q * k - p * q_log_q(q);
    let over = q * (k - p);
    (under, over)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaximinSolution {
    pub value: f64,
    pub q: f64,
    pub p: f64,
}

/// Numerical maximin `max_{q, p <= k} min(under, over)` by nested grid scans with
/// golden-section polish on each axis. Uses no closed form for the optimum.
pub fn r_alpha_numeric(alpha: f64, v_bar: f64, grid: usize) -> Result<MaximinSolution> {
    check_unit("alpha", alpha)?;
    if grid < 101 {
        return Err(Error::Domain {
            what: "grid",
            value: grid as f64,
            domain: "[101, inf)",
        });
    }
    let k = v_bar / (2.0 - alpha);
    let objective = |q: f64, p: f64| {
        let (a, b) = maximin_branches(alpha, k, q, p);
        a.min(b)
    };
    // For fixed q the objective is the min of a rising and a falling line in p.
    let inner = |q: f64| -> (f64, f64) {
        let h = k / (grid - 1) as f64;
        let mut best = (0.0, f64::NEG_INFINITY);
        for p in linspace(0.0, k, grid) {
            let v = objective(q, p);
            if v > best.1 {
                best = (p, v);
            }
        }
        let (lo, hi) = ((best.0 - h).max(0.0), (best.0 + h).min(k));
        let polished = golden_max(|p| objective(q, p), lo, hi, 1e-14);
        if polished.1 > best.1 {
            polished
        } else {
            best
        }
    };
    let mut best = MaximinSolution {
        value: f64::NEG_INFINITY,
        q: 0.0,
        p: 0.0,
    };
    for q in linspace(0.0, 1.0, grid) {
        let (p, v) = inner(q);
        if v > best.value {
            best = MaximinSolution { value: v, q, p };
        }
    }
    let h = 1.0 / (grid - 1) as f64;
    let (lo, hi) = ((best.q - h).max(0.0), (best.q + h).min(1.0));
    let (q, v) = golden_max(|q| inner(q).1, lo, hi, 1e-13);
    if v > best.value {
        let (p, v) = inner(q);
        best = MaximinSolution { value: v, q, p };
    }
    Ok(best)
}

/// Least decreasing majorant of `-q ln q`.
pub fn phi(q: f64) -> f64 {
    if q < (-1.0f64).exp() {
        (-1.0f64).exp()
    } else {
        -q_log_q(q)
    }
}

/// Worst-case regret of `pol` on `m`, ties broken against the regulator.
pub fn policy_regret(pol: &Policy, m: &Market, alpha: f64) -> f64 {
    FirmSolver::default().regret(pol, m, alpha)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurplusBoundReport {
    /// Largest additional surplus from producing beyond `q_bar`.
    pub lhs: f64,
    /// Largest additional profit at prices capped by `p_bar`, plus `phi(q_bar) p_bar`.
    pub rhs: f64,
    pub holds: bool,
}

/// Checks the bound on the surplus an unregulated firm can leave on the table
/// beyond `q_bar` when nothing past `q_bar` is worth more than `p_bar` and
/// `V(q_bar) >= p_bar` (the second condition is vacuous at `q_bar = 0`).
pub fn surplus_bound_check(m: &Market, q_bar: f64, p_bar: f64) -> Result<SurplusBoundReport> {
    check_unit("q_bar", q_bar)?;
    let v_bar = m.v_bar();
    if q_bar < 1.0 {
        let sup = m.demand().sup_right_of(q_bar);
        if sup > p_bar + 1e-12 * v_bar {
            return Err(Error::Precondition {
                z: q_bar,
                value: sup,
                p_bar,
            });
        }
    }
    // The units already sold must fetch p_bar.
    if q_bar > 0.0 {
        let at = m.demand().at(q_bar);
        if at < p_bar - 1e-12 * v_bar {
            return Err(Error::Precondition {
                z: q_bar,
                value: at,
                p_bar,
            });
        }
    }
    let demand = m.demand();
    let cost_bar = m.cost().at(q_bar);
    let value_bar = demand.integral_to(q_bar);
    let pieces = m.breakpoints();

    let mut cands = pieces.clone();
    cands.extend(m.stationary_points());
    let (_, opt_tail) = maximize_interval(
        |q| demand.integral_to(q) - value_bar - (m.cost().at(q) - cost_bar),
        q_bar,
        1.0,
        &cands,
        &pieces,
        OPT_GRID,
    );

    let mut cands = pieces.clone();
    for d in demand.segments() {
        cands.extend(d.revenue_line_crossings(p_bar, 0.0));
    }
    let fp_pieces = {
        let mut v = cands.clone();
        v.sort_by(f64::total_cmp);
        v
    };
    cands.extend(revenue_stationary_points(m));
    let (_, fp_tail) = maximize_interval(
        |q| q * p_bar.min(demand.at(q)) - q_bar * p_bar - (m.cost().at(q) - cost_bar),
        q_bar,
        1.0,
        &cands,
        &fp_pieces,
        OPT_GRID,
    );
    let rhs = fp_tail + phi(q_bar) * p_bar;
    Ok(SurplusBoundReport {
        lhs: opt_tail,
        rhs,
        holds: opt_tail <= rhs + 1e-8 * v_bar,
    })
}

/// Interior points where `d/dz [z V(z)] = C'(z)` on linear demand stretches.
fn revenue_stationary_points(m: &Market) -> Vec<f64> {
    use crate::market::SegmentKind;
    let mut out = Vec::new();
    for d in m.demand().segments() {
        if let SegmentKind::Linear { intercept, slope } = d.kind {
            for c in m.cost().segments() {
                let (lo, hi) = (d.lo.max(c.lo), d.hi.min(c.hi));
                if lo < hi && slope != 0.0 {
                    let z = (c.slope(0.5 * (lo + hi)) - intercept) / (2.0 * slope);
                    if z > lo && z < hi {
                        out.push(z);
                    }
                }
            }
        }
    }
    out
}

/// Lower bound on an unregulated firm's profit: every laissez-faire best response
/// earns at least `OPT - v_bar / e`. Returns the smallest slack seen.
pub fn profit_floor_slack(m: &Market) -> f64 {
    let opt = m.opt().value;
    FirmSolver::default()
        .best_responses(&Policy::LaissezFaire, m, 1.0, TieBreak::All)
        .iter()
        .map(|o| o.fp - (opt - m.v_bar() / std::f64::consts::E))
        .fold(f64::INFINITY, f64::min)
}

/// Complete-information policy: pay `C(q*)` at `(q*, V(q*))` and nothing elsewhere.
pub fn complete_information_policy(m: &Market) -> Result<Policy> {
    let star = m.opt();
    let p = m.demand().at(star.q_star);
    Policy::spike(Policy::price_cap(0.0)?, star.q_star, p, m.cost().at(star.q_star))
}

/// Regret of the complete-information policy, ties broken for the regulator.
pub fn full_information_regret(m: &Market, alpha: f64) -> Result<f64> {
    let pol = complete_information_policy(m)?;
    let br = FirmSolver::default().best_responses(&pol, m, alpha, TieBreak::ForRegulator);
    Ok(br.first().map(|o| o.rgrt).unwrap_or(f64::INFINITY))
}

/// One of the three properties every optimal policy shares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyCheck {
    pub holds: bool,
    /// For bounds: the worst violation point. For the subsidy property: the best
    /// subsidy point found. `(q, p, revenue)`.
    pub witness: Option<(f64, f64, f64)>,
    /// Signed slack of the extreme point: non-negative when the property holds.
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NecessaryConditions {
    /// `rho(q, p) <= q k_alpha` for all `q <= q_alpha`.
    pub price_cap: PropertyCheck,
    /// Some `(q, p)` earns a subsidy of at least `s_alpha`.
    pub subsidy: PropertyCheck,
    /// No `(q, p)` earns a subsidy above `r_alpha`.
    pub subsidy_cap: PropertyCheck,
}

impl NecessaryConditions {
    pub fn all_hold(&self) -> bool {
        self.price_cap.holds && self.subsidy.holds && self.subsidy_cap.holds
    }
}

/// Audits the three properties on a `grid x grid` lattice of `[0, 1] x [0, v_bar]`,
/// augmented with the policy's own kinks.
pub fn necessary_conditions(pol: &Policy, consts: &AlphaConstants, grid: usize) -> NecessaryConditions {
    let tol = 1e-9 * consts.v_bar;
    let mut qs: Vec<f64> = linspace(0.0, 1.0, grid).collect();
    qs.extend(pol.q_kinks().into_iter().filter(|q| (0.0..=1.0).contains(q)));
    qs.push(consts.q_alpha);
    let mut ps: Vec<f64> = linspace(0.0, consts.v_bar, grid).collect();
    ps.extend(
        pol.price_levels()
            .into_iter()
            .filter(|p| (0.0..=consts.v_bar).contains(p)),
    );

    let mut cap = (f64::INFINITY, None);
    let mut subsidy = (f64::NEG_INFINITY, None);
    let mut subsidy_cap = (f64::INFINITY, None);
    for &q in &qs {
        for &p in &ps {
            let Revenue::Amount(rev) = pol.revenue_at(q, p) else {
                continue;
            };
            if q <= consts.q_alpha {
                let slack = q * consts.k_alpha - rev;
                if slack < cap.0 {
                    cap = (slack, Some((q, p, rev)));
                }
            }
            let topup = rev - q * p;
            if topup > subsidy.0 {
                subsidy = (topup, Some((q, p, rev)));
            }
            let slack = consts.r_alpha - topup;
            if slack < subsidy_cap.0 {
                subsidy_cap = (slack, Some((q, p, rev)));
            }
        }
    }
    let check = |margin: f64, witness| PropertyCheck {
        holds: margin >= -tol,
        witness,
        margin,
    };
    NecessaryConditions {
        price_cap: check(cap.0, cap.1),
        subsidy: check(subsidy.0 - consts.s_alpha, subsidy.1),
        subsidy_cap: check(subsidy_cap.0, subsidy_cap.1),
    }
}

/// One row of the constants table: closed forms next to the numerical maximin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantsRow {
    pub consts: AlphaConstants,
    pub r_numeric: f64,
    pub gap: f64,
}

pub fn constants_row(alpha: f64, v_bar: f64, grid: usize) -> Result<ConstantsRow> {
    let consts = AlphaConstants::new(alpha, v_bar)?;
    let num = r_alpha_numeric(alpha, v_bar, grid)?;
    Ok(ConstantsRow {
        consts,
        r_numeric: num.value,
        gap: (num.value - consts.r_alpha).abs(),
    })
}

//! The firm's problem: maximize `rho(q, p) - C(q)` over feasible `(q, p)`, i.e.
//! `p <= V(q)`, keeping every choice within the tie tolerance of the maximum.

use crate::error::{check_unit, Error, Result};
use crate::market::{Market, SegmentKind, OPT_GRID};
use crate::numeric::{golden_max, linspace};
use crate::policy::{Policy, Revenue};

/// Profit gap, relative to `v_bar`, under which two choices count as tied.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Worst regret first: the firm breaks ties against the regulator.
    #[default]
    AgainstRegulator,
    /// Least regret first.
    ForRegulator,
    /// Every tied choice in `(q, p)` order.
    All,
}

/// A firm choice with the welfare accounting around it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome {
    pub q: f64,
    pub p: f64,
    /// Total revenue `rho(q, p)` the firm receives.
    pub revenue: f64,
    pub fp: f64,
    pub cs: f64,
    pub dstr: f64,
    pub rgrt: f64,
    pub opt: f64,
}

/// Knobs of the candidate search. The defaults are the reference settings; the
/// adversary uses a lighter configuration for bulk scans and re-checks witnesses
/// with the defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirmSolver {
    /// Uniform grid in `q` on top of the exact candidates (0 disables it).
    pub grid: usize,
    /// Price grid scanned at every candidate quantity for non-monotone rules.
    pub price_grid: usize,
    /// Fallback grid for the social optimum (0 = exact candidates only).
    pub opt_grid: usize,
}

impl Default for FirmSolver {
    fn default() -> Self {
        FirmSolver {
            grid: 2001,
            price_grid: 201,
            opt_grid: OPT_GRID,
        }
    }
}

impl FirmSolver {
    /// Exact candidates only; complete for built-in rules on analytic markets.
    pub fn exact() -> Self {
        FirmSolver {
            grid: 0,
            price_grid: 201,
            opt_grid: 0,
        }
    }

    pub fn best_responses(
        &self,
        pol: &Policy,
        m: &Market,
        alpha: f64,
        tie: TieBreak,
    ) -> Vec<Outcome> {
        let opt = m.opt_with_grid(self.opt_grid).value;
        let choices = self.tied_choices(pol, m);
        let mut out: Vec<Outcome> = choices
            .into_iter()
            .map(|(q, p, rev)| outcome_parts(m, alpha, q, p, rev, opt))
            .collect();
        let lex = |a: &Outcome, b: &Outcome| a.q.total_cmp(&b.q).then(a.p.total_cmp(&b.p));
        match tie {
            TieBreak::AgainstRegulator => {
                out.sort_by(|a, b| b.rgrt.total_cmp(&a.rgrt).then_with(|| lex(a, b)))
            }
            TieBreak::ForRegulator => {
                out.sort_by(|a, b| a.rgrt.total_cmp(&b.rgrt).then_with(|| lex(a, b)))
            }
            TieBreak::All => out.sort_by(lex),
        }
        out
    }

    /// Regret of the market under the policy when ties go against the regulator.
    pub fn regret(&self, pol: &Policy, m: &Market, alpha: f64) -> f64 {
        let opt = m.opt_with_grid(self.opt_grid).value;
        self.tied_choices(pol, m)
            .into_iter()
            .map(|(q, p, rev)| outcome_parts(m, alpha, q, p, rev, opt).rgrt)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Best profit over all feasible choices.
    pub fn best_profit(&self, pol: &Policy, m: &Market) -> f64 {
        let (_, best) = self.scan(pol, m);
        best
    }

    /// `(q, p, revenue)` of every choice within the tie tolerance of the best profit.
    fn tied_choices(&self, pol: &Policy, m: &Market) -> Vec<(f64, f64, f64)> {
        let (evaluated, best) = self.scan(pol, m);
        let tol = TIE_TOL * m.v_bar();
        let mut kept: Vec<(i64, i64, f64, f64, f64, f64)> = evaluated
            .into_iter()
            .filter(|c| c.3 >= best - tol)
            .map(|(q, p, rev, profit)| {
                ((q * 1e9).round() as i64, (p * 1e9).round() as i64, q, p, rev, profit)
            })
            .collect();
        kept.sort_by(|a, b| {
            (a.0, a.1)
                .cmp(&(b.0, b.1))
                .then(b.5.total_cmp(&a.5))
        });
        kept.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
        kept.into_iter().map(|c| (c.2, c.3, c.4)).collect()
    }

    /// Evaluates every candidate; returns `(q, p, revenue, profit)` rows and the best profit.
    fn scan(&self, pol: &Policy, m: &Market) -> (Vec<(f64, f64, f64, f64)>, f64) {
        let exact = exact_quantities(pol, m);
        let price_grid = if pol.needs_price_grid() { self.price_grid } else { 0 };
        let mut rows = Vec::with_capacity(8 * (exact.len() + self.grid + 8));
        let mut best = f64::NEG_INFINITY;
        let push_q = |q: f64, rows: &mut Vec<(f64, f64, f64, f64)>| -> f64 {
            let mut local = f64::NEG_INFINITY;
            for_each_choice(pol, m, q, price_grid, |p, rev, profit| {
                rows.push((q, p, rev, profit));
                local = local.max(profit);
            });
            local
        };
        for &q in &exact {
            best = best.max(push_q(q, &mut rows));
        }
        if self.grid >= 2 {
            let mut gbest = (0.0, f64::NEG_INFINITY);
            for q in linspace(0.0, 1.0, self.grid) {
                let v = push_q(q, &mut rows);
                if v > gbest.1 {
                    gbest = (q, v);
                }
            }
            best = best.max(gbest.1);
            // polish inside the smooth stretch around the best grid point
            let h = 1.0 / (self.grid - 1) as f64;
            let lo = exact
                .iter()
                .copied()
                .filter(|&x| x < gbest.0)
                .fold((gbest.0 - h).max(0.0), f64::max);
            let hi = exact
                .iter()
                .copied()
                .filter(|&x| x > gbest.0)
                .fold((gbest.0 + h).min(1.0), f64::min);
            let span = hi - lo;
            if span > 0.0 {
                let profit_at = |q: f64| {
                    let mut v = f64::NEG_INFINITY;
                    for_each_choice(pol, m, q, price_grid, |_, _, profit| v = v.max(profit));
                    v
                };
                let (q, _) = golden_max(profit_at, lo + span * 1e-12, hi - span * 1e-12, 1e-12);
                best = best.max(push_q(q, &mut rows));
            }
        }
        (rows, best)
    }
}

/// Calls `f(p, revenue, profit)` for each candidate price at quantity `q`.
#[inline]
fn for_each_choice(
    pol: &Policy,
    m: &Market,
    q: f64,
    price_grid: usize,
    mut f: impl FnMut(f64, f64, f64),
) {
    let demand = m.demand();
    let top = demand.at(q);
    let cost = m.cost().at(q);
    let mut visit = |p: f64| {
        if p >= 0.0 && p <= top {
            if let Revenue::Amount(rev) = pol.revenue_at(q, p) {
                f(p, rev, rev - cost);
            }
        }
    };
    visit(top);
    if q < 1.0 {
        let right = demand.right_limit(q);
        if right < top {
            visit(right);
        }
    }
    for p in pol.price_kinks_at(q) {
        if p < top {
            visit(p);
        }
    }
    visit(0.0);
    if price_grid >= 2 {
        for p in linspace(0.0, top, price_grid) {
            visit(p);
        }
    }
}

/// Quantities where the profit along any candidate price path can peak: all
/// breakpoints and policy kinks, stationary points of market revenue net of cost,
/// and the crossings with the policy's price levels and subsidy budgets.
fn exact_quantities(pol: &Policy, m: &Market) -> Vec<f64> {
    let mut qs = m.breakpoints();
    qs.extend(pol.q_kinks());
    let levels = pol.price_levels();
    let lines = pol.subsidy_lines();
    for d in m.demand().segments() {
        for c in m.cost().segments() {
            let (lo, hi) = (d.lo.max(c.lo), d.hi.min(c.hi));
            if lo >= hi {
                continue;
            }
            // d/dz [z V(z)] = C'(z)
            if let SegmentKind::Linear { intercept, slope } = d.kind {
                if slope != 0.0 {
                    let mc = c.slope(0.5 * (lo + hi));
                    let z = (mc - intercept) / (2.0 * slope);
                    if z > lo && z < hi {
                        qs.push(z);
                    }
                }
            }
        }
        for &level in &levels {
            qs.extend(d.revenue_line_crossings(level, 0.0));
        }
        for &(k, s) in &lines {
            qs.extend(d.revenue_line_crossings(k, -s));
        }
    }
    for &(k, s) in &lines {
        for &level in &levels {
            if k > level {
                qs.push(s / (k - level));
            }
        }
    }
    qs.retain(|q| (0.0..=1.0).contains(q));
    qs.sort_by(f64::total_cmp);
    qs.dedup();
    qs
}

fn outcome_parts(m: &Market, alpha: f64, q: f64, p: f64, revenue: f64, opt: f64) -> Outcome {
    let value = m.demand().integral_to(q);
    let cost = m.cost().at(q);
    let fp = revenue - cost;
    let dstr = (opt - (value - cost)).max(0.0);
    Outcome {
        q,
        p,
        revenue,
        fp,
        cs: value - revenue,
        dstr,
        rgrt: dstr + (1.0 - alpha) * fp,
        opt,
    }
}

/// Best responses with the reference solver settings.
pub fn best_responses(pol: &Policy, m: &Market, alpha: f64, tie: TieBreak) -> Vec<Outcome> {
    FirmSolver::default().best_responses(pol, m, alpha, tie)
}

/// Welfare accounting of a specific feasible choice.
pub fn outcome(pol: &Policy, m: &Market, alpha: f64, q: f64, p: f64) -> Result<Outcome> {
    check_unit("alpha", alpha)?;
    check_unit("q", q)?;
    let top = m.demand().at(q);
    if !(p >= 0.0) || p > top + m.tol() {
        return Err(Error::Infeasible {
            q,
            p,
            reason: format!("price exceeds V(q) = {top}"),
        });
    }
    match pol.revenue_at(q, p) {
        Revenue::Amount(rev) => Ok(outcome_parts(m, alpha, q, p, rev, m.opt().value)),
        Revenue::Rejected => Err(Error::Infeasible {
            q,
            p,
            reason: "rejected by the policy".into(),
        }),
    }
}

//! Regulatory revenue rules `rho(q, p)`.
//!
//! A policy maps a quantity and a price to the firm's total revenue, including
//! any tax or subsidy on top of the market revenue `q p`. Built-in rules have
//! closed forms for the two derived maxima used by the lower-bound arguments:
//! `rho_bar(q)`, the best revenue from selling `q` units or fewer, and
//! `rho_hat(q, p)`, the best revenue from selling at least `q` units while the
//! market revenue stays at most `q p`.

use crate::analysis::AlphaConstants;
use crate::error::{check_unit, Error, Result};
use crate::numeric::EPS;

/// Outcome of evaluating a policy: a revenue, or a choice the policy forbids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Revenue {
    Amount(f64),
    Rejected,
}

impl Revenue {
    pub fn amount(self) -> Option<f64> {
        match self {
            Revenue::Amount(v) => Some(v),
            Revenue::Rejected => None,
        }
    }
}

/// A maximum together with the `(q, p)` that attains it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attained {
    pub value: f64,
    pub q: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    /// `rho = q p`.
    LaissezFaire,
    /// `rho = min(q p, q k)`: anything above `k` per unit is taxed away.
    PriceCap { k: f64 },
    /// `rho = q p`, plus `s` once `q >= q_tilde`.
    LumpSum { q_tilde: f64, s: f64 },
    /// `rho = min(q k, q p + s)`: per-unit top-up to `k`, total top-up capped at `s`.
    OptimalCapSubsidy { k: f64, s: f64 },
    /// `inner`, except that prices above `k` are rejected outright.
    HardCap { inner: Box<Policy>, k: f64 },
    /// `inner`, with the revenue at the single point `(q, p)` raised to `revenue`.
    Spike {
        inner: Box<Policy>,
        q: f64,
        p: f64,
        revenue: f64,
    },
    Table(TablePolicy),
}

impl Policy {
    pub fn price_cap(k: f64) -> Result<Self> {
        non_negative("k", k)?;
        Ok(Policy::PriceCap { k })
    }

    pub fn lump_sum(q_tilde: f64, s: f64) -> Result<Self> {
        check_unit("q_tilde", q_tilde)?;
        non_negative("s", s)?;
        Ok(Policy::LumpSum { q_tilde, s })
    }

    pub fn cap_subsidy(k: f64, s: f64) -> Result<Self> {
        non_negative("k", k)?;
        non_negative("s", s)?;
        Ok(Policy::OptimalCapSubsidy { k, s })
    }

    pub fn hard_cap(inner: Policy, k: f64) -> Result<Self> {
        non_negative("k", k)?;
        Ok(Policy::HardCap {
            inner: Box::new(inner),
            k,
        })
    }

    /// Raising a single point keeps the rule upper semicontinuous, so `revenue` must
    /// not be below the inner rule there.
    pub fn spike(inner: Policy, q: f64, p: f64, revenue: f64) -> Result<Self> {
        check_unit("q", q)?;
        non_negative("p", p)?;
        if let Revenue::Amount(base) = inner.revenue_at(q, p) {
            if revenue < base {
                return Err(Error::InvalidPolicy(format!(
                    "spike revenue {revenue} at ({q}, {p}) is below the inner rule's {base}"
                )));
            }
        }
        Ok(Policy::Spike {
            inner: Box::new(inner),
            q,
            p,
            revenue,
        })
    }

    /// Short identifier used in reports.
    pub fn id(&self) -> String {
        match self {
            Policy::LaissezFaire => "laissez-faire".into(),
            Policy::PriceCap { k } => format!("price-cap(k={k})"),
            Policy::LumpSum { q_tilde, s } => format!("lump-sum(q~={q_tilde},s={s})"),
            Policy::OptimalCapSubsidy { k, s } => format!("cap-subsidy(k={k},s={s})"),
            Policy::HardCap { inner, k } => format!("hard-cap(k={k},{})", inner.id()),
            Policy::Spike { inner, q, p, revenue } => {
                format!("spike(q={q},p={p},rho={revenue},{})", inner.id())
            }
            Policy::Table(t) => format!("table({}x{})", t.qs.len(), t.ps.len()),
        }
    }

    pub fn revenue(&self, q: f64, p: f64) -> Result<Revenue> {
        check_unit("q", q)?;
        non_negative("p", p)?;
        Ok(self.revenue_at(q, p))
    }

    /// [`Self::revenue`] without domain checks.
    #[inline]
    pub fn revenue_at(&self, q: f64, p: f64) -> Revenue {
        match self {
            Policy::LaissezFaire => Revenue::Amount(q * p),
            Policy::PriceCap { k } => Revenue::Amount((q * p).min(q * k)),
            Policy::LumpSum { q_tilde, s } => {
                Revenue::Amount(q * p + if q >= *q_tilde { *s } else { 0.0 })
            }
            Policy::OptimalCapSubsidy { k, s } => Revenue::Amount((q * k).min(q * p + s)),
            Policy::HardCap { inner, k } => {
                if p > *k {
                    Revenue::Rejected
                } else {
                    inner.revenue_at(q, p)
                }
            }
            Policy::Spike {
                inner,
                q: q0,
                p: p0,
                revenue,
            } => {
                if q == *q0 && p == *p0 {
                    Revenue::Amount(*revenue)
                } else {
                    inner.revenue_at(q, p)
                }
            }
            Policy::Table(t) => Revenue::Amount(t.eval(q, p)),
        }
    }

    /// `max { rho(q', p') : q' <= q, p' <= v_bar }` with its maximizer.
    pub fn rho_bar(&self, q: f64, v_bar: f64) -> Result<Attained> {
        check_unit("q", q)?;
        Ok(self.bar(q, v_bar))
    }

    fn bar(&self, q: f64, pmax: f64) -> Attained {
        let at = |value| Attained { value, q, p: pmax };
        match self {
            Policy::LaissezFaire => at(q * pmax),
            Policy::PriceCap { k } => at(q * pmax.min(*k)),
            Policy::LumpSum { q_tilde, s } => {
                at(q * pmax + if q >= *q_tilde { *s } else { 0.0 })
            }
            Policy::OptimalCapSubsidy { k, s } => at((q * k).min(q * pmax + s)),
            Policy::HardCap { inner, k } => inner.bar(q, pmax.min(*k)),
            Policy::Spike {
                inner,
                q: q0,
                p: p0,
                revenue,
            } => {
                let base = inner.bar(q, pmax);
                if *q0 <= q && *p0 <= pmax && *revenue > base.value {
                    Attained {
                        value: *revenue,
                        q: *q0,
                        p: *p0,
                    }
                } else {
                    base
                }
            }
            Policy::Table(t) => t.bar(q, pmax),
        }
    }

    /// `max { rho(q', p') : q' >= q, q' p' <= q p, p' <= v_bar }` with its maximizer.
    pub fn rho_hat(&self, q: f64, p: f64, v_bar: f64) -> Result<Attained> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::Domain {
                what: "q",
                value: q,
                domain: "(0, 1]",
            });
        }
        non_negative("p", p)?;
        Ok(self.hat(q, q * p, v_bar))
    }

    fn hat(&self, q: f64, budget: f64, pmax: f64) -> Attained {
        // Every built-in is nondecreasing in both the market revenue q'p' and q', so
        // selling everything at the largest admissible price is optimal.
        let full = |policy: &Policy| {
            let p = budget.min(pmax);
            Attained {
                value: policy.revenue_at(1.0, p).amount().unwrap_or(f64::NEG_INFINITY),
                q: 1.0,
                p,
            }
        };
        match self {
            Policy::LaissezFaire
            | Policy::PriceCap { .. }
            | Policy::LumpSum { .. }
            | Policy::OptimalCapSubsidy { .. } => full(self),
            Policy::HardCap { inner, k } => inner.hat(q, budget, pmax.min(*k)),
            Policy::Spike {
                inner,
                q: q0,
                p: p0,
                revenue,
            } => {
                let base = inner.hat(q, budget, pmax);
                let fits = *q0 >= q && q0 * p0 <= budget * (1.0 + EPS) + EPS && *p0 <= pmax;
                if fits && *revenue > base.value {
                    Attained {
                        value: *revenue,
                        q: *q0,
                        p: *p0,
                    }
                } else {
                    base
                }
            }
            Policy::Table(t) => t.hat(q, budget, pmax),
        }
    }

    /// Quantities where the rule changes form regardless of price.
    pub fn q_kinks(&self) -> Vec<f64> {
        match self {
            Policy::LumpSum { q_tilde, .. } => vec![*q_tilde],
            Policy::HardCap { inner, .. } => inner.q_kinks(),
            Policy::Spike { inner, q, .. } => {
                let mut v = inner.q_kinks();
                v.push(*q);
                v
            }
            Policy::Table(t) => t.qs.clone(),
            _ => Vec::new(),
        }
    }

    /// Price levels where the rule changes form regardless of quantity.
    pub fn price_levels(&self) -> Vec<f64> {
        match self {
            Policy::PriceCap { k } | Policy::OptimalCapSubsidy { k, .. } => vec![*k],
            Policy::HardCap { inner, k } => {
                let mut v = inner.price_levels();
                v.push(*k);
                v
            }
            Policy::Spike { inner, p, .. } => {
                let mut v = inner.price_levels();
                v.push(*p);
                v
            }
            Policy::Table(t) => t.ps.clone(),
            _ => Vec::new(),
        }
    }

    /// `(k, s)` pairs of capped top-ups: the rule kinks where `q (k - p) = s`.
    pub fn subsidy_lines(&self) -> Vec<(f64, f64)> {
        match self {
            Policy::OptimalCapSubsidy { k, s } => vec![(*k, *s)],
            Policy::HardCap { inner, .. } | Policy::Spike { inner, .. } => inner.subsidy_lines(),
            _ => Vec::new(),
        }
    }

    /// Prices worth trying at quantity `q` besides market clearing.
    pub fn price_kinks_at(&self, q: f64) -> Vec<f64> {
        let mut v = self.price_levels();
        if q > 0.0 {
            for (k, s) in self.subsidy_lines() {
                v.push(k - s / q);
            }
        }
        v
    }

    /// Whether the firm solver should also scan a price grid: true for rules that
    /// are not monotone in price by construction.
    pub fn needs_price_grid(&self) -> bool {
        match self {
            Policy::Table(_) => true,
            Policy::HardCap { inner, .. } | Policy::Spike { inner, .. } => inner.needs_price_grid(),
            _ => false,
        }
    }
}

fn non_negative(what: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what,
            value: v,
            domain: "[0, inf)",
        })
    }
}

/// `min(q k_alpha, q p + s)` for an admissible subsidy cap `s_alpha <= s <= r_alpha`.
pub fn optimal_policy(consts: &AlphaConstants, s: f64) -> Result<Policy> {
    let slack = EPS * consts.v_bar;
    if !(s >= consts.s_alpha - slack) {
        return Err(Error::SubsidyOutOfRange {
            s,
            bound: "lower (s_alpha)",
            limit: consts.s_alpha,
        });
    }
    if !(s <= consts.r_alpha + slack) {
        return Err(Error::SubsidyOutOfRange {
            s,
            bound: "upper (r_alpha)",
            limit: consts.r_alpha,
        });
    }
    Ok(Policy::OptimalCapSubsidy { k: consts.k_alpha, s })
}

/// Revenue sampled on a rectangular `(q, p)` grid and interpolated bilinearly.
///
/// Bilinear interpolation is continuous, hence upper semicontinuous. Prices beyond
/// the last grid column reuse that column. Interpolating an arbitrary rule this way
/// introduces an error of at most pitch times the local Lipschitz constant; see
/// [`TablePolicy::interpolation_error_bound`].
#[derive(Debug, Clone, PartialEq)]
pub struct TablePolicy {
    qs: Vec<f64>,
    ps: Vec<f64>,
    /// Row-major: `values[i * ps.len() + j]` is the revenue at `(qs[i], ps[j])`.
    values: Vec<f64>,
}

impl TablePolicy {
    pub fn new(qs: Vec<f64>, ps: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidPolicy(format!("table: {m}")));
        if qs.len() < 2 || ps.len() < 2 {
            return bad("need at least two quantities and two prices");
        }
        if values.len() != qs.len() * ps.len() {
            return bad("values do not fill the grid");
        }
        if qs[0] != 0.0 || qs[qs.len() - 1] != 1.0 {
            return bad("quantities must span [0, 1]");
        }
        if ps[0] != 0.0 {
            return bad("prices must start at 0");
        }
        if qs.windows(2).any(|w| w[0] >= w[1]) || ps.windows(2).any(|w| w[0] >= w[1]) {
            return bad("grid coordinates must be strictly increasing");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return bad("non-finite revenue");
        }
        if values[0] < 0.0 {
            return bad("revenue at (0, 0) must be non-negative");
        }
        Ok(TablePolicy { qs, ps, values })
    }

    /// Builds a table from `(q, p, revenue)` rows in any order.
    pub fn from_rows(rows: &[(f64, f64, f64)]) -> Result<Self> {
        let mut qs: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut ps: Vec<f64> = rows.iter().map(|r| r.1).collect();
        qs.sort_by(f64::total_cmp);
        qs.dedup();
        ps.sort_by(f64::total_cmp);
        ps.dedup();
        let mut values = vec![f64::NAN; qs.len() * ps.len()];
        for &(q, p, v) in rows {
            let i = qs.partition_point(|&x| x < q);
            let j = ps.partition_point(|&x| x < p);
            values[i * ps.len() + j] = v;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidPolicy("table: rows do not form a full grid".into()));
        }
        Self::new(qs, ps, values)
    }

    /// Samples `policy` on the given grid.
    pub fn sample(policy: &Policy, qs: Vec<f64>, ps: Vec<f64>) -> Result<Self> {
        let mut values = Vec::with_capacity(qs.len() * ps.len());
        for &q in &qs {
            for &p in &ps {
                values.push(policy.revenue_at(q, p).amount().ok_or_else(|| {
                    Error::InvalidPolicy("cannot tabulate a rule that rejects choices".into())
                })?);
            }
        }
        Self::new(qs, ps, values)
    }

    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.qs.iter().enumerate().flat_map(move |(i, &q)| {
            self.ps
                .iter()
                .enumerate()
                .map(move |(j, &p)| (q, p, self.values[i * self.ps.len() + j]))
        })
    }

    #[inline]
    fn node(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ps.len() + j]
    }

    fn cell(axis: &[f64], x: f64) -> usize {
        axis.partition_point(|&a| a <= x).clamp(1, axis.len() - 1) - 1
    }

    pub fn eval(&self, q: f64, p: f64) -> f64 {
        let p = p.min(self.ps[self.ps.len() - 1]);
        let i = Self::cell(&self.qs, q);
        let j = Self::cell(&self.ps, p);
        let tq = (q - self.qs[i]) / (self.qs[i + 1] - self.qs[i]);
        let tp = (p - self.ps[j]) / (self.ps[j + 1] - self.ps[j]);
        let a = self.node(i, j) + tp * (self.node(i, j + 1) - self.node(i, j));
        let b = self.node(i + 1, j) + tp * (self.node(i + 1, j + 1) - self.node(i + 1, j));
        a + tq * (b - a)
    }

    /// Max of a piecewise-bilinear surface over `[0, q] x [0, pmax]`: attained at a
    /// grid node or where a grid line meets the region boundary.
    fn bar(&self, q: f64, pmax: f64) -> Attained {
        let mut qs: Vec<f64> = self.qs.iter().copied().filter(|&x| x <= q).collect();
        qs.push(q);
        let mut ps: Vec<f64> = self.ps.iter().copied().filter(|&x| x <= pmax).collect();
        ps.push(pmax);
        let mut best = Attained {
            value: f64::NEG_INFINITY,
            q: 0.0,
            p: 0.0,
        };
        for &a in &qs {
            for &b in &ps {
                let v = self.eval(a, b);
                if v > best.value {
                    best = Attained { value: v, q: a, p: b };
                }
            }
        }
        best
    }

    /// Max over `{q' >= q, p' <= min(pmax, budget / q')}`. Inside a cell the surface
    /// is linear in `p'` for fixed `q'`, so only the floor price and the ceiling
    /// curve matter; along the hyperbola `p' = budget / q'` it has a closed-form
    /// stationary point.
    fn hat(&self, q: f64, budget: f64, pmax: f64) -> Attained {
        let mut best = Attained {
            value: f64::NEG_INFINITY,
            q,
            p: 0.0,
        };
        let ceiling = |x: f64| pmax.min(budget / x);
        let try_point = |x: f64, y: f64, best: &mut Attained| {
            if x >= q && x <= 1.0 && y >= 0.0 && y <= ceiling(x) * (1.0 + EPS) {
                let v = self.eval(x, y);
                if v > best.value {
                    *best = Attained { value: v, q: x, p: y };
                }
            }
        };
        for i in 0..self.qs.len() - 1 {
            let (qa, qb) = (self.qs[i].max(q), self.qs[i + 1]);
            if qa > qb {
                continue;
            }
            let mut xs = vec![qa, qb];
            for j in 0..self.ps.len() {
                let pj = self.ps[j];
                if pj > 0.0 {
                    xs.push(budget / pj);
                }
            }
            if pmax > 0.0 {
                xs.push(budget / pmax);
            }
            // Stationary point along the hyperbola inside each price band.
            for j in 0..self.ps.len() - 1 {
                let (pa, pb) = (self.ps[j], self.ps[j + 1]);
                let (x0, x1) = (self.qs[i], self.qs[i + 1]);
                // f(x, y) = c0 + c1 x + c2 y + c3 x y in local terms
                let (f00, f01, f10, f11) = (
                    self.node(i, j),
                    self.node(i, j + 1),
                    self.node(i + 1, j),
                    self.node(i + 1, j + 1),
                );
                let (dx, dy) = (x1 - x0, pb - pa);
                let c3 = (f11 - f10 - f01 + f00) / (dx * dy);
                let c1 = (f10 - f00) / dx - c3 * pa;
                let c2 = (f01 - f00) / dy - c3 * x0;
                // along y = budget / x: c1 x + c2 budget / x (+ constants)
                if c1 != 0.0 && c2 * budget / c1 > 0.0 {
                    xs.push((c2 * budget / c1).sqrt());
                }
            }
            for &x in &xs {
                if x < qa || x > qb {
                    continue;
                }
                try_point(x, 0.0, &mut best);
                for &pj in &self.ps {
                    try_point(x, pj, &mut best);
                }
                try_point(x, ceiling(x), &mut best);
            }
        }
        best
    }

    /// Grid pitch times the largest finite-difference slope: an estimate of how far
    /// the interpolated surface can sit from the rule it was sampled from.
    pub fn interpolation_error_bound(&self) -> f64 {
        let mut bound: f64 = 0.0;
        for i in 0..self.qs.len() {
            for j in 0..self.ps.len() {
                if i + 1 < self.qs.len() {
                    let d = (self.node(i + 1, j) - self.node(i, j)).abs();
                    bound = bound.max(d);
                }
                if j + 1 < self.ps.len() {
                    let d = (self.node(i, j + 1) - self.node(i, j)).abs();
                    bound = bound.max(d);
                }
            }
        }
        bound
    }

    pub fn qs(&self) -> &[f64] {
        &self.qs
    }

    pub fn ps(&self) -> &[f64] {
        &self.ps
    }
}

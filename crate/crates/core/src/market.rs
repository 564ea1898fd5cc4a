//! Inverse-demand and cost functions built from analytic segments, and the
//! surplus quantities of a market: total value, social optimum and distortion.
//!
//! Functions are finite lists of segments partitioning `[0, 1]`. At an interior
//! breakpoint the function takes its left limit. For a decreasing demand this makes
//! it upper semicontinuous, and for an increasing cost lower semicontinuous. A cost
//! may carry a jump at zero (a fixed cost) that is charged for every `q > 0`, while
//! `C(0) = 0` always.
//!
//! Arbitrary semicontinuous functions are not representable; every construction the
//! adversary needs (flat steps, hyperbolic tails, affine costs) is.

use crate::error::{check_unit, Error, Result};
use crate::numeric::{maximize_unit, EPS};

/// Grid size of the fallback scan in [`Market::opt`].
pub const OPT_GRID: usize = 4001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentKind {
    Constant(f64),
    /// Value `a / z`.
    Hyperbolic(f64),
    /// Value `intercept + slope * z`.
    Linear { intercept: f64, slope: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub kind: SegmentKind,
}

impl Segment {
    pub fn new(lo: f64, hi: f64, kind: SegmentKind) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidSegment {
            lo,
            hi,
            reason: reason.to_string(),
        };
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || hi > 1.0 {
            return Err(bad("bounds must lie in [0, 1]"));
        }
        if lo >= hi {
            return Err(bad("lo must be strictly below hi"));
        }
        match kind {
            SegmentKind::Constant(c) if !c.is_finite() => Err(bad("non-finite value")),
            SegmentKind::Hyperbolic(a) if !a.is_finite() || a < 0.0 => {
                Err(bad("hyperbolic coefficient must be finite and non-negative"))
            }
            SegmentKind::Hyperbolic(_) if lo <= 0.0 => {
                Err(bad("hyperbolic segment must start strictly above zero"))
            }
            SegmentKind::Linear { intercept, slope } if !(intercept.is_finite() && slope.is_finite()) => {
                Err(bad("non-finite coefficients"))
            }
            _ => Ok(Segment { lo, hi, kind }),
        }
    }

    /// The segment's formula, extended to any `z` (callers keep `z` inside `[lo, hi]`).
    #[inline]
    pub fn value(&self, z: f64) -> f64 {
        match self.kind {
            SegmentKind::Constant(c) => c,
            SegmentKind::Hyperbolic(a) => a / z,
            SegmentKind::Linear { intercept, slope } => intercept + slope * z,
        }
    }

    /// First derivative of the formula; hyperbolic segments are never differentiated
    /// at zero because their `lo` is positive.
    pub fn slope(&self, z: f64) -> f64 {
        match self.kind {
            SegmentKind::Constant(_) => 0.0,
            SegmentKind::Hyperbolic(a) => -a / (z * z),
            SegmentKind::Linear { slope, .. } => slope,
        }
    }

    /// Exact integral of the formula over `[a, b]`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match self.kind {
            SegmentKind::Constant(c) => c * (b - a),
            SegmentKind::Hyperbolic(k) => k * (b / a).ln(),
            SegmentKind::Linear { intercept, slope } => {
                (b - a) * (intercept + 0.5 * slope * (a + b))
            }
        }
    }

    /// Points in `(lo, hi)` where `z * value(z) = k * z + c`.
    ///
    /// With `c = 0` these are the crossings `value(z) = k`; with `c = -s` they are
    /// the points where a per-unit top-up to `k` exhausts a subsidy budget `s`.
    pub fn revenue_line_crossings(&self, k: f64, c: f64) -> Vec<f64> {
        let mut out = Vec::new();
        match self.kind {
            SegmentKind::Constant(v) => {
                if (v - k).abs() > 0.0 {
                    out.push(c / (v - k));
                }
            }
            SegmentKind::Hyperbolic(a) => {
                if k > 0.0 {
                    out.push((a - c) / k);
                }
            }
            SegmentKind::Linear { intercept, slope } => {
                // slope z^2 + (intercept - k) z - c = 0
                let (qa, qb, qc) = (slope, intercept - k, -c);
                if qa == 0.0 {
                    if qb != 0.0 {
                        out.push(-qc / qb);
                    }
                } else {
                    let disc = qb * qb - 4.0 * qa * qc;
                    if disc >= 0.0 {
                        let r = disc.sqrt();
                        out.push((-qb - r) / (2.0 * qa));
                        out.push((-qb + r) / (2.0 * qa));
                    }
                }
            }
        }
        out.retain(|z| z.is_finite() && *z > self.lo && *z < self.hi);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Demand,
    Cost,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseFn {
    segments: Vec<Segment>,
    role: Role,
    /// Fixed cost: a jump at zero added for every `z > 0`. Always zero for demand.
    jump_at_zero: f64,
    /// Integral of the segments up to each segment's `lo`.
    prefix: Vec<f64>,
}

impl PiecewiseFn {
    pub fn new(role: Role, segments: Vec<Segment>, jump_at_zero: f64) -> Result<Self> {
        let invalid = |m: String| Err(Error::InvalidFunction(m));
        if segments.is_empty() {
            return invalid("no segments".into());
        }
        if segments[0].lo != 0.0 {
            return invalid(format!("first segment starts at {} instead of 0", segments[0].lo));
        }
        if segments[segments.len() - 1].hi != 1.0 {
            return invalid(format!(
                "last segment ends at {} instead of 1",
                segments[segments.len() - 1].hi
            ));
        }
        for w in segments.windows(2) {
            if w[0].hi != w[1].lo {
                return invalid(format!(
                    "segments [{}, {}] and [{}, {}] leave a gap or overlap",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                ));
            }
        }
        if !jump_at_zero.is_finite() || jump_at_zero < 0.0 {
            return invalid(format!("fixed cost {jump_at_zero} must be finite and non-negative"));
        }
        let scale = segments
            .iter()
            .map(|s| s.value(s.lo).abs().max(s.value(s.hi).abs()))
            .fold(1.0_f64, f64::max);
        let tol = EPS * scale;
        match role {
            Role::Demand => {
                if jump_at_zero != 0.0 {
                    return invalid("demand cannot carry a fixed cost".into());
                }
                for s in &segments {
                    let rising = match s.kind {
                        SegmentKind::Linear { slope, .. } => slope > 0.0,
                        _ => false,
                    };
                    if rising {
                        return invalid(format!("demand increases on [{}, {}]", s.lo, s.hi));
                    }
                }
                for w in segments.windows(2) {
                    if w[1].value(w[1].lo) > w[0].value(w[0].hi) + tol {
                        return invalid(format!("demand jumps up at z = {}", w[0].hi));
                    }
                }
                let last = segments[segments.len() - 1];
                if last.value(1.0) < -tol {
                    return invalid("demand takes negative values".into());
                }
            }
            Role::Cost => {
                for s in &segments {
                    match s.kind {
                        SegmentKind::Hyperbolic(_) => {
                            return invalid("cost segments must be constant or linear".into())
                        }
                        SegmentKind::Linear { slope, .. } if slope < 0.0 => {
                            return invalid(format!("cost decreases on [{}, {}]", s.lo, s.hi))
                        }
                        _ => {}
                    }
                }
                for w in segments.windows(2) {
                    if w[1].value(w[1].lo) < w[0].value(w[0].hi) - tol {
                        return invalid(format!("cost jumps down at z = {}", w[0].hi));
                    }
                }
                if jump_at_zero + segments[0].value(0.0) < -tol {
                    return invalid("cost takes negative values".into());
                }
            }
        }
        let mut prefix = Vec::with_capacity(segments.len());
        let mut acc = 0.0;
        for s in &segments {
            prefix.push(acc);
            acc += s.integral(s.lo, s.hi);
        }
        Ok(PiecewiseFn {
            segments,
            role,
            jump_at_zero,
            prefix,
        })
    }

    pub fn flat_demand(v: f64) -> Result<Self> {
        Self::new(
            Role::Demand,
            vec![Segment::new(0.0, 1.0, SegmentKind::Constant(v))?],
            0.0,
        )
    }

    /// Decreasing step demand: `heights[i]` on `(breaks[i-1], breaks[i]]`.
    pub fn step_demand(breaks: &[f64], heights: &[f64]) -> Result<Self> {
        if heights.len() != breaks.len() + 1 {
            return Err(Error::InvalidFunction(
                "step demand needs one more height than interior breaks".into(),
            ));
        }
        let mut edges = Vec::with_capacity(breaks.len() + 2);
        edges.push(0.0);
        edges.extend_from_slice(breaks);
        edges.push(1.0);
        let segments = edges
            .windows(2)
            .zip(heights)
            .map(|(w, &h)| Segment::new(w[0], w[1], SegmentKind::Constant(h)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(Role::Demand, segments, 0.0)
    }

    /// `V_{q,p}`: `v_bar` on `[0, q]`, then the hyperbola `q p / z`.
    pub fn make_v(q: f64, p: f64, v_bar: f64) -> Result<Self> {
        check_qp(q, p, v_bar)?;
        let mut segments = vec![Segment::new(0.0, q, SegmentKind::Constant(v_bar))?];
        if q < 1.0 {
            segments.push(Segment::new(q, 1.0, SegmentKind::Hyperbolic(q * p))?);
        }
        Self::new(Role::Demand, segments, 0.0)
    }

    /// `W_{q,p}`: `p` on `[0, q]`, zero afterwards.
    pub fn make_w(q: f64, p: f64, v_bar: f64) -> Result<Self> {
        check_qp(q, p, v_bar)?;
        let mut segments = vec![Segment::new(0.0, q, SegmentKind::Constant(p))?];
        if q < 1.0 {
            segments.push(Segment::new(q, 1.0, SegmentKind::Constant(0.0))?);
        }
        Self::new(Role::Demand, segments, 0.0)
    }

    pub fn zero_cost() -> Self {
        Self::fixed_cost(0.0).expect("zero cost is valid")
    }

    pub fn fixed_cost(fixed: f64) -> Result<Self> {
        Self::new(
            Role::Cost,
            vec![Segment::new(0.0, 1.0, SegmentKind::Constant(0.0))?],
            fixed,
        )
    }

    /// Fixed cost plus constant marginal cost: `C(q) = fixed + marginal * q` for `q > 0`.
    pub fn affine_cost(fixed: f64, marginal: f64) -> Result<Self> {
        Self::new(
            Role::Cost,
            vec![Segment::new(
                0.0,
                1.0,
                SegmentKind::Linear {
                    intercept: 0.0,
                    slope: marginal,
                },
            )?],
            fixed,
        )
    }

    /// Costless up to `q_low`, then a jump of `jump` for anything beyond.
    /// With `q_low = 0` this is a plain fixed cost.
    pub fn two_tier_cost(q_low: f64, jump: f64) -> Result<Self> {
        check_unit("q_low", q_low)?;
        if q_low <= 0.0 {
            return Self::fixed_cost(jump);
        }
        if q_low >= 1.0 {
            return Ok(Self::zero_cost());
        }
        Self::new(
            Role::Cost,
            vec![
                Segment::new(0.0, q_low, SegmentKind::Constant(0.0))?,
                Segment::new(q_low, 1.0, SegmentKind::Constant(jump))?,
            ],
            0.0,
        )
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn jump_at_zero(&self) -> f64 {
        self.jump_at_zero
    }

    /// Interior breakpoints (segment joins), ascending.
    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.segments[..self.segments.len() - 1].iter().map(|s| s.hi)
    }

    #[inline]
    fn index_at(&self, z: f64) -> usize {
        // segment whose (lo, hi] contains z; z = 0 maps to the first
        self.segments
            .partition_point(|s| s.hi < z)
            .min(self.segments.len() - 1)
    }

    /// Point evaluation with the left-limit convention at breakpoints.
    pub fn eval(&self, z: f64) -> Result<f64> {
        check_unit("z", z)?;
        Ok(self.at(z))
    }

    /// [`Self::eval`] without the domain check.
    #[inline]
    pub fn at(&self, z: f64) -> f64 {
        if self.role == Role::Cost && z <= 0.0 {
            return 0.0;
        }
        let s = &self.segments[self.index_at(z)];
        s.value(z) + self.jump_at_zero
    }

    /// Right limit `lim_{y -> z+} f(y)`; equals `f(1)` at `z = 1`.
    pub fn right_limit(&self, z: f64) -> f64 {
        if z >= 1.0 {
            return self.at(1.0);
        }
        let i = self
            .segments
            .partition_point(|s| s.hi <= z)
            .min(self.segments.len() - 1);
        self.segments[i].value(z) + self.jump_at_zero
    }

    /// `sup_{y > z} f(y)`, which for a decreasing demand is the right limit.
    pub fn sup_right_of(&self, z: f64) -> f64 {
        self.right_limit(z)
    }

    /// `int_0^q f`.
    pub fn integral_to(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return 0.0;
        }
        let i = self.index_at(q);
        let s = &self.segments[i];
        self.prefix[i] + s.integral(s.lo, q) + self.jump_at_zero * q
    }

    /// Largest value on `[0, 1]`; for demand this is the value at zero.
    pub fn max_value(&self) -> f64 {
        match self.role {
            Role::Demand => self.at(0.0),
            Role::Cost => self.at(1.0),
        }
    }
}

fn check_qp(q: f64, p: f64, v_bar: f64) -> Result<()> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::Domain {
            what: "q",
            value: q,
            domain: "(0, 1]",
        });
    }
    if !(p >= 0.0 && p <= v_bar) {
        return Err(Error::Domain {
            what: "p",
            value: p,
            domain: "[0, v_bar]",
        });
    }
    Ok(())
}

/// Social optimum: `value = max_q (int_0^q V - C(q))`, attained at `q_star`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub value: f64,
    pub q_star: f64,
}

/// An inverse demand `V`, a cost `C`, and the top consumer value `v_bar`.
#[derive(Debug, Clone, PartialEq)]
pub struct Market {
    demand: PiecewiseFn,
    cost: PiecewiseFn,
    v_bar: f64,
}

impl Market {
    pub fn new(demand: PiecewiseFn, cost: PiecewiseFn, v_bar: f64) -> Result<Self> {
        if !(v_bar.is_finite() && v_bar > 0.0) {
            return Err(Error::Domain {
                what: "v_bar",
                value: v_bar,
                domain: "(0, inf)",
            });
        }
        if demand.role() != Role::Demand || cost.role() != Role::Cost {
            return Err(Error::InvalidMarket("demand/cost roles are swapped".into()));
        }
        let top = demand.max_value();
        if top > v_bar * (1.0 + EPS) {
            return Err(Error::InvalidMarket(format!(
                "demand reaches {top}, above v_bar = {v_bar}"
            )));
        }
        Ok(Market {
            demand,
            cost,
            v_bar,
        })
    }

    pub fn demand(&self) -> &PiecewiseFn {
        &self.demand
    }

    pub fn cost(&self) -> &PiecewiseFn {
        &self.cost
    }

    pub fn v_bar(&self) -> f64 {
        self.v_bar
    }

    pub fn tol(&self) -> f64 {
        EPS * self.v_bar
    }

    pub fn total_value(&self, q: f64) -> Result<f64> {
        check_unit("q", q)?;
        Ok(self.demand.integral_to(q))
    }

    /// Realized surplus `int_0^q V - C(q)`, unchecked.
    #[inline]
    pub fn surplus(&self, q: f64) -> f64 {
        self.demand.integral_to(q) - self.cost.at(q)
    }

    /// Breakpoints of demand and cost merged, with 0 and 1, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = std::iter::once(0.0)
            .chain(self.demand.breakpoints())
            .chain(self.cost.breakpoints())
            .chain(std::iter::once(1.0))
            .collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Interior points where `V = C'` on a stretch where both are smooth.
    pub fn stationary_points(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for d in self.demand.segments() {
            for c in self.cost.segments() {
                let (lo, hi) = (d.lo.max(c.lo), d.hi.min(c.hi));
                if lo >= hi {
                    continue;
                }
                let mc = c.slope(0.5 * (lo + hi));
                let z = match d.kind {
                    SegmentKind::Constant(_) => continue,
                    SegmentKind::Hyperbolic(a) if mc > 0.0 => a / mc,
                    SegmentKind::Hyperbolic(_) => continue,
                    SegmentKind::Linear { intercept, slope } if slope != 0.0 => {
                        (mc - intercept) / slope
                    }
                    SegmentKind::Linear { .. } => continue,
                };
                if z > lo && z < hi {
                    out.push(z);
                }
            }
        }
        out
    }

    /// Candidate enumeration only. Surplus is concave between breakpoints (decreasing
    /// `V`, piecewise-linear `C`), so breakpoints and stationary points are complete.
    pub fn opt_exact(&self) -> Optimum {
        self.opt_with_grid(0)
    }

    /// Social optimum: exact candidates first, then a uniform grid with
    /// golden-section polish as a fallback.
    pub fn opt(&self) -> Optimum {
        self.opt_with_grid(OPT_GRID)
    }

    pub fn opt_with_grid(&self, grid: usize) -> Optimum {
        let pieces = self.breakpoints();
        let mut cands = pieces.clone();
        cands.extend(self.stationary_points());
        let (q, v) = maximize_unit(|q| self.surplus(q), &cands, &pieces, grid);
        // q = 0 always yields 0; keep the optimum non-negative despite rounding.
        if v <= 0.0 {
            Optimum {
                value: 0.0,
                q_star: if v == 0.0 { q } else { 0.0 },
            }
        } else {
            Optimum { value: v, q_star: q }
        }
    }

    /// `OPT - (int_0^q V - C(q))`, clamped at zero against rounding.
    pub fn distortion(&self, q: f64) -> Result<f64> {
        check_unit("q", q)?;
        Ok(self.distortion_given(self.opt().value, q))
    }

    #[inline]
    pub fn distortion_given(&self, opt: f64, q: f64) -> f64 {
        (opt - self.surplus(q)).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat(v: f64, c: PiecewiseFn) -> Market {
        Market::new(PiecewiseFn::flat_demand(v).unwrap(), c, 1.0).unwrap()
    }

    /// Composite Simpson on each smooth stretch; independent of the closed forms.
    fn simpson(f: &PiecewiseFn, q: f64) -> f64 {
        let mut edges: Vec<f64> = std::iter::once(0.0).chain(f.breakpoints()).collect();
        edges.retain(|&e| e < q);
        edges.push(q);
        let mut total = 0.0;
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let n = 2000;
            let h = (b - a) / n as f64;
            // interior samples only touch (a, b]; use the segment formula at a itself
            let seg = f.segments()[f.index_at(0.5 * (a + b))];
            let mut s = seg.value(a) + seg.value(b);
            for i in 1..n {
                let x = a + i as f64 * h;
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * seg.value(x);
            }
            total += s * h / 3.0;
        }
        total
    }

    #[test]
    fn eval_takes_left_limit_at_breakpoints() {
        let w = PiecewiseFn::make_w(0.5, 0.7, 1.0).unwrap();
        assert_eq!(w.eval(0.5).unwrap(), 0.7);
        assert_eq!(w.eval(0.5000001).unwrap(), 0.0);
        assert_eq!(w.right_limit(0.5), 0.0);
    }

    #[test]
    fn eval_hyperbolic_tail() {
        let v = PiecewiseFn::make_v(0.5, 0.25, 1.0).unwrap();
        assert!((v.eval(0.75).unwrap() - 0.5 * 0.25 / 0.75).abs() < 1e-15);
        assert_eq!(v.eval(1.0).unwrap(), 0.125);
        assert_eq!(v.eval(0.5).unwrap(), 1.0);
    }

    #[test]
    fn fixed_cost_is_zero_at_origin() {
        let c = PiecewiseFn::fixed_cost(0.4).unwrap();
        assert_eq!(c.eval(0.0).unwrap(), 0.0);
        assert_eq!(c.eval(1e-9).unwrap(), 0.4);
        assert_eq!(c.right_limit(0.0), 0.4);
    }

    #[test]
    fn eval_rejects_out_of_domain() {
        let v = PiecewiseFn::flat_demand(1.0).unwrap();
        assert!(matches!(v.eval(1.5), Err(Error::Domain { .. })));
        assert!(v.eval(-0.1).is_err());
    }

    #[test]
    fn total_value_closed_forms() {
        let m = flat(1.0, PiecewiseFn::zero_cost());
        assert_eq!(m.total_value(1.0).unwrap(), 1.0);
        assert_eq!(m.total_value(0.0).unwrap(), 0.0);

        let v = PiecewiseFn::make_v(0.5, 0.25, 1.0).unwrap();
        let m = Market::new(v.clone(), PiecewiseFn::zero_cost(), 1.0).unwrap();
        let expected = 0.5 + 0.125 * 2f64.ln();
        assert!((m.total_value(1.0).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 0.58664).abs() < 1e-5);
        assert!((simpson(&v, 1.0) - expected).abs() < 1e-10);
    }

    #[test]
    fn total_value_matches_quadrature_on_linear_segments() {
        let d = PiecewiseFn::new(
            Role::Demand,
            vec![
                Segment::new(0.0, 0.3, SegmentKind::Linear { intercept: 0.9, slope: -0.5 }).unwrap(),
                Segment::new(0.3, 0.6, SegmentKind::Hyperbolic(0.2)).unwrap(),
                Segment::new(0.6, 1.0, SegmentKind::Constant(0.1)).unwrap(),
            ],
            0.0,
        )
        .unwrap();
        for q in [0.1, 0.3, 0.45, 0.6, 0.8, 1.0] {
            assert!((d.integral_to(q) - simpson(&d, q)).abs() < 1e-10, "q = {q}");
        }
    }

    #[test]
    fn opt_examples() {
        let m = flat(1.0, PiecewiseFn::zero_cost());
        assert_eq!(m.opt(), Optimum { value: 1.0, q_star: 1.0 });

        let m = Market::new(
            PiecewiseFn::flat_demand(0.5).unwrap(),
            PiecewiseFn::fixed_cost(0.6).unwrap(),
            1.0,
        )
        .unwrap();
        assert_eq!(m.opt(), Optimum { value: 0.0, q_star: 0.0 });

        let m = flat(1.0, PiecewiseFn::fixed_cost(0.5).unwrap());
        assert_eq!(m.opt(), Optimum { value: 0.5, q_star: 1.0 });
    }

    #[test]
    fn opt_finds_interior_stationary_point() {
        // V(z) = 1 - z, C(q) = 0.4 q: optimum at q = 0.6 with value 0.18
        let d = PiecewiseFn::new(
            Role::Demand,
            vec![Segment::new(0.0, 1.0, SegmentKind::Linear { intercept: 1.0, slope: -1.0 }).unwrap()],
            0.0,
        )
        .unwrap();
        let m = Market::new(d, PiecewiseFn::affine_cost(0.0, 0.4).unwrap(), 1.0).unwrap();
        let o = m.opt();
        assert!((o.q_star - 0.6).abs() < 1e-12);
        assert!((o.value - 0.18).abs() < 1e-12);
    }

    #[test]
    fn distortion_examples() {
        let m = flat(1.0, PiecewiseFn::fixed_cost(0.5).unwrap());
        assert_eq!(m.distortion(0.0).unwrap(), 0.5);
        assert_eq!(m.distortion(1.0).unwrap(), 0.0);

        let v = PiecewiseFn::make_v(0.5, 0.25, 1.0).unwrap();
        let m = Market::new(v, PiecewiseFn::zero_cost(), 1.0).unwrap();
        let d = m.distortion(0.5).unwrap();
        assert!((d - 0.125 * 2f64.ln()).abs() < 1e-15);
        assert!((d - 0.08664).abs() < 1e-5);
    }

    #[test]
    fn make_v_and_w() {
        let w = PiecewiseFn::make_w(1.0, 1.0, 1.0).unwrap();
        assert_eq!(w, PiecewiseFn::flat_demand(1.0).unwrap());
        let v = PiecewiseFn::make_v(0.5, 0.25, 1.0).unwrap();
        assert_eq!(v.eval(1.0).unwrap(), 0.125);
        for (q, p) in [(0.3, 0.2), (0.9, 1.0), (1.0, 0.4)] {
            assert!(p <= PiecewiseFn::make_v(q, p, 1.0).unwrap().at(q));
            assert!(p <= PiecewiseFn::make_w(q, p, 1.0).unwrap().at(q));
        }
        assert!(PiecewiseFn::make_v(0.5, 1.2, 1.0).is_err());
        assert!(PiecewiseFn::make_w(0.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn invariants_are_enforced() {
        let rising = PiecewiseFn::step_demand(&[0.5], &[0.2, 0.4]);
        assert!(rising.is_err());
        let seg = Segment::new(0.5, 0.5, SegmentKind::Constant(1.0));
        assert!(matches!(seg, Err(Error::InvalidSegment { .. })));
        assert!(Segment::new(0.0, 0.5, SegmentKind::Hyperbolic(0.1)).is_err());
        let too_high = Market::new(
            PiecewiseFn::flat_demand(2.0).unwrap(),
            PiecewiseFn::zero_cost(),
            1.0,
        );
        assert!(matches!(too_high, Err(Error::InvalidMarket(_))));
        let falling_cost = PiecewiseFn::affine_cost(0.0, -1.0);
        assert!(falling_cost.is_err());
    }

    #[test]
    fn two_tier_cost_shape() {
        let c = PiecewiseFn::two_tier_cost(0.3, 0.2).unwrap();
        assert_eq!(c.at(0.3), 0.0);
        assert_eq!(c.at(0.31), 0.2);
        assert_eq!(PiecewiseFn::two_tier_cost(0.0, 0.2).unwrap(), PiecewiseFn::fixed_cost(0.2).unwrap());
    }
}

//! Seeded random markets for sweeps and property suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::market::{Market, PiecewiseFn, Role, Segment, SegmentKind};

/// Deterministic generator for a given seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sorted distinct interior break points in `(0, 1)`, kept at least `1e-3` apart.
fn breaks<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(n);
    while out.len() < n {
        let b: f64 = rng.gen_range(0.001..0.999);
        if out.iter().all(|x| (x - b).abs() >= 1e-3) {
            out.push(b);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Step demand with 1 to 8 heights, sorted decreasing in `[0, v_bar]`.
pub fn step_demand<R: Rng>(rng: &mut R, v_bar: f64) -> Result<PiecewiseFn> {
    let n = rng.gen_range(1..=8);
    let mut heights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=v_bar)).collect();
    heights.sort_by(|a, b| b.total_cmp(a));
    PiecewiseFn::step_demand(&breaks(rng, n - 1), &heights)
}

/// Decreasing demand mixing constant, linear and hyperbolic stretches.
pub fn mixed_demand<R: Rng>(rng: &mut R, v_bar: f64) -> Result<PiecewiseFn> {
    let n = rng.gen_range(1..=6);
    let mut edges = vec![0.0];
    edges.extend(breaks(rng, n - 1));
    edges.push(1.0);
    let mut level = rng.gen_range(0.2 * v_bar..=v_bar);
    let mut segments = Vec::with_capacity(n);
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        // optional drop at the join
        if rng.gen_bool(0.3) {
            level *= rng.gen_range(0.3..1.0);
        }
        let kind = match rng.gen_range(0..3) {
            0 => SegmentKind::Constant(level),
            1 if lo > 0.0 => SegmentKind::Hyperbolic(level * lo),
            _ => {
                let end = level * rng.gen_range(0.0..1.0);
                let slope = (end - level) / (hi - lo);
                SegmentKind::Linear {
                    intercept: level - slope * lo,
                    slope,
                }
            }
        };
        let seg = Segment::new(lo, hi, kind)?;
        level = seg.value(hi).max(0.0);
        segments.push(seg);
    }
    PiecewiseFn::new(Role::Demand, segments, 0.0)
}

/// Fixed, two-tier, or fixed-plus-linear cost with magnitudes in `[0, v_bar]`.
pub fn simple_cost<R: Rng>(rng: &mut R, v_bar: f64) -> Result<PiecewiseFn> {
    match rng.gen_range(0..3) {
        0 => PiecewiseFn::fixed_cost(rng.gen_range(0.0..=v_bar)),
        1 => PiecewiseFn::two_tier_cost(rng.gen_range(0.0..1.0), rng.gen_range(0.0..=v_bar)),
        _ => PiecewiseFn::affine_cost(rng.gen_range(0.0..=v_bar), rng.gen_range(0.0..=v_bar)),
    }
}

/// Non-decreasing piecewise-linear cost with optional upward jumps and fixed cost.
pub fn mixed_cost<R: Rng>(rng: &mut R, v_bar: f64) -> Result<PiecewiseFn> {
    if rng.gen_bool(0.5) {
        return simple_cost(rng, v_bar);
    }
    let n = rng.gen_range(1..=4);
    let mut edges = vec![0.0];
    edges.extend(breaks(rng, n - 1));
    edges.push(1.0);
    let mut level = 0.0;
    let mut segments = Vec::with_capacity(n);
    for w in edges.windows(2) {
        if rng.gen_bool(0.3) {
            level += rng.gen_range(0.0..0.3 * v_bar);
        }
        let slope = rng.gen_range(0.0..=v_bar);
        let seg = Segment::new(
            w[0],
            w[1],
            SegmentKind::Linear {
                intercept: level - slope * w[0],
                slope,
            },
        )?;
        level = seg.value(w[1]);
        segments.push(seg);
    }
    let fixed = if rng.gen_bool(0.5) {
        rng.gen_range(0.0..0.5 * v_bar)
    } else {
        0.0
    };
    PiecewiseFn::new(Role::Cost, segments, fixed)
}

/// The sweep family: step demand with a fixed, two-tier or decreasing-average cost.
pub fn sweep_market<R: Rng>(rng: &mut R, v_bar: f64) -> Result<Market> {
    let demand = step_demand(rng, v_bar)?;
    let cost = simple_cost(rng, v_bar)?;
    Market::new(demand, cost, v_bar)
}

/// The broader family used by the inequality suites.
pub fn mixed_market<R: Rng>(rng: &mut R, v_bar: f64) -> Result<Market> {
    let demand = if rng.gen_bool(0.25) {
        step_demand(rng, v_bar)?
    } else {
        mixed_demand(rng, v_bar)?
    };
    let cost = mixed_cost(rng, v_bar)?;
    Market::new(demand, cost, v_bar)
}

/// `count` sweep markets from `seed`, generated sequentially so the list is reproducible.
pub fn sweep_markets(count: usize, seed: u64, v_bar: f64) -> Result<Vec<Market>> {
    let mut r = rng(seed);
    (0..count).map(|_| sweep_market(&mut r, v_bar)).collect()
}

/// `count` mixed markets from `seed`.
pub fn mixed_markets(count: usize, seed: u64, v_bar: f64) -> Result<Vec<Market>> {
    let mut r = rng(seed);
    (0..count).map(|_| mixed_market(&mut r, v_bar)).collect()
}

/// Markets whose breakpoints and kinks all sit on the lattice `i / (n - 1)`.
pub fn lattice_market<R: Rng>(rng: &mut R, v_bar: f64, n: usize) -> Result<Market> {
    let cells = n - 1;
    let steps = rng.gen_range(1..=6).min(cells);
    let mut idx: Vec<usize> = (1..cells).collect();
    idx.shuffle(rng);
    let mut cuts: Vec<usize> = idx.into_iter().take(steps - 1).collect();
    cuts.sort_unstable();
    let brk: Vec<f64> = cuts.iter().map(|&i| i as f64 / cells as f64).collect();
    let mut heights: Vec<f64> = (0..steps).map(|_| rng.gen_range(0.0..=v_bar)).collect();
    heights.sort_by(|a, b| b.total_cmp(a));
    let demand = PiecewiseFn::step_demand(&brk, &heights)?;
    let cost = match rng.gen_range(0..2) {
        0 => PiecewiseFn::fixed_cost(rng.gen_range(0.0..=v_bar))?,
        _ => PiecewiseFn::two_tier_cost(
            rng.gen_range(1..cells) as f64 / cells as f64,
            rng.gen_range(0.0..=v_bar),
        )?,
    };
    Market::new(demand, cost, v_bar)
}

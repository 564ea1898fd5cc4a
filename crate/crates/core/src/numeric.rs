//! Small one- and multi-dimensional search routines shared by the solvers.

/// Absolute tolerance used for comparisons of money amounts, before scaling by `v_bar`.
pub const EPS: f64 = 1e-12;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// `n` evenly spaced points covering `[lo, hi]` inclusive. Endpoints are exact.
pub fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    let last = n.saturating_sub(1).max(1) as f64;
    (0..n).map(move |i| {
        if i + 1 == n {
            hi
        } else {
            lo + (hi - lo) * (i as f64 / last)
        }
    })
}

/// Golden-section search for a maximum of a unimodal `f` on `[lo, hi]`.
///
/// Returns the best point seen (endpoints included), so a monotone `f` yields the
/// maximizing endpoint.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut best = (lo, f(lo));
    let fh = f(hi);
    if fh > best.1 {
        best = (hi, fh);
    }
    if hi <= lo {
        return best;
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a) <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    for (x, fx) in [(c, fc), (d, fd)] {
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Maximizes `f` over `[0, 1]` from an exact candidate list plus a uniform grid.
///
/// `pieces` are the sorted breakpoints between which `f` is smooth; the best grid
/// point is polished by golden-section search inside its own piece. Ties are
/// resolved towards the smaller argument.
pub fn maximize_unit<F: Fn(f64) -> f64>(
    f: F,
    candidates: &[f64],
    pieces: &[f64],
    grid: usize,
) -> (f64, f64) {
    maximize_interval(f, 0.0, 1.0, candidates, pieces, grid)
}

/// [`maximize_unit`] restricted to `[lo, hi]`; candidates outside are ignored.
pub fn maximize_interval<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    candidates: &[f64],
    pieces: &[f64],
    grid: usize,
) -> (f64, f64) {
    let mut best = (lo, f(lo));
    let consider = |x: f64, fx: f64, best: &mut (f64, f64)| {
        if fx > best.1 || (fx == best.1 && x < best.0) {
            *best = (x, fx);
        }
    };
    let fh = f(hi);
    consider(hi, fh, &mut best);
    for &x in candidates {
        if x >= lo && x <= hi {
            let fx = f(x);
            consider(x, fx, &mut best);
        }
    }
    if grid >= 2 && hi > lo {
        let mut gbest = (lo, f64::NEG_INFINITY);
        for x in linspace(lo, hi, grid) {
            let fx = f(x);
            if fx > gbest.1 {
                gbest = (x, fx);
            }
        }
        // Searched points must beat the exact candidates by more than rounding noise,
        // otherwise a flat top would move the argmax away from a closed-form point.
        let anchor = best;
        let slack = 1e-14 * anchor.1.abs().max(1.0);
        let searched = |x: f64, fx: f64, best: &mut (f64, f64)| {
            if fx > anchor.1 + slack {
                consider(x, fx, best);
            }
        };
        searched(gbest.0, gbest.1, &mut best);
        let h = (hi - lo) / (grid - 1) as f64;
        let (mut a, mut b) = ((gbest.0 - h).max(lo), (gbest.0 + h).min(hi));
        for &x in pieces {
            if x < gbest.0 && x > a {
                a = x;
            }
            if x > gbest.0 && x < b {
                b = x;
            }
        }
        // Stay strictly inside the piece so jumps at its ends are not sampled.
        let span = b - a;
        if span > 0.0 {
            let (x, fx) = golden_max(&f, a + span * 1e-12, b - span * 1e-12, 1e-12);
            searched(x, fx, &mut best);
        }
    }
    best
}

/// Derivative-free Nelder–Mead maximization inside the box `[lower, upper]`.
///
/// Points are clamped to the box. Returns the best vertex and its value.
pub fn nelder_mead_max<F: Fn(&[f64]) -> f64>(
    f: F,
    start: &[f64],
    step: &[f64],
    lower: &[f64],
    upper: &[f64],
    iterations: usize,
) -> (Vec<f64>, f64) {
    let n = start.len();
    let clamp = |x: &mut Vec<f64>| {
        for i in 0..n {
            x[i] = x[i].clamp(lower[i], upper[i]);
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let mut x0 = start.to_vec();
    clamp(&mut x0);
    let f0 = f(&x0);
    simplex.push((x0.clone(), f0));
    for i in 0..n {
        let mut x = x0.clone();
        x[i] += step[i];
        if x[i] > upper[i] {
            x[i] = x0[i] - step[i];
        }
        clamp(&mut x);
        let fx = f(&x);
        simplex.push((x, fx));
    }

    for _ in 0..iterations {
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let worst = simplex[n].clone();
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for i in 0..n {
                centroid[i] += x[i] / n as f64;
            }
        }
        let along = |t: f64| {
            let mut x: Vec<f64> = (0..n)
                .map(|i| centroid[i] + t * (worst.0[i] - centroid[i]))
                .collect();
            clamp(&mut x);
            let fx = f(&x);
            (x, fx)
        };
        let reflected = along(-1.0);
        if reflected.1 > simplex[0].1 {
            let expanded = along(-2.0);
            simplex[n] = if expanded.1 > reflected.1 {
                expanded
            } else {
                reflected
            };
        } else if reflected.1 > simplex[n - 1].1 {
            simplex[n] = reflected;
        } else {
            let contracted = if reflected.1 > worst.1 {
                along(-0.5)
            } else {
                along(0.5)
            };
            if contracted.1 > worst.1.max(reflected.1) {
                simplex[n] = contracted;
            } else {
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let mut x: Vec<f64> =
                        (0..n).map(|i| best[i] + 0.5 * (v.0[i] - best[i])).collect();
                    clamp(&mut x);
                    let fx = f(&x);
                    *v = (x, fx);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    let (x, fx) = simplex.swap_remove(0);
    (x, fx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_endpoints() {
        let v: Vec<f64> = linspace(0.0, 1.0, 5).collect();
        assert_eq!(v, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(linspace(0.0, 0.3, 201).nth(200), Some(0.3));
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, fx) = golden_max(|x| -(x - 0.3).powi(2), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!(fx.abs() < 1e-12);
    }

    #[test]
    fn golden_returns_endpoint_for_monotone() {
        let (x, _) = golden_max(|x| x, 0.0, 1.0, 1e-12);
        assert_eq!(x, 1.0);
    }

    #[test]
    fn maximize_unit_prefers_exact_candidate() {
        let f = |x: f64| if x <= 0.37 { x } else { 0.0 };
        let (x, fx) = maximize_unit(f, &[0.37], &[0.37], 11);
        assert_eq!((x, fx), (0.37, 0.37));
    }

    #[test]
    fn nelder_mead_climbs_quadratic() {
        let f = |x: &[f64]| -((x[0] - 0.2).powi(2) + (x[1] - 0.7).powi(2));
        let (x, _) = nelder_mead_max(f, &[0.5, 0.5], &[0.1, 0.1], &[0.0, 0.0], &[1.0, 1.0], 200);
        assert!((x[0] - 0.2).abs() < 1e-4 && (x[1] - 0.7).abs() < 1e-4);
    }
}

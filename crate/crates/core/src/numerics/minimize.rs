/// Number of equally spaced points (endpoints included) in the global scan.
pub const SCAN_POINTS: usize = 1024;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Global minimization of a continuous function on `[a, b]`: a
/// [`SCAN_POINTS`] scan locates the best cell, golden-section search refines
/// it to width `tol`, and the best point evaluated anywhere is returned.
pub fn minimize_scalar<F>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    if a == b {
        return (a, f(a));
    }
    let step = (b - a) / (SCAN_POINTS - 1) as f64;
    let mut best = (a, f(a));
    let mut best_idx = 0;
    for i in 1..SCAN_POINTS {
        let x = if i == SCAN_POINTS - 1 { b } else { a + i as f64 * step };
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
            best_idx = i;
        }
    }

    let mut lo = if best_idx == 0 { a } else { a + (best_idx - 1) as f64 * step };
    let mut hi = if best_idx + 1 >= SCAN_POINTS { b } else { a + (best_idx + 1) as f64 * step };

    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < best.1 {
            best = (x1, f1);
        }
        if f2 < best.1 {
            best = (x2, f2);
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            if x1 <= lo || x1 >= x2 {
                break;
            }
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            if x2 >= hi || x2 <= x1 {
                break;
            }
            f2 = f(x2);
        }
    }
    if f1 < best.1 {
        best = (x1, f1);
    }
    if f2 < best.1 {
        best = (x2, f2);
    }
    best
}

/// Maximizes `f` on `[a, b]`; see [`minimize_scalar`].
pub fn maximize_scalar<F>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (x, neg) = minimize_scalar(|x| -f(x), a, b, tol);
    (x, -neg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn interior_parabola() {
        let (x, fx) = minimize_scalar(|y| (y - 0.3) * (y - 0.3), 0.0, 1.0, 1e-10);
        assert_abs_diff_eq!(x, 0.3, epsilon = 1e-8);
        assert_abs_diff_eq!(fx, 0.0, epsilon = 1e-16);
    }

    #[test]
    fn monotone_hits_left_endpoint_exactly() {
        let (x, fx) = minimize_scalar(|y| y * y, 0.8, 1.0, 1e-10);
        assert_eq!(x, 0.8);
        assert_eq!(fx, 0.8 * 0.8);
    }

    #[test]
    fn linear() {
        let (x, fx) = minimize_scalar(|y| y * y * (1.0 / y), 0.5, 1.0, 1e-10);
        assert_eq!(x, 0.5);
        assert_abs_diff_eq!(fx, 0.5, epsilon = 1e-16);
    }

    #[test]
    fn finds_global_not_local_minimum() {
        let f = |x: f64| (8.0 * x).sin() + 0.1 * x;
        let (x, _) = minimize_scalar(f, 0.0, 3.0, 1e-12);
        // Global minimizer is the first trough at 3*pi/16.
        let trough = 3.0 * std::f64::consts::PI / 16.0;
        assert!((x - trough).abs() < 3e-3, "x = {x}");
    }

    #[test]
    fn maximize_matches_negated_minimize() {
        let (x, fx) = maximize_scalar(|y| 4.0 * y / (1.0 + y * y), 0.5, 1.0, 1e-12);
        assert_eq!(x, 1.0);
        assert_abs_diff_eq!(fx, 2.0, epsilon = 1e-15);
    }
}

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 500;

/// Finds a root of `f` in `[lo, hi]` by bisection accelerated with secant
/// steps. A secant step is only taken when it lands strictly inside the
/// current bracket and the bracket has been shrinking fast enough; otherwise
/// the midpoint is used. `f` is never evaluated outside `[lo, hi]`.
///
/// Stops when `|f(x)| <= tol` or the bracket is narrower than `tol`.
pub fn find_root_bracketed<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    find_root_with(f, lo, hi, tol, tol)
}

/// Same as [`find_root_bracketed`] with independent bracket-width and
/// residual tolerances. Passing `f_tol = 0` iterates until the bracket
/// collapses to `x_tol` (or to adjacent floats).
pub fn find_root_with<F>(mut f: F, lo: f64, hi: f64, x_tol: f64, f_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    if fa == 0.0 {
        return Ok(a);
    }
    let mut fb = f(b);
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoBracket {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }

    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    let mut last_width = b - a;
    for _ in 0..MAX_ITERATIONS {
        let width = b - a;
        if best.1.abs() <= f_tol || width <= x_tol {
            break;
        }
        let mid = a + 0.5 * width;
        if mid <= a || mid >= b {
            break;
        }
        let secant = b - fb * (b - a) / (fb - fa);
        // Secant steps that stall on one side of the bracket are replaced by
        // bisection once the bracket stops halving.
        let use_secant = secant > a && secant < b && width <= 0.5 * last_width + f64::EPSILON * b.abs();
        let x = if use_secant { secant } else { mid };
        last_width = width;

        let fx = f(x);
        if fx.is_nan() {
            return Err(Error::NoBracket {
                lo: a,
                hi: b,
                f_lo: fa,
                f_hi: fb,
            });
        }
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    if best.1.abs() <= f_tol {
        Ok(best.0)
    } else {
        // Bracket collapsed: the midpoint of the final bracket is the answer.
        let mid = a + 0.5 * (b - a);
        Ok(if (best.0 - mid).abs() <= (b - a) { best.0 } else { mid })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::cell::RefCell;

    #[test]
    fn sqrt_two() {
        let x = find_root_bracketed(|x| x * x - 2.0, 1.0, 2.0, 1e-12).unwrap();
        assert_abs_diff_eq!(x, 2f64.sqrt(), epsilon = 1e-11);
    }

    #[test]
    fn root_at_zero() {
        let x = find_root_bracketed(|x| x, -1.0, 1.0, 1e-12).unwrap();
        assert_abs_diff_eq!(x, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cosine_root() {
        let x = find_root_bracketed(f64::cos, 1.0, 2.0, 1e-12).unwrap();
        assert_abs_diff_eq!(x, std::f64::consts::FRAC_PI_2, epsilon = 1e-11);
    }

    #[test]
    fn same_sign_is_rejected() {
        let err = find_root_bracketed(|x| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::NoBracket { .. }));
    }

    #[test]
    fn endpoint_root_is_returned() {
        assert_eq!(find_root_bracketed(|x| x - 1.0, 1.0, 3.0, 1e-12).unwrap(), 1.0);
    }

    #[test]
    fn flat_secant_case_converges() {
        // Strongly one-sided curvature makes plain regula falsi stall.
        let x = find_root_with(|x: f64| x.powi(9) - 1e-9, 0.0, 4.0, 1e-14, 0.0).unwrap();
        assert_abs_diff_eq!(x, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn never_leaves_the_bracket() {
        let seen = RefCell::new(Vec::new());
        find_root_bracketed(
            |x: f64| {
                seen.borrow_mut().push(x);
                (x - 0.3).powi(3) + 0.01 * (x - 0.3)
            },
            -0.2,
            0.9,
            1e-13,
        )
        .unwrap();
        assert!(seen.borrow().iter().all(|&x| (-0.2..=0.9).contains(&x)));
    }
}

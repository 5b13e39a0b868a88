//! Adaptive Dormand–Prince 5(4) integration of a scalar ODE.

use crate::error::{Error, Result};
use crate::numerics::interp::Interpolant;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// Difference between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MAX_GROWTH: f64 = 5.0;
const MIN_SHRINK: f64 = 0.2;
const MAX_STEPS: usize = 1_000_000;

/// Integrates `dy/ds = rhs(s, y)` from `(s0, y0)` to `s1` (either direction)
/// with per-step error control at `tol` (mixed absolute/relative). Returns the
/// dense output as a monotone cubic Hermite interpolant through the accepted
/// steps, using the right-hand side as knot slopes.
///
/// Non-finite right-hand side values reject the step and shrink it.
pub fn ode_integrate<F>(rhs: F, y0: f64, s0: f64, s1: f64, tol: f64) -> Result<Interpolant>
where
    F: Fn(f64, f64) -> f64,
{
    if s0 == s1 {
        return Err(Error::InvalidSpec("empty integration span".into()));
    }
    let span = s1 - s0;
    let dir = span.signum();
    let min_step = 1e-14 * span.abs();

    let mut s = s0;
    let mut y = y0;
    let mut k1 = rhs(s, y);
    if !k1.is_finite() {
        return Err(Error::NonFiniteRhs { at: s });
    }
    let mut h = initial_step(&rhs, s, y, k1, span, tol);

    let mut ss = vec![s];
    let mut ys = vec![y];
    let mut ds = vec![k1];

    for _ in 0..MAX_STEPS {
        if (s1 - s) * dir <= 0.0 {
            break;
        }
        if (s + h - s1) * dir > 0.0 {
            h = s1 - s;
        }
        if h.abs() < min_step && (s1 - s).abs() > min_step {
            return Err(Error::StepUnderflow { at: s, step: h.abs() });
        }

        let k2 = rhs(s + C2 * h, y + h * A21 * k1);
        let k3 = rhs(s + C3 * h, y + h * (A31 * k1 + A32 * k2));
        let k4 = rhs(s + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = rhs(s + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        let s_new = if (s + h - s1) * dir >= 0.0 { s1 } else { s + h };
        let k6 = rhs(s_new, y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        let y_new = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        let k7 = rhs(s_new, y_new);

        let err_abs = (h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)).abs();
        let scale = tol * (1.0 + y.abs().max(y_new.abs()));
        let err = err_abs / scale;

        if !err.is_finite() || !k7.is_finite() {
            h *= MIN_SHRINK;
            continue;
        }
        if err <= 1.0 {
            s = s_new;
            y = y_new;
            k1 = k7;
            ss.push(s);
            ys.push(y);
            ds.push(k1);
            let factor = if err == 0.0 {
                MAX_GROWTH
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_SHRINK, MAX_GROWTH)
            };
            h *= factor;
        } else {
            h *= (SAFETY * err.powf(-0.2)).clamp(MIN_SHRINK, 1.0);
        }
    }
    if (s1 - s) * dir > 0.0 {
        return Err(Error::StepUnderflow { at: s, step: h.abs() });
    }

    if dir < 0.0 {
        ss.reverse();
        ys.reverse();
        ds.reverse();
    }
    Interpolant::hermite_monotone(ss, ys, ds)
}

fn initial_step<F: Fn(f64, f64) -> f64>(rhs: &F, s: f64, y: f64, f0: f64, span: f64, tol: f64) -> f64 {
    let dir = span.signum();
    let scale = tol * (1.0 + y.abs());
    let d0 = y.abs() / scale;
    let d1 = f0.abs() / scale;
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span.abs());
    let f1 = rhs(s + dir * h0, y + dir * h0 * f0);
    let d2 = if f1.is_finite() { (f1 - f0).abs() / scale / h0 } else { f64::INFINITY };
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    dir * (100.0 * h0).min(h1).min(0.1 * span.abs())
}

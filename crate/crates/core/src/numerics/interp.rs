//! Piecewise Hermite interpolation on strictly increasing knots.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InterpMode {
    /// Cubic Hermite with Fritsch–Carlson limited slopes; preserves monotone data.
    MonotoneCubic,
    /// Quintic Hermite from values, first and second derivatives.
    QuinticHermite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interpolant {
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    curvatures: Option<Vec<f64>>,
    mode: InterpMode,
}

impl Interpolant {
    /// Monotone cubic (PCHIP-style) interpolant from values alone.
    pub fn monotone_cubic(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_knots(&knots, values.len())?;
        let secants = secants(&knots, &values);
        let n = knots.len();
        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes.fill(secants[0]);
        } else {
            for i in 1..n - 1 {
                let (d0, d1) = (secants[i - 1], secants[i]);
                if d0 * d1 > 0.0 {
                    let (h0, h1) = (knots[i] - knots[i - 1], knots[i + 1] - knots[i]);
                    let w0 = 2.0 * h1 + h0;
                    let w1 = h1 + 2.0 * h0;
                    slopes[i] = (w0 + w1) / (w0 / d0 + w1 / d1);
                }
            }
            slopes[0] = end_slope(knots[1] - knots[0], knots[2] - knots[1], secants[0], secants[1]);
            slopes[n - 1] = end_slope(
                knots[n - 1] - knots[n - 2],
                knots[n - 2] - knots[n - 3],
                secants[n - 2],
                secants[n - 3],
            );
        }
        Ok(Self {
            knots,
            values,
            slopes,
            curvatures: None,
            mode: InterpMode::MonotoneCubic,
        })
    }

    /// Cubic Hermite interpolant with supplied slopes, limited where needed
    /// so that monotone data stay monotone.
    pub fn hermite_monotone(knots: Vec<f64>, values: Vec<f64>, mut slopes: Vec<f64>) -> Result<Self> {
        check_knots(&knots, values.len())?;
        if slopes.len() != knots.len() {
            return Err(Error::InvalidSpec("slope count differs from knot count".into()));
        }
        let secants = secants(&knots, &values);
        for (k, &delta) in secants.iter().enumerate() {
            if delta == 0.0 {
                slopes[k] = 0.0;
                slopes[k + 1] = 0.0;
                continue;
            }
            for idx in [k, k + 1] {
                if slopes[idx] * delta < 0.0 {
                    slopes[idx] = 0.0;
                }
            }
            let alpha = slopes[k] / delta;
            let beta = slopes[k + 1] / delta;
            let norm = alpha.hypot(beta);
            if norm > 3.0 {
                let tau = 3.0 / norm;
                slopes[k] = tau * alpha * delta;
                slopes[k + 1] = tau * beta * delta;
            }
        }
        Ok(Self {
            knots,
            values,
            slopes,
            curvatures: None,
            mode: InterpMode::MonotoneCubic,
        })
    }

    /// Quintic Hermite interpolant; exact for quintic polynomials.
    pub fn quintic_hermite(knots: Vec<f64>, values: Vec<f64>, slopes: Vec<f64>, curvatures: Vec<f64>) -> Result<Self> {
        check_knots(&knots, values.len())?;
        if slopes.len() != knots.len() || curvatures.len() != knots.len() {
            return Err(Error::InvalidSpec("derivative count differs from knot count".into()));
        }
        Ok(Self {
            knots,
            values,
            slopes,
            curvatures: Some(curvatures),
            mode: InterpMode::QuinticHermite,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn mode(&self) -> InterpMode {
        self.mode
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    // Index of the segment [x_k, x_{k+1}] containing x; x outside the knot
    // range uses the nearest end segment.
    fn segment(&self, x: f64) -> usize {
        let idx = self.knots.partition_point(|&k| k <= x);
        idx.saturating_sub(1).min(self.knots.len() - 2)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.segment(x);
        let h = self.knots[k + 1] - self.knots[k];
        let t = (x - self.knots[k]) / h;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        match &self.curvatures {
            None => {
                let t2 = t * t;
                let t3 = t2 * t;
                let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
                let h10 = t3 - 2.0 * t2 + t;
                let h01 = -2.0 * t3 + 3.0 * t2;
                let h11 = t3 - t2;
                h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1
            }
            Some(c) => {
                let (a0, a1) = (c[k] * h * h, c[k + 1] * h * h);
                let t2 = t * t;
                let t3 = t2 * t;
                let t4 = t3 * t;
                let t5 = t4 * t;
                let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
                let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
                let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
                let h3 = 0.5 * (t3 - 2.0 * t4 + t5);
                let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
                let h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
                h0 * y0 + h1 * m0 + h2 * a0 + h3 * a1 + h4 * m1 + h5 * y1
            }
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let k = self.segment(x);
        let h = self.knots[k + 1] - self.knots[k];
        let t = (x - self.knots[k]) / h;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (m0, m1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let d = match &self.curvatures {
            None => {
                let t2 = t * t;
                (6.0 * t2 - 6.0 * t) * (y0 - y1) + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (3.0 * t2 - 2.0 * t) * m1
            }
            Some(c) => {
                let (a0, a1) = (c[k] * h * h, c[k + 1] * h * h);
                let t2 = t * t;
                let t3 = t2 * t;
                let t4 = t3 * t;
                let d0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
                let d1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
                let d2 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
                let d3 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);
                let d4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
                d0 * (y0 - y1) + d1 * m0 + d2 * a0 + d3 * a1 + d4 * m1
            }
        };
        d / h
    }
}

fn check_knots(knots: &[f64], n_values: usize) -> Result<()> {
    if knots.len() < 2 {
        return Err(Error::InvalidSpec("interpolant needs at least two knots".into()));
    }
    if knots.len() != n_values {
        return Err(Error::InvalidSpec("value count differs from knot count".into()));
    }
    if knots.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidSpec("interpolant knots must be strictly increasing".into()));
    }
    Ok(())
}

fn secants(knots: &[f64], values: &[f64]) -> Vec<f64> {
    knots
        .windows(2)
        .zip(values.windows(2))
        .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
        .collect()
}

// Three-point end slope with the usual shape-preserving corrections.
fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s * d0 <= 0.0 {
        0.0
    } else if d0 * d1 < 0.0 && s.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        s
    }
}

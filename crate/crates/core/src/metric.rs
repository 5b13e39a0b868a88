//! Radial metrics `rho(|w|)` on annuli and their admissibility diagnostics.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_adaptive, maximize_scalar, minimize_scalar};

/// Golden-section width used for every sup/inf over a radius interval.
pub const EXTREMUM_TOL: f64 = 1e-12;
/// Distance kept from the pole of the hyperbolic density.
pub const HYPERBOLIC_EPS: f64 = 1e-9;
const AREA_TOL: f64 = 1e-13;

type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A positive radial density together with its first two derivatives.
#[derive(Clone)]
pub struct RadialMetric {
    name: String,
    eval: RadialFn,
    deriv: RadialFn,
    deriv2: RadialFn,
    valid: (f64, f64),
}

impl fmt::Debug for RadialMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialMetric")
            .field("name", &self.name)
            .field("valid_interval", &self.valid)
            .finish()
    }
}

/// Raw admissibility numbers on a radius interval. No thresholds are applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricDiagnostics {
    pub curvature_min: f64,
    pub curvature_max: f64,
    pub area: f64,
    pub p_constant: f64,
    pub rho_inf: f64,
    pub rho_sup: f64,
}

impl RadialMetric {
    /// Builds a metric from a density and its analytic derivatives. The
    /// density must be positive on `valid_interval`.
    pub fn new<E, D, D2>(name: impl Into<String>, valid_interval: (f64, f64), eval: E, deriv: D, deriv2: D2) -> Result<Self>
    where
        E: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let (lo, hi) = valid_interval;
        if !(lo >= 0.0 && hi > lo) {
            return Err(Error::InvalidSpec(format!("bad valid interval ({lo}, {hi})")));
        }
        Ok(Self {
            name: name.into(),
            eval: Arc::new(eval),
            deriv: Arc::new(deriv),
            deriv2: Arc::new(deriv2),
            valid: valid_interval,
        })
    }

    pub fn euclidean() -> Self {
        Self::builtin("euclidean", (0.0, f64::INFINITY), |_| 1.0, |_| 0.0, |_| 0.0)
    }

    pub fn inverse_r() -> Self {
        Self::builtin("inverse_r", (0.0, f64::INFINITY), |y| 1.0 / y, |y| -1.0 / (y * y), |y| 2.0 / (y * y * y))
    }

    /// Spherical density `1 / (1 + y^2)^2`.
    pub fn sphere() -> Self {
        Self::builtin(
            "sphere",
            (0.0, f64::INFINITY),
            |y| (1.0 + y * y).powi(-2),
            |y| -4.0 * y * (1.0 + y * y).powi(-3),
            |y| {
                let u = 1.0 + y * y;
                -4.0 * u.powi(-3) + 24.0 * y * y * u.powi(-4)
            },
        )
    }

    /// Hyperbolic density `1 / (1 - y^2)^2`, restricted to `(0, 1 - 1e-9]`.
    pub fn hyperbolic() -> Self {
        Self::builtin(
            "hyperbolic",
            (0.0, 1.0 - HYPERBOLIC_EPS),
            |y| (1.0 - y * y).powi(-2),
            |y| 4.0 * y * (1.0 - y * y).powi(-3),
            |y| {
                let u = 1.0 - y * y;
                4.0 * u.powi(-3) + 24.0 * y * y * u.powi(-4)
            },
        )
    }

    /// Power density `y^a`.
    pub fn power(a: f64) -> Self {
        Self::builtin(
            format!("power:{a}"),
            (0.0, f64::INFINITY),
            move |y| y.powf(a),
            move |y| a * y.powf(a - 1.0),
            move |y| a * (a - 1.0) * y.powf(a - 2.0),
        )
    }

    fn builtin<E, D, D2>(name: impl Into<String>, valid: (f64, f64), eval: E, deriv: D, deriv2: D2) -> Self
    where
        E: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(name, valid, eval, deriv, deriv2).expect("built-in metrics are well formed")
    }

    /// The same metric multiplied by a positive constant.
    pub fn scaled(&self, factor: f64) -> Self {
        let (e, d, d2) = (self.eval.clone(), self.deriv.clone(), self.deriv2.clone());
        Self {
            name: format!("{}*{}", factor, self.name),
            eval: Arc::new(move |y| factor * e(y)),
            deriv: Arc::new(move |y| factor * d(y)),
            deriv2: Arc::new(move |y| factor * d2(y)),
            valid: self.valid,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn valid_interval(&self) -> (f64, f64) {
        self.valid
    }

    #[inline]
    pub fn eval(&self, y: f64) -> f64 {
        (self.eval)(y)
    }

    #[inline]
    pub fn deriv(&self, y: f64) -> f64 {
        (self.deriv)(y)
    }

    #[inline]
    pub fn deriv2(&self, y: f64) -> f64 {
        (self.deriv2)(y)
    }

    /// `rho'(y) / rho(y)`.
    #[inline]
    pub fn log_deriv(&self, y: f64) -> f64 {
        self.deriv(y) / self.eval(y)
    }

    pub fn contains(&self, y: f64) -> bool {
        y > 0.0 && y >= self.valid.0 && y <= self.valid.1
    }

    pub(crate) fn check_point(&self, what: &'static str, y: f64) -> Result<()> {
        if self.contains(y) {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                what,
                value: y,
                lo: self.valid.0,
                hi: self.valid.1,
            })
        }
    }

    /// Checks `0 < q < Q` with both radii inside the valid interval.
    pub fn check_range(&self, q: f64, big_q: f64) -> Result<()> {
        self.check_point("q", q)?;
        self.check_point("Q", big_q)?;
        if !(q < big_q) {
            return Err(Error::OutOfDomain {
                what: "q",
                value: q,
                lo: self.valid.0.max(0.0),
                hi: big_q,
            });
        }
        Ok(())
    }

    /// Gauss curvature `-Δ log rho / rho` with the radial Laplacian
    /// `(log rho)'' + (log rho)' / y`.
    pub fn curvature(&self, y: f64) -> Result<f64> {
        self.check_point("y", y)?;
        Ok(self.curvature_unchecked(y))
    }

    fn curvature_unchecked(&self, y: f64) -> f64 {
        let rho = self.eval(y);
        let l1 = self.deriv(y) / rho;
        let l2 = self.deriv2(y) / rho - l1 * l1;
        -(l2 + l1 / y) / rho
    }

    /// Area of `A(q, Q)` in the metric: `2π ∫_q^Q rho(y) y dy`.
    pub fn area(&self, q: f64, big_q: f64) -> Result<f64> {
        self.check_range(q, big_q)?;
        let tol = AREA_TOL * (1.0 + big_q * big_q * self.eval(big_q).abs());
        let integral = integrate_adaptive(|y| self.eval(y) * y, q, big_q, tol)?;
        Ok(2.0 * PI * integral)
    }

    /// `sup |rho'| / rho` over `[q, Q]`.
    pub fn approx_analytic_constant(&self, q: f64, big_q: f64) -> Result<f64> {
        self.check_range(q, big_q)?;
        let (_, sup) = maximize_scalar(|y| self.log_deriv(y).abs(), q, big_q, EXTREMUM_TOL);
        Ok(sup)
    }

    pub fn rho_inf(&self, q: f64, big_q: f64) -> Result<f64> {
        self.check_range(q, big_q)?;
        Ok(minimize_scalar(|y| self.eval(y), q, big_q, EXTREMUM_TOL).1)
    }

    pub fn rho_sup(&self, q: f64, big_q: f64) -> Result<f64> {
        self.check_range(q, big_q)?;
        Ok(maximize_scalar(|y| self.eval(y), q, big_q, EXTREMUM_TOL).1)
    }

    pub fn admissibility_report(&self, q: f64, big_q: f64) -> Result<MetricDiagnostics> {
        self.check_range(q, big_q)?;
        let (_, curvature_min) = minimize_scalar(|y| self.curvature_unchecked(y), q, big_q, EXTREMUM_TOL);
        let (_, curvature_max) = maximize_scalar(|y| self.curvature_unchecked(y), q, big_q, EXTREMUM_TOL);
        Ok(MetricDiagnostics {
            curvature_min,
            curvature_max: curvature_max.max(curvature_min),
            area: self.area(q, big_q)?,
            p_constant: self.approx_analytic_constant(q, big_q)?,
            rho_inf: self.rho_inf(q, big_q)?,
            rho_sup: self.rho_sup(q, big_q)?,
        })
    }
}

/// Parses `euclidean`, `inverse_r`, `sphere`, `hyperbolic` or `power:a`.
pub fn parse_metric(spec: &str) -> Result<RadialMetric> {
    let (name, param) = match spec.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (spec, None),
    };
    let metric = match name {
        "euclidean" => RadialMetric::euclidean(),
        "inverse_r" => RadialMetric::inverse_r(),
        "sphere" => RadialMetric::sphere(),
        "hyperbolic" => RadialMetric::hyperbolic(),
        "power" => {
            let a: f64 = param
                .ok_or_else(|| Error::BadParameter(spec.to_string()))?
                .trim()
                .parse()
                .map_err(|_| Error::BadParameter(spec.to_string()))?;
            if !a.is_finite() {
                return Err(Error::BadParameter(spec.to_string()));
            }
            return Ok(RadialMetric::power(a));
        }
        _ => return Err(Error::UnknownMetric(spec.to_string())),
    };
    if param.is_some() {
        return Err(Error::BadParameter(spec.to_string()));
    }
    Ok(metric)
}

impl FromStr for RadialMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_metric(s)
    }
}

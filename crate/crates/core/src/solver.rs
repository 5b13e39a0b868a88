//! The radial minimizer `w(s e^{it}) = p(s) e^{it}` between `A(r, 1)` and
//! `A(q, Q)`.
//!
//! The profile is determined by a real constant `c` through
//!
//! ```text
//! p'(s) = sqrt(p^2 + c / rho(p)) / s,    p(1) = Q,
//! log(1/r) = mu(c) = ∫_q^Q dy / sqrt(y^2 + c / rho(y)),
//! ```
//!
//! subject to `c >= c_crit = -min{ y^2 rho(y) : q <= y <= Q }`. At `c_crit`
//! the smallest stretch of the map vanishes somewhere and `r_crit =
//! exp(-mu(c_crit))` is the critical inner radius: domain annuli with
//! `r < r_crit` admit no radial minimizer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::RadialMetric;
use crate::numerics::{
    find_root_with, integrate_offsets_with, minimize_scalar, ode_integrate, Endpoint, Interpolant, QuadOptions,
};

/// Window above `c_crit` in which the modulus integrand is treated as
/// singular and the square-root substitution is forced.
pub const NEAR_CRITICAL_WINDOW: f64 = 1e-6;
/// Largest negative radicand silently clamped to zero along the profile.
pub const RADICAND_CLAMP: f64 = 1e-10;
/// Relative tolerance on `|p(r) - q| / Q`.
pub const PROFILE_MATCH_TOL: f64 = 1e-6;
const ARGMIN_TOL: f64 = 1e-12;
const KNOT_QUAD_TOL: f64 = 1e-15;
// Relative distance from an interval end inside which the radicand is taken
// from its second-order expansion about that end.
const EXPANSION_REACH: f64 = 1e-5;
// `|R'(y*)| / y*` below which the critical zero counts as a double zero.
const FLAT_SLOPE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub metric: RadialMetric,
    /// Target inner radius.
    pub q: f64,
    /// Target outer radius.
    pub big_q: f64,
    /// Domain inner radius; the domain outer radius is 1.
    pub r: f64,
}

impl ProblemSpec {
    pub fn new(metric: RadialMetric, q: f64, big_q: f64, r: f64) -> Result<Self> {
        metric.check_range(q, big_q)?;
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidSpec(format!("domain inner radius r = {r} must lie in (0, 1)")));
        }
        Ok(Self { metric, q, big_q, r })
    }

    /// Domain annulus `A(r1, r2)`, rescaled to `A(r1 / r2, 1)`.
    pub fn from_domain(metric: RadialMetric, q: f64, big_q: f64, r1: f64, r2: f64) -> Result<Self> {
        if !(r1 > 0.0 && r2 > r1) {
            return Err(Error::InvalidSpec(format!("bad domain annulus ({r1}, {r2})")));
        }
        Self::new(metric, q, big_q, r1 / r2)
    }

    /// `log(1/r)`, the modulus of the domain annulus.
    pub fn modulus_domain(&self) -> f64 {
        -self.r.ln()
    }

    /// `log(Q/q)`, the modulus of the target annulus.
    pub fn modulus_target(&self) -> f64 {
        (self.big_q / self.q).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol_c: f64,
    pub tol_quad: f64,
    pub tol_ode: f64,
    pub profile_knots: usize,
    /// Seed for the randomized checks of the verification suite.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_c: 1e-9,
            tol_quad: 1e-11,
            tol_ode: 1e-10,
            profile_knots: 512,
            seed: 42,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.tol_c, self.tol_quad, self.tol_ode].iter().all(|t| *t > 0.0 && t.is_finite());
        if !positive {
            return Err(Error::InvalidSpec("solver tolerances must be positive".into()));
        }
        if self.profile_knots < 16 {
            return Err(Error::InvalidSpec("profile_knots must be at least 16".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// `c = 0`: the map is conformal.
    Conformal,
    /// `c > 0`: domain modulus below the target modulus, bi-Lipschitz.
    Expanding,
    /// `c_crit < c < 0`.
    Subcritical,
    /// `c = c_crit`: smallest stretch vanishes, not bi-Lipschitz.
    Critical,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Conformal => "Conformal",
            Self::Expanding => "Expanding",
            Self::Subcritical => "Subcritical",
            Self::Critical => "Critical",
        }
    }

    pub fn from_constants(c: f64, critical_c: f64, tol_c: f64) -> Self {
        if c.abs() <= tol_c {
            Self::Conformal
        } else if c - critical_c <= tol_c {
            Self::Critical
        } else if c > tol_c {
            Self::Expanding
        } else {
            Self::Subcritical
        }
    }
}

/// A solved radial minimizer.
#[derive(Debug, Clone)]
pub struct MinimizerProfile {
    /// Variational constant `c`.
    pub c: f64,
    /// `p` on `[r, 1]` (quintic Hermite through refined knots).
    pub profile: Interpolant,
    /// `q(y) = p^{-1}(y)` on `[q, Q]` (monotone cubic).
    pub inverse: Interpolant,
    pub classification: Classification,
    pub spec: ProblemSpec,
    /// `c_crit` of the target annulus.
    pub critical_c: f64,
    /// `p(r) - q` of the raw ODE integration.
    pub ode_endpoint_error: f64,
}

impl MinimizerProfile {
    pub fn r(&self) -> f64 {
        self.spec.r
    }

    pub fn q(&self) -> f64 {
        self.spec.q
    }

    pub fn big_q(&self) -> f64 {
        self.spec.big_q
    }

    pub fn metric(&self) -> &RadialMetric {
        &self.spec.metric
    }

    /// `p(s)` for `s` in `[r, 1]`.
    pub fn p(&self, s: f64) -> f64 {
        self.profile.eval(s)
    }

    /// `p'(s)` from the ODE right-hand side at `p(s)`.
    pub fn dp(&self, s: f64) -> f64 {
        let q = self.spec.q;
        radicand_near(&self.spec.metric, self.c, q, self.p(s) - q).max(0.0).sqrt() / s
    }

    /// `p^2 + c / rho(p)` at `s`; negative values are rounding artefacts.
    pub fn radicand_at(&self, s: f64) -> f64 {
        radicand(&self.spec.metric, self.c, self.p(s))
    }

    /// `q(y)`: the domain radius mapped to target radius `y`. The monotone
    /// interpolant seeds a bracketed inversion of `p`.
    pub fn inverse_at(&self, y: f64) -> f64 {
        let (r, big_q) = (self.r(), self.big_q());
        if y >= big_q {
            return 1.0;
        }
        if y <= self.p(r) {
            return r;
        }
        let guess = self.inverse.eval(y).clamp(r, 1.0);
        let width = 1e-3 * (1.0 - r);
        let mut lo = (guess - width).max(r);
        let mut hi = (guess + width).min(1.0);
        while self.p(lo) > y && lo > r {
            lo = (lo - 4.0 * width).max(r);
        }
        while self.p(hi) < y && hi < 1.0 {
            hi = (hi + 4.0 * width).min(1.0);
        }
        find_root_with(|s| self.p(s) - y, lo, hi, 1e-15, 0.0).unwrap_or(guess)
    }
}

#[inline]
fn radicand(metric: &RadialMetric, c: f64, y: f64) -> f64 {
    // Same grouping as `c_crit = -y^2 rho(y)`, so the radicand is exactly 0 at
    // a critical endpoint.
    let rho = metric.eval(y);
    (y * y * rho + c) / rho
}

// d/dy of y^2 + c / rho(y).
#[inline]
fn radicand_slope(metric: &RadialMetric, c: f64, y: f64) -> f64 {
    let rho = metric.eval(y);
    2.0 * y - c * metric.deriv(y) / (rho * rho)
}

// Radicand at `base + d`. Close to `base` the direct form cancels (it
// vanishes at a critical end), so a local expansion in `d` is used instead.
fn radicand_near(metric: &RadialMetric, c: f64, base: f64, d: f64) -> f64 {
    if d.abs() > EXPANSION_REACH * base.abs().max(1.0) {
        return radicand(metric, c, base + d);
    }
    let rho = metric.eval(base);
    let drho = metric.deriv(base);
    let curv = 2.0 - c * (metric.deriv2(base) * rho - 2.0 * drho * drho) / (rho * rho * rho);
    radicand(metric, c, base) + d * (radicand_slope(metric, c, base) + 0.5 * curv * d)
}

// `1 / sqrt(R)` on `[lo, hi]` for the offset-aware quadrature.
fn inverse_root_integrand(metric: &RadialMetric, c: f64, lo: f64, hi: f64) -> impl Fn(f64, f64, f64) -> f64 + '_ {
    move |_y, from_lo, from_hi| {
        let value = if from_lo <= from_hi {
            radicand_near(metric, c, lo, from_lo)
        } else {
            radicand_near(metric, c, hi, -from_hi)
        };
        1.0 / value.max(0.0).sqrt()
    }
}

// p'' from differentiating the ODE; regular even where the radicand vanishes.
#[inline]
fn profile_curvature(metric: &RadialMetric, c: f64, s: f64, p: f64, dp: f64) -> f64 {
    radicand_slope(metric, c, p) / (2.0 * s * s) - dp / s
}

/// Location and value of `min{ y^2 rho(y) : q <= y <= Q }`.
fn weighted_min(metric: &RadialMetric, q: f64, big_q: f64) -> (f64, f64) {
    minimize_scalar(|y| y * y * metric.eval(y), q, big_q, ARGMIN_TOL)
}

// `c_crit` is only known to rounding; a `c` within that slack counts as critical.
fn below_critical(c: f64, critical_c: f64) -> bool {
    c < critical_c - 8.0 * f64::EPSILON * critical_c.abs().max(1.0)
}

/// `c_crit = -min{ y^2 rho(y) : q <= y <= Q }`.
pub fn critical_constant(metric: &RadialMetric, q: f64, big_q: f64) -> Result<f64> {
    metric.check_range(q, big_q)?;
    Ok(-weighted_min(metric, q, big_q).1)
}

/// `mu(c) = ∫_q^Q dy / sqrt(y^2 + c / rho(y))` at the default quadrature
/// tolerance.
pub fn modulus_of_c(metric: &RadialMetric, q: f64, big_q: f64, c: f64) -> Result<f64> {
    modulus_of_c_with(metric, q, big_q, c, SolverConfig::default().tol_quad)
}

pub fn modulus_of_c_with(metric: &RadialMetric, q: f64, big_q: f64, c: f64, tol: f64) -> Result<f64> {
    metric.check_range(q, big_q)?;
    let (y_star, min_val) = weighted_min(metric, q, big_q);
    let critical_c = -min_val;
    if below_critical(c, critical_c) {
        return Err(Error::BelowCriticalConstant { c, critical_c });
    }
    let span = big_q - q;
    let interior = y_star > q + 1e-9 * span && y_star < big_q - 1e-9 * span;
    if !below_critical(critical_c, c) {
        // At c_crit the radicand vanishes at y_star; a double zero (interior
        // minimum, or flat weight at an end) makes the integral diverge.
        let flat = radicand_slope(metric, c, y_star).abs() <= FLAT_SLOPE_TOL * y_star;
        if interior || flat {
            return Err(Error::DivergentModulus { critical_c });
        }
    }
    let near_critical = c - critical_c <= NEAR_CRITICAL_WINDOW * critical_c.abs().max(1.0);
    let result = if !near_critical {
        integrate_offsets_with(inverse_root_integrand(metric, c, q, big_q), q, big_q, tol, QuadOptions::default())
    } else {
        // The radicand (nearly) vanishes at y_star: split there and substitute
        // on both sides of it. `y^2 rho + c` carries a rounding error of about
        // eps |c_crit|; where the weight is flat that error is not confined to
        // the expanded ends, and bounds the attainable relative accuracy.
        let mids = if interior {
            [0.5 * (q + y_star), 0.5 * (y_star + big_q)]
        } else {
            [0.5 * (q + big_q); 2]
        };
        let margin = mids
            .iter()
            .map(|&y| y * y * metric.eval(y) + c)
            .fold(f64::INFINITY, f64::min);
        let rel_tol = if margin > 0.0 {
            (8.0 * f64::EPSILON * critical_c.abs().max(1.0) / margin).min(1e-3)
        } else {
            0.0
        };
        let opts = QuadOptions {
            rel_tol,
            ..QuadOptions::sqrt_both()
        };
        if interior {
            let left = integrate_offsets_with(inverse_root_integrand(metric, c, q, y_star), q, y_star, 0.5 * tol, opts);
            let right =
                integrate_offsets_with(inverse_root_integrand(metric, c, y_star, big_q), y_star, big_q, 0.5 * tol, opts);
            left.and_then(|l| right.map(|r| l + r))
        } else {
            integrate_offsets_with(inverse_root_integrand(metric, c, q, big_q), q, big_q, tol, opts)
        }
    };
    result.map_err(|e| match e {
        Error::DivergentIntegral { .. } => Error::DivergentModulus { critical_c },
        other => other,
    })
}

/// `r_crit = exp(-mu(c_crit))`, or `None` when the modulus diverges at
/// `c_crit` (then every domain annulus admits a minimizer).
pub fn critical_inner_radius(metric: &RadialMetric, q: f64, big_q: f64) -> Result<Option<f64>> {
    let critical_c = critical_constant(metric, q, big_q)?;
    match modulus_of_c(metric, q, big_q, critical_c) {
        Ok(mu) => Ok(Some((-mu).exp())),
        Err(Error::DivergentModulus { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Solves `mu(c) = log(1/r)` for `c`.
pub fn solve_c(spec: &ProblemSpec, config: &SolverConfig) -> Result<f64> {
    config.validate()?;
    let (metric, q, big_q) = (&spec.metric, spec.q, spec.big_q);
    let tol = config.tol_quad;
    let target = spec.modulus_domain();
    let mu = |c: f64| modulus_of_c_with(metric, q, big_q, c, tol);
    let f_tol = 1e-3 * config.tol_c;

    let mu0 = mu(0.0)?;
    if (mu0 - target).abs() <= config.tol_c {
        return Ok(0.0);
    }

    if target < mu0 {
        // Thin domain: c > 0, mu decreasing to 0 as c grows.
        let mut c_lo = 0.0;
        let mut c_hi = 1.0;
        while mu(c_hi)? >= target {
            c_lo = c_hi;
            c_hi *= 2.0;
            if c_hi > 1e300 {
                return Err(Error::InvalidSpec("could not bracket c above zero".into()));
            }
        }
        return root_of_modulus(&mu, target, c_lo, c_hi, f_tol);
    }

    let critical_c = critical_constant(metric, q, big_q)?;
    let mu_max = match mu(critical_c) {
        Ok(v) => Some(v),
        Err(Error::DivergentModulus { .. }) => None,
        Err(e) => return Err(e),
    };
    if let Some(mu_max) = mu_max {
        if target > mu_max + config.tol_c {
            return Err(Error::BelowCritical {
                critical_c,
                critical_r: Some((-mu_max).exp()),
            });
        }
        if (target - mu_max).abs() <= config.tol_c {
            return Ok(critical_c);
        }
    }

    let mut eps = 1e-12f64.max(1e-12 * critical_c.abs());
    for _ in 0..24 {
        let lo = critical_c + eps;
        if lo >= 0.0 {
            break;
        }
        if mu(lo)? > target {
            return root_of_modulus(&mu, target, lo, 0.0, f_tol);
        }
        if mu_max.is_some() {
            // mu(c_crit) > target > mu(c_crit + eps): the root hugs c_crit.
            return root_of_modulus(&mu, target, critical_c, lo, f_tol);
        }
        eps *= 1e-4;
    }
    Err(Error::BelowCritical {
        critical_c,
        critical_r: None,
    })
}

fn root_of_modulus<M>(mu: &M, target: f64, lo: f64, hi: f64, f_tol: f64) -> Result<f64>
where
    M: Fn(f64) -> Result<f64>,
{
    let mut failure = None;
    let x_tol = 1e-15 * (1.0 + lo.abs().max(hi.abs()));
    let c = find_root_with(
        |c| match mu(c) {
            Ok(v) => v - target,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        x_tol,
        f_tol,
    );
    match failure {
        Some(e) => Err(e),
        None => c,
    }
}

/// Solves for `c` and builds the profile.
pub fn solve(spec: &ProblemSpec, config: &SolverConfig) -> Result<MinimizerProfile> {
    let c = solve_c(spec, config)?;
    build_profile(spec, c, config)
}

/// Integrates the profile ODE backward from `p(1) = Q` to `s = r`, checks it
/// lands on `q`, then refines the knot values by inverting
/// `log(s_{k+1}/s_k) = ∫_{p_k}^{p_{k+1}} dy / sqrt(y^2 + c / rho(y))`.
pub fn build_profile(spec: &ProblemSpec, c: f64, config: &SolverConfig) -> Result<MinimizerProfile> {
    config.validate()?;
    let metric = &spec.metric;
    let (q, big_q, r) = (spec.q, spec.big_q, spec.r);
    let critical_c = critical_constant(metric, q, big_q)?;
    if below_critical(c, critical_c) {
        return Err(Error::BelowCriticalConstant { c, critical_c });
    }
    let classification = Classification::from_constants(c, critical_c, config.tol_c);
    let clamp_bound = RADICAND_CLAMP * big_q.max(1.0).powi(2);

    let rhs = |s: f64, p: f64| {
        if !metric.contains(p) {
            return f64::NAN;
        }
        radicand(metric, c, p).max(0.0).sqrt() / s
    };

    // A vanishing radicand at s = 1 would pin the ODE at p = Q; start from a
    // second-order Taylor step instead.
    let start_radicand = radicand(metric, c, big_q);
    let (s_start, p_start) = if start_radicand <= 1e-12 * big_q * big_q {
        let delta = 1e-4 * (1.0 - r);
        let curv = profile_curvature(metric, c, 1.0, big_q, 0.0);
        (1.0 - delta, big_q + 0.5 * curv * delta * delta)
    } else {
        (1.0, big_q)
    };
    let ode = ode_integrate(rhs, p_start, s_start, r, config.tol_ode)?;

    for (&s, &p) in ode.knots().iter().zip(ode.values()) {
        let value = radicand(metric, c, p);
        if value < -clamp_bound {
            return Err(Error::NegativeRadicand { at: s, value });
        }
    }
    let p_r = ode.eval(r);
    if (p_r - q).abs() > PROFILE_MATCH_TOL * big_q {
        return Err(Error::ProfileMismatch { p_r, q });
    }

    let n = config.profile_knots;
    let knots: Vec<f64> = (0..n)
        .map(|k| if k == n - 1 { 1.0 } else { r + k as f64 * (1.0 - r) / (n - 1) as f64 })
        .collect();
    let mut values = vec![0.0; n];
    values[n - 1] = big_q;
    for k in (0..n - 1).rev() {
        let guess = ode.eval(knots[k]).min(values[k + 1]);
        values[k] = refine_knot(metric, c, values[k + 1], (knots[k + 1] / knots[k]).ln(), guess)?;
    }
    // The refined chain must land on the boundary value; pin it there so that
    // p' is evaluated at exactly q (near a critical end p' ~ sqrt(p - q)).
    if (values[0] - q).abs() > PROFILE_MATCH_TOL * big_q {
        return Err(Error::ProfileMismatch { p_r: values[0], q });
    }
    values[0] = q;

    let slopes: Vec<f64> = knots
        .iter()
        .zip(&values)
        .map(|(&s, &p)| radicand_near(metric, c, q, p - q).max(0.0).sqrt() / s)
        .collect();
    let curvatures: Vec<f64> = knots
        .iter()
        .zip(values.iter().zip(&slopes))
        .map(|(&s, (&p, &dp))| profile_curvature(metric, c, s, p, dp))
        .collect();

    let inverse = Interpolant::monotone_cubic(values.clone(), knots.clone())?;
    let profile = Interpolant::quintic_hermite(knots, values, slopes, curvatures)?;

    Ok(MinimizerProfile {
        c,
        profile,
        inverse,
        classification,
        spec: spec.clone(),
        critical_c,
        ode_endpoint_error: p_r - q,
    })
}

// Finds y < upper with ∫_y^upper dt / sqrt(R(t)) = log_ratio. Below the
// turning point of R (R < 0) the target radius is unreachable, which is
// reported as a positive residual so the bracket closes on the turning point.
fn refine_knot(metric: &RadialMetric, c: f64, upper: f64, log_ratio: f64, guess: f64) -> Result<f64> {
    let residual = |y: f64| -> f64 {
        if y >= upper {
            return -log_ratio;
        }
        if !metric.contains(y) || radicand(metric, c, y) < 0.0 {
            return 1.0;
        }
        let opts = QuadOptions {
            left: Endpoint::Sqrt,
            right: Endpoint::Plain,
            ..QuadOptions::default()
        };
        match integrate_offsets_with(
            inverse_root_integrand(metric, c, y, upper),
            y,
            upper,
            KNOT_QUAD_TOL * log_ratio,
            opts,
        ) {
            Ok(v) => v - log_ratio,
            Err(_) => 1.0,
        }
    };

    let mut step = (upper - guess).abs().max(1e-12 * upper);
    let mut lo = guess - step;
    let mut tries = 0;
    while residual(lo) <= 0.0 {
        step *= 4.0;
        lo = upper - step;
        tries += 1;
        if lo <= 0.0 || tries > 60 {
            lo = lo.max(f64::MIN_POSITIVE);
            break;
        }
    }
    let hi = guess.max(lo).min(upper);
    let hi = if residual(hi) < 0.0 { hi } else { upper };
    find_root_with(residual, lo, hi, 4.0 * f64::EPSILON * upper, 0.0)
}

/// Closed-form critical Euclidean minimizer
/// `w(z) = (r^2 + |z|^2) / (conj(z) (1 + r^2))` between `A(r, 1)` and
/// `A(2r / (1 + r^2), 1)`.
pub fn euclidean_nitsche_map(r: f64) -> Result<MinimizerProfile> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidSpec(format!("r = {r} must lie in (0, 1)")));
    }
    let k = 1.0 + r * r;
    let q = 2.0 * r / k;
    let c = -4.0 * r * r / (k * k);
    let spec = ProblemSpec::new(RadialMetric::euclidean(), q, 1.0, r)?;
    let n = SolverConfig::default().profile_knots;
    let knots: Vec<f64> = (0..n)
        .map(|i| if i == n - 1 { 1.0 } else { r + i as f64 * (1.0 - r) / (n - 1) as f64 })
        .collect();
    let values: Vec<f64> = knots.iter().map(|&s| (r * r + s * s) / (s * k)).collect();
    let slopes: Vec<f64> = knots.iter().map(|&s| (1.0 - r * r / (s * s)) / k).collect();
    let curvatures: Vec<f64> = knots.iter().map(|&s| 2.0 * r * r / (s * s * s * k)).collect();
    let inverse = Interpolant::monotone_cubic(values.clone(), knots.clone())?;
    let profile = Interpolant::quintic_hermite(knots, values, slopes, curvatures)?;
    Ok(MinimizerProfile {
        c,
        profile,
        inverse,
        classification: Classification::Critical,
        spec,
        critical_c: c,
        ode_endpoint_error: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn euclid(q: f64, r: f64) -> ProblemSpec {
        ProblemSpec::new(RadialMetric::euclidean(), q, 1.0, r).unwrap()
    }

    // Closed form of mu(c) for rho = 1 on [0.8, 1].
    fn mu_closed(c: f64) -> f64 {
        ((1.0 + (1.0 + c).sqrt()) / (0.8 + (0.64 + c).sqrt())).ln()
    }

    #[test]
    fn critical_constant_examples() {
        assert_abs_diff_eq!(critical_constant(&RadialMetric::euclidean(), 0.8, 1.0).unwrap(), -0.64, epsilon = 1e-15);
        assert_abs_diff_eq!(critical_constant(&RadialMetric::inverse_r(), 0.5, 1.0).unwrap(), -0.5, epsilon = 1e-16);
        assert_abs_diff_eq!(critical_constant(&RadialMetric::sphere(), 0.5, 1.0).unwrap(), -0.16, epsilon = 1e-16);
        assert!(critical_constant(&RadialMetric::hyperbolic(), 0.5, 1.0).is_err());
    }

    #[test]
    fn modulus_examples() {
        let e = RadialMetric::euclidean();
        assert_abs_diff_eq!(modulus_of_c(&e, 0.8, 1.0, 0.0).unwrap(), (1.25f64).ln(), epsilon = 1e-10);
        assert_abs_diff_eq!(modulus_of_c(&e, 0.8, 1.0, -0.64).unwrap(), 2f64.ln(), epsilon = 1e-10);
        let closed = 2.0 * ((1.0 + 1.5f64.sqrt()) / (0.5f64.sqrt() + 1.0)).ln();
        assert_abs_diff_eq!(modulus_of_c(&RadialMetric::inverse_r(), 0.5, 1.0, 0.5).unwrap(), closed, epsilon = 1e-10);
        let err = modulus_of_c(&e, 0.8, 1.0, -0.65).unwrap_err();
        assert!(matches!(err, Error::BelowCriticalConstant { .. }));
    }

    #[test]
    fn modulus_near_critical_matches_closed_form() {
        for dc in [1e-12, 1e-9, 1e-7, 1e-5, 1e-3] {
            let c = -0.64 + dc;
            let mu = modulus_of_c(&RadialMetric::euclidean(), 0.8, 1.0, c).unwrap();
            assert_abs_diff_eq!(mu, mu_closed(c), epsilon = 1e-10);
        }
    }

    #[test]
    fn flat_weight_near_critical_stays_fast_and_accurate() {
        // y^2 rho = 1: mu(c) = log(2) / sqrt(1 + c).
        let m = RadialMetric::power(-2.0);
        for dc in [1e-2, 1e-6, 1e-10] {
            let mu = modulus_of_c(&m, 0.5, 1.0, -1.0 + dc).unwrap();
            let exact = 2f64.ln() / dc.sqrt();
            assert!((mu - exact).abs() <= 1e-12 * exact / dc + 1e-10 * exact, "dc = {dc}: {mu} vs {exact}");
        }
        let spec = ProblemSpec::new(m, 0.5, 1.0, 0.05).unwrap();
        let c = solve_c(&spec, &SolverConfig::default()).unwrap();
        assert_abs_diff_eq!(c, (2f64.ln() / 20f64.ln()).powi(2) - 1.0, epsilon = 1e-9);
    }

    #[test]
    fn interior_double_zero_diverges() {
        // rho = y^-2 makes y^2 rho flat, so the radicand at c_crit vanishes
        // identically.
        let m = RadialMetric::power(-2.0);
        let err = modulus_of_c(&m, 0.5, 1.0, -1.0).unwrap_err();
        assert!(matches!(err, Error::DivergentModulus { .. }), "{err:?}");
        assert_eq!(critical_inner_radius(&m, 0.5, 1.0).unwrap(), None);
    }

    #[test]
    fn solve_c_examples() {
        let cfg = SolverConfig::default();
        assert_eq!(solve_c(&euclid(0.8, 0.8), &cfg).unwrap(), 0.0);
        assert_abs_diff_eq!(solve_c(&euclid(0.8, 0.5), &cfg).unwrap(), -0.64, epsilon = 1e-12);
        assert_abs_diff_eq!(solve_c(&euclid(0.8, 0.6), &cfg).unwrap(), -0.609375, epsilon = 1e-8);
        let c = solve_c(&euclid(0.8, 0.9), &cfg).unwrap();
        assert!(c > 0.0);
        assert_abs_diff_eq!(mu_closed(c), -(0.9f64.ln()), epsilon = 1e-9);
    }

    #[test]
    fn below_critical_reports_radius() {
        let err = solve_c(&euclid(0.8, 0.4), &SolverConfig::default()).unwrap_err();
        match err {
            Error::BelowCritical { critical_r: Some(rc), .. } => assert_abs_diff_eq!(rc, 0.5, epsilon = 1e-10),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn critical_radius_closed_forms() {
        let e = RadialMetric::euclidean();
        assert_abs_diff_eq!(critical_inner_radius(&e, 0.8, 1.0).unwrap().unwrap(), 0.5, epsilon = 1e-10);
        for r in [0.3, 0.7] {
            let q = 2.0 * r / (1.0 + r * r);
            assert_abs_diff_eq!(critical_inner_radius(&e, q, 1.0).unwrap().unwrap(), r, epsilon = 1e-9);
        }
        let rc = critical_inner_radius(&RadialMetric::inverse_r(), 0.5, 1.0).unwrap().unwrap();
        assert_abs_diff_eq!(rc, 3.0 - 2.0 * 2f64.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn conformal_profile_is_identity() {
        let p = solve(&euclid(0.8, 0.8), &SolverConfig::default()).unwrap();
        assert_eq!(p.classification, Classification::Conformal);
        for i in 0..=100 {
            let s = 0.8 + 0.002 * i as f64;
            assert_abs_diff_eq!(p.p(s), s, epsilon = 1e-12);
        }
    }

    #[test]
    fn critical_profile_matches_closed_form() {
        let p = solve(&euclid(0.8, 0.5), &SolverConfig::default()).unwrap();
        assert_eq!(p.classification, Classification::Critical);
        assert_abs_diff_eq!(p.p(0.7), 0.74 / (0.7 * 1.25), epsilon = 1e-10);
        assert_abs_diff_eq!(p.p(0.5), 0.8, epsilon = 1e-10);
        assert_eq!(p.p(1.0), 1.0);
        assert!(p.ode_endpoint_error.abs() <= 1e-6);
    }

    #[test]
    fn nitsche_closed_form() {
        let w = euclidean_nitsche_map(0.5).unwrap();
        assert_abs_diff_eq!(w.q(), 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(w.c, -0.64, epsilon = 1e-15);
        assert_eq!(w.p(1.0), 1.0);
        assert_abs_diff_eq!(w.dp(0.5), 0.0, epsilon = 1e-7);
        assert_abs_diff_eq!(w.profile.derivative(0.5), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn inverse_composes_to_identity() {
        let spec = ProblemSpec::new(RadialMetric::sphere(), 0.5, 1.0, 0.6).unwrap();
        let p = solve(&spec, &SolverConfig::default()).unwrap();
        for i in 0..100 {
            let s = 0.6 + 0.4 * i as f64 / 99.0;
            assert_abs_diff_eq!(p.inverse_at(p.p(s)), s, epsilon = 1e-8);
        }
    }

    #[test]
    fn config_validation() {
        let bad = SolverConfig {
            profile_knots: 8,
            ..SolverConfig::default()
        };
        assert!(solve(&euclid(0.8, 0.8), &bad).is_err());
        assert!(ProblemSpec::new(RadialMetric::euclidean(), 0.8, 1.0, 1.0).is_err());
        assert!(ProblemSpec::new(RadialMetric::euclidean(), 1.0, 0.8, 0.5).is_err());
    }

    #[test]
    fn domain_rescaling() {
        let s = ProblemSpec::from_domain(RadialMetric::euclidean(), 0.8, 1.0, 1.0, 2.0).unwrap();
        assert_eq!(s.r, 0.5);
    }
}

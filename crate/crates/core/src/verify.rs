//! Independent numerical checks of a solved minimizer.
//!
//! Residuals are measured with Cartesian finite differences on the sampled
//! map, so they test the profile rather than the formulas used to build it.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{self, PolarGrid};
use crate::metric::RadialMetric;
use crate::numerics::integrate_fixed;
use crate::solver::{self, Classification, MinimizerProfile, ProblemSpec, SolverConfig};

/// Interior sample grid of the residual checks.
pub const RESIDUAL_GRID: (usize, usize) = (16, 32);
/// Step of the absolute residual checks.
pub const RESIDUAL_STEP: f64 = 1e-3;
/// Coarse step of the convergence-order checks (the fine step is half).
pub const ORDER_STEP: f64 = 0.02;
pub const MIN_ORDER: f64 = 1.8;
// Residual pairs below this are rounding noise; no order can be fitted.
const ORDER_NOISE_FLOOR: f64 = 1e-10;
const PERTURBATION_MODES: usize = 3;
const PERTURBATION_RETRIES: usize = 100;
const ENERGY_PANELS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
            detail: detail.into(),
        }
    }

    fn scaled(mut self, factor: f64) -> Self {
        self.tolerance *= factor;
        self.passed = self.measured <= self.tolerance;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.checks.push(record);
    }
}

// 3x3 samples of w around z0; `w[j][i]` sits at z0 + h((i-1) + i(j-1)).
type Stencil = [[Complex64; 3]; 3];

fn sample_stencil<F>(f: &F, z0: Complex64, h: f64) -> Result<Stencil>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut out = [[Complex64::new(0.0, 0.0); 3]; 3];
    for (j, row) in out.iter_mut().enumerate() {
        for (i, cell) in row.iter_mut().enumerate() {
            let z = z0 + Complex64::new(h * (i as f64 - 1.0), h * (j as f64 - 1.0));
            *cell = f(z).map_err(|e| match e {
                Error::OutOfAnnulus { .. } => Error::StencilOutOfDomain { h },
                other => other,
            })?;
        }
    }
    Ok(out)
}

// Centered first differences averaged over the three rows (columns) with
// weights (1, 4, 1) / 6; exact to fourth order on harmonic fields.
fn partials(w: &Stencil, h: f64) -> (Complex64, Complex64) {
    let weights = [1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0];
    let mut dx = Complex64::new(0.0, 0.0);
    let mut dy = Complex64::new(0.0, 0.0);
    for k in 0..3 {
        dx += (w[k][2] - w[k][0]) * weights[k];
        dy += (w[2][k] - w[0][k]) * weights[k];
    }
    (dx / (2.0 * h), dy / (2.0 * h))
}

fn wirtinger(w: &Stencil, h: f64) -> (Complex64, Complex64) {
    let (dx, dy) = partials(w, h);
    let i = Complex64::i();
    ((dx - i * dy) * 0.5, (dx + i * dy) * 0.5)
}

// Nine-point Laplacian.
fn laplacian(w: &Stencil, h: f64) -> Complex64 {
    let edges = w[1][0] + w[1][2] + w[0][1] + w[2][1];
    let corners = w[0][0] + w[0][2] + w[2][0] + w[2][2];
    (edges * 4.0 + corners - w[1][1] * 20.0) / (6.0 * h * h)
}

/// `(log rho)_w` at `w` for a radial metric: `(rho'/rho)(|w|) conj(w) / (2|w|)`.
pub fn log_rho_w(metric: &RadialMetric, w: Complex64) -> Complex64 {
    let m = w.norm();
    w.conj() * (metric.log_deriv(m) / (2.0 * m))
}

fn interior_points(profile: &MinimizerProfile, h: f64, margin: f64) -> Result<Vec<Complex64>> {
    let (n_s, n_t) = RESIDUAL_GRID;
    let lo = profile.r() + margin;
    let hi = 1.0 - margin;
    if !(h > 0.0) || lo >= hi {
        return Err(Error::StencilOutOfDomain { h });
    }
    Ok((0..n_s)
        .flat_map(|i| {
            let s = lo + (hi - lo) * i as f64 / (n_s - 1) as f64;
            (0..n_t).map(move |j| Complex64::from_polar(s, 2.0 * PI * j as f64 / n_t as f64))
        })
        .collect())
}

fn residual_at(profile: &MinimizerProfile, z0: Complex64, h: f64) -> Result<Complex64> {
    let map = |z| field::map_point(profile, z);
    let w = sample_stencil(&map, z0, h)?;
    let (wz, wzb) = wirtinger(&w, h);
    Ok(laplacian(&w, h) * 0.25 + log_rho_w(profile.metric(), w[1][1]) * wz * wzb)
}

fn max_residual_on(profile: &MinimizerProfile, h: f64, points: &[Complex64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &z0 in points {
        worst = worst.max(residual_at(profile, z0, h)?.norm());
    }
    Ok(worst)
}

fn max_hopf_derivative_on(profile: &MinimizerProfile, h: f64, points: &[Complex64]) -> Result<f64> {
    let hopf = |z| field::hopf_quantity(profile, z);
    let mut worst = 0.0f64;
    for &z0 in points {
        let values = sample_stencil(&hopf, z0, h)?;
        let (_, d_zbar) = wirtinger(&values, h);
        worst = worst.max(d_zbar.norm());
    }
    Ok(worst)
}

/// Max over the interior grid of `|w_{z zbar} + (log rho)_w(w) w_z w_zbar|`,
/// all derivatives of `w` by finite differences with step `h`. The grid
/// spans `r + 2h <= |z| <= 1 - 2h`.
pub fn pde_residual(profile: &MinimizerProfile, h: f64) -> Result<f64> {
    let points = interior_points(profile, h, 2.0 * h)?;
    max_residual_on(profile, h, &points)
}

/// [`pde_residual`] at `h` and `h/2` on one common grid (margin `2h`).
pub fn pde_residual_pair(profile: &MinimizerProfile, h: f64) -> Result<(f64, f64)> {
    let points = interior_points(profile, h, 2.0 * h)?;
    Ok((max_residual_on(profile, h, &points)?, max_residual_on(profile, 0.5 * h, &points)?))
}

/// Pointwise Richardson extrapolation `(4 tau(h/2) - tau(h)) / 3` of the
/// residual, maximized over the interior grid (margin `2h`). This removes the
/// leading `h^2` truncation term and so estimates the residual of the sampled
/// map itself.
pub fn extrapolated_residual(profile: &MinimizerProfile, h: f64) -> Result<f64> {
    let points = interior_points(profile, h, 2.0 * h)?;
    let mut worst = 0.0f64;
    for &z0 in &points {
        let coarse = residual_at(profile, z0, h)?;
        let fine = residual_at(profile, z0, 0.5 * h)?;
        worst = worst.max(((fine * 4.0 - coarse) / 3.0).norm());
    }
    Ok(worst)
}

/// Max over the interior grid of `|d/dzbar (rho(w) w_z conj(w_zbar))|`, the
/// outer derivative by finite differences.
pub fn general_harmonic_residual(profile: &MinimizerProfile, h: f64) -> Result<f64> {
    let points = interior_points(profile, h, 2.0 * h)?;
    max_hopf_derivative_on(profile, h, &points)
}

pub fn general_harmonic_residual_pair(profile: &MinimizerProfile, h: f64) -> Result<(f64, f64)> {
    let points = interior_points(profile, h, 2.0 * h)?;
    Ok((
        max_hopf_derivative_on(profile, h, &points)?,
        max_hopf_derivative_on(profile, 0.5 * h, &points)?,
    ))
}

/// `log2(coarse / fine)`, or `None` when both sit at rounding level.
pub fn fitted_order(coarse: f64, fine: f64) -> Option<f64> {
    if coarse.max(fine) <= ORDER_NOISE_FLOOR {
        None
    } else {
        Some((coarse / fine).log2())
    }
}

fn order_record(name: &str, (coarse, fine): (f64, f64), h: f64) -> CheckRecord {
    match fitted_order(coarse, fine) {
        Some(order) => CheckRecord::new(
            name,
            (MIN_ORDER - order).max(0.0),
            0.0,
            format!("order {order:.3} from residuals {coarse:.3e} (h = {h}) and {fine:.3e} (h = {})", 0.5 * h),
        ),
        None => CheckRecord::new(name, 0.0, 0.0, format!("residuals {coarse:.3e}, {fine:.3e} at rounding level")),
    }
}

/// `max |z^2 rho(w) w_z conj(w_zbar) - c/4|` over `grid`.
pub fn hopf_constancy_check(profile: &MinimizerProfile, grid: &PolarGrid, tol: f64) -> Result<CheckRecord> {
    let target = field::hopf_constant(profile);
    let mut worst = 0.0f64;
    for (s, t) in grid.points() {
        let z = Complex64::from_polar(s, t);
        let value = field::hopf_quantity(profile, z)? * z * z;
        worst = worst.max((value - target).norm());
    }
    Ok(CheckRecord::new(
        "hopf_constancy",
        worst,
        tol,
        format!("z^2 * hopf against c/4 = {target:.12e} on a {}x{} grid", grid.n_s, grid.n_t),
    ))
}

/// Outcome of [`minimality_probe`]: energies of fixed-boundary radial
/// competitors `p + e phi` under one fixed quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimalityProbe {
    pub eps: f64,
    pub base_energy: f64,
    /// `E[p + eps phi] - E[p]` per perturbation.
    pub excess_coarse: Vec<f64>,
    /// `E[p + (eps/10) phi] - E[p]` per perturbation.
    pub excess_fine: Vec<f64>,
    pub retries: usize,
}

impl MinimalityProbe {
    /// Largest energy decrease over all competitors.
    pub fn max_deficit(&self) -> f64 {
        self.excess_coarse
            .iter()
            .chain(&self.excess_fine)
            .map(|e| -e)
            .fold(0.0, f64::max)
    }

    pub fn excess_ratios(&self) -> Vec<f64> {
        self.excess_coarse.iter().zip(&self.excess_fine).map(|(a, b)| a / b).collect()
    }

    /// Two records: no competitor lowers the energy by more than 1e-10, and
    /// each excess ratio lies in [50, 200] (`|log2(ratio/100)| <= 1`).
    pub fn records(&self) -> [CheckRecord; 2] {
        let ratios = self.excess_ratios();
        let spread = ratios
            .iter()
            .map(|q| if *q > 0.0 { (q / 100.0).log2().abs() } else { f64::INFINITY })
            .fold(0.0, f64::max);
        let (lo, hi) = ratios
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), q| (lo.min(*q), hi.max(*q)));
        [
            CheckRecord::new(
                "radial_local_minimality",
                self.max_deficit(),
                1e-10,
                format!(
                    "{} radial competitors at eps = {} and {}; smallest excess {:.3e}",
                    self.excess_coarse.len(),
                    self.eps,
                    0.1 * self.eps,
                    self.excess_coarse.iter().chain(&self.excess_fine).fold(f64::INFINITY, |a, b| a.min(*b)),
                ),
            ),
            CheckRecord::new(
                "radial_minimality_quadratic_excess",
                spread,
                1.0,
                format!("excess ratios in [{lo:.2}, {hi:.2}], expected near 100"),
            ),
        ]
    }
}

/// `phi(s) = sum_k a_k sin(k pi (s - r)/(1 - r))`, scaled to unit sup norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    coeffs: [f64; PERTURBATION_MODES],
    r: f64,
}

impl Perturbation {
    pub fn new(coeffs: [f64; PERTURBATION_MODES], r: f64) -> Self {
        let raw = Self { coeffs, r };
        let sup = (0..=2000)
            .map(|i| raw.value(r + (1.0 - r) * i as f64 / 2000.0).abs())
            .fold(0.0, f64::max);
        let scale = if sup > 0.0 { 1.0 / sup } else { 0.0 };
        Self {
            coeffs: coeffs.map(|a| a * scale),
            r,
        }
    }

    pub fn zero(r: f64) -> Self {
        Self {
            coeffs: [0.0; PERTURBATION_MODES],
            r,
        }
    }

    fn phase(&self, s: f64) -> f64 {
        PI * (s - self.r) / (1.0 - self.r)
    }

    pub fn value(&self, s: f64) -> f64 {
        let x = self.phase(s);
        self.coeffs.iter().enumerate().map(|(k, a)| a * ((k + 1) as f64 * x).sin()).sum()
    }

    pub fn slope(&self, s: f64) -> f64 {
        let x = self.phase(s);
        let scale = PI / (1.0 - self.r);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a * (k + 1) as f64 * scale * ((k + 1) as f64 * x).cos())
            .sum()
    }
}

/// Energy of `p + eps phi` under the fixed composite rule; `None` if the
/// competitor leaves the metric's domain.
pub fn perturbed_energy(profile: &MinimizerProfile, phi: &Perturbation, eps: f64) -> Option<f64> {
    let metric = profile.metric();
    let r = profile.r();
    let inside = std::cell::Cell::new(true);
    let value = integrate_fixed(
        |s| {
            let p = profile.p(s) + eps * phi.value(s);
            if !metric.contains(p) {
                inside.set(false);
                return 0.0;
            }
            let dp = profile.dp(s) + eps * phi.slope(s);
            metric.eval(p) * (dp * dp + p * p / (s * s)) * s
        },
        r,
        1.0,
        ENERGY_PANELS,
    );
    inside.get().then_some(2.0 * PI * value)
}

/// Compares the energy of `n` seeded random radial competitors at `eps` and
/// `eps / 10` against the profile's own energy.
pub fn minimality_probe(profile: &MinimizerProfile, n: usize, eps: f64, seed: u64) -> Result<MinimalityProbe> {
    if !(eps > 0.0 && eps <= 1e-2) {
        return Err(Error::BadParameter(format!("perturbation size {eps} outside (0, 1e-2]")));
    }
    let r = profile.r();
    let base_energy = perturbed_energy(profile, &Perturbation::zero(r), 0.0)
        .ok_or_else(|| Error::InvalidSpec("profile leaves the metric's domain".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut probe = MinimalityProbe {
        eps,
        base_energy,
        excess_coarse: Vec::with_capacity(n),
        excess_fine: Vec::with_capacity(n),
        retries: 0,
    };
    for _ in 0..n {
        let mut attempts = 0;
        loop {
            let coeffs = [(); PERTURBATION_MODES].map(|_| rng.gen_range(-1.0..1.0));
            let phi = Perturbation::new(coeffs, r);
            let coarse = perturbed_energy(profile, &phi, eps);
            let fine = perturbed_energy(profile, &phi, 0.1 * eps);
            if let (Some(a), Some(b)) = (coarse, fine) {
                probe.excess_coarse.push(a - base_energy);
                probe.excess_fine.push(b - base_energy);
                break;
            }
            attempts += 1;
            probe.retries += 1;
            if attempts >= PERTURBATION_RETRIES {
                return Err(Error::PerturbationLeavesRange { retries: attempts });
            }
        }
    }
    Ok(probe)
}

/// For each `r`, checks that `sign(c)` matches `sign(log(Q/q) - log(1/r))`
/// (with `|c| <= tol_c` and equal moduli both counting as zero). Radii
/// without a minimizer are skipped and listed in the detail.
pub fn modulus_equivalence_check(
    metric: &RadialMetric,
    q: f64,
    big_q: f64,
    r_values: &[f64],
    config: &SolverConfig,
) -> Result<CheckRecord> {
    let mut mismatches = Vec::new();
    let mut skipped = Vec::new();
    for &r in r_values {
        let spec = ProblemSpec::new(metric.clone(), q, big_q, r)?;
        let c = match solver::solve_c(&spec, config) {
            Ok(c) => c,
            Err(Error::BelowCritical { .. }) => {
                skipped.push(r);
                continue;
            }
            Err(e) => return Err(e),
        };
        if !sign_law_holds(c, &spec, config.tol_c) {
            mismatches.push(r);
        }
    }
    let mut detail = format!("{} radii checked", r_values.len() - skipped.len());
    if !skipped.is_empty() {
        detail.push_str(&format!("; below critical: {skipped:?}"));
    }
    if !mismatches.is_empty() {
        detail.push_str(&format!("; sign mismatch at {mismatches:?}"));
    }
    Ok(CheckRecord::new("modulus_sign_equivalence", mismatches.len() as f64, 0.0, detail))
}

fn sign_law_holds(c: f64, spec: &ProblemSpec, tol_c: f64) -> bool {
    let gap = spec.modulus_target() - spec.modulus_domain();
    let c_sign = if c.abs() <= tol_c { 0.0 } else { c.signum() };
    // c is of the order of the modulus gap; a gap this small counts as zero.
    let gap_sign = if gap.abs() <= tol_c { 0.0 } else { gap.signum() };
    c_sign == gap_sign
}

/// Knobs of [`run_full_suite_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub grid_s: usize,
    pub grid_t: usize,
    pub perturbations: usize,
    pub perturbation_eps: f64,
    /// Multiplies every check tolerance.
    pub tolerance_scale: f64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            grid_s: 32,
            grid_t: 64,
            perturbations: 20,
            perturbation_eps: 1e-2,
            tolerance_scale: 1.0,
        }
    }
}

pub fn run_full_suite(spec: &ProblemSpec, config: &SolverConfig) -> Result<VerificationReport> {
    run_full_suite_with(spec, config, &SuiteOptions::default())
}

/// Solves `spec` and runs every check in a fixed order. A configuration
/// without a minimizer yields a single failed `solve` record.
pub fn run_full_suite_with(
    spec: &ProblemSpec,
    config: &SolverConfig,
    options: &SuiteOptions,
) -> Result<VerificationReport> {
    let profile = match solver::solve(spec, config) {
        Ok(p) => p,
        Err(Error::BelowCritical { critical_c, critical_r }) => {
            let (measured, detail) = match critical_r {
                Some(rc) => (rc - spec.r, format!("no radial minimizer: r = {} < critical r = {rc}", spec.r)),
                None => (f64::INFINITY, format!("no radial minimizer (critical c = {critical_c})")),
            };
            let mut report = VerificationReport::default();
            report.push(CheckRecord::new("solve", measured, 0.0, detail).scaled(options.tolerance_scale));
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    profile_report(&profile, config, options)
}

/// The checks of [`run_full_suite_with`] on an already solved profile.
pub fn profile_report(
    profile: &MinimizerProfile,
    config: &SolverConfig,
    options: &SuiteOptions,
) -> Result<VerificationReport> {
    let checks = profile_checks(profile, config, options)?
        .into_iter()
        .map(|record| record.scaled(options.tolerance_scale))
        .collect();
    Ok(VerificationReport { checks })
}

fn profile_checks(profile: &MinimizerProfile, config: &SolverConfig, options: &SuiteOptions) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let c = profile.c;
    let (q, big_q, r) = (profile.q(), profile.big_q(), profile.r());
    let metric = profile.metric();
    out.push(CheckRecord::new(
        "solve",
        0.0,
        0.0,
        format!("c = {c:.15e} ({})", profile.classification.as_str()),
    ));

    let grid = PolarGrid::new(options.grid_s, options.grid_t, r)?;
    out.push(hopf_constancy_check(profile, &grid, 1e-6 * (1.0 + c.abs()))?);

    let samples = field::export_grid(profile, &grid)?;
    let mean_im = samples.iter().map(|x| (x.hopf * x.z * x.z).im).sum::<f64>() / samples.len() as f64;
    out.push(CheckRecord::new(
        "hopf_orthogonality",
        mean_im.abs(),
        1e-8,
        "mean imaginary part of z^2 * hopf",
    ));

    let tau = pde_residual(profile, RESIDUAL_STEP)?;
    let tau_limit = extrapolated_residual(profile, 2.0 * RESIDUAL_STEP)?;
    out.push(CheckRecord::new(
        "pde_residual",
        tau_limit,
        1e-6,
        format!(
            "max |tau| extrapolated from h = {} and {RESIDUAL_STEP}; raw max |tau| at h = {RESIDUAL_STEP} is {tau:.3e}",
            2.0 * RESIDUAL_STEP
        ),
    ));
    out.push(order_record("pde_residual_order", pde_residual_pair(profile, ORDER_STEP)?, ORDER_STEP));
    let hopf_bar = general_harmonic_residual(profile, RESIDUAL_STEP)?;
    out.push(CheckRecord::new(
        "general_harmonic_residual",
        hopf_bar,
        1e-5,
        format!("max |d/dzbar hopf| at h = {RESIDUAL_STEP}"),
    ));
    out.push(order_record(
        "general_harmonic_residual_order",
        general_harmonic_residual_pair(profile, ORDER_STEP)?,
        ORDER_STEP,
    ));

    let energy = field::energy(profile)?;
    let bound = 2.0 * metric.area(q, big_q)?;
    out.push(CheckRecord::new(
        "energy_lower_bound",
        (bound - energy).max(0.0),
        1e-9,
        format!("energy {energy:.12e}, 2 * area {bound:.12e}"),
    ));
    if c.abs() <= 1e-8 {
        out.push(CheckRecord::new(
            "energy_equals_lower_bound",
            (energy - bound).abs(),
            1e-8,
            "c = 0: the energy attains 2 * area",
        ));
    }

    let (_, k_prime) = field::kk_constants(profile)?;
    let mut kk_excess = f64::NEG_INFINITY;
    let mut identity_dev = 0.0f64;
    let mut norms_dev = 0.0f64;
    let mut min_jac = f64::INFINITY;
    for x in &samples {
        let (a, b) = (x.wz.norm(), x.wzb.norm());
        let dirichlet = 2.0 * a * a + 2.0 * b * b;
        kk_excess = kk_excess.max(dirichlet - 2.0 * x.jac - k_prime);
        let scale = dirichlet.max(f64::MIN_POSITIVE);
        identity_dev = identity_dev
            .max((x.opnorm * x.lonorm - x.jac.abs()).abs() / scale)
            .max((x.opnorm * x.opnorm + x.lonorm * x.lonorm - dirichlet).abs() / scale);
        let (op, lo) = field::operator_norms(profile, x.z)?;
        norms_dev = norms_dev.max((op - x.opnorm).abs().max((lo - x.lonorm).abs()) / scale.sqrt());
        min_jac = min_jac.min(x.jac);
    }
    out.push(CheckRecord::new(
        "kk_inequality",
        kk_excess.max(0.0),
        1e-9,
        format!("||Dw||^2 - 2J - K' peaks at {kk_excess:.3e} with K' = {k_prime:.12e}"),
    ));
    out.push(CheckRecord::new(
        "norm_identities",
        identity_dev.max(norms_dev),
        1e-12,
        "relative deviation of |Dw| l(Dw) = |J|, |Dw|^2 + l(Dw)^2 = ||Dw||^2 and the radial norm formulas",
    ));
    out.push(CheckRecord::new(
        "jacobian_sign",
        (-min_jac).max(0.0),
        1e-12,
        format!("smallest Jacobian {min_jac:.3e}"),
    ));

    let (sup_op, inf_lo) = field::lipschitz_constant(profile);
    if c >= 0.0 {
        out.push(CheckRecord::new(
            "smallest_stretch_bound",
            (q - inf_lo).max(0.0),
            1e-9,
            format!("c >= 0: inf l(Dw) = {inf_lo:.12e} against q = {q}"),
        ));
    }
    if profile.classification == Classification::Critical {
        out.push(CheckRecord::new(
            "critical_degeneracy",
            inf_lo.abs(),
            1e-6,
            format!("critical: inf l(Dw) = {inf_lo:.3e}, sup |Dw| = {sup_op:.12e}"),
        ));
    }

    let probe = minimality_probe(profile, options.perturbations, options.perturbation_eps, config.seed)?;
    out.extend(probe.records());

    let sign_ok = sign_law_holds(c, &profile.spec, config.tol_c);
    out.push(CheckRecord::new(
        "modulus_sign_equivalence",
        if sign_ok { 0.0 } else { 1.0 },
        0.0,
        format!(
            "c = {c:.3e}, log(Q/q) - log(1/r) = {:.3e}",
            profile.spec.modulus_target() - profile.spec.modulus_domain()
        ),
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{euclidean_nitsche_map, solve};

    fn conformal() -> MinimizerProfile {
        let spec = ProblemSpec::new(RadialMetric::euclidean(), 0.8, 1.0, 0.8).unwrap();
        solve(&spec, &SolverConfig::default()).unwrap()
    }

    #[test]
    fn stencils_are_exact_on_polynomials() {
        let h = 0.1;
        let f = |z: Complex64| -> Result<Complex64> { Ok(z * z * z + z.conj() * z * 2.0) };
        let z0 = Complex64::new(0.3, -0.2);
        let w = sample_stencil(&f, z0, h).unwrap();
        let (wz, wzb) = wirtinger(&w, h);
        assert!((wz - (z0 * z0 * 3.0 + z0.conj() * 2.0)).norm() < 1e-12);
        assert!((wzb - z0 * 2.0).norm() < 1e-12);
        // Laplacian of 2|z|^2 is 8.
        assert!((laplacian(&w, h) - 8.0).norm() < 1e-10);
    }

    #[test]
    fn conformal_residuals_vanish() {
        let p = conformal();
        // The nine-point Laplacian amplifies value rounding by ~1/h^2, so the
        // 1e-10 level is only reachable for moderate steps.
        assert!(pde_residual(&p, 1e-2).unwrap() <= 1e-10);
        assert!(pde_residual(&p, 1e-3).unwrap() <= 1e-9);
        assert!(general_harmonic_residual(&p, 1e-3).unwrap() <= 1e-12);
    }

    #[test]
    fn critical_closed_form_residual() {
        let p = euclidean_nitsche_map(0.5).unwrap();
        assert!(pde_residual(&p, 1e-3).unwrap() <= 1e-5);
        assert!(general_harmonic_residual(&p, 1e-3).unwrap() <= 1e-5);
    }

    #[test]
    fn oversized_step_is_rejected() {
        let p = conformal();
        assert!(matches!(pde_residual(&p, 0.06), Err(Error::StencilOutOfDomain { .. })));
        assert!(matches!(pde_residual(&p, -1.0), Err(Error::StencilOutOfDomain { .. })));
    }

    #[test]
    fn hopf_check_examples() {
        let crit = euclidean_nitsche_map(0.5).unwrap();
        let grid = PolarGrid::new(8, 16, 0.5).unwrap();
        let rec = hopf_constancy_check(&crit, &grid, 1e-6).unwrap();
        assert!(rec.passed, "{rec:?}");
        let rec = hopf_constancy_check(&conformal(), &PolarGrid::new(8, 16, 0.8).unwrap(), 1e-10).unwrap();
        assert!(rec.passed, "{rec:?}");
    }

    #[test]
    fn zero_perturbation_has_no_excess() {
        let p = conformal();
        let base = perturbed_energy(&p, &Perturbation::zero(0.8), 0.0).unwrap();
        assert_eq!(perturbed_energy(&p, &Perturbation::zero(0.8), 1e-2).unwrap(), base);
    }

    #[test]
    fn perturbations_are_sup_normalized_and_pinned() {
        let phi = Perturbation::new([0.3, -2.0, 0.7], 0.5);
        assert!(phi.value(0.5).abs() < 1e-15 && phi.value(1.0).abs() < 1e-15);
        let sup = (0..=4000).map(|i| phi.value(0.5 + 0.5 * i as f64 / 4000.0).abs()).fold(0.0, f64::max);
        assert!((sup - 1.0).abs() < 1e-5);
    }

    #[test]
    fn minimality_examples() {
        for p in [conformal(), euclidean_nitsche_map(0.5).unwrap()] {
            let probe = minimality_probe(&p, 20, 1e-2, 42).unwrap();
            assert!(probe.excess_coarse.iter().all(|e| *e >= 0.0));
            let [min, scaling] = probe.records();
            assert!(min.passed, "{min:?}");
            assert!(scaling.passed, "{scaling:?}");
        }
    }

    #[test]
    fn probe_is_seeded() {
        let p = conformal();
        let a = minimality_probe(&p, 5, 1e-2, 7).unwrap();
        let b = minimality_probe(&p, 5, 1e-2, 7).unwrap();
        let c = minimality_probe(&p, 5, 1e-2, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.excess_coarse, c.excess_coarse);
        assert!(minimality_probe(&p, 5, 0.1, 7).is_err());
    }

    #[test]
    fn sign_equivalence_examples() {
        let rec = modulus_equivalence_check(
            &RadialMetric::euclidean(),
            0.8,
            1.0,
            &[0.9, 0.8, 0.6, 0.4],
            &SolverConfig::default(),
        )
        .unwrap();
        assert!(rec.passed, "{rec:?}");
        assert!(rec.detail.contains("below critical: [0.4]"));
    }

    #[test]
    fn record_pass_rule() {
        assert!(CheckRecord::new("a", 1.0, 1.0, "").passed);
        assert!(!CheckRecord::new("a", 1.0 + 1e-15, 1.0, "").passed);
        assert!(!CheckRecord::new("a", f64::NAN, 1.0, "").passed);
        assert!(!CheckRecord::new("a", 1e-20, 1.0, "").scaled(1e-21).passed);
    }
}

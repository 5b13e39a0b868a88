//! Pointwise differential quantities of a radial minimizer.
//!
//! For `z = s e^{it}` and `w = p(s) e^{it}` the Wirtinger derivatives are
//!
//! ```text
//! w_z    = (p' + p/s) / 2,
//! w_zbar = e^{2it} (p' - p/s) / 2,
//! ```
//!
//! so `|Dw| = max{p/s, p'}`, `l(Dw) = min{p/s, p'}` and
//! `z^2 rho(w) w_z conj(w_zbar) = rho(p) (s^2 p'^2 - p^2) / 4 = c / 4`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{integrate_adaptive, minimize_scalar};
use crate::solver::MinimizerProfile;

/// Points per radial scan before golden-section refinement.
pub const RADIAL_SCAN_POINTS: usize = 2048;
const ANNULUS_SLACK: f64 = 1e-12;
const ENERGY_TOL: f64 = 1e-12;

/// Polar sample grid `s_i = r + i (1 - r) / (n_s - 1)`, `t_j = 2π j / n_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarGrid {
    pub n_s: usize,
    pub n_t: usize,
    pub r: f64,
}

impl PolarGrid {
    pub fn new(n_s: usize, n_t: usize, r: f64) -> Result<Self> {
        if n_s < 2 || n_t < 4 {
            return Err(Error::InvalidSpec(format!("grid {n_s}x{n_t} is too small (need n_s >= 2, n_t >= 4)")));
        }
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidSpec(format!("grid inner radius {r} outside (0, 1)")));
        }
        Ok(Self { n_s, n_t, r })
    }

    pub fn s(&self, i: usize) -> f64 {
        if i + 1 == self.n_s {
            1.0
        } else {
            self.r + i as f64 * (1.0 - self.r) / (self.n_s - 1) as f64
        }
    }

    pub fn t(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.n_t as f64
    }

    /// Grid points in s-major order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.n_s).flat_map(move |i| (0..self.n_t).map(move |j| (self.s(i), self.t(j))))
    }
}

/// All pointwise quantities at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub s: f64,
    pub t: f64,
    pub z: Complex64,
    pub w: Complex64,
    pub wz: Complex64,
    pub wzb: Complex64,
    pub jac: f64,
    pub opnorm: f64,
    pub lonorm: f64,
    /// `rho(w) w_z conj(w_zbar)`.
    pub hopf: Complex64,
}

fn radius_in_annulus(profile: &MinimizerProfile, z: Complex64) -> Result<f64> {
    let s = z.norm();
    let r = profile.r();
    if !(s >= r * (1.0 - ANNULUS_SLACK) && s <= 1.0 + ANNULUS_SLACK) {
        return Err(Error::OutOfAnnulus {
            modulus: s,
            inner: r,
            outer: 1.0,
        });
    }
    Ok(s.clamp(r, 1.0))
}

/// `w(z) = p(|z|) z / |z|`.
pub fn map_point(profile: &MinimizerProfile, z: Complex64) -> Result<Complex64> {
    let s = radius_in_annulus(profile, z)?;
    Ok(z * (profile.p(s) / z.norm()))
}

// (p, p') at radius s.
fn radial_values(profile: &MinimizerProfile, s: f64) -> (f64, f64) {
    (profile.p(s), profile.dp(s))
}

/// `(w_z, w_zbar)` at `z`.
pub fn derivatives_point(profile: &MinimizerProfile, z: Complex64) -> Result<(Complex64, Complex64)> {
    let s = radius_in_annulus(profile, z)?;
    let (p, dp) = radial_values(profile, s);
    let phase2 = (z / z.norm()).powi(2);
    let wz = Complex64::new(0.5 * (dp + p / s), 0.0);
    let wzb = phase2 * (0.5 * (dp - p / s));
    Ok((wz, wzb))
}

/// `(|Dw|, l(Dw)) = (max{p/s, p'}, min{p/s, p'})`.
pub fn operator_norms(profile: &MinimizerProfile, z: Complex64) -> Result<(f64, f64)> {
    let s = radius_in_annulus(profile, z)?;
    Ok(radial_norms(profile, s))
}

fn radial_norms(profile: &MinimizerProfile, s: f64) -> (f64, f64) {
    let (p, dp) = radial_values(profile, s);
    let tangential = p / s;
    (tangential.max(dp), tangential.min(dp))
}

/// `rho(w) w_z conj(w_zbar)`; times `z^2` this is the constant `c / 4`.
pub fn hopf_quantity(profile: &MinimizerProfile, z: Complex64) -> Result<Complex64> {
    let s = radius_in_annulus(profile, z)?;
    let (wz, wzb) = derivatives_point(profile, z)?;
    let rho = profile.metric().eval(profile.p(s));
    Ok(wz * wzb.conj() * rho)
}

/// The Hopf constant `c / 4`.
pub fn hopf_constant(profile: &MinimizerProfile) -> f64 {
    0.25 * profile.c
}

pub fn field_sample(profile: &MinimizerProfile, z: Complex64) -> Result<FieldSample> {
    let s = radius_in_annulus(profile, z)?;
    let w = map_point(profile, z)?;
    let (wz, wzb) = derivatives_point(profile, z)?;
    let (a, b) = (wz.norm(), wzb.norm());
    let rho = profile.metric().eval(w.norm());
    Ok(FieldSample {
        s,
        t: z.arg(),
        z,
        w,
        wz,
        wzb,
        jac: a * a - b * b,
        opnorm: a + b,
        lonorm: (a - b).abs(),
        hopf: wz * wzb.conj() * rho,
    })
}

/// `2π ∫_r^1 rho(p) (p'^2 + p^2/s^2) s ds`.
pub fn energy(profile: &MinimizerProfile) -> Result<f64> {
    let metric = profile.metric();
    let integrand = |s: f64| {
        let (p, dp) = radial_values(profile, s);
        metric.eval(p) * (dp * dp + p * p / (s * s)) * s
    };
    Ok(2.0 * PI * integrate_adaptive(integrand, profile.r(), 1.0, ENERGY_TOL)?)
}

/// Extremum of a radial quantity: a [`RADIAL_SCAN_POINTS`] scan on `[r, 1]`
/// followed by refinement in the best cell.
fn radial_extremum<F: Fn(f64) -> f64>(profile: &MinimizerProfile, f: F, maximize: bool) -> f64 {
    let r = profile.r();
    let sign = if maximize { -1.0 } else { 1.0 };
    let g = |s: f64| sign * f(s);
    let n = RADIAL_SCAN_POINTS;
    let step = (1.0 - r) / (n - 1) as f64;
    let s_at = |i: usize| if i + 1 == n { 1.0 } else { r + i as f64 * step };
    let (best_i, best) = (0..n)
        .map(|i| (i, g(s_at(i))))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("scan is non-empty");
    let lo = s_at(best_i.saturating_sub(1));
    let hi = s_at((best_i + 1).min(n - 1));
    let (_, refined) = minimize_scalar(g, lo, hi, 1e-13);
    sign * refined.min(best)
}

/// `(sup |Dw|, inf l(Dw))` over the annulus.
pub fn lipschitz_constant(profile: &MinimizerProfile) -> (f64, f64) {
    let sup_op = radial_extremum(profile, |s| radial_norms(profile, s).0, true);
    let inf_lo = radial_extremum(profile, |s| radial_norms(profile, s).1, false);
    (sup_op, inf_lo)
}

/// `(K, K') = (1, |c| / (r^2 inf rho))`, so that
/// `||Dw||^2 <= 2 K J + K'` pointwise.
pub fn kk_constants(profile: &MinimizerProfile) -> Result<(f64, f64)> {
    let rho_inf = profile.metric().rho_inf(profile.q(), profile.big_q())?;
    let r = profile.r();
    Ok((1.0, profile.c.abs() / (r * r * rho_inf)))
}

/// Samples every grid point, s-major then t.
pub fn export_grid(profile: &MinimizerProfile, grid: &PolarGrid) -> Result<Vec<FieldSample>> {
    grid.points()
        .map(|(s, t)| {
            let mut sample = field_sample(profile, Complex64::from_polar(s, t))?;
            sample.s = s;
            sample.t = t;
            Ok(sample)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::RadialMetric;
    use crate::solver::{euclidean_nitsche_map, solve, ProblemSpec, SolverConfig};
    use approx::assert_abs_diff_eq;

    fn conformal() -> MinimizerProfile {
        let spec = ProblemSpec::new(RadialMetric::euclidean(), 0.8, 1.0, 0.8).unwrap();
        solve(&spec, &SolverConfig::default()).unwrap()
    }

    #[test]
    fn map_point_examples() {
        let crit = euclidean_nitsche_map(0.5).unwrap();
        let w = map_point(&crit, Complex64::new(0.7, 0.0)).unwrap();
        assert_abs_diff_eq!(w.re, 0.74 / 0.875, epsilon = 1e-12);
        assert_abs_diff_eq!(w.im, 0.0, epsilon = 1e-15);

        let id = conformal();
        let w = map_point(&id, Complex64::new(0.0, 0.9)).unwrap();
        assert_abs_diff_eq!((w - Complex64::new(0.0, 0.9)).norm(), 0.0, epsilon = 1e-12);

        let t = 1.234;
        let w = map_point(&crit, Complex64::from_polar(1.0, t)).unwrap();
        assert_abs_diff_eq!((w - Complex64::from_polar(1.0, t)).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn outside_annulus_is_rejected() {
        let crit = euclidean_nitsche_map(0.5).unwrap();
        for z in [Complex64::new(0.3, 0.0), Complex64::new(0.0, 1.1)] {
            assert!(matches!(map_point(&crit, z), Err(Error::OutOfAnnulus { .. })));
        }
    }

    #[test]
    fn derivative_examples() {
        let crit = euclidean_nitsche_map(0.5).unwrap();
        let (wz, wzb) = derivatives_point(&crit, Complex64::new(0.5, 0.0)).unwrap();
        assert_abs_diff_eq!(wz.norm(), 0.8, epsilon = 1e-7);
        assert_abs_diff_eq!(wzb.norm(), 0.8, epsilon = 1e-7);

        let (wz, wzb) = derivatives_point(&crit, Complex64::new(1.0, 0.0)).unwrap();
        assert_abs_diff_eq!(wz.re, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(wzb.norm(), 0.2, epsilon = 1e-12);

        let (wz, wzb) = derivatives_point(&conformal(), Complex64::from_polar(0.9, 2.0)).unwrap();
        assert_abs_diff_eq!(wz.re, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(wzb.norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn norms_examples() {
        let crit = euclidean_nitsche_map(0.5).unwrap();
        let (op, lo) = operator_norms(&crit, Complex64::new(0.5, 0.0)).unwrap();
        assert_abs_diff_eq!(op, 1.6, epsilon = 1e-12);
        assert_abs_diff_eq!(lo, 0.0, epsilon = 1e-7);
        let (op, lo) = operator_norms(&crit, Complex64::new(0.0, -1.0)).unwrap();
        assert_abs_diff_eq!(op, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(lo, 0.6, epsilon = 1e-12);
    }

    #[test]
    fn hopf_matches_wirtinger_oracle() {
        let crit = euclidean_nitsche_map(0.5).unwrap();
        for z in [Complex64::new(0.7, 0.0), Complex64::from_polar(0.61, 2.2)] {
            let h = hopf_quantity(&crit, z).unwrap() * z * z;
            assert_abs_diff_eq!(h.re, -0.16, epsilon = 1e-12);
            assert_abs_diff_eq!(h.im, 0.0, epsilon = 1e-12);
        }
        let h = hopf_quantity(&conformal(), Complex64::new(0.85, 0.1)).unwrap();
        assert!(h.norm() < 1e-10);
    }

    #[test]
    fn critical_energy_closed_form() {
        let crit = euclidean_nitsche_map(0.5).unwrap();
        assert_abs_diff_eq!(energy(&crit).unwrap(), 1.2 * PI, epsilon = 1e-9);
        assert_abs_diff_eq!(energy(&conformal()).unwrap(), 2.0 * PI * 0.36, epsilon = 1e-9);
    }

    #[test]
    fn lipschitz_examples() {
        let (sup_op, inf_lo) = lipschitz_constant(&euclidean_nitsche_map(0.5).unwrap());
        assert_abs_diff_eq!(sup_op, 1.6, epsilon = 1e-12);
        assert!(inf_lo.abs() < 1e-6);
        let (sup_op, inf_lo) = lipschitz_constant(&conformal());
        assert_abs_diff_eq!(sup_op, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(inf_lo, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn kk_examples() {
        let (k, kp) = kk_constants(&conformal()).unwrap();
        assert_eq!(k, 1.0);
        assert!(kp < 1e-8);
        let (_, kp) = kk_constants(&euclidean_nitsche_map(0.5).unwrap()).unwrap();
        assert_abs_diff_eq!(kp, 2.56, epsilon = 1e-12);
    }

    #[test]
    fn grid_export_shape() {
        let crit = euclidean_nitsche_map(0.5).unwrap();
        let grid = PolarGrid::new(2, 4, 0.5).unwrap();
        let rows = export_grid(&crit, &grid).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows[..4].iter().all(|row| row.s == 0.5 && row.lonorm < 1e-6));
        assert!(rows.windows(2).all(|w| w[0].s <= w[1].s));
        assert!(PolarGrid::new(1, 4, 0.5).is_err());
        assert!(PolarGrid::new(2, 3, 0.5).is_err());
    }
}

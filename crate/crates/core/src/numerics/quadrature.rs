//! Globally adaptive Gauss–Kronrod (10/21) quadrature with optional
//! square-root endpoint substitution for integrable `(y - a)^(-1/2)` type
//! singularities.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Offset from an endpoint at which the integrand is probed for a singularity.
pub const SINGULAR_PROBE_OFFSET: f64 = 1e-12;
/// Integrand magnitude at the probe offset above which the square-root
/// substitution is switched on automatically.
pub const SINGULAR_TRIGGER: f64 = 1e6;
/// Transformed-integrand magnitude that is reported as divergence.
pub const DIVERGENCE_LIMIT: f64 = 1e12;
pub const DEFAULT_MAX_PANELS: usize = 1_000_000;
// Relative accuracy below which the per-panel error estimates are pure rounding.
const ROUNDING_FLOOR: f64 = 200.0 * f64::EPSILON;

/// How an endpoint is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Endpoint {
    /// Probe the integrand and substitute only if it is large near the endpoint.
    #[default]
    Auto,
    /// Always apply `y = a + u^2` (or `y = b - u^2`).
    Sqrt,
    /// Never substitute.
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub left: Endpoint,
    pub right: Endpoint,
    pub max_panels: usize,
    /// Relative accuracy below which the integrand's own noise dominates;
    /// the requested `tol` is relaxed to `rel_tol * ∫|f|`.
    pub rel_tol: f64,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            left: Endpoint::Auto,
            right: Endpoint::Auto,
            max_panels: DEFAULT_MAX_PANELS,
            rel_tol: 0.0,
        }
    }
}

impl QuadOptions {
    pub fn sqrt_both() -> Self {
        Self {
            left: Endpoint::Sqrt,
            right: Endpoint::Sqrt,
            ..Self::default()
        }
    }

    pub fn sqrt_left() -> Self {
        Self {
            left: Endpoint::Sqrt,
            right: Endpoint::Plain,
            ..Self::default()
        }
    }
}

/// Integrates `f` over `[a, b]` to absolute accuracy `tol`, detecting
/// square-root endpoint singularities automatically.
pub fn integrate_adaptive<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_adaptive_with(f, a, b, tol, QuadOptions::default())
}

pub fn integrate_adaptive_with<F>(f: F, a: f64, b: f64, tol: f64, opts: QuadOptions) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    // Without offsets the transformed integrand is only meaningful where
    // `end ± u^2` differs from `end`; below that it is held constant.
    let lo = a.min(b);
    let (floor_lo, floor_hi) = (substitution_floor(lo), substitution_floor(a.max(b)));
    integrate_offsets_with(
        |y, from_lo, from_hi| {
            if from_lo < floor_lo * floor_lo {
                f(lo + floor_lo * floor_lo)
            } else if from_hi < floor_hi * floor_hi {
                f(lo.max(a.max(b) - floor_hi * floor_hi))
            } else {
                f(y)
            }
        },
        a,
        b,
        tol,
        opts,
    )
}

/// Like [`integrate_adaptive_with`], but the integrand also receives the
/// distances `(y - lo, hi - y)` to both ends of the interval. Under the
/// square-root substitution these are exact (`u^2`) rather than the rounded
/// difference, so integrands that cancel near an endpoint can be evaluated
/// from a local expansion.
pub fn integrate_offsets_with<F>(f: F, a: f64, b: f64, tol: f64, opts: QuadOptions) -> Result<f64>
where
    F: Fn(f64, f64, f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        let swapped = QuadOptions {
            left: opts.right,
            right: opts.left,
            ..opts
        };
        return integrate_offsets_with(f, b, a, tol, swapped).map(|v| -v);
    }
    let width = b - a;
    let plain = |y: f64| f(y, y - a, b - y);
    let from_left = |u: f64| {
        let d = u * u;
        2.0 * u * f(a + d, d, width - d)
    };
    let from_right = |u: f64| {
        let d = u * u;
        2.0 * u * f(b - d, width - d, d)
    };

    let sub_left = resolve_endpoint(&plain, a + SINGULAR_PROBE_OFFSET, opts.left);
    let sub_right = resolve_endpoint(&plain, b - SINGULAR_PROBE_OFFSET, opts.right);

    match (sub_left, sub_right) {
        (false, false) => adaptive_gk(&plain, a, b, tol, &opts),
        (true, false) => {
            check_divergence(&from_left, a)?;
            adaptive_gk(&from_left, 0.0, width.sqrt(), tol, &opts)
        }
        (false, true) => {
            check_divergence(&from_right, b)?;
            adaptive_gk(&from_right, 0.0, width.sqrt(), tol, &opts)
        }
        (true, true) => {
            check_divergence(&from_left, a)?;
            check_divergence(&from_right, b)?;
            let half = (0.5 * width).sqrt();
            let left = adaptive_gk(&from_left, 0.0, half, 0.5 * tol, &opts)?;
            let right = adaptive_gk(&from_right, 0.0, half, 0.5 * tol, &opts)?;
            Ok(left + right)
        }
    }
}

// Below this `u`, `end ± u^2` rounds to `end` itself.
fn substitution_floor(end: f64) -> f64 {
    (2.0 * f64::EPSILON * end.abs()).sqrt()
}

fn resolve_endpoint<F: Fn(f64) -> f64>(f: &F, probe: f64, mode: Endpoint) -> bool {
    match mode {
        Endpoint::Sqrt => true,
        Endpoint::Plain => false,
        Endpoint::Auto => {
            let v = f(probe);
            !v.is_finite() || v.abs() > SINGULAR_TRIGGER
        }
    }
}

// After `y = a + u^2` an integrable inverse-square-root singularity becomes
// bounded. Anything that still exceeds the limit, or keeps growing like 1/u
// between the two probes, is not integrable.
fn check_divergence<G: Fn(f64) -> f64>(g: &G, end: f64) -> Result<()> {
    let u_near = SINGULAR_PROBE_OFFSET.sqrt();
    let near = g(u_near).abs();
    let far = g(10.0 * u_near).abs();
    if !near.is_finite() || near > DIVERGENCE_LIMIT || (far > 0.0 && near / far > 5.0) {
        return Err(Error::DivergentIntegral { at: end });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn adaptive_gk<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, opts: &QuadOptions) -> Result<f64> {
    let (max_panels, rel) = (opts.max_panels, opts.rel_tol.max(ROUNDING_FLOOR));
    let first = gk21(f, a, b);
    let mut total = first.value;
    let mut total_err = first.error;
    let mut total_abs = first.abs;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let min_width = 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);

    while total_err > tol.max(rel * total_abs) {
        if heap.len() >= max_panels {
            return Err(Error::NoConvergence {
                panels: heap.len(),
                error: total_err,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        if worst.b - worst.a <= min_width {
            // Cannot subdivide further: accept if the remaining error is at the
            // rounding floor, otherwise give up.
            heap.push(worst);
            if total_err <= 1e3 * f64::EPSILON * total.abs().max(1.0) {
                break;
            }
            return Err(Error::NoConvergence {
                panels: heap.len(),
                error: total_err,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let left = gk21(f, worst.a, mid);
        let right = gk21(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        total_abs += left.abs + right.abs - worst.abs;
        heap.push(left);
        heap.push(right);
        // Re-summing avoids drift from the incremental updates.
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            total_err = heap.iter().map(|p| p.error).sum();
            total_abs = heap.iter().map(|p| p.abs).sum();
        }
    }
    let sum: f64 = heap.iter().map(|p| p.value).sum();
    if !sum.is_finite() {
        return Err(Error::DivergentIntegral { at: a });
    }
    Ok(sum)
}

/// Composite 21-point Kronrod rule on `panels` equal panels, without error
/// control. Useful when several integrands must be compared under one fixed
/// discretization.
pub fn integrate_fixed<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let width = (b - a) / panels.max(1) as f64;
    (0..panels.max(1))
        .map(|k| {
            let lo = a + k as f64 * width;
            let hi = if k + 1 == panels.max(1) { b } else { lo + width };
            gk21(&f, lo, hi).value
        })
        .sum()
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() {
        error = f64::INFINITY;
    }
    Panel {
        a,
        b,
        value,
        error,
        abs: res_abs,
    }
}

use thiserror::Error;

/// Errors raised by metric construction, the numerical kernels, the radial
/// solver and the field/verification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown metric `{0}` (expected euclidean, inverse_r, sphere, hyperbolic or power:a)")]
    UnknownMetric(String),

    #[error("malformed metric parameter in `{0}`")]
    BadParameter(String),

    #[error("{what} = {value} is outside the valid interval [{lo}, {hi}]")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid problem: {0}")]
    InvalidSpec(String),

    #[error("adaptive quadrature did not converge after {panels} panels (error estimate {error:e})")]
    NoConvergence { panels: usize, error: f64 },

    #[error("integral diverges at endpoint {at}")]
    DivergentIntegral { at: f64 },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    NoBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("ODE step size underflow at s = {at} (step {step:e})")]
    StepUnderflow { at: f64, step: f64 },

    #[error("non-finite ODE right-hand side at s = {at}")]
    NonFiniteRhs { at: f64 },

    #[error("c = {c} is below the critical constant {critical_c}")]
    BelowCriticalConstant { c: f64, critical_c: f64 },

    #[error(
        "no radial minimizer: the domain annulus is fatter than the critical configuration \
         (critical c = {critical_c}, critical r = {critical_r:?})"
    )]
    BelowCritical {
        critical_c: f64,
        critical_r: Option<f64>,
    },

    #[error("the modulus integral diverges at the critical constant {critical_c}")]
    DivergentModulus { critical_c: f64 },

    #[error("profile misses the inner radius: p(r) = {p_r}, expected q = {q}")]
    ProfileMismatch { p_r: f64, q: f64 },

    #[error("negative radicand {value:e} at s = {at} exceeds the clamp bound")]
    NegativeRadicand { at: f64, value: f64 },

    #[error("point with modulus {modulus} lies outside the closed annulus [{inner}, {outer}]")]
    OutOfAnnulus {
        modulus: f64,
        inner: f64,
        outer: f64,
    },

    #[error("stencil width {h} does not fit inside the annulus")]
    StencilOutOfDomain { h: f64 },

    #[error("perturbation leaves the metric's valid range after {retries} retries")]
    PerturbationLeavesRange { retries: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

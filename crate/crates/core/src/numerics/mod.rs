//! Shared numerical kernels.

pub mod interp;
pub mod minimize;
pub mod ode;
pub mod quadrature;
pub mod roots;

pub use interp::{InterpMode, Interpolant};
pub use minimize::{maximize_scalar, minimize_scalar};
pub use ode::ode_integrate;
pub use quadrature::{integrate_adaptive, integrate_adaptive_with, integrate_fixed, integrate_offsets_with, Endpoint, QuadOptions};
pub use roots::{find_root_bracketed, find_root_with};

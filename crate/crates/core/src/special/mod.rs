//! Complex log-Gamma, adaptive Gauss-Kronrod quadrature, bracketed root finding and the
//! dilogarithm on the negative axis.

mod dilog;
mod gamma;
mod quad;
mod roots;

pub use dilog::{dilog, dilog_neg};
pub use gamma::{gamma, log_gamma};
pub use quad::{quad, quad_real, Endpoint, QuadResult, QuadratureSpec};
pub use roots::{brent, find_imag_axis_zero};

//! Spectral data, phase functionals and curved-wedge long-time asymptotics for the
//! focusing nonlocal NLS equation
//!
//! ```text
//! i q_t + q_xx + 2 q(x,t)^2 conj(q(-x,t)) = 0,   q -> 0 (x -> -inf),  q -> A (x -> +inf)
//! ```
//!
//! together with a direct method-of-lines solver used as an independent oracle.

pub mod error;
pub mod interp;
pub mod ode;
pub mod pde;
pub mod phase;
pub mod profiles;
pub mod scattering;
pub mod special;
pub mod wedge;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("grid is not symmetric about 0 (node {index})")]
    AsymmetricGrid { index: usize },
    #[error("soliton denominator {modulus:.3e} too close to zero at x={x}, t={t}")]
    BlowUpProximity { x: f64, t: f64, modulus: f64 },
    #[error("quadrature did not converge: estimate {estimate:?}, error {error:.3e}")]
    Quadrature { estimate: (f64, f64), error: f64 },
    #[error("root not bracketed: f({lo})={flo:.3e}, f({hi})={fhi:.3e}")]
    NotBracketed { lo: f64, hi: f64, flo: f64, fhi: f64 },
    #[error("ODE solver failed near x={x}: {reason}")]
    Ode { x: f64, reason: String },
    #[error("solver failed at k={k}: {reason}")]
    Scattering { k: f64, reason: String },
    #[error("matrix inversion failed at k={k}: det={det:.3e}")]
    Inversion { k: f64, det: f64 },
    #[error("small-k diagnostics: {0}")]
    Diagnostics(String),
    #[error("assumption 2 violated: a11*a21 = {0}")]
    Assumption2(String),
    #[error("pole at k={0}")]
    Pole(f64),
    #[error("logarithm singularity: |1 + r1 r2| = {0:.3e}")]
    LogSingularity(f64),
    #[error("branch tracking failed near k={0}")]
    Branch(f64),
    #[error("blow-up at t={t}: max|q| = {max:.3e}")]
    BlowUp { t: f64, max: f64 },
    #[error("boundary drift {drift:.3e} at t={t}; domain too small")]
    BoundaryDrift { t: f64, drift: f64 },
    #[error("invalid parameters: {0}")]
    Invalid(String),
}

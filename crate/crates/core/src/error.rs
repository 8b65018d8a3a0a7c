use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("moment integral diverges: {0}")]
    Integrability(String),

    #[error("quadrature did not converge after {nodes} nodes (last change {last_change:e})")]
    QuadratureNonconvergence { nodes: usize, last_change: f64 },

    #[error("Pearson data inconsistent: {0}")]
    Compatibility(String),

    #[error("Hankel pivot {index} lost too much precision (|pivot|/scale = {ratio:e}); increase --bits")]
    Regularity { index: usize, ratio: f64 },

    #[error("{what} at n = {n} exceeds its degree bound {bound} (relative overflow {overflow:e})")]
    DegreeOverflow {
        what: &'static str,
        n: isize,
        bound: usize,
        overflow: f64,
    },

    #[error("sample point x = {x} is too close to a pole")]
    SampleAtPole { x: f64 },

    #[error("phi({at}) mismatch: relative residual {residual:e}")]
    PhiMismatch { at: &'static str, residual: f64 },

    #[error("q is degenerate for mu = 0 (q = t identically)")]
    DegenerateTranscendent,

    #[error("invalid precision: {0}")]
    InvalidPrecision(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cache: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;

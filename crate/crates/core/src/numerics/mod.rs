//! Multiprecision scalars, t-jets, polynomials and 2x2 rational matrices.

pub mod jet;
pub mod mat2;
pub mod poly;
pub mod precision;

pub use jet::Jet2;
pub use mat2::{JetMat, Mat2, RatFn};
pub use poly::Poly;
pub use precision::{rel_residual, to_decimal, PrecisionContext};

//! Orthogonal polynomials for the weight x^α (1-x)^β (t-x)^μ on [0,1], their
//! associated (Möbius-transformed) system, the x/t ladder operators and Lax
//! pairs, and the Painlevé VI data built from them.
//!
//! Every quantity that depends on the deformation parameter t is carried as a
//! [`numerics::Jet2`], so first and second t-derivatives are exact.

pub mod error;
pub mod laxpairs;
pub mod mobius;
pub mod numerics;
pub mod opseq;
pub mod painleve;
pub mod weights;

pub use error::{Error, Result};

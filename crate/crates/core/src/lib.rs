//! Numerical toolkit for the compatible Grassmannian of a positive weight
//! operator on finite-dimensional model spaces.
//!
//! A Hermitian positive-definite weight `A` with spectrum in `(0, 1]` equips
//! coordinate space with a second inner product `[f, g] = <A f, g>`. This
//! crate constructs the `A`-symmetric (oblique) projections compatible with
//! that structure and computes on them: geodesics between nearby projections,
//! Finsler lengths, Fredholm-style indices of projection pairs, connected
//! component classification, and explicit `A`-unitary intertwiners.

pub mod error;
pub mod fixtures;
pub mod grassmann;
pub mod io;
pub mod numkernel;
pub mod poisson;
pub mod restricted;
pub mod sampling;
pub mod suites;
pub mod weighted;

pub use error::{Error, ErrorClass, Result};
pub use grassmann::{CompatibleProjection, GeodesicSegment};
pub use numkernel::{CMatrix, CVector, C64};
pub use restricted::{PairIndexReport, RestrictedContext};
pub use weighted::{AUnitary, OperatorClass, WeightedSpace};

//! Exact and numerical verification of first integrals of geodesic flows on
//! 2- and 3-step nilpotent Lie groups with left-invariant metrics.

pub mod algebra;
pub mod catalog;
pub mod deffile;
pub mod error;
pub mod geodesic;
pub mod group;
pub mod integrals;
pub mod linalg;
pub mod notation;
pub mod poisson;
pub mod poly;
pub mod quotients;
pub mod report;
pub mod scalar;
pub mod solvers;
pub mod verify;

pub use algebra::{AlgebraAnalysis, LieAlgebra, Structure};
pub use error::{Error, Result};
pub use group::{Chart, GroupElement, TangentPoint};
pub use linalg::Matrix;
pub use poly::{Monomial, PolyVector, Polynomial};
pub use scalar::{Scalar, Q};

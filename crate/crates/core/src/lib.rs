//! Decides, for a bounded bi-quadratic boundary curve, whether the
//! homogeneous Dirichlet/Neumann problem for the string equation has
//! nontrivial solutions, by implementing and cross-validating four
//! equivalent criteria: John-orbit periodicity, Poncelet closure, the
//! Cayley–Hankel criterion, and Pell–Abel solvability, together with the
//! explicit Jacobi-elliptic parametrization.

pub mod algebra;
pub mod boundary;
pub mod cayley;
pub mod curve;
pub mod elliptic;
pub mod john;
pub mod pellabel;
pub mod poncelet;
pub mod error;

pub use error::{Error, Result};

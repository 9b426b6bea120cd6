//! Exact index iteration for closed geodesics, equivariant Betti numbers of
//! non-contractible loop spaces of real projective space, and the calculus of
//! rank-one irrational systems used to rule out a single closed geodesic.

pub mod acceptance;
pub mod error;
pub mod exact;
pub mod homology;
pub mod interval;
pub mod iteration;
pub mod normal_form;
pub mod obstruction;
pub mod sample;
pub mod systems;

pub use error::{Error, ErrorKind, Result};
pub use exact::{rat, real, ExactReal, Rational};

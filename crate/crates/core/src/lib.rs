//! Dominability decisions and explicit dominating maps for complex surfaces.
//!
//! The crate has five layers:
//!
//! * [`numerics`]: complex polynomials, rational functions, root finding,
//!   Hermite jet interpolation, truncated power series, adaptive quadrature
//!   and finite-difference Jacobians.
//! * [`classifier`]: verdicts on dominability from combinatorial descriptors
//!   (orbifold bases of elliptic fibrations, divisors in the projective plane,
//!   surface invariants).
//! * [`maps`]: holomorphic self-maps of `C^2` built fiber by fiber, with
//!   analytic Jacobians and exact preimages where they exist.
//! * [`lattice`]: lattice normalization, strip smoothing, polynomial
//!   surrogates, the two shear stages, the Hénon basin map and the assembled
//!   lattice-avoiding injection.
//! * [`harness`]: seeded sampling, margin checks and report serialization,
//!   used by the `c2dom` command-line tool in [`cli`].

pub mod classifier;
pub mod cli;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod maps;
pub mod numerics;

pub use error::{Error, Result};
pub use numerics::{Cx, Matrix2, Poly, RationalFn};

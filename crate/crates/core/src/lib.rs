//! Numerical laboratory for sharp uncertainty principles.
//!
//! The crate evaluates Heisenberg-Pauli-Weyl, Hardy and interpolation
//! inequalities on flat Minkowski-normed spaces and on the Poincare ball
//! model of hyperbolic space, with the extremal families, sharp constants
//! and curvature remainders checked by deterministic quadrature.
//!
//! Modules:
//! - [`norm`]: Minkowski norms, dual norms, Legendre map, uniformity constant.
//! - [`quadrature`]: adaptive Gauss-Kronrod radial integrals, Monte Carlo,
//!   finite-difference derivatives.
//! - [`flat`]: interpolation, HPW and Hardy checks on flat space.
//! - [`hyperbolic`]: radial calculus and inequality checks on the ball model.
//! - [`report`]: the common [`InequalityReport`] record.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod flat;
pub mod hyperbolic;
pub mod norm;
pub mod quadrature;
pub mod report;
pub mod special;

pub use error::{LabError, Result};
pub use norm::{Covector, DualityCertificate, MinkowskiNorm, NormConfig};
pub use quadrature::{Decay, IntegralResult, OriginClass, QuadratureSpec, RadialProfile, Weight};
pub use report::InequalityReport;

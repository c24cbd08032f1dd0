//! Analysis toolkit for finite-mode Gaussian quantum channels.
//!
//! The crate is organized in four layers:
//!
//! * [`symplectic`]: the linear-algebra substrate, i.e. canonical forms of
//!   antisymmetric matrices and symplectic diagonalization of covariances.
//! * [`states`] and [`channels`]: Gaussian states and channels in the
//!   characteristic-function parameterization, with validity, purity,
//!   environment, dilation, extremality, and duality analysis.
//! * [`fock`]: a truncated Fock-space oracle that checks the Gaussian
//!   formulas against dense matrix quadrature, independent of the
//!   symplectic machinery.
//! * [`sampling`] and [`json`]: seeded random instances and the serialized
//!   interchange format.
//!
//! All phase-space vectors interleave coordinates as
//! `(q_1, p_1, ..., q_s, p_s)`.

pub mod channels;
pub mod error;
pub mod fock;
pub mod json;
pub mod sampling;
pub mod states;
pub mod symplectic;

pub use error::{Error, Result};

/// Default absolute tolerance for max-norm residual gates.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Default relative threshold for numerical rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-7;

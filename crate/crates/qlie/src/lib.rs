//! Exact computer algebra for quantum Lie algebras over multi-parametric
//! ice-type braidings.
//!
//! The crate builds the standard multi-parametric braidings on a super-space
//! (dimension, parity vector, deformation parameter `q`, parameter matrix
//! `p`), verifies the braid and Hecke identities symbolically, checks the
//! compatibility axioms tying a braiding to a candidate quantum Lie bracket,
//! classifies all admissible brackets by exact linear algebra at generic
//! rational sample points, and provides a normal-form rewriting engine for
//! the resulting enveloping algebras.
//!
//! All arithmetic is exact: Laurent polynomials over the rationals for
//! symbolic work ([`scalar`]), arbitrary-precision rationals for sampled
//! work. Nothing in the crate touches floating point.
//!
//! Batch sweeps run data-parallel on rayon when the default `parallel`
//! feature is enabled; disabling it swaps in a sequential fallback with an
//! identical API (see [`exec`]).

#![forbid(unsafe_code)]

pub mod classify;
pub mod exec;
pub mod linalg;
pub mod qla;
pub mod residual;
pub mod rmatrix;
pub mod scalar;
pub mod tensor;
pub mod uea;

pub use residual::{Residual, ResidualReport};
pub use rmatrix::{IceMatrix, ParamSpec};
pub use scalar::{rat, Rat, Scalar, ScalarError, Symbol};
pub use tensor::{Operator2, Operator3};

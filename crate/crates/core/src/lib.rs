//! Numerical laboratory for connection `dbar` problems on the unit disc.
//!
//! The crate discretizes the unit disc on a masked Cartesian grid and provides
//! Hodge decompositions of matrix-valued connection forms, Coulomb gauges,
//! Wente-type Poisson solves, Lorentz-space norms, a Cauchy transform and the
//! fixed-point construction of holomorphic frames `S` with
//! `dbar S = -omega^{0,1} S`, plus harmonic-map and immersion diagnostics and
//! a battery showing why the `L^{2,1}` Hodge condition cannot be weakened.

pub mod calculus;
pub mod error;
pub mod fft;
pub mod field;
pub mod gfld;
pub mod grid;
pub mod lorentz;
pub mod mat;
pub mod random;

pub mod counterexample;
pub mod elliptic;
pub mod gauge;
pub mod harmonic;

pub mod cli;

pub use error::{Error, Result};
pub use field::{CMat, MatrixField, MatrixOneForm, MatrixTwoForm, ScalarField, VectorOneForm10};
pub use grid::{GridSpec, NodeKind};

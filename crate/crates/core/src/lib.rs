//! Spectral graph filters through functional calculus, and a harness that
//! certifies their linear stability under shift-operator perturbations.
//!
//! A filter is a scalar response `g` applied to the eigenvalues of a
//! self-adjoint shift operator `Δ`. Responses written in powers of the
//! Cayley transform `C(λ) = (λ - i)/(λ + i)` obey
//!
//! ```text
//! ||g(Δ) - g(Δ')|| <= ||g||_C ((||Δ|| + 1) ||E|| / (1 - ||E||) + ||E||),   Δ' = Δ + E, ||E|| < 1
//! ```
//!
//! where `||g||_C = Σ_{l>=1} l |c_l|`. [`stability`] evaluates and checks this
//! bound; [`filters`] implements the filters themselves.

// `!(x > 0.0)` is how inputs are checked so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod filters;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod rng;
pub mod stability;

pub use error::{Error, Result};

//! Encoding spatial directions in spin eigenstates and decoding them with
//! finite quantum measurements.
//!
//! The crate covers the whole pipeline:
//!
//! - [`angular`]: Legendre polynomials, spherical harmonics, Wigner d/D
//!   matrices, 3-j symbols and Gauss–Legendre rules.
//! - [`encoding`]: effective-coefficient states (parallel, product,
//!   antiparallel, optimal) and the tridiagonal fidelity form.
//! - [`fidelity`]: maximal average fidelity, information gain, asymptotics
//!   and the per-`N` summary table.
//! - [`povm`]: weighted direction sets, isotropy checks, the ring-grid
//!   construction, Platonic sets and finite-measurement fidelities.
//! - [`simulate`]: seeded Monte-Carlo runs of the protocol.
//! - [`cli`]: the `spindir` command line.

// `!(x <= tol)` checks are meant to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular;
pub mod cli;
pub mod encoding;
pub mod error;
pub mod fidelity;
pub mod povm;
pub mod simulate;

pub use error::{Error, Result};

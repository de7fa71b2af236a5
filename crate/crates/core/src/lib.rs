//! Decide whether a channel is in the quantum domain, i.e. cannot be
//! simulated by any measure-and-prepare scheme, from two measured
//! fidelities and the overlaps of two test states and their targets.
//!
//! - [`criterion`]: classical benchmark `F_c`, total non-orthogonality `B`
//!   and the closed-form and numeric quantum-domain tests.
//! - [`mp_oracle`]: brute-force search over measure-and-prepare schemes.
//! - [`gaussian`]: single-mode Gaussian algebra and Uhlmann fidelity.
//! - [`fock`]: truncated Fock-space reference for the Gaussian formulas.
//! - [`quadrature`]: projection-probability bounds from homodyne moments.
//! - [`applications`]: coherent-state, teleportation and squeezed-storage pipelines.
//! - [`cli`]: the `qdverify` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod applications;
pub mod cli;
pub mod criterion;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod mp_oracle;
pub mod numeric;
pub mod quadrature;
pub mod validation;

pub use criterion::{
    classical_fidelity_bound, qd_criterion, qd_criterion_numeric, total_nonorthogonality, FidelityPair, OverlapPair,
    PriorEnsemble, Verdict,
};
pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

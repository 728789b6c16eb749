//! Block-removal selection as a cardinality-constrained binary quadratic
//! program.
//!
//! Per-sample gate gradients are turned into a proxy Hessian
//! ([`gradients::build_hessian`]), the program `min xᵀHx s.t. Σx = M` is
//! solved exactly ([`exact::solve_topk`]) or heuristically
//! ([`anneal::anneal`]), and the resulting low-energy spectrum is analysed
//! ([`analysis`]). [`qubo`] provides the penalized QUBO and Ising forms for
//! external solvers.

pub mod analysis;
pub mod anneal;
pub mod cli;
pub mod document;
pub mod error;
pub mod exact;
pub mod gradients;
pub mod model;
pub mod qubo;
mod textfmt;

pub use error::{Error, Result};
pub use model::{energy, swap_delta, Configuration, Hessian, Solution, Spectrum};

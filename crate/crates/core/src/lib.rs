//! Sculpting correlated states out of maximally symmetric bosonic states.
//!
//! - [`fock`]: sparse Fock states, ladder operators in mode superpositions,
//!   one-body density matrices.
//! - [`slater`]: two-boson amplitude matrices, Takagi factorization, Slater
//!   rank and purity.
//! - [`protocols`]: subtraction sequences for bipartite, GHZ, W and Dicke
//!   targets, and the runner that post-selects through them.
//! - [`optics`]: beamsplitters, heralded subtraction and the four-detector
//!   superposition-subtraction module.
//! - [`oracle`]: exact subset expansion with cyclotomic coefficients, used
//!   as independent ground truth.

pub mod error;
pub mod fock;
pub mod optics;
pub mod oracle;
pub mod protocols;
pub mod slater;

pub use error::{Error, Result};
pub use fock::{fidelity, inner_product, FockState, ModeSuperposition, Statistics};

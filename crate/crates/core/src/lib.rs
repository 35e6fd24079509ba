//! Hypergeometric coherent states and their k-component "kitten" superpositions.
//!
//! The whole family is fixed by the deformation
//! `f(n)^2 = Π(β_j + n - 1) / Π(α_i + n - 1)`, whose weight
//! `ρ(n) = n! Π(β)_n / Π(α)_n` turns the normalization into the generalized
//! hypergeometric function `pFq(α; β; |z|^2)`.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod dd;
mod error;
mod sum;

pub mod fock;
pub mod hyperfunc;
pub mod identity;
pub mod kerr;
pub mod kittens;
pub mod quadrature;
pub mod states;
pub mod stats;

pub use error::{Error, Result};
pub use fock::FockVector;
pub use hyperfunc::{ConvergenceDomain, DomainKind, ModelParams, PhaseRule};
pub use num_complex::Complex64;

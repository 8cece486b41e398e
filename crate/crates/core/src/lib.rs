//! Shift-operator solution of the Jaynes-Cummings model on a truncated
//! qubit ⊗ Fock space.
//!
//! The lowering and raising operators b, b† are built numerically from the
//! closed operator set (σ⁺a, σ⁻a†, σ_z, 1) by spectral functional calculus
//! on H, and every closed-form statement about them (spectrum, dressed
//! states, deformed-algebra generators, CHSH violation) is checked against
//! direct diagonalization.

pub mod algebra;
pub mod bell;
pub mod cli;
pub mod error;
pub mod ladder;
pub mod model;
pub mod operator;
pub mod par;
pub mod report;
pub mod spectrum;
pub mod sweep;

pub use error::{JcmError, Result};
pub use model::JcmParams;
pub use operator::{Operator, SpaceSpec, StateVector};
pub use par::Execution;

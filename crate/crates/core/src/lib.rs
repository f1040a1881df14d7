//! Generalized transitionless (counter-diabatic) driving.
//!
//! Eigenstate tracks of a time-dependent Hamiltonian are turned into shortcut
//! Hamiltonians for an arbitrary choice of phases, with the energy-optimal
//! phase choice and a time-independence test built in. On top of that sit
//! Hilbert-Schmidt energy accounting, a Lindblad integrator with channels in
//! the instantaneous eigenbasis, and a scenario runner that compares adiabatic
//! and shortcut protocols at matched energy cost.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod energetics;
pub mod error;
pub mod models;
pub mod openquantum;
pub mod qcore;
pub mod scenarios;
pub mod shortcut;
pub mod spectral;

pub use error::{Error, Result};
pub use qcore::{CMatrix, CVector, C64};

//! Dual-wavelength dark-state-polariton memory in a six-level rubidium ensemble.
//!
//! The crate has two layers:
//!
//! - [`polariton`]: the analytic layer. It covers the dressed ground state, the 6×6
//!   polariton eigenproblem, the closed-form dark mode and the group velocity.
//! - [`atomic`], [`dynamics`], [`propagation`] and [`protocol`]: a Maxwell–Bloch
//!   co-simulation. A Lindblad master equation at every grid point is coupled to
//!   slowly-varying probe envelopes in the retarded frame. It is driven through the
//!   six storage/retrieval presets.
//!
//! Units are SI throughout: rad/s, s, m, W, V/m and C·m. Hamiltonians are carried
//! as `H/ħ`.

pub mod atomic;
pub mod constants;
pub mod dynamics;
mod error;
pub mod polariton;
pub mod propagation;
pub mod protocol;

pub use error::{Error, Result};

pub use num_complex::Complex64;

/// 6×6 complex matrix used for Hamiltonians, jump operators and density matrices.
pub type Mat6 = nalgebra::Matrix6<Complex64>;

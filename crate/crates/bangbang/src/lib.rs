//! Exact dephasing dynamics and entanglement of two qubits collectively
//! coupled to a thermal bosonic bath, under bang-bang pulse control.
//!
//! Both qubits couple through σ_z to the same reservoir, so populations never
//! move and the problem reduces to one nonnegative decoherence exponent Γ(t)
//! multiplying the outer coherence by `e^{-Γ(t)}`. Trains of instantaneous
//! simultaneous spin flips reshape Γ through a filter function: a single
//! well-timed flip echoes coherence back (and can resurrect entanglement
//! after sudden death); densely repeated flips freeze the state entirely.
//!
//! Module map:
//! - [`bath`] — spectral density, thermal factor, filter functions, and Γ by
//!   adaptive quadrature;
//! - [`dynamics`] — X-states, the two canonical initial states, exact
//!   evolution under any pulse schedule;
//! - [`entanglement`] — concurrence (X-state fast path and general Wootters
//!   construction), sudden-death and revival detection;
//! - [`oracle`] — brute-force validators: discrete-mode sums, truncated-Fock
//!   displacement traces, exact joint qubit⊗modes evolution;
//! - [`numeric`] — the adaptive Gauss–Kronrod integrator and bisection.
//!
//! ```
//! use bangbang::bath::{BathSpec, PulseSchedule, QuadratureSpec};
//! use bangbang::dynamics::{evolve, initial_state_bell, EvolutionScenario};
//! use bangbang::entanglement::concurrence_x;
//!
//! let scenario = EvolutionScenario::new(
//!     initial_state_bell(),
//!     BathSpec::new(0.25, 100.0)?,
//!     PulseSchedule::from_times(vec![0.01])?,
//!     0.05,
//!     QuadratureSpec::default(),
//! )?;
//! let state = evolve(&scenario, 0.02)?;
//! let c = concurrence_x(&state)?;
//! assert!(c > 0.0 && c < 1.0);
//! # Ok::<(), bangbang::Error>(())
//! ```
//!
//! Units: ħ = k_B = 1 and the bath temperature defaults to 1, so times are
//! in 1/T and frequencies in T.

pub mod bath;
pub mod dynamics;
pub mod entanglement;
mod error;
pub mod numeric;
pub mod oracle;

pub use error::{Error, Result};

/// Guide chapters (book/src) compiled as documentation tests so every code
/// block in the book stays in sync with the crate.
#[cfg(doctest)]
pub mod book;

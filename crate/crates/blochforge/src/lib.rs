//! Simulation and analysis of pulse-driven two-level dynamics under
//! piecewise-constant, possibly non-Hermitian 2×2 Hamiltonians.
//!
//! The crate is organized around a small set of layers:
//!
//! - [`dyncore`] — domain types ([`StateVector`], [`Operator2`], [`BlochPoint`],
//!   [`DriveParams`]), Pauli-basis algebra, and the state ↔ Bloch-sphere map.
//! - [`propagator`] — exact closed-form propagation of piecewise-constant
//!   schedules, trajectory sampling, and an independent RK4 oracle.
//! - [`floquet`] — monodromy operator, quasi-energies, exceptional-point
//!   thresholds, and phase diagrams for two-segment periodic drives with
//!   balanced gain/loss.
//! - [`seqlang`] — a small textual pulse-sequence language compiled to
//!   [`Schedule`]s, so protocols are data rather than code.
//! - [`protocols`] — canonical experiments (Rabi scans, Ramsey, spin echo,
//!   T1 decay) and decoherence-parameter fitting.
//! - [`cli`] — the command-line front end used by the `blochforge` binary.
//!
//! See the crate examples (`cargo run --example ...`) for one runnable
//! program per major capability.

pub mod cli;
pub mod dyncore;
pub mod floquet;
pub mod propagator;
pub mod protocols;
pub mod seqlang;

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

pub use dyncore::{BlochPoint, DriveParams, Operator2, StateVector};
pub use propagator::{PeriodicBlock, Schedule, ScheduleItem, Segment, Trajectory};

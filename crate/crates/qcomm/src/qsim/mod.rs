//! A small two-party quantum protocol simulator with information accounting.
//!
//! States are full state vectors of up to [`MAX_QUBITS`] qubits (qubit 0 is
//! the most significant axis of the amplitude index). Every qubit has an
//! owner — Alice or Bob — and a protocol is a schedule of local unitaries,
//! qubit transfers, and terminal measurements. The simulator's purpose is
//! not scale but *exact bookkeeping*: it tracks how much information about
//! Alice's classical input can possibly have reached Bob, and checks the
//! ledger inequality
//!
//! ```text
//! I(X : Bob's qubits)  ≤  2 · (qubits sent Alice → Bob)
//! ```
//!
//! after every transfer, along with the per-coordinate superadditivity
//! `Σ_i I(X_i : Bob) ≤ I(X : Bob)` at the end.
//!
//! The classical input `X` is held in a read-only register; a mirrored
//! workspace register `XW` carries the copy the protocol is allowed to
//! touch. In the `uniform` input mode each `(X_i, XW_i)` pair starts in a
//! maximally entangled state, so dephasing `X` reproduces exactly the
//! uniform classical ensemble over inputs — that is the state on which
//! mutual informations are evaluated.

pub mod demos;
pub mod run;
pub mod schedule;
pub mod state;

pub use demos::{
    random_access_demo, send_bit_demo, superdense_demo, RandomAccessReport, SendBitReport,
    SuperdenseReport,
};
pub use run::{info_account, run_qprotocol, InfoAccount, LedgerEntry, RunOutcome};
pub use schedule::{safe_storage_transform, QSchedule, QStep};
pub use state::{MeasurementRecord, QState};

/// Hard cap on simulated qubits (state vectors stay under 1 MiB).
pub const MAX_QUBITS: usize = 14;

/// Absolute slack for the information-ledger inequalities.
pub const INFO_SLACK: f64 = 1e-6;

/// How a run's input register is initialized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputMode {
    /// `X = XW = |x⟩` for a fixed bit pattern (most significant bit first).
    Basis(Vec<bool>),
    /// Each `(X_i, XW_i)` pair starts as `(|00⟩ + |11⟩)/√2`; dephasing `X`
    /// yields the uniform classical ensemble needed for information
    /// accounting.
    Uniform,
}

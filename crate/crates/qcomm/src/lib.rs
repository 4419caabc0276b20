//! Quantum states, information metrics, and communication-protocol simulators.
//!
//! This crate has three layers:
//!
//! | Layer | Modules | What it provides |
//! |-------|---------|------------------|
//! | States & operators | [`linalg`], [`quantum`] | complex matrices, validated density matrices and pure states, tensor layouts, partial trace, Hermitian matrix functions, CPTP channels, POVMs, seeded random sampling |
//! | Information measures | [`metrics`], [`transitions`] | trace/Hellinger distance, fidelity, entropies, mutual information, informational distance, purifications, Uhlmann unitaries, local transitions, average-encoding reports |
//! | Protocol simulation | [`commsim`], [`qsim`] | classical two-party protocols (nested index functions, pointer jumping, set disjointness) with exact bit accounting, and a small state-vector simulator with qubit-ownership tracking and information accounting |
//!
//! The [`suites`] module packages the library's inequalities and protocol
//! guarantees as named, seeded property suites producing machine-readable
//! reports; the companion `qcomm` binary exposes them on the command line.
//!
//! # Conventions
//!
//! - All logarithms are base 2: entropies are in bits, costs in bits/qubits.
//! - Trace distance is the *unhalved* trace norm of the difference, so it
//!   ranges over [0, 2] and equals 2 for orthogonal pure states.
//! - Tensor factor 0 is the most significant axis of a composite index:
//!   a state on factors (d0, d1) stores amplitude `(i0, i1)` at `i0 * d1 + i1`.
//! - Randomness is always explicit: samplers take a seeded RNG or a seed, and
//!   identical seeds reproduce identical objects bit-for-bit.
//!
//! # What can go wrong
//!
//! Constructors validate their invariants (Hermiticity, positivity, unit
//! trace/norm, CPTP completeness, POVM completeness) and return
//! [`Error`] values describing the violation instead of silently
//! normalizing garbage. Numerical tolerances default to 1e-9 and can be
//! overridden through [`Tolerances`].

pub mod commsim;
pub mod linalg;
pub mod metrics;
pub mod qsim;
pub mod quantum;
pub mod suites;
pub mod transitions;

use thiserror::Error;

/// Crate-wide error type.
///
/// Variants carry the measured deviation so that a failing validation is
/// diagnosable from the error alone.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A matrix expected to be square was not.
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    /// Two operands had incompatible dimensions.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    /// A matrix failed the Hermiticity check.
    #[error("matrix is not Hermitian: max |m - m†| entry = {deviation:.3e}")]
    NotHermitian { deviation: f64 },
    /// An operator had an eigenvalue below the allowed floor.
    #[error("matrix is not positive semidefinite: min eigenvalue = {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },
    /// A density matrix's trace was not 1 within tolerance.
    #[error("trace is not 1: got {trace:.12}")]
    TraceNotOne { trace: f64 },
    /// A pure state's norm was not 1 within tolerance.
    #[error("state norm² is not 1: got {norm_sq:.12}")]
    NormNotOne { norm_sq: f64 },
    /// Kraus operators failed the completeness relation Σ K†K = I.
    #[error("channel is not trace preserving: ‖ΣK†K − I‖∞ = {deviation:.3e}")]
    NotTracePreserving { deviation: f64 },
    /// POVM elements failed positivity or completeness.
    #[error("invalid POVM: {reason}")]
    InvalidPovm { reason: String },
    /// A tensor layout did not match the state it was applied to.
    #[error("layout mismatch: factors multiply to {layout_dim}, state dim is {state_dim}")]
    LayoutMismatch { layout_dim: usize, state_dim: usize },
    /// A factor index was out of range or repeated.
    #[error("bad factor selection: {reason}")]
    BadFactors { reason: String },
    /// A protocol instance failed structural validation.
    #[error("malformed instance: {reason}")]
    MalformedInstance { reason: String },
    /// Requested object exceeds the supported size.
    #[error("size limit exceeded: {reason}")]
    SizeLimit { reason: String },
    /// A parameter was outside its documented domain.
    #[error("invalid argument: {reason}")]
    InvalidArgument { reason: String },
    /// A qubit operation violated the ownership or register rules.
    #[error("ownership violation: {reason}")]
    Ownership { reason: String },
    /// An unknown suite, protocol, or demo identifier.
    #[error("unknown identifier {name:?}; known: {known}")]
    UnknownId { name: String, known: String },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Validation tolerances used by state and operator constructors.
///
/// All default to `1e-9`. Eigenvalues in `[-psd, 0]` are clamped to 0 during
/// density-matrix validation (with trace renormalization); anything below
/// `-psd` is rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max allowed entrywise deviation from Hermiticity.
    pub herm: f64,
    /// Max allowed negative eigenvalue magnitude.
    pub psd: f64,
    /// Max allowed deviation of the trace (or squared norm) from 1.
    pub trace: f64,
    /// Max allowed deviation of Σ K†K (or Σ E_m) from the identity.
    pub cptp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { herm: 1e-9, psd: 1e-9, trace: 1e-9, cptp: 1e-9 }
    }
}

/// One-sided slack used by inequality checks throughout the crate.
pub const INEQ_SLACK: f64 = 1e-8;

/// Eigenvalues at or below this threshold are treated as exactly 0 in
/// entropy-like sums (the 0·log 0 = 0 convention).
pub const ENTROPY_EIG_FLOOR: f64 = 1e-12;

/// Probability weight above which a state "occupies" a subspace for the
/// purposes of relative-entropy support checks.
pub const SUPPORT_WEIGHT_FLOOR: f64 = 1e-9;

/// Natural log of 2; converts between nats and bits.
pub const LN_2: f64 = std::f64::consts::LN_2;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tolerances_are_1e9() {
        let t = Tolerances::default();
        assert_eq!(t.herm, 1e-9);
        assert_eq!(t.psd, 1e-9);
        assert_eq!(t.trace, 1e-9);
        assert_eq!(t.cptp, 1e-9);
    }

    #[test]
    fn errors_render_with_context() {
        let e = Error::NotHermitian { deviation: 1.5e-3 };
        assert!(e.to_string().contains("1.500e-3"));
        let e = Error::DimMismatch { expected: 4, got: 8 };
        assert!(e.to_string().contains("expected 4"));
    }
}

//! Schedule execution and information accounting.
//!
//! [`run_qprotocol`] prepares the registers, plays the steps, and — in the
//! uniform input mode — checks the information ledger after every transfer:
//! the mutual information between the input register and Bob's holdings can
//! never exceed twice the number of qubits Alice has sent him so far.
//! [`info_account`] evaluates the same quantity plus its per-coordinate
//! refinement on any state.

use std::collections::BTreeMap;

use serde::Serialize;

use super::schedule::{QSchedule, QStep};
use super::state::{reduced_of_amps, MeasurementRecord, QState};
use super::{InputMode, INFO_SLACK};
use crate::commsim::Party;
use crate::linalg::{c64, CMatrix, CVector};
use crate::metrics::von_neumann_entropy;
use crate::{Error, Result};

/// Largest party-side register the accounting routines will diagonalize
/// (a `2^10 × 2^10` density matrix is the practical ceiling).
const MAX_ACCOUNT_QUBITS: usize = 10;

/// Ledger line written after each transfer in a uniform-mode run.
#[derive(Debug, Clone, Serialize)]
pub struct LedgerEntry {
    /// Index of the `send` step this entry follows.
    pub step_index: usize,
    /// Cumulative qubits sent Alice → Bob.
    pub sent_a_to_b: usize,
    /// Cumulative qubits sent Bob → Alice.
    pub sent_b_to_a: usize,
    /// Mutual information (bits) between the input register and Bob's
    /// current holdings.
    pub info_x_bob: f64,
    /// The ledger bound `2 · sent_a_to_b`.
    pub bound: f64,
    /// Whether `info_x_bob ≤ bound` within slack.
    pub holds: bool,
}

/// Everything a finished run exposes.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    /// The final state (post-unitaries; measurements are recorded as exact
    /// distributions, not sampled collapses).
    pub state: QState,
    /// Total qubits sent Alice → Bob.
    pub sent_a_to_b: usize,
    /// Total qubits sent Bob → Alice.
    pub sent_b_to_a: usize,
    /// Joint record of all terminal measurements, if any were declared.
    pub measurement: Option<MeasurementRecord>,
    /// Per-transfer ledger (uniform mode only; empty otherwise).
    pub ledger: Vec<LedgerEntry>,
    /// Whether the run used the uniform input mode.
    pub uniform: bool,
}

impl RunOutcome {
    /// Whether every ledger line held.
    pub fn ledger_holds(&self) -> bool {
        self.ledger.iter().all(|entry| entry.holds)
    }

    /// The exact post-measurement ensemble: every outcome of nonzero
    /// probability paired with its collapsed state. Without a measurement
    /// this is the final state with probability 1.
    ///
    /// # Errors
    ///
    /// Propagates state-construction failures (which cannot occur for
    /// outcomes produced by [`run_qprotocol`]).
    pub fn measurement_ensemble(&self) -> Result<Vec<(f64, QState)>> {
        let Some(record) = &self.measurement else {
            return Ok(vec![(1.0, self.state.clone())]);
        };
        let mut ensemble = Vec::new();
        for pattern in 0..(1usize << record.qubits.len()) {
            if let Some((prob, amps)) = self.state.condition(&record.qubits, pattern)? {
                let collapsed = QState::new(
                    amps,
                    self.state.owners().to_vec(),
                    self.state.registers().clone(),
                )?;
                ensemble.push((prob, collapsed));
            }
        }
        Ok(ensemble)
    }
}

/// Information account of a state: total and per-coordinate mutual
/// information between the input register and Bob's holdings.
#[derive(Debug, Clone, Serialize)]
pub struct InfoAccount {
    /// `I(X : Bob)` in bits.
    pub info_x_bob: f64,
    /// `I(X_i : Bob)` for each input coordinate.
    pub per_coordinate: Vec<f64>,
    /// `Σ_i I(X_i : Bob)`.
    pub coordinate_sum: f64,
    /// Whether `coordinate_sum ≤ info_x_bob` within slack — the
    /// superadditivity that holds whenever the `X_i` are independent.
    pub superadditivity_holds: bool,
}

/// The 4×4 unitary taking `|00⟩` to `(|00⟩ + |11⟩)/√2` (Hadamard on the
/// first qubit, then CNOT onto the second).
fn bell_prep() -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(
        4,
        4,
        &[
            c64(s, 0.0),
            c64(s, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(s, 0.0),
            c64(s, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
            c64(s, 0.0),
            c64(-s, 0.0),
            c64(s, 0.0),
            c64(-s, 0.0),
            c64(0.0, 0.0),
            c64(0.0, 0.0),
        ],
    )
}

/// Build the initial state for a schedule: `X` and `XW` loaded per the
/// input mode, work qubits in `|0⟩`, then the declared entangled pairs
/// prepared.
fn initial_state(schedule: &QSchedule, mode: &InputMode) -> Result<QState> {
    let n = schedule.input_qubits;
    let q = schedule.total_qubits();
    let dim = 1usize << q;

    let mut amps = CVector::zeros(dim);
    match mode {
        InputMode::Basis(bits) => {
            if bits.len() != n {
                return Err(Error::InvalidArgument {
                    reason: format!("input has {} bits, schedule declares {n}", bits.len()),
                });
            }
            let mut index = 0usize;
            for (i, &bit) in bits.iter().enumerate() {
                if bit {
                    index |= 1 << (q - 1 - i); // X_i
                    index |= 1 << (q - 1 - (n + i)); // XW_i
                }
            }
            amps[index] = c64(1.0, 0.0);
        }
        InputMode::Uniform => {
            // Each (X_i, XW_i) pair in (|00⟩ + |11⟩)/√2: uniform weight on
            // the 2^n basis states with X = XW and work = 0.
            let weight = c64(1.0 / ((1usize << n) as f64).sqrt(), 0.0);
            for pattern in 0..(1usize << n) {
                let mut index = 0usize;
                for i in 0..n {
                    if (pattern >> (n - 1 - i)) & 1 == 1 {
                        index |= 1 << (q - 1 - i);
                        index |= 1 << (q - 1 - (n + i));
                    }
                }
                amps[index] = weight;
            }
        }
    }

    let mut owners = vec![Party::Alice; 2 * n];
    owners.extend(schedule.work.iter().copied());

    let mut registers = BTreeMap::new();
    if n > 0 {
        registers.insert("x".to_string(), (0..n).collect());
        registers.insert("xw".to_string(), (n..2 * n).collect());
    }
    if !schedule.work.is_empty() {
        registers.insert("work".to_string(), (2 * n..q).collect());
    }

    let mut state = QState::new(amps, owners, registers)?;
    let prep = bell_prep();
    for &(a, b) in &schedule.epr_pairs {
        state.apply_unitary(&[a, b], &prep)?;
    }
    Ok(state)
}

/// Holevo-form mutual information `I(cond : target)` in bits for the
/// ensemble obtained by dephasing `cond_qubits` in the computational basis:
/// `S(ρ_T) − Σ_x p_x S(ρ_T^x)`.
fn holevo_information(state: &QState, cond_qubits: &[usize], target: &[usize]) -> Result<f64> {
    if target.is_empty() || cond_qubits.is_empty() {
        return Ok(0.0);
    }
    if target.len() > MAX_ACCOUNT_QUBITS {
        return Err(Error::SizeLimit {
            reason: format!(
                "information accounting handles at most {MAX_ACCOUNT_QUBITS} target qubits, \
                 got {}",
                target.len()
            ),
        });
    }
    let q = state.qubit_count();
    let total_entropy = von_neumann_entropy(&state.reduced_density(target)?);
    let mut conditional = 0.0;
    for pattern in 0..(1usize << cond_qubits.len()) {
        if let Some((prob, amps)) = state.condition(cond_qubits, pattern)? {
            let rho = reduced_of_amps(&amps, q, target)?;
            conditional += prob * von_neumann_entropy(&rho);
        }
    }
    // Numerical noise can push the difference a hair below zero.
    Ok((total_entropy - conditional).max(0.0))
}

/// Evaluate the information account of a state: `I(X : Bob)` plus each
/// `I(X_i : Bob)` and their superadditivity check. The input register is
/// looked up as the state's `"x"` register.
///
/// # Errors
///
/// [`Error::UnknownId`] when the state has no `"x"` register;
/// [`Error::SizeLimit`] when Bob holds too many qubits to diagonalize.
pub fn info_account(state: &QState) -> Result<InfoAccount> {
    let x_qubits: Vec<usize> = state.register("x")?.to_vec();
    let bob = state.owned_by(Party::Bob);
    let info_x_bob = holevo_information(state, &x_qubits, &bob)?;
    let mut per_coordinate = Vec::with_capacity(x_qubits.len());
    for &xi in &x_qubits {
        per_coordinate.push(holevo_information(state, &[xi], &bob)?);
    }
    let coordinate_sum: f64 = per_coordinate.iter().sum();
    Ok(InfoAccount {
        info_x_bob,
        per_coordinate,
        coordinate_sum,
        superadditivity_holds: coordinate_sum <= info_x_bob + INFO_SLACK,
    })
}

/// Execute a schedule.
///
/// The schedule is structurally validated first; during execution every
/// unitary and measurement additionally checks that its qubits belong to
/// the acting party. In [`InputMode::Uniform`] a [`LedgerEntry`] is written
/// after every transfer. All declared measurements are combined into one
/// joint [`MeasurementRecord`] (exact distribution; nothing is sampled).
///
/// # Errors
///
/// Everything [`QSchedule::validate`] reports, [`Error::Ownership`] when a
/// party acts on qubits it does not hold, and the accounting size limits.
pub fn run_qprotocol(schedule: &QSchedule, mode: &InputMode) -> Result<RunOutcome> {
    schedule.validate()?;
    let mut state = initial_state(schedule, mode)?;
    let uniform = matches!(mode, InputMode::Uniform);
    let x_qubits: Vec<usize> = (0..schedule.input_qubits).collect();

    let mut sent_a_to_b = 0usize;
    let mut sent_b_to_a = 0usize;
    let mut ledger = Vec::new();
    let mut measured: Vec<usize> = Vec::new();

    for (step_index, step) in schedule.steps.iter().enumerate() {
        match step {
            QStep::LocalUnitary { owner, qubits, matrix } => {
                if let Some(&bad) = qubits.iter().find(|&&i| state.owner(i) != *owner) {
                    return Err(Error::Ownership {
                        reason: format!(
                            "step {step_index}: {owner} applies a unitary to qubit {bad} \
                             owned by {}",
                            owner.other()
                        ),
                    });
                }
                state.apply_unitary(qubits, matrix)?;
            }
            QStep::Send { from, to, qubits } => {
                state.send_qubits(qubits, *from, *to)?;
                match from {
                    Party::Alice => sent_a_to_b += qubits.len(),
                    Party::Bob => sent_b_to_a += qubits.len(),
                }
                if uniform {
                    let bob = state.owned_by(Party::Bob);
                    let info_x_bob = holevo_information(&state, &x_qubits, &bob)?;
                    let bound = 2.0 * sent_a_to_b as f64;
                    ledger.push(LedgerEntry {
                        step_index,
                        sent_a_to_b,
                        sent_b_to_a,
                        info_x_bob,
                        bound,
                        holds: info_x_bob <= bound + INFO_SLACK,
                    });
                }
            }
            QStep::Measure { owner, qubits } => {
                if let Some(&bad) = qubits.iter().find(|&&i| state.owner(i) != *owner) {
                    return Err(Error::Ownership {
                        reason: format!(
                            "step {step_index}: {owner} measures qubit {bad} owned by {}",
                            owner.other()
                        ),
                    });
                }
                measured.extend_from_slice(qubits);
            }
        }
    }

    let measurement = if measured.is_empty() {
        None
    } else {
        let distribution = state.measure_distribution(&measured)?;
        Some(MeasurementRecord { qubits: measured, distribution })
    };

    Ok(RunOutcome { state, sent_a_to_b, sent_b_to_a, measurement, ledger, uniform })
}

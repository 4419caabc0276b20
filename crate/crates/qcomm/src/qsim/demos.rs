//! Bundled demonstration protocols: sending a classical bit, superdense
//! coding, and random-access codes.
//!
//! Each demo builds ordinary [`QSchedule`]s, runs them through
//! [`run_qprotocol`] on all relevant inputs, and reports both the decoding
//! quality and the information accounting. Nothing is sampled — every
//! probability is read off the exact state.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use super::run::run_qprotocol;
use super::schedule::{QSchedule, QStep};
use super::{InputMode, INFO_SLACK};
use crate::commsim::Party;
use crate::linalg::{c64, CMatrix};
use crate::metrics::binary_entropy;
use crate::{Error, Result};

/// Report of the classical-bit transfer demo.
#[derive(Debug, Clone, Serialize)]
pub struct SendBitReport {
    /// Qubits Alice sent (1).
    pub qubits_sent: usize,
    /// `I(X : Bob)` after the transfer, on the uniform input ensemble.
    pub info_x_bob: f64,
    /// The ledger bound `2 · qubits_sent`.
    pub ledger_bound: f64,
    /// Whether every ledger line held.
    pub ledger_holds: bool,
    /// Whether both basis inputs decode with certainty.
    pub decodes_basis_inputs: bool,
}

/// Report of the superdense-coding demo.
#[derive(Debug, Clone, Serialize)]
pub struct SuperdenseReport {
    /// Qubits Alice sent (1).
    pub qubits_sent: usize,
    /// `I(X : Bob)` after the transfer, on the uniform input ensemble.
    pub info_x_bob: f64,
    /// The ledger bound `2 · qubits_sent`.
    pub ledger_bound: f64,
    /// Whether every ledger line held.
    pub ledger_holds: bool,
    /// Whether the transfer exactly saturates the bound (`I = 2`).
    pub saturates: bool,
    /// Whether all four two-bit inputs decode with certainty.
    pub decodes_all_inputs: bool,
}

/// Report of the random-access-code demo.
#[derive(Debug, Clone, Serialize)]
pub struct RandomAccessReport {
    /// Input bits.
    pub n: usize,
    /// Encoding qubits.
    pub m: usize,
    /// Qubits actually sent in the simulated runs (equals `m`).
    pub qubits_sent: usize,
    /// `success[x][i]`: probability of recovering bit `i` on input `x`.
    pub success: Vec<Vec<f64>>,
    /// `ε_i`: error probability of bit `i`, averaged over uniform inputs.
    pub per_index_error: Vec<f64>,
    /// Grand average success over all `(x, i)`.
    pub avg_success: f64,
    /// `Σ_i (1 − H(ε_i))` — the information the code provably delivers.
    pub entropy_sum: f64,
    /// The accounting bound `2m`.
    pub bound: f64,
    /// Whether `entropy_sum ≤ bound` within slack.
    pub bound_holds: bool,
    /// Whether the per-transfer ledger held on the uniform-mode run.
    pub ledger_holds: bool,
}

fn h_gate() -> CMatrix {
    let s = FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[c64(s, 0.0), c64(s, 0.0), c64(s, 0.0), c64(-s, 0.0)])
}

fn cx_gate() -> CMatrix {
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = c64(1.0, 0.0);
    m[(1, 1)] = c64(1.0, 0.0);
    m[(2, 3)] = c64(1.0, 0.0);
    m[(3, 2)] = c64(1.0, 0.0);
    m
}

fn cz_gate() -> CMatrix {
    let mut m = CMatrix::identity(4, 4);
    m[(3, 3)] = c64(-1.0, 0.0);
    m
}

/// Basis change sending the `±y` eigenstates to the computational basis
/// (Hadamard after undoing the phase gate).
fn y_decode_gate() -> CMatrix {
    let s = FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[c64(s, 0.0), c64(0.0, -s), c64(s, 0.0), c64(0.0, s)])
}

/// A single-qubit unitary whose first column is the state with Bloch vector
/// `(x, y, z)` (must be unit length).
fn bloch_prep(x: f64, y: f64, z: f64) -> CMatrix {
    let theta = z.clamp(-1.0, 1.0).acos();
    let phi = y.atan2(x);
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    let phase = c64(phi.cos(), phi.sin());
    CMatrix::from_row_slice(2, 2, &[c64(c, 0.0), -phase.conj() * s, phase * s, c64(c, 0.0)])
}

/// Block-diagonal controlled preparation: for each basis pattern of the
/// control qubits, apply the matching 2×2 block to the target qubit. The
/// result acts on `controls + [target]` with the target least significant.
fn controlled_prep(blocks: &[CMatrix]) -> CMatrix {
    let dim = 2 * blocks.len();
    let mut u = CMatrix::zeros(dim, dim);
    for (pattern, block) in blocks.iter().enumerate() {
        for r in 0..2 {
            for c in 0..2 {
                u[(2 * pattern + r, 2 * pattern + c)] = block[(r, c)];
            }
        }
    }
    u
}

/// Send one uniformly random classical bit as a qubit: Alice ships her
/// workspace copy, Bob measures it. The ledger shows `I(X : Bob) = 1` for
/// one qubit sent.
///
/// # Errors
///
/// Propagates simulator failures (none occur for this fixed schedule).
pub fn send_bit_demo() -> Result<SendBitReport> {
    let schedule = QSchedule {
        input_qubits: 1,
        work: vec![],
        epr_pairs: vec![],
        steps: vec![
            QStep::Send { from: Party::Alice, to: Party::Bob, qubits: vec![1] },
            QStep::Measure { owner: Party::Bob, qubits: vec![1] },
        ],
    };
    let mut decodes = true;
    for x in [false, true] {
        let outcome = run_qprotocol(&schedule, &InputMode::Basis(vec![x]))?;
        let record = outcome.measurement.expect("schedule ends in a measurement");
        decodes &= record.certain_outcome(1e-9) == Some(usize::from(x));
    }
    let uniform = run_qprotocol(&schedule, &InputMode::Uniform)?;
    let entry = uniform.ledger.last().expect("schedule sends once");
    Ok(SendBitReport {
        qubits_sent: uniform.sent_a_to_b,
        info_x_bob: entry.info_x_bob,
        ledger_bound: entry.bound,
        ledger_holds: uniform.ledger_holds(),
        decodes_basis_inputs: decodes,
    })
}

/// Superdense coding: one shared entangled pair, two classical input bits,
/// one qubit sent. Bob recovers both bits with certainty, and on the
/// uniform ensemble the transfer carries `I(X : Bob) = 2` — exactly the
/// ledger bound for a single qubit.
///
/// # Errors
///
/// Propagates simulator failures (none occur for this fixed schedule).
pub fn superdense_demo() -> Result<SuperdenseReport> {
    // Layout: X = 0,1; XW = 2,3; work = 4 (Alice's pair half), 5 (Bob's).
    let schedule = QSchedule {
        input_qubits: 2,
        work: vec![Party::Alice, Party::Bob],
        epr_pairs: vec![(4, 5)],
        steps: vec![
            // Encode: Z when x₀ = 1, X when x₁ = 1, controlled from XW.
            QStep::LocalUnitary { owner: Party::Alice, qubits: vec![2, 4], matrix: cz_gate() },
            QStep::LocalUnitary { owner: Party::Alice, qubits: vec![3, 4], matrix: cx_gate() },
            QStep::Send { from: Party::Alice, to: Party::Bob, qubits: vec![4] },
            // Decode: Bell measurement = CNOT, Hadamard, then read out.
            QStep::LocalUnitary { owner: Party::Bob, qubits: vec![4, 5], matrix: cx_gate() },
            QStep::LocalUnitary { owner: Party::Bob, qubits: vec![4], matrix: h_gate() },
            QStep::Measure { owner: Party::Bob, qubits: vec![4, 5] },
        ],
    };
    let mut decodes = true;
    for x in 0..4usize {
        let bits = vec![x & 0b10 != 0, x & 0b01 != 0];
        let outcome = run_qprotocol(&schedule, &InputMode::Basis(bits))?;
        let record = outcome.measurement.expect("schedule ends in a measurement");
        decodes &= record.certain_outcome(1e-9) == Some(x);
    }
    let uniform = run_qprotocol(&schedule, &InputMode::Uniform)?;
    let entry = uniform.ledger.last().expect("schedule sends once");
    Ok(SuperdenseReport {
        qubits_sent: uniform.sent_a_to_b,
        info_x_bob: entry.info_x_bob,
        ledger_bound: entry.bound,
        ledger_holds: uniform.ledger_holds(),
        saturates: (entry.info_x_bob - entry.bound).abs() <= INFO_SLACK,
        decodes_all_inputs: decodes,
    })
}

/// The per-index schedules of the random-access construction for `(n, m)`,
/// or `None` when `m = 0` (nothing is sent; Bob guesses 0).
fn random_access_schedules(n: usize, m: usize) -> Option<Vec<QSchedule>> {
    let xw = |i: usize| n + i;
    if m == 0 {
        return None;
    }
    if m >= n {
        // Ship the whole workspace register (padded with blank qubits up
        // to m); bit i is read directly.
        let work = vec![Party::Alice; m - n];
        let sent: Vec<usize> = (n..2 * n).chain(2 * n..n + m).collect();
        return Some(
            (0..n)
                .map(|i| QSchedule {
                    input_qubits: n,
                    work: work.clone(),
                    epr_pairs: vec![],
                    steps: vec![
                        QStep::Send { from: Party::Alice, to: Party::Bob, qubits: sent.clone() },
                        QStep::Measure { owner: Party::Bob, qubits: vec![xw(i)] },
                    ],
                })
                .collect(),
        );
    }
    match (n, m) {
        (2, 1) => {
            // One qubit encodes two bits: Bloch vector
            // ((1−2x₁)/√2, 0, (1−2x₀)/√2). Bit 0 reads the z axis
            // (computational basis), bit 1 the x axis (Hadamard basis).
            let blocks: Vec<CMatrix> = (0..4)
                .map(|x: usize| {
                    let x0 = (x >> 1) as f64;
                    let x1 = (x & 1) as f64;
                    bloch_prep(
                        (1.0 - 2.0 * x1) * FRAC_1_SQRT_2,
                        0.0,
                        (1.0 - 2.0 * x0) * FRAC_1_SQRT_2,
                    )
                })
                .collect();
            let message = 4;
            Some(
                (0..2)
                    .map(|i| {
                        let mut steps = vec![
                            QStep::LocalUnitary {
                                owner: Party::Alice,
                                qubits: vec![2, 3, message],
                                matrix: controlled_prep(&blocks),
                            },
                            QStep::Send {
                                from: Party::Alice,
                                to: Party::Bob,
                                qubits: vec![message],
                            },
                        ];
                        if i == 1 {
                            steps.push(QStep::LocalUnitary {
                                owner: Party::Bob,
                                qubits: vec![message],
                                matrix: h_gate(),
                            });
                        }
                        steps.push(QStep::Measure { owner: Party::Bob, qubits: vec![message] });
                        QSchedule {
                            input_qubits: 2,
                            work: vec![Party::Alice],
                            epr_pairs: vec![],
                            steps,
                        }
                    })
                    .collect(),
            )
        }
        (3, 1) => {
            // One qubit encodes three bits: Bloch vector
            // ((1−2x₁)/√3, (1−2x₂)/√3, (1−2x₀)/√3); axes z, x, y decode
            // bits 0, 1, 2.
            let s = 1.0 / 3.0f64.sqrt();
            let blocks: Vec<CMatrix> = (0..8)
                .map(|x: usize| {
                    let b = |j: usize| (1.0 - 2.0 * ((x >> (2 - j)) & 1) as f64) * s;
                    bloch_prep(b(1), b(2), b(0))
                })
                .collect();
            let message = 6;
            Some(
                (0..3)
                    .map(|i| {
                        let mut steps = vec![
                            QStep::LocalUnitary {
                                owner: Party::Alice,
                                qubits: vec![3, 4, 5, message],
                                matrix: controlled_prep(&blocks),
                            },
                            QStep::Send {
                                from: Party::Alice,
                                to: Party::Bob,
                                qubits: vec![message],
                            },
                        ];
                        match i {
                            1 => steps.push(QStep::LocalUnitary {
                                owner: Party::Bob,
                                qubits: vec![message],
                                matrix: h_gate(),
                            }),
                            2 => steps.push(QStep::LocalUnitary {
                                owner: Party::Bob,
                                qubits: vec![message],
                                matrix: y_decode_gate(),
                            }),
                            _ => {}
                        }
                        steps.push(QStep::Measure { owner: Party::Bob, qubits: vec![message] });
                        QSchedule {
                            input_qubits: 3,
                            work: vec![Party::Alice],
                            epr_pairs: vec![],
                            steps,
                        }
                    })
                    .collect(),
            )
        }
        (3, 2) => {
            // Bit 0 rides its own qubit; bits 1 and 2 share a two-into-one
            // code on the second qubit.
            let blocks: Vec<CMatrix> = (0..4)
                .map(|x: usize| {
                    let x1 = (x >> 1) as f64;
                    let x2 = (x & 1) as f64;
                    bloch_prep(
                        (1.0 - 2.0 * x2) * FRAC_1_SQRT_2,
                        0.0,
                        (1.0 - 2.0 * x1) * FRAC_1_SQRT_2,
                    )
                })
                .collect();
            let (plain, coded) = (6, 7);
            Some(
                (0..3)
                    .map(|i| {
                        let mut steps = vec![
                            QStep::LocalUnitary {
                                owner: Party::Alice,
                                qubits: vec![3, plain],
                                matrix: cx_gate(),
                            },
                            QStep::LocalUnitary {
                                owner: Party::Alice,
                                qubits: vec![4, 5, coded],
                                matrix: controlled_prep(&blocks),
                            },
                            QStep::Send {
                                from: Party::Alice,
                                to: Party::Bob,
                                qubits: vec![plain, coded],
                            },
                        ];
                        if i == 2 {
                            steps.push(QStep::LocalUnitary {
                                owner: Party::Bob,
                                qubits: vec![coded],
                                matrix: h_gate(),
                            });
                        }
                        let read = if i == 0 { plain } else { coded };
                        steps.push(QStep::Measure { owner: Party::Bob, qubits: vec![read] });
                        QSchedule {
                            input_qubits: 3,
                            work: vec![Party::Alice, Party::Alice],
                            epr_pairs: vec![],
                            steps,
                        }
                    })
                    .collect(),
            )
        }
        _ => unreachable!("n is restricted to 2 or 3 and m < n"),
    }
}

/// Random-access-code demo: encode `n ∈ {2, 3}` uniformly random bits into
/// `m` qubits so that any single bit can be recovered, run every `(input,
/// index)` pair exactly, and check the recovered information against the
/// accounting bound `Σ_i (1 − H(ε_i)) ≤ 2m`.
///
/// With `m = 0` nothing is sent and Bob guesses 0 (the bound is tight at
/// zero); with `m ≥ n` the workspace register itself is shipped.
///
/// # Errors
///
/// [`Error::InvalidArgument`] for `n ∉ {2, 3}`; [`Error::SizeLimit`] when
/// `m` pushes the schedule over the qubit budget.
pub fn random_access_demo(n: usize, m: usize) -> Result<RandomAccessReport> {
    if n != 2 && n != 3 {
        return Err(Error::InvalidArgument {
            reason: format!("demo supports n ∈ {{2, 3}}, got {n}"),
        });
    }
    let schedules = random_access_schedules(n, m);
    let mut success = vec![vec![0.0f64; n]; 1 << n];
    let mut qubits_sent = 0;
    let mut ledger_holds = true;
    match &schedules {
        None => {
            // Nothing sent: Bob's fixed guess of 0 is right exactly when
            // the bit is 0.
            for (x, row) in success.iter_mut().enumerate() {
                for (i, entry) in row.iter_mut().enumerate() {
                    *entry = if (x >> (n - 1 - i)) & 1 == 0 { 1.0 } else { 0.0 };
                }
            }
        }
        Some(schedules) => {
            for (i, schedule) in schedules.iter().enumerate() {
                for (x, row) in success.iter_mut().enumerate() {
                    let bits = (0..n).map(|j| (x >> (n - 1 - j)) & 1 == 1).collect();
                    let outcome = run_qprotocol(schedule, &InputMode::Basis(bits))?;
                    let record = outcome.measurement.expect("schedules end in a measurement");
                    row[i] = record.distribution[(x >> (n - 1 - i)) & 1];
                }
            }
            let uniform = run_qprotocol(&schedules[0], &InputMode::Uniform)?;
            qubits_sent = uniform.sent_a_to_b;
            ledger_holds = uniform.ledger_holds();
        }
    }

    let inputs = (1usize << n) as f64;
    let per_index_error: Vec<f64> = (0..n)
        .map(|i| {
            let avg: f64 = success.iter().map(|row| row[i]).sum::<f64>() / inputs;
            (1.0 - avg).clamp(0.0, 1.0)
        })
        .collect();
    let avg_success = success.iter().flatten().sum::<f64>() / (inputs * n as f64);
    let entropy_sum: f64 = per_index_error.iter().map(|&e| 1.0 - binary_entropy(e)).sum();
    let bound = 2.0 * m as f64;
    Ok(RandomAccessReport {
        n,
        m,
        qubits_sent,
        success,
        per_index_error,
        avg_success,
        entropy_sum,
        bound,
        bound_holds: entropy_sum <= bound + INFO_SLACK,
        ledger_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn a_sent_bit_arrives_and_fills_the_ledger() {
        let report = send_bit_demo().unwrap();
        assert_eq!(report.qubits_sent, 1);
        assert!(report.decodes_basis_inputs);
        assert!(report.ledger_holds);
        assert_relative_eq!(report.info_x_bob, 1.0, epsilon = 1e-9);
        assert_relative_eq!(report.ledger_bound, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn superdense_coding_saturates_the_ledger() {
        let report = superdense_demo().unwrap();
        assert_eq!(report.qubits_sent, 1);
        assert!(report.decodes_all_inputs);
        assert!(report.ledger_holds);
        assert!(report.saturates);
        assert_relative_eq!(report.info_x_bob, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn two_bits_into_one_qubit_hits_the_known_success_rate() {
        let report = random_access_demo(2, 1).unwrap();
        let expect = 0.5 + 0.5 * FRAC_1_SQRT_2; // cos²(π/8)
        for row in &report.success {
            for &p in row {
                assert_relative_eq!(p, expect, epsilon = 1e-9);
            }
        }
        assert_relative_eq!(report.avg_success, expect, epsilon = 1e-9);
        assert!(report.bound_holds);
        assert!(report.ledger_holds);
        assert!(report.entropy_sum > 0.79 && report.entropy_sum < 0.81);
    }

    #[test]
    fn three_bits_into_one_qubit_hits_the_known_success_rate() {
        let report = random_access_demo(3, 1).unwrap();
        let expect = 0.5 + 0.5 / 3.0f64.sqrt();
        for row in &report.success {
            for &p in row {
                assert_relative_eq!(p, expect, epsilon = 1e-9);
            }
        }
        assert!(report.bound_holds);
        assert!(report.ledger_holds);
    }

    #[test]
    fn three_bits_into_two_qubits_protects_the_first_bit() {
        let report = random_access_demo(3, 2).unwrap();
        assert_relative_eq!(report.per_index_error[0], 0.0, epsilon = 1e-9);
        let qrac_error = 0.5 - 0.5 * FRAC_1_SQRT_2;
        assert_relative_eq!(report.per_index_error[1], qrac_error, epsilon = 1e-9);
        assert_relative_eq!(report.per_index_error[2], qrac_error, epsilon = 1e-9);
        assert!(report.entropy_sum > 1.79 && report.entropy_sum < 1.81);
        assert!(report.bound_holds);
    }

    #[test]
    fn degenerate_sizes_behave() {
        // m = 0: the bound is tight at zero.
        let report = random_access_demo(2, 0).unwrap();
        assert_relative_eq!(report.entropy_sum, 0.0, epsilon = 1e-12);
        assert_relative_eq!(report.bound, 0.0, epsilon = 1e-12);
        assert!(report.bound_holds);
        assert_eq!(report.per_index_error, vec![0.5, 0.5]);
        // m = n: everything ships classically.
        let report = random_access_demo(2, 2).unwrap();
        assert_relative_eq!(report.avg_success, 1.0, epsilon = 1e-12);
        assert_relative_eq!(report.entropy_sum, 2.0, epsilon = 1e-9);
        assert!(report.bound_holds);
        assert_eq!(report.qubits_sent, 2);
        // Unsupported n.
        assert!(random_access_demo(4, 1).is_err());
        // m so large the schedule cannot fit.
        assert!(random_access_demo(2, 11).is_err());
    }
}

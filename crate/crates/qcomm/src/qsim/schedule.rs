//! Protocol schedules: typed steps, JSON (de)serialization, and the
//! fixed-length padding transform.

use serde::{Deserialize, Serialize};

use super::MAX_QUBITS;
use crate::commsim::Party;
use crate::linalg::CMatrix;
use crate::{Error, Result};

/// One protocol step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QStep {
    /// Apply a unitary to qubits all owned by `owner`. The first listed
    /// qubit is the most significant bit of the matrix's index space.
    LocalUnitary {
        /// Who acts.
        owner: Party,
        /// Target qubits, most significant first.
        qubits: Vec<usize>,
        /// The unitary, serialized as nested rows of `[re, im]` pairs.
        #[serde(with = "cmatrix_json")]
        matrix: CMatrix,
    },
    /// Hand qubits from one party to the other (counted communication).
    Send {
        /// Current owner.
        from: Party,
        /// New owner.
        to: Party,
        /// Which qubits cross.
        qubits: Vec<usize>,
    },
    /// Measure qubits in the computational basis. Measurements must be the
    /// final steps of a schedule (no step may follow and depend on an
    /// outcome — the step language has no classical control).
    Measure {
        /// Who measures.
        owner: Party,
        /// Measured qubits, most significant outcome bit first.
        qubits: Vec<usize>,
    },
}

/// A complete protocol: register layout, pre-shared entanglement, steps.
///
/// The qubit layout is fixed by convention: with `n = input_qubits`, the
/// read-only input register `x` occupies qubits `0..n`, its workspace
/// mirror `xw` occupies `n..2n`, and the `work` qubits follow, owned as
/// declared and starting in `|0⟩` (except for declared entangled pairs).
/// `x` and `xw` start with Alice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QSchedule {
    /// Number of classical input bits `n`.
    pub input_qubits: usize,
    /// Owners of the work qubits `2n, 2n+1, …`, in order.
    pub work: Vec<Party>,
    /// Pairs of work qubits prepared as `(|00⟩ + |11⟩)/√2` before the first
    /// step — the standard free pre-shared entanglement resource. Counted
    /// communication happens only through [`QStep::Send`].
    #[serde(default)]
    pub epr_pairs: Vec<(usize, usize)>,
    /// The steps, in order.
    pub steps: Vec<QStep>,
}

impl QSchedule {
    /// Total qubit count `2·input_qubits + work.len()`.
    pub fn total_qubits(&self) -> usize {
        2 * self.input_qubits + self.work.len()
    }

    /// Structural checks that do not need a state: qubit budget, entangled
    /// pairs confined to distinct work qubits, measurements terminal, and
    /// the input register never appearing in a unitary.
    ///
    /// # Errors
    ///
    /// [`Error::SizeLimit`] over the qubit budget; [`Error::InvalidArgument`]
    /// for the structural violations; [`Error::Ownership`] when a unitary
    /// touches the read-only input register.
    pub fn validate(&self) -> Result<()> {
        let n = self.input_qubits;
        let total = self.total_qubits();
        if total == 0 || total > MAX_QUBITS {
            return Err(Error::SizeLimit {
                reason: format!("schedule needs 1..={MAX_QUBITS} qubits, got {total}"),
            });
        }
        let mut used = vec![false; total];
        for &(a, b) in &self.epr_pairs {
            if a == b {
                return Err(Error::InvalidArgument {
                    reason: format!("entangled pair ({a}, {a}) repeats a qubit"),
                });
            }
            for i in [a, b] {
                if i < 2 * n || i >= total {
                    return Err(Error::InvalidArgument {
                        reason: format!("entangled pair qubit {i} is not a work qubit"),
                    });
                }
                if used[i] {
                    return Err(Error::InvalidArgument {
                        reason: format!("qubit {i} appears in more than one entangled pair"),
                    });
                }
                used[i] = true;
            }
        }
        let mut measuring = false;
        for (index, step) in self.steps.iter().enumerate() {
            let qubits = match step {
                QStep::LocalUnitary { qubits, .. } => qubits,
                QStep::Send { qubits, .. } => qubits,
                QStep::Measure { qubits, .. } => qubits,
            };
            if let Some(&bad) = qubits.iter().find(|&&i| i >= total) {
                return Err(Error::InvalidArgument {
                    reason: format!("step {index}: qubit {bad} out of range, have {total}"),
                });
            }
            match step {
                QStep::Measure { .. } => measuring = true,
                _ if measuring => {
                    return Err(Error::InvalidArgument {
                        reason: format!("step {index}: only measurements may follow a measurement"),
                    });
                }
                QStep::LocalUnitary { qubits, .. } => {
                    if let Some(&bad) = qubits.iter().find(|&&i| i < n) {
                        return Err(Error::Ownership {
                            reason: format!(
                                "step {index}: qubit {bad} is in the read-only input register"
                            ),
                        });
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Parse and structurally validate a schedule from JSON text.
    ///
    /// # Errors
    ///
    /// [`Error::MalformedInstance`] for JSON problems, plus everything
    /// [`QSchedule::validate`] reports.
    pub fn from_json(text: &str) -> Result<Self> {
        let schedule: QSchedule = serde_json::from_str(text)
            .map_err(|e| Error::MalformedInstance { reason: format!("bad schedule JSON: {e}") })?;
        schedule.validate()?;
        Ok(schedule)
    }

    /// Serialize to pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serialization cannot fail")
    }
}

/// Pad per-round message lengths so that every execution branch sends the
/// same number of qubits in every round.
///
/// `branches[b][r]` is the number of qubits branch `b` would send in round
/// `r`; branches shorter than the longest are treated as sending 0 in their
/// missing rounds. The returned schedule uses the per-round maximum, so its
/// total is at most `k·c` where `k` is the round count and `c` the largest
/// single-round length of any branch — the fixed-length overhead a protocol
/// pays for hiding which branch it took.
///
/// # Errors
///
/// [`Error::InvalidArgument`] when no branch is given.
pub fn safe_storage_transform(branches: &[Vec<usize>]) -> Result<Vec<usize>> {
    if branches.is_empty() {
        return Err(Error::InvalidArgument { reason: "need at least one branch".into() });
    }
    let rounds = branches.iter().map(|b| b.len()).max().unwrap_or(0);
    Ok((0..rounds)
        .map(|r| branches.iter().map(|b| b.get(r).copied().unwrap_or(0)).max().unwrap_or(0))
        .collect())
}

/// Serde adapter: complex matrices as nested rows of `[re, im]` pairs.
pub(crate) mod cmatrix_json {
    use super::CMatrix;
    use num_complex::Complex64;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
            .collect();
        s.collect_seq(rows)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMatrix, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if nrows == 0 || ncols == 0 {
            return Err(D::Error::custom("matrix must be non-empty"));
        }
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(D::Error::custom("matrix rows have unequal lengths"));
        }
        Ok(CMatrix::from_fn(nrows, ncols, |r, c| Complex64::new(rows[r][c][0], rows[r][c][1])))
    }
}

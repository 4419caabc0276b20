//! Owned multi-qubit state vectors.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use super::MAX_QUBITS;
use crate::commsim::Party;
use crate::linalg::{is_unitary, CMatrix, CVector};
use crate::quantum::{pure_reduced, DensityMatrix, TensorLayout};
use crate::{Error, Result, Tolerances};

/// A pure state of `q ≤ 14` qubits, each owned by one party, with named
/// qubit groups ("registers") for addressing.
///
/// Qubit 0 is the **most significant** bit of the amplitude index, matching
/// the tensor-factor convention used everywhere else in this crate.
#[derive(Debug, Clone, PartialEq)]
pub struct QState {
    amps: CVector,
    owners: Vec<Party>,
    registers: BTreeMap<String, Vec<usize>>,
}

impl QState {
    /// Build a state from explicit amplitudes.
    ///
    /// The norm must be within `1e-9` of 1 (it is then renormalized
    /// exactly); registers must be in range and pairwise disjoint.
    ///
    /// # Errors
    ///
    /// [`Error::SizeLimit`] over 14 qubits, [`Error::DimMismatch`] when the
    /// amplitude count is not `2^q`, [`Error::NormNotOne`] for a bad norm,
    /// [`Error::InvalidArgument`] for bad registers.
    pub fn new(
        amps: CVector,
        owners: Vec<Party>,
        registers: BTreeMap<String, Vec<usize>>,
    ) -> Result<Self> {
        let q = owners.len();
        if q == 0 || q > MAX_QUBITS {
            return Err(Error::SizeLimit {
                reason: format!("qubit count must be 1..={MAX_QUBITS}, got {q}"),
            });
        }
        let dim = 1usize << q;
        if amps.len() != dim {
            return Err(Error::DimMismatch { expected: dim, got: amps.len() });
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-9 {
            return Err(Error::NormNotOne { norm_sq });
        }
        let mut seen = vec![false; q];
        for (name, qubits) in &registers {
            for &i in qubits {
                if i >= q {
                    return Err(Error::InvalidArgument {
                        reason: format!("register {name:?} references qubit {i}, have {q}"),
                    });
                }
                if seen[i] {
                    return Err(Error::InvalidArgument {
                        reason: format!("qubit {i} appears in more than one register"),
                    });
                }
                seen[i] = true;
            }
        }
        Ok(QState { amps: amps / Complex64::new(norm_sq.sqrt(), 0.0), owners, registers })
    }

    /// The all-zeros computational basis state with the given ownership.
    pub fn zeros(owners: Vec<Party>, registers: BTreeMap<String, Vec<usize>>) -> Result<Self> {
        let q = owners.len();
        if q == 0 || q > MAX_QUBITS {
            return Err(Error::SizeLimit {
                reason: format!("qubit count must be 1..={MAX_QUBITS}, got {q}"),
            });
        }
        let mut amps = CVector::zeros(1 << q);
        amps[0] = Complex64::new(1.0, 0.0);
        QState::new(amps, owners, registers)
    }

    /// Number of qubits.
    pub fn qubit_count(&self) -> usize {
        self.owners.len()
    }

    /// Current owner of a qubit.
    pub fn owner(&self, qubit: usize) -> Party {
        self.owners[qubit]
    }

    /// All owners, indexed by qubit.
    pub fn owners(&self) -> &[Party] {
        &self.owners
    }

    /// Qubits currently owned by a party, ascending.
    pub fn owned_by(&self, party: Party) -> Vec<usize> {
        (0..self.owners.len()).filter(|&i| self.owners[i] == party).collect()
    }

    /// The amplitude vector.
    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// The named registers.
    pub fn registers(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.registers
    }

    /// Look up a register by name.
    ///
    /// # Errors
    ///
    /// [`Error::UnknownId`] listing the known names.
    pub fn register(&self, name: &str) -> Result<&[usize]> {
        self.registers.get(name).map(|v| v.as_slice()).ok_or_else(|| Error::UnknownId {
            name: name.to_string(),
            known: self.registers.keys().cloned().collect::<Vec<_>>().join(", "),
        })
    }

    /// Bit position (from the least significant end of the amplitude index)
    /// for a qubit.
    fn shift(&self, qubit: usize) -> usize {
        self.owners.len() - 1 - qubit
    }

    /// Check a qubit list: in range, no duplicates.
    fn check_qubits(&self, qubits: &[usize]) -> Result<()> {
        if qubits.is_empty() {
            return Err(Error::InvalidArgument { reason: "empty qubit list".into() });
        }
        let q = self.owners.len();
        let mut seen = vec![false; q];
        for &i in qubits {
            if i >= q {
                return Err(Error::InvalidArgument {
                    reason: format!("qubit {i} out of range, have {q}"),
                });
            }
            if seen[i] {
                return Err(Error::InvalidArgument { reason: format!("qubit {i} repeated") });
            }
            seen[i] = true;
        }
        Ok(())
    }

    /// Apply a unitary to the listed qubits (first listed qubit = most
    /// significant bit of the matrix's index space).
    ///
    /// # Errors
    ///
    /// [`Error::DimMismatch`] for a wrongly sized matrix,
    /// [`Error::InvalidArgument`] for a non-unitary matrix or bad qubit list.
    pub fn apply_unitary(&mut self, qubits: &[usize], u: &CMatrix) -> Result<()> {
        self.check_qubits(qubits)?;
        let m = qubits.len();
        let dim = 1usize << m;
        if u.nrows() != dim || u.ncols() != dim {
            return Err(Error::DimMismatch { expected: dim, got: u.nrows().max(u.ncols()) });
        }
        if !is_unitary(u, 1e-9) {
            return Err(Error::InvalidArgument { reason: "matrix is not unitary".into() });
        }
        let shifts: Vec<usize> = qubits.iter().map(|&i| self.shift(i)).collect();
        let targ_mask: usize = shifts.iter().map(|&s| 1usize << s).sum();
        let full = self.amps.len();
        // Expand a sub-space index (bits in listed-qubit order) into the
        // full index space on top of a base index.
        let expand = |base: usize, sub: usize| -> usize {
            let mut idx = base;
            for (j, &s) in shifts.iter().enumerate() {
                if (sub >> (m - 1 - j)) & 1 == 1 {
                    idx |= 1 << s;
                }
            }
            idx
        };
        let mut gathered = vec![Complex64::new(0.0, 0.0); dim];
        let mut mixed = vec![Complex64::new(0.0, 0.0); dim];
        for base in 0..full {
            if base & targ_mask != 0 {
                continue;
            }
            for (sub, slot) in gathered.iter_mut().enumerate() {
                *slot = self.amps[expand(base, sub)];
            }
            for (row, slot) in mixed.iter_mut().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, &g) in gathered.iter().enumerate() {
                    acc += u[(row, col)] * g;
                }
                *slot = acc;
            }
            for (sub, &v) in mixed.iter().enumerate() {
                self.amps[expand(base, sub)] = v;
            }
        }
        Ok(())
    }

    /// Transfer ownership of qubits from one party to the other. Amplitudes
    /// are untouched.
    ///
    /// # Errors
    ///
    /// [`Error::Ownership`] when a qubit does not belong to `from` or the
    /// parties coincide.
    pub fn send_qubits(&mut self, qubits: &[usize], from: Party, to: Party) -> Result<()> {
        self.check_qubits(qubits)?;
        if from == to {
            return Err(Error::Ownership { reason: "sender and receiver coincide".into() });
        }
        for &i in qubits {
            if self.owners[i] != from {
                return Err(Error::Ownership {
                    reason: format!("qubit {i} belongs to {}, not {from}", self.owners[i]),
                });
            }
        }
        for &i in qubits {
            self.owners[i] = to;
        }
        Ok(())
    }

    /// Exact outcome distribution of a computational-basis measurement of
    /// the listed qubits, indexed with the first listed qubit as the most
    /// significant outcome bit.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidArgument`] for a bad qubit list.
    pub fn measure_distribution(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        self.check_qubits(qubits)?;
        let m = qubits.len();
        let shifts: Vec<usize> = qubits.iter().map(|&i| self.shift(i)).collect();
        let mut probs = vec![0.0f64; 1 << m];
        for (idx, amp) in self.amps.iter().enumerate() {
            let mut outcome = 0usize;
            for (j, &s) in shifts.iter().enumerate() {
                if (idx >> s) & 1 == 1 {
                    outcome |= 1 << (m - 1 - j);
                }
            }
            probs[outcome] += amp.norm_sqr();
        }
        Ok(probs)
    }

    /// Project the listed qubits onto a basis pattern (first listed qubit =
    /// most significant pattern bit). Returns the outcome probability and
    /// the renormalized post-measurement amplitudes (full dimension), or
    /// `None` when the outcome has probability below `1e-15`.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidArgument`] for a bad qubit list or pattern.
    pub fn condition(&self, qubits: &[usize], pattern: usize) -> Result<Option<(f64, CVector)>> {
        self.check_qubits(qubits)?;
        let m = qubits.len();
        if pattern >= (1 << m) {
            return Err(Error::InvalidArgument {
                reason: format!("pattern {pattern} out of range for {m} qubits"),
            });
        }
        let shifts: Vec<usize> = qubits.iter().map(|&i| self.shift(i)).collect();
        let mut amps = CVector::zeros(self.amps.len());
        let mut prob = 0.0;
        for (idx, amp) in self.amps.iter().enumerate() {
            let mut matches = true;
            for (j, &s) in shifts.iter().enumerate() {
                let want = (pattern >> (m - 1 - j)) & 1;
                if (idx >> s) & 1 != want {
                    matches = false;
                    break;
                }
            }
            if matches {
                amps[idx] = *amp;
                prob += amp.norm_sqr();
            }
        }
        if prob < 1e-15 {
            return Ok(None);
        }
        Ok(Some((prob, amps / Complex64::new(prob.sqrt(), 0.0))))
    }

    /// Reduced density matrix of the listed qubits (given ascending).
    ///
    /// # Errors
    ///
    /// [`Error::BadFactors`] for an unsorted or out-of-range list.
    pub fn reduced_density(&self, qubits: &[usize]) -> Result<DensityMatrix> {
        reduced_of_amps(&self.amps, self.owners.len(), qubits)
    }
}

/// Reduced density matrix of `qubits` (ascending) for a `q`-qubit amplitude
/// vector.
pub(crate) fn reduced_of_amps(amps: &CVector, q: usize, qubits: &[usize]) -> Result<DensityMatrix> {
    let layout = TensorLayout::new(vec![2; q])?;
    let mat = pure_reduced(amps, &layout, qubits)?;
    DensityMatrix::new(mat, &Tolerances::default())
}

/// The terminal measurement of a run: which qubits were measured and the
/// exact joint outcome distribution.
#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    /// Measured qubits, in measurement-declaration order (first = most
    /// significant outcome bit).
    pub qubits: Vec<usize>,
    /// Probability of each of the `2^len` outcomes.
    pub distribution: Vec<f64>,
}

impl MeasurementRecord {
    /// Sample one outcome index from the exact distribution.
    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        let draw: f64 = rng.gen();
        let mut acc = 0.0;
        for (outcome, &p) in self.distribution.iter().enumerate() {
            acc += p;
            if draw < acc {
                return outcome;
            }
        }
        self.distribution.len() - 1
    }

    /// The single outcome carrying probability ≥ `1 - tol`, if any.
    pub fn certain_outcome(&self, tol: f64) -> Option<usize> {
        self.distribution.iter().position(|&p| p >= 1.0 - tol)
    }
}

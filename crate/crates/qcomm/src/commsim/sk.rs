//! The nested pointer-chasing problem `S_k` and its deterministic protocols.
//!
//! `S_1(x, y) = x[y]` where Alice holds the bit string `x ∈ {0,1}^n` and Bob
//! holds the index `y ∈ [n]`. For `k ≥ 2`, an `S_k` instance is `n`
//! sub-instances of `S_{k-1}` together with a pointer `a ∈ [n]` selecting
//! which one counts: `S_k = S_{k-1}(sub_a)`. The pointer at level `j` belongs
//! to Alice when `j` is even and to Bob when `j` is odd (the level-1
//! "pointer" is Bob's index).
//!
//! Two deterministic protocols bracket the cost of starting with the wrong
//! player:
//!
//! * [`sk_protocol_right_start`] — the pointer holder opens; `k` messages of
//!   `⌈log₂ n⌉` bits each.
//! * [`sk_protocol_wrong_start`] — the other player opens and the protocol
//!   must ship a whole level-1 bit string at the end:
//!   `(k-1)·⌈log₂ n⌉ + n` bits.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{bits01, ceil_log2, encode_index, Party, ProtocolRun, Transcript};
use crate::{Error, Result};

/// Instances larger than this many alternatives are refused by
/// [`SkInstance::enumerate_all`].
const ENUMERATION_CAP: u128 = 1 << 20;

/// A (possibly nested) pointer-chasing instance.
///
/// The serialized form is untagged: leaves carry `alice_bits` (as 0/1
/// integers) and `bob_index`; inner nodes carry `pointer` and `subs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SkInstance {
    /// A level-1 instance: Alice's bit string and Bob's index into it.
    Leaf {
        /// Alice's bits, one per position.
        #[serde(with = "bits01")]
        alice_bits: Vec<bool>,
        /// Bob's 0-based position.
        bob_index: usize,
    },
    /// A level-`k ≥ 2` instance: a pointer into `n` level-`(k-1)` instances.
    Node {
        /// The selecting pointer (held by Alice at even levels, Bob at odd).
        pointer: usize,
        /// The `n` sub-instances.
        subs: Vec<SkInstance>,
    },
}

/// Which party holds the pointer at a given level (the level-1 "pointer" is
/// Bob's index).
pub fn pointer_holder(level: usize) -> Party {
    if level.is_multiple_of(2) {
        Party::Alice
    } else {
        Party::Bob
    }
}

impl SkInstance {
    /// Nesting depth `k` (1 for a leaf).
    pub fn level(&self) -> usize {
        match self {
            SkInstance::Leaf { .. } => 1,
            SkInstance::Node { subs, .. } => 1 + subs.first().map_or(0, |s| s.level()),
        }
    }

    /// Fan-out `n` at the top level.
    pub fn width(&self) -> usize {
        match self {
            SkInstance::Leaf { alice_bits, .. } => alice_bits.len(),
            SkInstance::Node { subs, .. } => subs.len(),
        }
    }

    /// Check the recursive shape: every level has the same width `n ≥ 2`,
    /// every pointer and index is in range, and all siblings have identical
    /// shape.
    ///
    /// # Errors
    ///
    /// [`Error::MalformedInstance`] naming the first violation found.
    pub fn validate(&self) -> Result<()> {
        self.shape().map(|_| ())
    }

    /// Validated `(level, width)` of this instance.
    fn shape(&self) -> Result<(usize, usize)> {
        match self {
            SkInstance::Leaf { alice_bits, bob_index } => {
                let n = alice_bits.len();
                if n < 2 {
                    return Err(Error::MalformedInstance {
                        reason: format!("level-1 width must be ≥ 2, got {n}"),
                    });
                }
                if *bob_index >= n {
                    return Err(Error::MalformedInstance {
                        reason: format!("bob_index {bob_index} out of range for width {n}"),
                    });
                }
                Ok((1, n))
            }
            SkInstance::Node { pointer, subs } => {
                let n = subs.len();
                if n < 2 {
                    return Err(Error::MalformedInstance {
                        reason: format!("fan-out must be ≥ 2, got {n}"),
                    });
                }
                if *pointer >= n {
                    return Err(Error::MalformedInstance {
                        reason: format!("pointer {pointer} out of range for fan-out {n}"),
                    });
                }
                let first = subs[0].shape()?;
                for (i, sub) in subs.iter().enumerate().skip(1) {
                    if sub.shape()? != first {
                        return Err(Error::MalformedInstance {
                            reason: format!("sub-instance {i} has a different shape than sub 0"),
                        });
                    }
                }
                if first.1 != n {
                    return Err(Error::MalformedInstance {
                        reason: format!("sub-instance width {} differs from fan-out {n}", first.1),
                    });
                }
                Ok((first.0 + 1, n))
            }
        }
    }

    /// Uniformly random instance of the given width and depth.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidArgument`] for `n < 2` or `k < 1`.
    pub fn random(n: usize, k: usize, rng: &mut impl Rng) -> Result<SkInstance> {
        if n < 2 {
            return Err(Error::InvalidArgument { reason: format!("width must be ≥ 2, got {n}") });
        }
        if k < 1 {
            return Err(Error::InvalidArgument { reason: "depth must be ≥ 1".into() });
        }
        Ok(if k == 1 {
            SkInstance::Leaf {
                alice_bits: (0..n).map(|_| rng.gen()).collect(),
                bob_index: rng.gen_range(0..n),
            }
        } else {
            SkInstance::Node {
                pointer: rng.gen_range(0..n),
                subs: (0..n).map(|_| SkInstance::random(n, k - 1, rng)).collect::<Result<_>>()?,
            }
        })
    }

    /// Every instance of the given width and depth, for exhaustive checks.
    ///
    /// # Errors
    ///
    /// [`Error::SizeLimit`] when the instance space exceeds 2²⁰.
    pub fn enumerate_all(n: usize, k: usize) -> Result<Vec<SkInstance>> {
        if n < 2 || k < 1 {
            return Err(Error::InvalidArgument {
                reason: format!("need n ≥ 2 and k ≥ 1, got n = {n}, k = {k}"),
            });
        }
        // Count first: c_1 = 2^n · n, c_k = n · c_{k-1}^n.
        let mut count: u128 = (1u128 << n) * n as u128;
        for _ in 2..=k {
            count = count
                .checked_pow(n as u32)
                .and_then(|c| c.checked_mul(n as u128))
                .filter(|&c| c <= ENUMERATION_CAP)
                .ok_or_else(|| Error::SizeLimit {
                    reason: format!("instance space for n = {n}, k = {k} exceeds 2^20"),
                })?;
        }
        if count > ENUMERATION_CAP {
            return Err(Error::SizeLimit {
                reason: format!("instance space for n = {n}, k = {k} exceeds 2^20"),
            });
        }
        let mut all: Vec<SkInstance> = Vec::new();
        for mask in 0..(1usize << n) {
            for bob_index in 0..n {
                all.push(SkInstance::Leaf {
                    alice_bits: (0..n).map(|i| (mask >> i) & 1 == 1).collect(),
                    bob_index,
                });
            }
        }
        for _level in 2..=k {
            let prev = std::mem::take(&mut all);
            let mut idx = vec![0usize; n];
            'combos: loop {
                let subs: Vec<SkInstance> = idx.iter().map(|&i| prev[i].clone()).collect();
                for pointer in 0..n {
                    all.push(SkInstance::Node { pointer, subs: subs.clone() });
                }
                // Odometer increment over the n-fold cartesian power.
                let mut pos = n;
                loop {
                    if pos == 0 {
                        break 'combos;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < prev.len() {
                        break;
                    }
                    idx[pos] = 0;
                }
            }
        }
        Ok(all)
    }
}

/// Evaluate an instance: chase pointers to a leaf and read Alice's bit at
/// Bob's index.
///
/// # Errors
///
/// [`Error::MalformedInstance`] if the instance fails [`SkInstance::validate`].
pub fn sk_eval(inst: &SkInstance) -> Result<bool> {
    inst.validate()?;
    Ok(eval_unchecked(inst))
}

fn eval_unchecked(inst: &SkInstance) -> bool {
    match inst {
        SkInstance::Leaf { alice_bits, bob_index } => alice_bits[*bob_index],
        SkInstance::Node { pointer, subs } => eval_unchecked(&subs[*pointer]),
    }
}

/// Run the `k`-message protocol in which the top pointer's holder opens.
///
/// Message `j` announces the level-`(k-j+1)` pointer in `⌈log₂ n⌉` bits; the
/// receiver of the last message (Alice) finishes locally. Total cost is
/// exactly `k·⌈log₂ n⌉` bits.
///
/// # Errors
///
/// [`Error::MalformedInstance`] for an invalid instance.
pub fn sk_protocol_right_start(inst: &SkInstance) -> Result<ProtocolRun> {
    inst.validate()?;
    let k = inst.level();
    let n = inst.width();
    let w = ceil_log2(n);
    let declared = (0..k).map(|j| (pointer_holder(k - j), w)).collect();
    let mut transcript = Transcript::new(declared)?;
    let mut current = inst;
    for level in (2..=k).rev() {
        let SkInstance::Node { pointer, subs } = current else {
            unreachable!("validated instance has nodes above level 1")
        };
        transcript.send(pointer_holder(level), encode_index(*pointer, w))?;
        current = &subs[*pointer];
    }
    let SkInstance::Leaf { alice_bits, bob_index } = current else {
        unreachable!("validated instance has a leaf at level 1")
    };
    transcript.send(Party::Bob, encode_index(*bob_index, w))?;
    Ok(ProtocolRun { output: alice_bits[*bob_index], transcript })
}

/// Run the protocol in which the *wrong* player opens.
///
/// For `k = 1` Alice (who holds the bits, not the index) must send her whole
/// string: `n` bits. For `k ≥ 2` the wrong player opens with an empty
/// message, rounds `2..k-1` cascade the pointers of levels `k..3`, and round
/// `k` bundles the level-2 pointer with the selected level-1 bit string.
/// Total cost is exactly `(k-1)·⌈log₂ n⌉ + n` bits.
///
/// # Errors
///
/// [`Error::MalformedInstance`] for an invalid instance.
pub fn sk_protocol_wrong_start(inst: &SkInstance) -> Result<ProtocolRun> {
    inst.validate()?;
    let k = inst.level();
    let n = inst.width();
    let w = ceil_log2(n);
    if k == 1 {
        let SkInstance::Leaf { alice_bits, bob_index } = inst else {
            unreachable!("level-1 instance is a leaf")
        };
        let mut transcript = Transcript::new(vec![(Party::Alice, n)])?;
        transcript.send(Party::Alice, alice_bits.clone())?;
        return Ok(ProtocolRun { output: alice_bits[*bob_index], transcript });
    }
    let mut declared = vec![(pointer_holder(k).other(), 0)];
    for level in (3..=k).rev() {
        declared.push((pointer_holder(level), w));
    }
    declared.push((Party::Alice, w + n));
    let mut transcript = Transcript::new(declared)?;
    transcript.send(pointer_holder(k).other(), Vec::new())?;
    let mut current = inst;
    for level in (3..=k).rev() {
        let SkInstance::Node { pointer, subs } = current else {
            unreachable!("validated instance has nodes above level 1")
        };
        transcript.send(pointer_holder(level), encode_index(*pointer, w))?;
        current = &subs[*pointer];
    }
    let SkInstance::Node { pointer, subs } = current else {
        unreachable!("current sits at level 2 after the cascade")
    };
    let SkInstance::Leaf { alice_bits, bob_index } = &subs[*pointer] else {
        unreachable!("level-2 sub-instances are leaves")
    };
    let mut bits = encode_index(*pointer, w);
    bits.extend_from_slice(alice_bits);
    transcript.send(Party::Alice, bits)?;
    Ok(ProtocolRun { output: alice_bits[*bob_index], transcript })
}

//! Two-party classical communication protocols with exact bit accounting.
//!
//! The model: Alice and Bob hold private inputs and exchange messages in
//! rounds. Every message's length is declared by a rule that depends only on
//! public information (the parameters, the shared random coins, and the
//! transcript so far) — never on private data. [`Transcript`] enforces this
//! structurally: the full schedule of (sender, length) pairs is fixed at
//! construction, and [`Transcript::send`] rejects any deviation.
//!
//! Submodules:
//!
//! | module | contents |
//! |--------|----------|
//! | [`sk`] | the recursive pointer-chasing problem `S_k` and its two deterministic protocols |
//! | [`pj`] | pointer jumping, the round-limited deterministic protocol, and the randomized prefix-narrowing protocol |
//! | [`disj`] | set disjointness and the path-set reduction from `S_k` |
//! | [`reduction`] | exact-enumeration demo of the first-message round-reduction bound |
//! | [`experiment`] | seeded Monte-Carlo harness with CSV reporting |
//!
//! All randomness flows through [`PublicCoins`] (or an explicit seeded RNG
//! for instance generation), so every run is reproducible from a `u64` seed.

pub mod disj;
pub mod experiment;
pub mod pj;
pub mod reduction;
pub mod sk;

pub use disj::{disj_eval, sk_to_disj, DisjInstance};
pub use experiment::{
    run_exhaustive, run_experiment, ExperimentParams, ExperimentReport, ProtocolId,
};
pub use pj::{
    iterated_log, log_star, nw_budget, pj_det_protocol, pj_eval, pj_nw_protocol, NwRun, PjInstance,
    PjValue, VertexSide,
};
pub use reduction::{classical_round_reduction_demo, RoundReductionReport};
pub use sk::{sk_eval, sk_protocol_right_start, sk_protocol_wrong_start, SkInstance};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One of the two communicating parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    /// Holds the `x` side of the input (bit strings, `f_A`, even-level pointers).
    Alice,
    /// Holds the `y` side of the input (indices, `f_B`, odd-level pointers).
    Bob,
}

impl Party {
    /// The other party.
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

impl std::fmt::Display for Party {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
        })
    }
}

/// `⌈log₂ n⌉` — the fixed message width for an index in `[0, n)`.
pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Fixed-width big-endian bit encoding of an index.
pub fn encode_index(value: usize, width: usize) -> Vec<bool> {
    (0..width).map(|i| (value >> (width - 1 - i)) & 1 == 1).collect()
}

/// Inverse of [`encode_index`].
pub fn decode_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b))
}

/// XOR of the fixed-width binary encoding of an index (leading zeros do not
/// affect parity, so this is the parity of the index's one-bits).
pub fn index_parity(value: usize) -> bool {
    value.count_ones() % 2 == 1
}

/// One sent message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Message {
    /// 1-based round number.
    pub round: usize,
    /// Who sent it.
    pub sender: Party,
    /// The payload, most significant bit first within each encoded field.
    #[serde(with = "bitstring")]
    pub bits: Vec<bool>,
}

/// An ordered record of messages against a pre-declared schedule.
///
/// The schedule — one `(sender, bit-length)` pair per round — is fixed when
/// the transcript is created; [`Transcript::send`] rejects a message whose
/// sender or length deviates, and senders must alternate. This is the model
/// restriction that message lengths are known in advance: for protocols
/// whose later round lengths depend on earlier *public* messages, the caller
/// derives the schedule from public data before filling in private content.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Transcript {
    declared: Vec<(Party, usize)>,
    messages: Vec<Message>,
}

impl Transcript {
    /// Fix a schedule. Senders must alternate round to round.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidArgument`] on an empty schedule or two consecutive
    /// rounds with the same sender.
    pub fn new(declared: Vec<(Party, usize)>) -> Result<Self> {
        if declared.is_empty() {
            return Err(Error::InvalidArgument { reason: "schedule must have ≥ 1 round".into() });
        }
        if declared.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument {
                reason: "senders must alternate between rounds".into(),
            });
        }
        Ok(Transcript { declared, messages: Vec::new() })
    }

    /// Record the next message. Sender and length must match the declaration
    /// for this round.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidArgument`] when the schedule is already complete or
    /// the message deviates from it.
    pub fn send(&mut self, sender: Party, bits: Vec<bool>) -> Result<()> {
        let round = self.messages.len();
        let Some(&(want_sender, want_len)) = self.declared.get(round) else {
            return Err(Error::InvalidArgument {
                reason: format!("schedule has only {} rounds", self.declared.len()),
            });
        };
        if sender != want_sender {
            return Err(Error::InvalidArgument {
                reason: format!("round {}: declared sender {want_sender}, got {sender}", round + 1),
            });
        }
        if bits.len() != want_len {
            return Err(Error::InvalidArgument {
                reason: format!(
                    "round {}: declared {} bits, got {}",
                    round + 1,
                    want_len,
                    bits.len()
                ),
            });
        }
        self.messages.push(Message { round: round + 1, sender, bits });
        Ok(())
    }

    /// Whether every declared round has been sent.
    pub fn finished(&self) -> bool {
        self.messages.len() == self.declared.len()
    }

    /// Total bits over all sent messages.
    pub fn total_bits(&self) -> usize {
        self.messages.iter().map(|m| m.bits.len()).sum()
    }

    /// Number of declared rounds.
    pub fn rounds(&self) -> usize {
        self.declared.len()
    }

    /// The messages sent so far.
    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    /// The declared `(sender, length)` schedule.
    pub fn declared(&self) -> &[(Party, usize)] {
        &self.declared
    }

    /// Bits sent per round (sent messages only).
    pub fn round_bits(&self) -> Vec<usize> {
        self.messages.iter().map(|m| m.bits.len()).collect()
    }

    /// Bits sent to `receiver` over the whole transcript.
    pub fn bits_received_by(&self, receiver: Party) -> usize {
        self.messages.iter().filter(|m| m.sender == receiver.other()).map(|m| m.bits.len()).sum()
    }
}

/// Output and full transcript of one protocol run.
#[derive(Debug, Clone)]
pub struct ProtocolRun {
    /// The computed answer.
    pub output: bool,
    /// Everything that was sent.
    pub transcript: Transcript,
}

/// A shared source of random bits: both parties see the identical stream.
///
/// Backed by a seeded counter-mode generator; the `draws` counter records
/// the stream position for reproducibility diagnostics.
#[derive(Debug, Clone)]
pub struct PublicCoins {
    rng: ChaCha12Rng,
    seed: u64,
    draws: u64,
}

impl PublicCoins {
    /// Start a fresh stream from a seed.
    pub fn new(seed: u64) -> Self {
        PublicCoins { rng: ChaCha12Rng::seed_from_u64(seed), seed, draws: 0 }
    }

    /// The seed this stream started from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// How many draws have been made.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Uniform index in `[0, bound)`.
    pub fn index(&mut self, bound: usize) -> usize {
        self.draws += 1;
        self.rng.gen_range(0..bound)
    }

    /// Uniform value in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.draws += 1;
        self.rng.gen::<f64>()
    }

    /// `count` distinct uniform indices from `[0, bound)`, ascending.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidArgument`] when `count > bound`.
    pub fn sample_distinct(&mut self, bound: usize, count: usize) -> Result<Vec<usize>> {
        if count > bound {
            return Err(Error::InvalidArgument {
                reason: format!("cannot draw {count} distinct values from {bound}"),
            });
        }
        // Partial Fisher-Yates over the index list.
        let mut pool: Vec<usize> = (0..bound).collect();
        for i in 0..count {
            let j = i + self.index(bound - i);
            pool.swap(i, j);
        }
        let mut out = pool[..count].to_vec();
        out.sort_unstable();
        Ok(out)
    }
}

/// On-disk instance format: a tagged JSON object (0-based indices
/// throughout). See `docs/formats.md` for the schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum InstanceFile {
    /// `S_k` instance: `n`/`k` are declared redundantly and cross-checked
    /// against the recursive shape of `root`.
    Sk {
        /// Width of every level.
        n: usize,
        /// Nesting depth.
        k: usize,
        /// The recursive instance body.
        root: SkInstance,
    },
    /// Pointer-jumping instance.
    Pj {
        /// Vertex count per side.
        n: usize,
        /// Alice's function `V_A → V_B`.
        f_a: Vec<usize>,
        /// Bob's function `V_B → V_A`.
        f_b: Vec<usize>,
    },
    /// Set-disjointness instance.
    Disj {
        /// Universe size.
        universe: usize,
        /// Alice's subset.
        set_a: Vec<usize>,
        /// Bob's subset.
        set_b: Vec<usize>,
    },
}

impl InstanceFile {
    /// Parse and validate from JSON text.
    ///
    /// # Errors
    ///
    /// [`Error::MalformedInstance`] for both JSON and shape problems.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)
            .map_err(|e| Error::MalformedInstance { reason: format!("bad instance JSON: {e}") })?;
        file.validate()?;
        Ok(file)
    }

    /// Serialize to pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization cannot fail")
    }

    /// Check internal consistency (shapes, ranges, declared vs actual n/k).
    ///
    /// # Errors
    ///
    /// [`Error::MalformedInstance`] naming the inconsistency.
    pub fn validate(&self) -> Result<()> {
        match self {
            InstanceFile::Sk { n, k, root } => {
                root.validate()?;
                if root.width() != *n {
                    return Err(Error::MalformedInstance {
                        reason: format!("declared n = {n} but instance width is {}", root.width()),
                    });
                }
                if root.level() != *k {
                    return Err(Error::MalformedInstance {
                        reason: format!("declared k = {k} but instance level is {}", root.level()),
                    });
                }
                Ok(())
            }
            InstanceFile::Pj { n, f_a, f_b } => {
                let inst = PjInstance::new(f_a.clone(), f_b.clone())?;
                if inst.n() != *n {
                    return Err(Error::MalformedInstance {
                        reason: format!("declared n = {n} but functions have length {}", inst.n()),
                    });
                }
                Ok(())
            }
            InstanceFile::Disj { universe, set_a, set_b } => {
                DisjInstance::new(*universe, set_a.clone(), set_b.clone()).map(|_| ())
            }
        }
    }
}

/// Serde adapter: `Vec<bool>` as a compact `"0101"` string.
pub(crate) mod bitstring {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bits: &[bool], s: S) -> Result<S::Ok, S::Error> {
        let text: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        s.serialize_str(&text)
    }

    #[allow(dead_code)]
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let text = String::deserialize(d)?;
        text.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(serde::de::Error::custom(format!("bad bit char {other:?}"))),
            })
            .collect()
    }
}

/// Serde adapter: `Vec<bool>` as a JSON array of 0/1 integers.
pub(crate) mod bits01 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bits: &[bool], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(bits.iter().map(|&b| u8::from(b)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let ints = Vec::<u8>::deserialize(d)?;
        ints.into_iter()
            .map(|v| match v {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(serde::de::Error::custom(format!("bad bit value {other}"))),
            })
            .collect()
    }
}

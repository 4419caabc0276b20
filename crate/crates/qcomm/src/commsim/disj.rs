//! Set disjointness and the reduction from nested pointer chasing.
//!
//! [`sk_to_disj`] maps an `S_k` instance on width `n` to a disjointness
//! instance over the universe of all `n^k` pointer paths. Alice keeps the
//! paths that are consistent with her pointers *and* end at a 1-bit; Bob
//! keeps the paths consistent with his pointers and his leaf index. Exactly
//! one path is consistent with both players — the true pointer chain — so
//! the sets intersect (in at most one element) precisely when the `S_k`
//! value is 1.

use serde::Serialize;

use super::sk::{pointer_holder, SkInstance};
use super::Party;
use crate::{Error, Result};

/// Universes larger than this are refused by [`sk_to_disj`].
const UNIVERSE_CAP: u128 = 1 << 20;

/// A set-disjointness instance: two subsets of `{0, …, universe-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DisjInstance {
    universe: usize,
    set_a: Vec<usize>,
    set_b: Vec<usize>,
}

impl DisjInstance {
    /// Build an instance; the sets are sorted and checked for range and
    /// duplicates.
    ///
    /// # Errors
    ///
    /// [`Error::MalformedInstance`] for an empty universe, an out-of-range
    /// element, or a duplicate.
    pub fn new(universe: usize, mut set_a: Vec<usize>, mut set_b: Vec<usize>) -> Result<Self> {
        if universe == 0 {
            return Err(Error::MalformedInstance { reason: "universe must be non-empty".into() });
        }
        for (name, set) in [("set_a", &mut set_a), ("set_b", &mut set_b)] {
            set.sort_unstable();
            if let Some(&bad) = set.iter().find(|&&v| v >= universe) {
                return Err(Error::MalformedInstance {
                    reason: format!("{name} contains {bad}, outside universe {universe}"),
                });
            }
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::MalformedInstance {
                    reason: format!("{name} contains duplicates"),
                });
            }
        }
        Ok(DisjInstance { universe, set_a, set_b })
    }

    /// Universe size.
    pub fn universe(&self) -> usize {
        self.universe
    }

    /// Alice's set, ascending.
    pub fn set_a(&self) -> &[usize] {
        &self.set_a
    }

    /// Bob's set, ascending.
    pub fn set_b(&self) -> &[usize] {
        &self.set_b
    }

    /// The elements both sets contain, ascending.
    pub fn intersection(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.set_a.len() && j < self.set_b.len() {
            match self.set_a[i].cmp(&self.set_b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(self.set_a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }
}

/// Whether the sets intersect (the "not disjoint" predicate, matching the
/// convention that the interesting output is 1 on intersection).
pub fn disj_eval(inst: &DisjInstance) -> bool {
    !inst.intersection().is_empty()
}

/// Reduce nested pointer chasing to set disjointness over pointer paths.
///
/// The universe is `n^k`: every sequence of candidate pointers from the top
/// level down to a leaf position, encoded in base `n` most significant level
/// first. A path joins Alice's set when every even-level pointer along it
/// matches her input and the leaf bit it reaches is 1; it joins Bob's set
/// when every odd-level pointer (including the leaf index at level 1)
/// matches his. The two sets share at most one element — the true chain —
/// and share it exactly when the instance evaluates to 1.
///
/// When `k` is odd, the construction formally pads the instance with a
/// trivial top level whose single forced pointer is held by Alice; the
/// padded coordinate is constant, so the universe stays `n^k` and the extra
/// check is vacuous. The enumeration below therefore handles both parities
/// uniformly.
///
/// # Errors
///
/// [`Error::MalformedInstance`] for an invalid instance;
/// [`Error::SizeLimit`] when `n^k` exceeds 2²⁰.
pub fn sk_to_disj(inst: &SkInstance) -> Result<DisjInstance> {
    inst.validate()?;
    let k = inst.level();
    let n = inst.width();
    let universe =
        (n as u128).checked_pow(k as u32).filter(|&u| u <= UNIVERSE_CAP).ok_or_else(|| {
            Error::SizeLimit { reason: format!("path universe n^k = {n}^{k} exceeds 2^20") }
        })? as usize;
    let mut set_a = Vec::new();
    let mut set_b = Vec::new();
    let mut path = vec![0usize; k];
    for idx in 0..universe {
        let mut v = idx;
        for slot in path.iter_mut().rev() {
            *slot = v % n;
            v /= n;
        }
        if includes_path(inst, &path, Party::Alice) {
            set_a.push(idx);
        }
        if includes_path(inst, &path, Party::Bob) {
            set_b.push(idx);
        }
    }
    DisjInstance::new(universe, set_a, set_b)
}

/// Whether `me` keeps this path: consistent with my pointers at the levels I
/// hold, and — for Alice — ending at a 1-bit, for Bob — ending at my index.
fn includes_path(inst: &SkInstance, path: &[usize], me: Party) -> bool {
    match inst {
        SkInstance::Node { pointer, subs } => {
            let level = path.len();
            let c = path[0];
            if pointer_holder(level) == me && c != *pointer {
                return false;
            }
            includes_path(&subs[c], &path[1..], me)
        }
        SkInstance::Leaf { alice_bits, bob_index } => {
            let c = path[0];
            match me {
                Party::Alice => alice_bits[c],
                Party::Bob => c == *bob_index,
            }
        }
    }
}

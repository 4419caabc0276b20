//! Pointer jumping on a bipartite graph, with a round-limited deterministic
//! protocol and the randomized protocol that beats it by sampling prefixes.
//!
//! The graph has `n` vertices on each side. Alice holds `f_A : V_A → V_B`,
//! Bob holds `f_B : V_B → V_A`, and both know the start vertex `v₁` (index 0
//! on side A). Writing `f` for the map that applies whichever function is
//! defined at the current vertex, the walk is `v_m = f^{(m-1)}(v₁)` and the
//! target of the `k`-round game is the *parity bit* of `g_k = f^{(k+1)}(v₁)`
//! (XOR of its fixed-width binary encoding).
//!
//! * [`pj_det_protocol`] — round `t` announces `v_{t+1}`; after `k` rounds
//!   the receiver applies its own function twice-removed knowledge to finish.
//!   Cost: `k·⌈log₂ n⌉` bits, zero error.
//! * [`pj_nw_protocol`] — Bob opens by publishing, for a random sample `S₀`
//!   of his vertices, a short prefix of `f_B` there. If the walk enters `S₀`
//!   early enough, a cascade of prefix tables lets the players skip two
//!   rounds at the end and finish despite the "wasted" first round. The
//!   protocol aborts (outputs 0) when the walk misses the sample; it never
//!   errs otherwise.
//!
//! All message lengths are functions of public data only (parameters, the
//! shared coins, and previously announced vertices), so the declared
//! schedule is honest: nothing about a private input leaks through a length.

use serde::{Deserialize, Serialize};

use super::{ceil_log2, encode_index, index_parity, Party, ProtocolRun, PublicCoins, Transcript};
use crate::{Error, Result};
use rand::Rng;

/// A pointer-jumping instance: one function per side, `n` vertices each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PjInstance {
    f_a: Vec<usize>,
    f_b: Vec<usize>,
}

/// Which side of the bipartite graph a vertex lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexSide {
    /// Alice's side (the walk starts here).
    A,
    /// Bob's side.
    B,
}

/// The resolved target of a `k`-round game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PjValue {
    /// 0-based index of `g_k = f^{(k+1)}(v₁)` on its side.
    pub vertex: usize,
    /// The side `g_k` lives on: `A` when `k` is odd, `B` when `k` is even.
    pub side: VertexSide,
    /// Parity of the vertex's fixed-width binary encoding — the answer bit.
    pub bit: bool,
}

impl PjInstance {
    /// Build and validate an instance from the two function tables.
    ///
    /// # Errors
    ///
    /// [`Error::MalformedInstance`] when the sides differ in length, have
    /// fewer than 2 vertices, or map out of range.
    pub fn new(f_a: Vec<usize>, f_b: Vec<usize>) -> Result<Self> {
        let n = f_a.len();
        if n < 2 {
            return Err(Error::MalformedInstance {
                reason: format!("need ≥ 2 vertices per side, got {n}"),
            });
        }
        if f_b.len() != n {
            return Err(Error::MalformedInstance {
                reason: format!("side sizes differ: {} vs {}", f_a.len(), f_b.len()),
            });
        }
        for (name, f) in [("f_a", &f_a), ("f_b", &f_b)] {
            if let Some(&bad) = f.iter().find(|&&v| v >= n) {
                return Err(Error::MalformedInstance {
                    reason: format!("{name} maps to {bad}, out of range for n = {n}"),
                });
            }
        }
        Ok(PjInstance { f_a, f_b })
    }

    /// Vertices per side.
    pub fn n(&self) -> usize {
        self.f_a.len()
    }

    /// Alice's function `V_A → V_B`.
    pub fn f_a(&self) -> &[usize] {
        &self.f_a
    }

    /// Bob's function `V_B → V_A`.
    pub fn f_b(&self) -> &[usize] {
        &self.f_b
    }

    /// Uniformly random instance on `n` vertices per side.
    ///
    /// # Errors
    ///
    /// [`Error::MalformedInstance`] for `n < 2`.
    pub fn random(n: usize, rng: &mut impl Rng) -> Result<Self> {
        if n < 2 {
            return Err(Error::MalformedInstance {
                reason: format!("need ≥ 2 vertices per side, got {n}"),
            });
        }
        Ok(PjInstance {
            f_a: (0..n).map(|_| rng.gen_range(0..n)).collect(),
            f_b: (0..n).map(|_| rng.gen_range(0..n)).collect(),
        })
    }
}

/// The walk `v₁, v₂, …`: `chain[m] = f^{(m)}(v₁) = v_{m+1}`, so `chain` has
/// `steps + 1` entries and `chain[m]` lies on side A exactly when `m` is
/// even.
fn walk(inst: &PjInstance, steps: usize) -> Vec<usize> {
    let mut chain = Vec::with_capacity(steps + 1);
    let mut v = 0usize;
    chain.push(v);
    for m in 0..steps {
        v = if m % 2 == 0 { inst.f_a[v] } else { inst.f_b[v] };
        chain.push(v);
    }
    chain
}

/// Resolve the `k`-round target `g_k = f^{(k+1)}(v₁)` and its parity bit.
pub fn pj_eval(inst: &PjInstance, k: usize) -> PjValue {
    let chain = walk(inst, k + 1);
    let vertex = chain[k + 1];
    let side = if (k + 1).is_multiple_of(2) { VertexSide::A } else { VertexSide::B };
    PjValue { vertex, side, bit: index_parity(vertex) }
}

/// Run the deterministic `k`-round protocol: Alice opens, round `t`
/// announces `v_{t+1}`, and the receiver of round `k` applies its own
/// function once more to reach `g_k`. Cost is exactly `k·⌈log₂ n⌉` bits.
///
/// # Errors
///
/// [`Error::InvalidArgument`] for `k < 1`.
pub fn pj_det_protocol(inst: &PjInstance, k: usize) -> Result<ProtocolRun> {
    if k < 1 {
        return Err(Error::InvalidArgument { reason: "need ≥ 1 round".into() });
    }
    let w = ceil_log2(inst.n());
    let chain = walk(inst, k + 1);
    let sender = |t: usize| if t % 2 == 1 { Party::Alice } else { Party::Bob };
    let declared = (1..=k).map(|t| (sender(t), w)).collect();
    let mut transcript = Transcript::new(declared)?;
    for (t, &vertex) in chain.iter().enumerate().take(k + 1).skip(1) {
        transcript.send(sender(t), encode_index(vertex, w))?;
    }
    Ok(ProtocolRun { output: index_parity(chain[k + 1]), transcript })
}

/// `log^{(depth)}(n)`: iterate `x ↦ log₂(max(x, 1))` starting from `n`.
/// `depth = 0` returns `n` itself.
pub fn iterated_log(n: usize, depth: usize) -> f64 {
    let mut v = n as f64;
    for _ in 0..depth {
        v = v.max(1.0).log2();
    }
    v
}

/// `log* n`: how many times `log₂` must be iterated before the value drops
/// to at most 1. `log*(1) = 0`, `log*(2) = 1`, `log*(65536) = 4`.
pub fn log_star(n: usize) -> usize {
    let mut v = n as f64;
    let mut count = 0;
    while v > 1.0 {
        v = v.log2();
        count += 1;
    }
    count
}

/// The cost target for the randomized protocol, with real-valued logs:
/// `k·log₂ n + (n/k)·ln(1/ε)·(log^{(⌈k/2⌉)} n + 3·log₂ k)`.
pub fn nw_budget(n: usize, k: usize, eps: f64) -> f64 {
    let nf = n as f64;
    let kf = k as f64;
    kf * nf.log2()
        + (nf / kf) * (1.0 / eps).ln() * (iterated_log(n, k.div_ceil(2)) + 3.0 * kf.log2())
}

/// Outcome of one randomized-protocol run.
#[derive(Debug, Clone)]
pub struct NwRun {
    /// The announced answer (`false` on abort).
    pub output: bool,
    /// Everything that was sent.
    pub transcript: Transcript,
    /// Whether the walk missed the sample and the protocol gave up.
    pub aborted: bool,
    /// Whether `⌈δn⌉ ≥ n` forced the sample to cover every vertex (the
    /// asymptotic regime does not apply, but the run is still exact).
    pub degenerate: bool,
    /// The even round at which the walk entered the sample, if any.
    pub hit_round: Option<usize>,
}

/// Everything about the randomized protocol that is fixed by `(n, k, ε)`.
struct NwParams {
    k: usize,
    w: usize,
    /// Prefix lengths `ℓ_j = clamp(⌈log^{(⌈k/2⌉-j)} n⌉ + 3⌈log₂ k⌉, 1, w)`
    /// for `j = 0 ..= jstar`.
    ell: Vec<usize>,
    /// `cap[j] = min(n, 2^(w - ℓ_{j-1}))` bounds `|S_j|`; entry 0 is unused.
    cap: Vec<usize>,
    /// First `j ≥ 1` with `ℓ_j = w`: the table sent at round `t + jstar - 1`
    /// carries full names, so round `t + jstar` can jump two rounds ahead.
    jstar: usize,
    /// Sample size `min(⌈δn⌉, n)` with `δ = (4/k)·ln(1/ε)`.
    s0_size: usize,
    /// Last even round eligible for a hit (largest even integer ≤ k/2; 0
    /// when there is none, in which case every run aborts).
    t_max: usize,
    degenerate: bool,
}

fn nw_params(n: usize, k: usize, eps: f64) -> NwParams {
    let w = ceil_log2(n);
    let half = k.div_ceil(2);
    let three_log_k = 3 * ceil_log2(k).max(1);
    let ell_at = |j: usize| -> usize {
        let depth = half.saturating_sub(j);
        let base = iterated_log(n, depth).ceil().max(0.0) as usize;
        (base + three_log_k).clamp(1, w)
    };
    let mut ell = vec![ell_at(0)];
    let mut jstar = 1;
    loop {
        let l = ell_at(jstar);
        ell.push(l);
        if l == w {
            break;
        }
        jstar += 1;
    }
    let mut cap = vec![0usize];
    for j in 1..=jstar {
        let shift = w - ell[j - 1];
        cap.push(n.min(1usize << shift));
    }
    let delta = (4.0 / k as f64) * (1.0 / eps).ln();
    let raw = (delta * n as f64).ceil() as usize;
    let floor_half = k / 2;
    let t_max = if floor_half.is_multiple_of(2) { floor_half } else { floor_half - 1 };
    NwParams { k, w, ell, cap, jstar, s0_size: raw.min(n), t_max, degenerate: raw >= n }
}

/// The public schedule: senders alternate starting from Bob, and each
/// round's length depends only on `(n, k, ε)` and the publicly detectable
/// hit round `t`. Pre-hit even rounds carry a blank table slot of the same
/// size as the hit round's, so a length never reveals anything private.
fn nw_schedule(p: &NwParams, t: Option<usize>) -> Vec<(Party, usize)> {
    let sender = |r: usize| if r % 2 == 1 { Party::Bob } else { Party::Alice };
    let slot1 = p.cap[1] * p.ell[1];
    let plain = |r: usize| if r.is_multiple_of(2) { p.w + slot1 } else { p.w };
    let mut sched = vec![(Party::Bob, p.s0_size * p.ell[0])];
    for r in 2..=p.k {
        let len = match t {
            None => {
                if r <= p.t_max {
                    plain(r)
                } else {
                    0
                }
            }
            Some(t) => {
                if r <= t {
                    plain(r)
                } else if r < t + p.jstar {
                    let j = r - t;
                    p.w + p.cap[j + 1] * p.ell[j + 1]
                } else {
                    p.w
                }
            }
        };
        sched.push((sender(r), len));
    }
    sched
}

/// First `ell` bits of the `width`-bit big-endian encoding of `value`.
fn prefix_bits(value: usize, width: usize, ell: usize) -> Vec<bool> {
    encode_index(value >> (width - ell), ell)
}

/// Top `ell` bits of `value` as a comparable key.
fn prefix_key(value: usize, width: usize, ell: usize) -> usize {
    value >> (width - ell)
}

/// Run the randomized `k`-round protocol with shared coins.
///
/// `k = 1` is the degenerate one-message case: Bob ships all of `f_B`
/// (`n·⌈log₂ n⌉` bits) and Alice finishes locally, never aborting.
///
/// For `k ≥ 2`: Bob's round 1 publishes `ℓ₀`-bit prefixes of `f_B` on a
/// random sample `S₀` of his side. Rounds then announce the walk one vertex
/// per round (one behind the deterministic protocol, since round 1 was spent
/// on the sample). If an announced vertex `v_t` (even `t ≤ k/2`) lands in
/// `S₀`, the players cascade prefix tables `B₁, B₂, …` over the shrinking
/// candidate sets `S₁, S₂, …` until a table carries full names, at which
/// point the next sender already knows the walk *two* vertices ahead and the
/// protocol finishes with the deterministic tail shifted by two — making up
/// the lost round. If no announced vertex lands in `S₀` in time, the players
/// abort publicly and output 0.
///
/// # Errors
///
/// [`Error::InvalidArgument`] for `k < 1` or `ε ∉ (0, 1)`.
pub fn pj_nw_protocol(
    inst: &PjInstance,
    k: usize,
    eps: f64,
    coins: &mut PublicCoins,
) -> Result<NwRun> {
    if k < 1 {
        return Err(Error::InvalidArgument { reason: "need ≥ 1 round".into() });
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument {
            reason: format!("error budget must lie in (0, 1), got {eps}"),
        });
    }
    let n = inst.n();
    let w = ceil_log2(n);
    if k == 1 {
        let mut bits = Vec::with_capacity(n * w);
        for &v in inst.f_b() {
            bits.extend(encode_index(v, w));
        }
        let mut transcript = Transcript::new(vec![(Party::Bob, n * w)])?;
        transcript.send(Party::Bob, bits)?;
        return Ok(NwRun {
            output: pj_eval(inst, 1).bit,
            transcript,
            aborted: false,
            degenerate: false,
            hit_round: None,
        });
    }

    let p = nw_params(n, k, eps);
    let s0 = coins.sample_distinct(n, p.s0_size)?;
    // chain[m] = v_{m+1}; the last round announces v_{k+2} = chain[k+1].
    let chain = walk(inst, k + 1);
    // Hit detection is public: v_r (announced at even round r, side B) is in
    // S₀ or not. Only the first hit at an even round ≤ k/2 counts.
    let t = (2..=p.t_max).step_by(2).find(|&r| s0.binary_search(&chain[r - 1]).is_ok());

    let sched = nw_schedule(&p, t);
    let mut transcript = Transcript::new(sched.clone())?;

    // Round 1: ℓ₀-bit prefixes of f_B over the sorted sample.
    let mut bits = Vec::with_capacity(p.s0_size * p.ell[0]);
    for &v in &s0 {
        bits.extend(prefix_bits(inst.f_b[v], w, p.ell[0]));
    }
    transcript.send(Party::Bob, bits)?;

    // A plain round announces v_r; even plain rounds append a blank slot so
    // their length matches the hit round's.
    let plain_payload = |r: usize| -> Vec<bool> {
        let mut bits = encode_index(chain[r - 1], w);
        if r.is_multiple_of(2) {
            bits.extend(std::iter::repeat_n(false, p.cap[1] * p.ell[1]));
        }
        bits
    };
    // The table B_{j+1} sent at round t+j: candidates S_{j+1} are the
    // vertices matching the announced ℓ_j-prefix of v_{t+j+1}; for each, the
    // sender publishes the ℓ_{j+1}-prefix of its own function's value there.
    // Entries are padded to the public worst-case count cap[j+1].
    let table_payload = |j: usize, t: usize| -> Vec<bool> {
        let next = chain[t + j]; // v_{t+j+1}
        let ell_in = p.ell[j];
        let ell_out = p.ell[j + 1];
        let key = prefix_key(next, w, ell_in);
        let f = if (t + j).is_multiple_of(2) { &inst.f_a } else { &inst.f_b };
        let members: Vec<usize> = (0..n).filter(|&u| prefix_key(u, w, ell_in) == key).collect();
        debug_assert!(members.binary_search(&next).is_ok());
        debug_assert!(members.len() <= p.cap[j + 1]);
        let mut bits = Vec::with_capacity(p.cap[j + 1] * ell_out);
        for &u in &members {
            bits.extend(prefix_bits(f[u], w, ell_out));
        }
        bits.resize(p.cap[j + 1] * ell_out, false);
        bits
    };

    let sender = |r: usize| if r % 2 == 1 { Party::Bob } else { Party::Alice };
    match t {
        None => {
            for r in 2..=k {
                let payload = if r <= p.t_max { plain_payload(r) } else { Vec::new() };
                transcript.send(sender(r), payload)?;
            }
            Ok(NwRun {
                output: false,
                transcript,
                aborted: true,
                degenerate: p.degenerate,
                hit_round: None,
            })
        }
        Some(t) => {
            for r in 2..t {
                transcript.send(sender(r), plain_payload(r))?;
            }
            // Hit round: announce v_t and the first table. Note the hit
            // round's S₁ comes from the round-1 sample prefixes, which is
            // table_payload with j = 0 (ℓ₀-prefix in, ℓ₁-prefix out).
            let mut bits = encode_index(chain[t - 1], w);
            bits.extend(table_payload(0, t));
            transcript.send(sender(t), bits)?;
            // Cascade: round t+j announces v_{t+j} and table B_{j+1}.
            for j in 1..p.jstar {
                let mut bits = encode_index(chain[t + j - 1], w);
                bits.extend(table_payload(j, t));
                transcript.send(sender(t + j), bits)?;
            }
            // Jump: the table at round t+jstar-1 carried full names, so the
            // sender of round t+jstar knows v_{t+jstar+1} and announces
            // v_{t+jstar+2}; every later round stays two ahead.
            for r in t + p.jstar..=k {
                transcript.send(sender(r), encode_index(chain[r + 1], w))?;
            }
            // Both players read the answer off the final announcement.
            let last = transcript.messages().last().expect("k ≥ 2 rounds exist");
            let answer = super::decode_index(&last.bits[last.bits.len() - w..]);
            debug_assert_eq!(answer, chain[k + 1]);
            Ok(NwRun {
                output: index_parity(answer),
                transcript,
                aborted: false,
                degenerate: p.degenerate,
                hit_round: Some(t),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{derive_seed, rng_from_seed};

    #[test]
    fn iterated_log_matches_hand_values() {
        assert!((iterated_log(65536, 1) - 16.0).abs() < 1e-12);
        assert!((iterated_log(65536, 2) - 4.0).abs() < 1e-12);
        assert!((iterated_log(65536, 3) - 2.0).abs() < 1e-12);
        assert!((iterated_log(7, 0) - 7.0).abs() < 1e-12);
        // After the value reaches 1, the next iterate is log₂(1) = 0 and the
        // max(·, 1) guard keeps it at 0 from then on.
        assert!((iterated_log(65536, 5) - 0.0).abs() < 1e-12);
        assert_eq!(log_star(1), 0);
        assert_eq!(log_star(2), 1);
        assert_eq!(log_star(4), 2);
        assert_eq!(log_star(65536), 4);
        assert_eq!(log_star(65535), 4);
    }

    #[test]
    fn eval_walks_the_graph() {
        // n = 2: f_a = [1, 0], f_b = [1, 1]. Walk: v1=0(A) →1(B) →1(A) →0(B) →1(A)…
        let inst = PjInstance::new(vec![1, 0], vec![1, 1]).unwrap();
        let v = pj_eval(&inst, 1);
        // g_1 = f^{(2)}(0) = f_b(f_a(0)) = f_b(1) = 1, side A.
        assert_eq!(v.vertex, 1);
        assert_eq!(v.side, VertexSide::A);
        assert!(v.bit);
        let v = pj_eval(&inst, 2);
        // g_2 = f^{(3)}(0) = f_a(1) = 0, side B.
        assert_eq!(v.vertex, 0);
        assert_eq!(v.side, VertexSide::B);
        assert!(!v.bit);
    }

    #[test]
    fn det_protocol_is_exact_and_costs_k_log_n() {
        // Exhaustive over all 16 two-vertex instances and k ≤ 4.
        for fa0 in 0..2 {
            for fa1 in 0..2 {
                for fb0 in 0..2 {
                    for fb1 in 0..2 {
                        let inst = PjInstance::new(vec![fa0, fa1], vec![fb0, fb1]).unwrap();
                        for k in 1..=4 {
                            let run = pj_det_protocol(&inst, k).unwrap();
                            assert_eq!(run.output, pj_eval(&inst, k).bit);
                            assert_eq!(run.transcript.total_bits(), k);
                        }
                    }
                }
            }
        }
        let mut rng = rng_from_seed(3);
        let inst = PjInstance::random(4, &mut rng).unwrap();
        let run = pj_det_protocol(&inst, 2).unwrap();
        assert_eq!(run.transcript.total_bits(), 4);
    }

    #[test]
    fn instance_validation_rejects_bad_tables() {
        assert!(PjInstance::new(vec![0], vec![0]).is_err());
        assert!(PjInstance::new(vec![0, 1], vec![0]).is_err());
        assert!(PjInstance::new(vec![0, 2], vec![0, 1]).is_err());
    }

    #[test]
    fn nw_single_round_ships_the_whole_function() {
        let mut rng = rng_from_seed(11);
        let inst = PjInstance::random(8, &mut rng).unwrap();
        let mut coins = PublicCoins::new(5);
        let run = pj_nw_protocol(&inst, 1, 0.2, &mut coins).unwrap();
        assert!(!run.aborted);
        assert_eq!(run.output, pj_eval(&inst, 1).bit);
        assert_eq!(run.transcript.total_bits(), 8 * 3);
    }

    #[test]
    fn nw_tiny_round_counts_always_abort() {
        // k ∈ {2, 3} has no even round ≤ k/2, so the sample can never be hit.
        let mut rng = rng_from_seed(12);
        let inst = PjInstance::random(8, &mut rng).unwrap();
        for k in [2, 3] {
            let mut coins = PublicCoins::new(6);
            let run = pj_nw_protocol(&inst, k, 0.2, &mut coins).unwrap();
            assert!(run.aborted);
            assert!(!run.output);
            assert!(run.transcript.finished());
        }
    }

    #[test]
    fn nw_never_errs_when_it_does_not_abort() {
        let mut rng = rng_from_seed(13);
        let mut hits = 0;
        for trial in 0..200u64 {
            let inst = PjInstance::random(16, &mut rng).unwrap();
            let mut coins = PublicCoins::new(derive_seed(99, trial));
            let run = pj_nw_protocol(&inst, 8, 0.3, &mut coins).unwrap();
            assert!(run.transcript.finished());
            if !run.aborted {
                hits += 1;
                assert_eq!(run.output, pj_eval(&inst, 8).bit, "non-abort runs are exact");
            } else {
                assert!(!run.output);
            }
        }
        assert!(hits > 0, "some runs should hit the sample");
    }

    #[test]
    fn nw_schedule_is_a_function_of_public_data() {
        // Two instances that produce the same hit round must produce the
        // same schedule, because lengths may depend only on public data.
        type Schedule = Vec<(Party, usize)>;
        let mut rng = rng_from_seed(14);
        let mut seen: Vec<(Option<usize>, Schedule)> = Vec::new();
        for trial in 0..100u64 {
            let inst = PjInstance::random(16, &mut rng).unwrap();
            let mut coins = PublicCoins::new(derive_seed(7, trial));
            let run = pj_nw_protocol(&inst, 8, 0.3, &mut coins).unwrap();
            let sched: Schedule = run.transcript.declared().to_vec();
            if let Some((_, prev)) = seen.iter().find(|(t, _)| *t == run.hit_round) {
                assert_eq!(prev, &sched, "schedule must be determined by the hit round");
            } else {
                seen.push((run.hit_round, sched));
            }
        }
    }

    #[test]
    fn nw_multi_stage_cascade_runs_on_large_instances() {
        // n = 65536, k = 8 exercises several distinct prefix lengths:
        // ℓ = (10, 11, 13, 16) with w = 16, so jstar = 3.
        let p = nw_params(65536, 8, 0.2);
        assert_eq!(p.w, 16);
        assert_eq!(p.ell, vec![10, 11, 13, 16]);
        assert_eq!(p.jstar, 3);
        assert_eq!(p.cap, vec![0, 64, 32, 8]);
        let mut rng = rng_from_seed(15);
        let mut narrowed = 0;
        for trial in 0..30u64 {
            let inst = PjInstance::random(65536, &mut rng).unwrap();
            let mut coins = PublicCoins::new(derive_seed(21, trial));
            let run = pj_nw_protocol(&inst, 8, 0.2, &mut coins).unwrap();
            assert!(run.transcript.finished());
            if !run.aborted {
                narrowed += 1;
                assert_eq!(run.output, pj_eval(&inst, 8).bit);
            }
        }
        assert!(narrowed > 0, "the cascade should complete at least once");
    }

    #[test]
    fn nw_acceptance_parameters_have_the_expected_shape() {
        let p = nw_params(4096, 12, 0.2);
        assert_eq!(p.w, 12);
        assert_eq!(p.ell[0], 12, "3⌈log₂ 12⌉ = 12 already clamps ℓ₀ to w");
        assert_eq!(p.jstar, 1);
        assert_eq!(p.cap, vec![0, 1]);
        assert_eq!(p.s0_size, 2198);
        assert_eq!(p.t_max, 6);
        assert!(!p.degenerate);
        let budget = nw_budget(4096, 12, 0.2);
        assert!((budget - 6052.0).abs() < 5.0, "budget ≈ 6052, got {budget}");
    }

    #[test]
    fn nw_same_seed_reproduces_the_run() {
        let mut rng = rng_from_seed(16);
        let inst = PjInstance::random(64, &mut rng).unwrap();
        let mut c1 = PublicCoins::new(77);
        let mut c2 = PublicCoins::new(77);
        let r1 = pj_nw_protocol(&inst, 8, 0.2, &mut c1).unwrap();
        let r2 = pj_nw_protocol(&inst, 8, 0.2, &mut c2).unwrap();
        assert_eq!(r1.transcript, r2.transcript);
        assert_eq!(r1.output, r2.output);
    }

    #[test]
    fn nw_rejects_bad_parameters() {
        let inst = PjInstance::new(vec![0, 1], vec![0, 1]).unwrap();
        let mut coins = PublicCoins::new(1);
        assert!(pj_nw_protocol(&inst, 0, 0.2, &mut coins).is_err());
        assert!(pj_nw_protocol(&inst, 4, 0.0, &mut coins).is_err());
        assert!(pj_nw_protocol(&inst, 4, 1.0, &mut coins).is_err());
        assert!(pj_det_protocol(&inst, 0).is_err());
    }
}

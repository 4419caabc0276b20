//! Exact-enumeration check of the classical first-message reduction bound.
//!
//! Setting: Bob's input is `n` uniform independent bits and his first
//! message `m` is at most `ℓ₁` bits long, produced by an arbitrary
//! randomized channel `q(m | y)`. Because the message carries at most `ℓ₁`
//! bits of information about `y`, an *average* coordinate stays nearly
//! independent of it: with `p(y_j, m)` the joint distribution of coordinate
//! `j` and the message,
//!
//! ```text
//! (1/n) · Σ_j ‖ p(y_j, m) − p(y_j)·p(m) ‖₁  ≤  √(2·ln2·ℓ₁/n)  ≤  √(2ℓ₁/n)
//! ```
//!
//! via the chain rule (`Σ_j I(Y_j : M) ≤ I(Y : M) ≤ ℓ₁`) and Pinsker's
//! inequality; the slack between `2·ln2` and `2` is the demo's headroom.
//! Everything here is computed by exact enumeration over all `2^n` inputs
//! and `2^ℓ₁` messages — no sampling error, only the random choice of
//! channel.

use serde::Serialize;

use crate::quantum::{derive_seed, rng_from_seed};
use crate::{Error, Result, INEQ_SLACK};
use rand::Rng;

/// Outcome of [`classical_round_reduction_demo`].
#[derive(Debug, Clone, Serialize)]
pub struct RoundReductionReport {
    /// Number of input bits.
    pub n: usize,
    /// First-message length in bits.
    pub ell1: usize,
    /// Number of random channels tested.
    pub trials: usize,
    /// Base seed.
    pub seed: u64,
    /// Coordinate-averaged ℓ₁ gap, averaged over channels.
    pub mean_distance: f64,
    /// Worst coordinate-averaged ℓ₁ gap over all channels.
    pub max_distance: f64,
    /// The proved ceiling `√(2ℓ₁/n)`.
    pub bound: f64,
    /// `max_distance / bound` (0 when the bound is 0).
    pub max_ratio: f64,
    /// Whether every channel stayed within the ceiling.
    pub holds: bool,
}

/// For `trials` random channels `q(m | y)`, compute the exact
/// coordinate-averaged ℓ₁ distance between the joint distribution of
/// `(y_j, m)` and the product of its marginals, and compare against
/// `√(2ℓ₁/n)`.
///
/// # Errors
///
/// [`Error::SizeLimit`] for `n ∉ 1..=8` or `ell1 > 10`;
/// [`Error::InvalidArgument`] for zero trials.
pub fn classical_round_reduction_demo(
    n: usize,
    ell1: usize,
    trials: usize,
    seed: u64,
) -> Result<RoundReductionReport> {
    if n == 0 || n > 8 {
        return Err(Error::SizeLimit {
            reason: format!("exact enumeration supports 1 ≤ n ≤ 8 input bits, got {n}"),
        });
    }
    if ell1 > 10 {
        return Err(Error::SizeLimit {
            reason: format!("message space capped at 2^10, got 2^{ell1}"),
        });
    }
    if trials == 0 {
        return Err(Error::InvalidArgument { reason: "need ≥ 1 trial".into() });
    }
    let inputs = 1usize << n;
    let msgs = 1usize << ell1;
    let bound = (2.0 * ell1 as f64 / n as f64).sqrt();

    let mut sum = 0.0;
    let mut max = 0.0f64;
    for trial in 0..trials {
        let mut rng = rng_from_seed(derive_seed(seed, trial as u64));
        // A random channel: each row q(· | y) is a point on the simplex,
        // sampled uniformly via normalized exponentials.
        let mut channel = vec![vec![0.0f64; msgs]; inputs];
        for row in channel.iter_mut() {
            let mut total = 0.0;
            for entry in row.iter_mut() {
                let u: f64 = rng.gen();
                *entry = -(1.0 - u).ln();
                total += *entry;
            }
            if total > 0.0 {
                for entry in row.iter_mut() {
                    *entry /= total;
                }
            } else {
                row.fill(1.0 / msgs as f64);
            }
        }
        // Message marginal under uniform y.
        let p_y = 1.0 / inputs as f64;
        let mut p_m = vec![0.0f64; msgs];
        for row in &channel {
            for (m, &q) in row.iter().enumerate() {
                p_m[m] += p_y * q;
            }
        }
        // Coordinate-averaged ℓ₁ gap.
        let mut stat = 0.0;
        for j in 0..n {
            let mut joint1 = vec![0.0f64; msgs]; // p(y_j = 1, m)
            for (y, row) in channel.iter().enumerate() {
                if (y >> j) & 1 == 1 {
                    for (m, &q) in row.iter().enumerate() {
                        joint1[m] += p_y * q;
                    }
                }
            }
            let mut dist = 0.0;
            for m in 0..msgs {
                let product = 0.5 * p_m[m];
                dist += (joint1[m] - product).abs(); // b = 1 term
                dist += ((p_m[m] - joint1[m]) - product).abs(); // b = 0 term
            }
            stat += dist;
        }
        stat /= n as f64;
        sum += stat;
        max = max.max(stat);
    }

    Ok(RoundReductionReport {
        n,
        ell1,
        trials,
        seed,
        mean_distance: sum / trials as f64,
        max_distance: max,
        bound,
        max_ratio: if bound > 0.0 { max / bound } else { 0.0 },
        holds: max <= bound + INEQ_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_length_message_reveals_nothing() {
        let report = classical_round_reduction_demo(4, 0, 10, 1).unwrap();
        assert!(report.max_distance < 1e-12, "a constant message is independent of y");
        assert_eq!(report.bound, 0.0);
        assert!(report.holds);
    }

    #[test]
    fn short_first_message_stays_under_the_ceiling() {
        let report = classical_round_reduction_demo(4, 1, 50, 7).unwrap();
        assert!(report.holds, "max {} vs bound {}", report.max_distance, report.bound);
        assert!(report.max_distance > 0.0, "random channels do leak a little");
        assert!(report.max_ratio <= 1.0 + 1e-9);
    }

    #[test]
    fn larger_demo_reports_its_headroom() {
        let report = classical_round_reduction_demo(8, 3, 25, 11).unwrap();
        assert!(report.holds);
        assert!(report.max_ratio > 0.0 && report.max_ratio <= 1.0 + 1e-9);
        assert!(report.mean_distance <= report.max_distance);
    }

    #[test]
    fn parameter_caps_are_enforced() {
        assert!(matches!(classical_round_reduction_demo(9, 1, 1, 0), Err(Error::SizeLimit { .. })));
        assert!(matches!(
            classical_round_reduction_demo(4, 11, 1, 0),
            Err(Error::SizeLimit { .. })
        ));
        assert!(classical_round_reduction_demo(4, 1, 0, 0).is_err());
    }

    #[test]
    fn same_seed_reproduces_the_report() {
        let a = classical_round_reduction_demo(5, 2, 20, 3).unwrap();
        let b = classical_round_reduction_demo(5, 2, 20, 3).unwrap();
        assert_eq!(a.mean_distance, b.mean_distance);
        assert_eq!(a.max_distance, b.max_distance);
    }
}

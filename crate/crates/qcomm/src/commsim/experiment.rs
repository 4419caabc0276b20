//! Seeded Monte-Carlo harness over the protocol zoo, with a CSV-friendly
//! report.
//!
//! Each trial derives its own seed from the experiment seed and the trial
//! index, draws a fresh random instance (and fresh public coins where the
//! protocol is randomized), runs the protocol, and compares the output
//! against the ground-truth evaluator. Trials run in parallel; aggregation
//! is a fixed-order fold over the indexed outcomes, so reports are
//! byte-identical across thread counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pj::{nw_budget, pj_det_protocol, pj_eval, pj_nw_protocol, PjInstance};
use super::sk::{sk_eval, sk_protocol_right_start, sk_protocol_wrong_start, SkInstance};
use super::{ceil_log2, PublicCoins};
use crate::quantum::{derive_seed, rng_from_seed};
use crate::{Error, Result};

/// The four protocols the harness can drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolId {
    /// Pointer chasing, pointer holder opens: `k·⌈log₂ n⌉` bits, exact.
    SkDet,
    /// Pointer chasing, wrong player opens: `(k-1)·⌈log₂ n⌉ + n` bits, exact.
    SkWrong,
    /// Pointer jumping, `k` rounds deterministic: `k·⌈log₂ n⌉` bits, exact.
    PjDet,
    /// Pointer jumping, randomized sampling protocol: may abort, never errs
    /// otherwise.
    PjNw,
}

impl ProtocolId {
    /// All protocol identifiers.
    pub fn all() -> [ProtocolId; 4] {
        [ProtocolId::SkDet, ProtocolId::SkWrong, ProtocolId::PjDet, ProtocolId::PjNw]
    }

    /// The kebab-case identifier used on the command line and in CSV.
    pub fn name(self) -> &'static str {
        match self {
            ProtocolId::SkDet => "sk-det",
            ProtocolId::SkWrong => "sk-wrong",
            ProtocolId::PjDet => "pj-det",
            ProtocolId::PjNw => "pj-nw",
        }
    }

    /// The closed-form cost target the measured bits are compared against.
    pub fn budget_bits(self, n: usize, k: usize, eps: f64) -> f64 {
        let w = ceil_log2(n) as f64;
        match self {
            ProtocolId::SkDet | ProtocolId::PjDet => k as f64 * w,
            ProtocolId::SkWrong => (k as f64 - 1.0) * w + n as f64,
            ProtocolId::PjNw => nw_budget(n, k, eps),
        }
    }
}

impl std::fmt::Display for ProtocolId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ProtocolId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProtocolId::all().into_iter().find(|p| p.name() == s).ok_or_else(|| Error::UnknownId {
            name: s.to_string(),
            known: ProtocolId::all().map(|p| p.name()).join(", "),
        })
    }
}

/// What to run and how often.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParams {
    /// Which protocol.
    pub protocol: ProtocolId,
    /// Instance width / vertices per side.
    pub n: usize,
    /// Depth / round count.
    pub k: usize,
    /// Error budget (only meaningful for `pj-nw`; recorded regardless).
    pub eps: f64,
    /// Number of independent trials.
    pub trials: usize,
    /// Base seed; trial `i` uses a seed derived from `(seed, i)`.
    pub seed: u64,
}

/// Aggregated results of one experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    /// Which protocol ran.
    pub protocol: ProtocolId,
    /// Instance width / vertices per side.
    pub n: usize,
    /// Depth / round count.
    pub k: usize,
    /// Error budget parameter as passed.
    pub eps: f64,
    /// Trials run.
    pub trials: usize,
    /// Base seed.
    pub seed: u64,
    /// Fraction of trials whose output disagreed with the evaluator
    /// (aborting runs output 0 and count as errors when the truth is 1).
    pub error_rate: f64,
    /// Fraction of trials that aborted (always 0 for the exact protocols).
    pub abort_rate: f64,
    /// Mean total bits per trial.
    pub mean_bits: f64,
    /// Worst-case total bits over all trials.
    pub max_bits: usize,
    /// Mean bits sent in each round (length = number of rounds).
    pub per_round_mean_bits: Vec<f64>,
    /// The closed-form cost target for these parameters.
    pub budget_formula_bits: f64,
    /// `max_bits / budget_formula_bits`.
    pub measured_constant: f64,
    /// Whether the randomized protocol's sample covered every vertex
    /// (asymptotics vacuous but runs still exact).
    pub degenerate: bool,
}

impl ExperimentReport {
    /// Column names for [`ExperimentReport::csv_row`].
    pub fn csv_header() -> &'static str {
        "protocol,n,k,eps,trials,seed,error_rate,abort_rate,mean_bits,max_bits,\
         budget_formula_bits,measured_constant"
    }

    /// One CSV line; floats carry 12 significant digits.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.protocol,
            self.n,
            self.k,
            fmt_float(self.eps),
            self.trials,
            self.seed,
            fmt_float(self.error_rate),
            fmt_float(self.abort_rate),
            fmt_float(self.mean_bits),
            self.max_bits,
            fmt_float(self.budget_formula_bits),
            fmt_float(self.measured_constant),
        )
    }
}

fn fmt_float(v: f64) -> String {
    format!("{v:.11e}")
}

struct TrialOutcome {
    error: bool,
    aborted: bool,
    degenerate: bool,
    bits: usize,
    round_bits: Vec<usize>,
}

fn one_trial(params: &ExperimentParams, trial: u64) -> Result<TrialOutcome> {
    let trial_seed = derive_seed(params.seed, trial);
    let mut rng = rng_from_seed(trial_seed);
    let (run, truth, aborted, degenerate) = match params.protocol {
        ProtocolId::SkDet => {
            let inst = SkInstance::random(params.n, params.k, &mut rng)?;
            (sk_protocol_right_start(&inst)?, sk_eval(&inst)?, false, false)
        }
        ProtocolId::SkWrong => {
            let inst = SkInstance::random(params.n, params.k, &mut rng)?;
            (sk_protocol_wrong_start(&inst)?, sk_eval(&inst)?, false, false)
        }
        ProtocolId::PjDet => {
            let inst = PjInstance::random(params.n, &mut rng)?;
            (pj_det_protocol(&inst, params.k)?, pj_eval(&inst, params.k).bit, false, false)
        }
        ProtocolId::PjNw => {
            let inst = PjInstance::random(params.n, &mut rng)?;
            let mut coins = PublicCoins::new(derive_seed(trial_seed, 1));
            let nw = pj_nw_protocol(&inst, params.k, params.eps, &mut coins)?;
            let truth = pj_eval(&inst, params.k).bit;
            (
                super::ProtocolRun { output: nw.output, transcript: nw.transcript },
                truth,
                nw.aborted,
                nw.degenerate,
            )
        }
    };
    Ok(TrialOutcome {
        error: run.output != truth,
        aborted,
        degenerate,
        bits: run.transcript.total_bits(),
        round_bits: run.transcript.round_bits(),
    })
}

/// Run `params.trials` independent seeded trials and aggregate.
///
/// # Errors
///
/// [`Error::InvalidArgument`] for zero trials, bad protocol parameters, or a
/// randomized run with `ε ∉ (0, 1)`; [`Error::SizeLimit`] when a pointer
/// chasing instance would exceed 2²⁰ nodes.
pub fn run_experiment(params: &ExperimentParams) -> Result<ExperimentReport> {
    if params.trials == 0 {
        return Err(Error::InvalidArgument { reason: "need ≥ 1 trial".into() });
    }
    if params.n < 2 {
        return Err(Error::InvalidArgument { reason: format!("need n ≥ 2, got {}", params.n) });
    }
    if params.k < 1 {
        return Err(Error::InvalidArgument { reason: "need k ≥ 1".into() });
    }
    if matches!(params.protocol, ProtocolId::SkDet | ProtocolId::SkWrong) {
        let nodes = (params.n as u128).checked_pow(params.k as u32);
        if nodes.is_none() || nodes.unwrap() > (1 << 20) {
            return Err(Error::SizeLimit {
                reason: format!(
                    "pointer chasing instance n^k = {}^{} exceeds 2^20 nodes",
                    params.n, params.k
                ),
            });
        }
    }

    let outcomes: Vec<TrialOutcome> = (0..params.trials as u64)
        .into_par_iter()
        .map(|trial| one_trial(params, trial))
        .collect::<Result<_>>()?;

    Ok(aggregate(*params, &outcomes))
}

/// Fold per-trial outcomes into a report (round means zero-pad trials that
/// ended early, as aborting randomized runs do).
fn aggregate(params: ExperimentParams, outcomes: &[TrialOutcome]) -> ExperimentReport {
    let rounds = outcomes.iter().map(|o| o.round_bits.len()).max().unwrap_or(0);
    let mut errors = 0usize;
    let mut aborts = 0usize;
    let mut degenerate = false;
    let mut total_bits = 0usize;
    let mut max_bits = 0usize;
    let mut round_sums = vec![0usize; rounds];
    for o in outcomes {
        errors += usize::from(o.error);
        aborts += usize::from(o.aborted);
        degenerate |= o.degenerate;
        total_bits += o.bits;
        max_bits = max_bits.max(o.bits);
        for (sum, &b) in round_sums.iter_mut().zip(&o.round_bits) {
            *sum += b;
        }
    }
    let trials_f = outcomes.len() as f64;
    let budget = params.protocol.budget_bits(params.n, params.k, params.eps);
    ExperimentReport {
        protocol: params.protocol,
        n: params.n,
        k: params.k,
        eps: params.eps,
        trials: outcomes.len(),
        seed: params.seed,
        error_rate: errors as f64 / trials_f,
        abort_rate: aborts as f64 / trials_f,
        mean_bits: total_bits as f64 / trials_f,
        max_bits,
        per_round_mean_bits: round_sums.iter().map(|&s| s as f64 / trials_f).collect(),
        budget_formula_bits: budget,
        measured_constant: if budget > 0.0 { max_bits as f64 / budget } else { 0.0 },
        degenerate,
    }
}

/// Run a deterministic protocol on its entire instance space and aggregate.
///
/// Reported `trials` is the space size; `eps` and `seed` are fixed at 0 (no
/// randomness is involved).
///
/// # Errors
///
/// [`Error::InvalidArgument`] for the randomized protocol (its behaviour is
/// a distribution over coins, not a finite instance space) or degenerate
/// shape parameters; [`Error::SizeLimit`] when the space exceeds 2²⁰
/// instances.
pub fn run_exhaustive(protocol: ProtocolId, n: usize, k: usize) -> Result<ExperimentReport> {
    if n < 2 {
        return Err(Error::InvalidArgument { reason: format!("need n ≥ 2, got {n}") });
    }
    if k < 1 {
        return Err(Error::InvalidArgument { reason: "need k ≥ 1".into() });
    }
    let outcome_of = |run: super::ProtocolRun, truth: bool| TrialOutcome {
        error: run.output != truth,
        aborted: false,
        degenerate: false,
        bits: run.transcript.total_bits(),
        round_bits: run.transcript.round_bits(),
    };
    let outcomes: Vec<TrialOutcome> = match protocol {
        ProtocolId::SkDet | ProtocolId::SkWrong => SkInstance::enumerate_all(n, k)?
            .into_par_iter()
            .map(|inst| {
                let run = match protocol {
                    ProtocolId::SkDet => sk_protocol_right_start(&inst)?,
                    _ => sk_protocol_wrong_start(&inst)?,
                };
                Ok(outcome_of(run, sk_eval(&inst)?))
            })
            .collect::<Result<_>>()?,
        ProtocolId::PjDet => {
            let tables = (n as u128)
                .checked_pow(n as u32)
                .filter(|&t| t * t <= 1 << 20)
                .ok_or_else(|| Error::SizeLimit {
                    reason: format!("pointer jumping space n^(2n) for n = {n} exceeds 2^20"),
                })? as usize;
            let digits = |mut v: usize| {
                (0..n)
                    .map(|_| {
                        let d = v % n;
                        v /= n;
                        d
                    })
                    .collect::<Vec<_>>()
            };
            (0..tables * tables)
                .into_par_iter()
                .map(|pair| {
                    let inst = PjInstance::new(digits(pair / tables), digits(pair % tables))?;
                    Ok(outcome_of(pj_det_protocol(&inst, k)?, pj_eval(&inst, k).bit))
                })
                .collect::<Result<_>>()?
        }
        ProtocolId::PjNw => {
            return Err(Error::InvalidArgument {
                reason: "the randomized protocol has no finite instance space to exhaust; \
                         run seeded trials instead"
                    .into(),
            })
        }
    };
    let params = ExperimentParams { protocol, n, k, eps: 0.0, trials: outcomes.len(), seed: 0 };
    Ok(aggregate(params, &outcomes))
}

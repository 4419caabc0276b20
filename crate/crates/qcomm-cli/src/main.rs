//! `qcomm` — drive the certification suites, protocol experiments, the
//! disjointness reduction, and the quantum accounting demos from the shell.
//!
//! Every command is a pure function of its arguments: reports carry the
//! resolved configuration, contain no timestamps, and are byte-identical
//! across reruns and thread counts. Exit codes are a stable contract:
//! 0 = success, 1 = a certified property was violated, 2 = usage error
//! (unknown identifiers, malformed files, bad parameters).
//!
//! Set `QCOMM_THREADS` to cap the worker pool; results do not depend on it.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qcomm::commsim::{
    disj_eval, run_exhaustive, run_experiment, sk_eval, sk_to_disj, ExperimentParams,
    ExperimentReport, InstanceFile, ProtocolId,
};
use qcomm::qsim::{random_access_demo, send_bit_demo, superdense_demo};
use qcomm::suites::{run_suite, SuiteId, SuiteReport};

#[derive(Parser)]
#[command(
    name = "qcomm",
    version,
    about = "Certification suites and communication-protocol experiments",
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a certification suite and report per-inequality slack
    Verify(VerifyArgs),
    /// Run a protocol experiment (seeded sampling or exhaustive enumeration)
    Simulate(SimulateArgs),
    /// Reduce a pointer-chasing instance file to a set-disjointness instance
    Reduce(ReduceArgs),
    /// Run a quantum information-accounting demo
    Qdemo(QdemoArgs),
}

/// Report serialization format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Pretty-printed JSON with the resolved config embedded.
    Json,
    /// One CSV row per result line ('.' decimal, 12 significant digits).
    Csv,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name (kebab-case) or "all"
    #[arg(long)]
    suite: String,
    /// Trials per suite (default: each suite's own count)
    #[arg(long)]
    trials: Option<usize>,
    /// Base seed; every trial derives its own seed from it
    #[arg(long)]
    seed: u64,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Protocol name: sk-det, sk-wrong, pj-det, or pj-nw
    #[arg(long)]
    protocol: String,
    /// Instance width / vertices per side
    #[arg(long)]
    n: usize,
    /// Depth / round count
    #[arg(long)]
    k: usize,
    /// Error budget for the randomized protocol
    #[arg(long, default_value_t = 0.2)]
    eps: f64,
    /// Number of seeded random trials
    #[arg(long, conflicts_with = "exhaustive")]
    trials: Option<usize>,
    /// Base seed for instance generation and public coins
    #[arg(long, conflicts_with = "exhaustive")]
    seed: Option<u64>,
    /// Enumerate the entire instance space (deterministic protocols only)
    #[arg(long)]
    exhaustive: bool,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    /// Pointer-chasing instance file (JSON, type "sk")
    #[arg(long)]
    instance: PathBuf,
    /// Where to write the disjointness instance file (JSON, type "disj")
    #[arg(long)]
    out: PathBuf,
    /// Write the certificate to this file instead of stdout
    #[arg(long)]
    certificate: Option<PathBuf>,
}

/// The bundled quantum demos.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DemoId {
    /// One classical bit over one qubit, decoded exactly.
    SendBit,
    /// Two classical bits over one qubit plus shared entanglement.
    Superdense,
    /// n classical bits compressed into m qubits, decoded per index.
    RandomAccess,
}

#[derive(Args)]
struct QdemoArgs {
    /// Which demo to run
    #[arg(long, value_enum)]
    demo: DemoId,
    /// Input bits (random-access only, 2 or 3)
    #[arg(long)]
    n: Option<usize>,
    /// Qubits sent (random-access only)
    #[arg(long)]
    m: Option<usize>,
    /// Write the report to this file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

/// What a completed command tells the shell.
enum Outcome {
    /// Every checked property held.
    Clean,
    /// The run finished but a certified property was violated.
    Violation,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = init_threads().and_then(|()| match cli.command {
        Command::Verify(args) => cmd_verify(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Reduce(args) => cmd_reduce(&args),
        Command::Qdemo(args) => cmd_qdemo(&args),
    });
    match run {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Violation) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Apply the `QCOMM_THREADS` cap before any parallel work starts.
fn init_threads() -> Result<(), String> {
    match std::env::var("QCOMM_THREADS") {
        Err(_) => Ok(()),
        Ok(v) => {
            let n: usize =
                v.parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
                    format!("QCOMM_THREADS must be a positive integer, got {v:?}")
                })?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| format!("thread pool: {e}"))
        }
    }
}

/// Write `text` to `out`, or to stdout when no path was given.
fn emit(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("writing {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Floats in CSV output carry 12 significant digits, locale-independent.
fn csv_float(v: f64) -> String {
    format!("{v:.11e}")
}

fn cmd_verify(args: &VerifyArgs) -> Result<Outcome, String> {
    let ids: Vec<SuiteId> = if args.suite == "all" {
        SuiteId::all().to_vec()
    } else {
        vec![args.suite.parse().map_err(|e| format!("{e}"))?]
    };
    let mut reports: Vec<SuiteReport> = Vec::new();
    for id in ids {
        reports.extend(run_suite(id, args.trials, args.seed).map_err(|e| format!("{e}"))?);
    }
    let violated = reports.iter().any(|r| !r.passed());

    let text = match args.format {
        Format::Json => {
            let doc = serde_json::json!({
                "command": "verify",
                "suite": args.suite,
                "trials": args.trials,
                "seed": args.seed,
                "violations": reports.iter().map(|r| r.violations).sum::<usize>(),
                "reports": reports,
            });
            pretty(&doc)?
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "suite",
                "inequality",
                "trials",
                "tolerance",
                "violations",
                "max_violation",
                "worst_case_seed",
                "base_seed",
                "note",
            ])
            .map_err(|e| format!("csv: {e}"))?;
            for r in &reports {
                w.write_record([
                    r.suite.as_str(),
                    r.inequality.as_str(),
                    &r.trials.to_string(),
                    &csv_float(r.tolerance),
                    &r.violations.to_string(),
                    &csv_float(r.max_violation),
                    &r.worst_case_seed.to_string(),
                    &args.seed.to_string(),
                    r.note.as_deref().unwrap_or(""),
                ])
                .map_err(|e| format!("csv: {e}"))?;
            }
            String::from_utf8(w.into_inner().map_err(|e| format!("csv: {e}"))?)
                .map_err(|e| format!("csv: {e}"))?
        }
    };
    emit(args.out.as_deref(), &text)?;
    if violated {
        for r in reports.iter().filter(|r| !r.passed()) {
            eprintln!(
                "violation: {}/{} exceeded tolerance {:.1e} (max {:.3e}, worst seed {})",
                r.suite, r.inequality, r.tolerance, r.max_violation, r.worst_case_seed
            );
        }
        return Ok(Outcome::Violation);
    }
    Ok(Outcome::Clean)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<Outcome, String> {
    let protocol: ProtocolId = args.protocol.parse().map_err(|e| format!("{e}"))?;
    let report: ExperimentReport = if args.exhaustive {
        run_exhaustive(protocol, args.n, args.k).map_err(|e| format!("{e}"))?
    } else {
        let (trials, seed) = match (args.trials, args.seed) {
            (Some(t), Some(s)) => (t, s),
            _ => {
                return Err(
                    "randomized sampling needs both --trials and --seed (or pass --exhaustive)"
                        .into(),
                )
            }
        };
        // Deterministic protocols ignore ε; pin it to 0 in the embedded
        // config (matching exhaustive mode) so reports never echo an unused
        // default.
        let eps = if protocol == ProtocolId::PjNw { args.eps } else { 0.0 };
        run_experiment(&ExperimentParams { protocol, n: args.n, k: args.k, eps, trials, seed })
            .map_err(|e| format!("{e}"))?
    };
    if report.degenerate {
        eprintln!(
            "note: the sample covers every vertex at these parameters (⌈δn⌉ ≥ n); \
             runs are exact but the asymptotic regime does not apply"
        );
    }

    let text = match args.format {
        Format::Json => {
            let doc = serde_json::json!({
                "command": "simulate",
                "exhaustive": args.exhaustive,
                "report": report,
            });
            pretty(&doc)?
        }
        Format::Csv => {
            let mut s = String::new();
            let _ = writeln!(s, "{}", ExperimentReport::csv_header());
            let _ = writeln!(s, "{}", report.csv_row());
            s
        }
    };
    emit(args.out.as_deref(), &text)?;

    // Deterministic protocols are proven exact; the randomized one may only
    // err by aborting (every abort outputs 0 and counts as an error when the
    // truth is 1, so its error rate is bounded by its abort rate).
    let violated = match protocol {
        ProtocolId::PjNw => report.error_rate > report.abort_rate,
        _ => report.error_rate > 0.0,
    };
    if violated {
        eprintln!(
            "violation: {} error rate {} with abort rate {}",
            protocol, report.error_rate, report.abort_rate
        );
        return Ok(Outcome::Violation);
    }
    Ok(Outcome::Clean)
}

fn cmd_reduce(args: &ReduceArgs) -> Result<Outcome, String> {
    let text = fs::read_to_string(&args.instance)
        .map_err(|e| format!("reading {}: {e}", args.instance.display()))?;
    let file = InstanceFile::from_json(&text).map_err(|e| format!("{e}"))?;
    let (n, k, root) = match file {
        InstanceFile::Sk { n, k, root } => (n, k, root),
        other => {
            return Err(format!(
                "reduce expects a pointer-chasing instance (type \"sk\"), got type {:?}",
                match other {
                    InstanceFile::Pj { .. } => "pj",
                    _ => "disj",
                }
            ))
        }
    };

    let disj = sk_to_disj(&root).map_err(|e| format!("{e}"))?;
    let sk_value = sk_eval(&root).map_err(|e| format!("{e}"))?;
    let disj_value = disj_eval(&disj);
    let intersection_size = disj.intersection().len();

    let out_file = InstanceFile::Disj {
        universe: disj.universe(),
        set_a: disj.set_a().to_vec(),
        set_b: disj.set_b().to_vec(),
    };
    emit(Some(&args.out), &format!("{}\n", out_file.to_json()))?;

    // The reduction maps a true instance to a single shared path and a false
    // one to disjoint sets, so these must line up; odd depths go through the
    // padded construction (a forced top-level pointer), which is worth
    // flagging to the reader of the certificate.
    let consistent = disj_value == sk_value && intersection_size <= 1;
    let doc = serde_json::json!({
        "command": "reduce",
        "instance": args.instance.display().to_string(),
        "n": n,
        "k": k,
        "odd_k_padded": k % 2 == 1,
        "universe": disj.universe(),
        "sk_value": sk_value,
        "disj_value": disj_value,
        "intersection_size": intersection_size,
        "consistent": consistent,
    });
    emit(args.certificate.as_deref(), &pretty(&doc)?)?;

    if consistent {
        Ok(Outcome::Clean)
    } else {
        eprintln!(
            "violation: reduction inconsistent (sk={sk_value}, disj={disj_value}, \
             intersection {intersection_size})"
        );
        Ok(Outcome::Violation)
    }
}

fn cmd_qdemo(args: &QdemoArgs) -> Result<Outcome, String> {
    if args.demo != DemoId::RandomAccess && (args.n.is_some() || args.m.is_some()) {
        return Err("--n/--m only apply to --demo random-access".into());
    }
    let (report, ok, params) = match args.demo {
        DemoId::SendBit => {
            let r = send_bit_demo().map_err(|e| format!("{e}"))?;
            let ok = r.ledger_holds && r.decodes_basis_inputs;
            (serde_json::to_value(&r).map_err(|e| format!("{e}"))?, ok, serde_json::Value::Null)
        }
        DemoId::Superdense => {
            let r = superdense_demo().map_err(|e| format!("{e}"))?;
            let ok = r.ledger_holds && r.decodes_all_inputs && r.saturates;
            (serde_json::to_value(&r).map_err(|e| format!("{e}"))?, ok, serde_json::Value::Null)
        }
        DemoId::RandomAccess => {
            let (n, m) = match (args.n, args.m) {
                (Some(n), Some(m)) => (n, m),
                _ => return Err("random-access needs --n and --m".into()),
            };
            let r = random_access_demo(n, m).map_err(|e| format!("{e}"))?;
            let ok = r.ledger_holds && r.bound_holds;
            (
                serde_json::to_value(&r).map_err(|e| format!("{e}"))?,
                ok,
                serde_json::json!({"n": n, "m": m}),
            )
        }
    };

    let demo_name = match args.demo {
        DemoId::SendBit => "send-bit",
        DemoId::Superdense => "superdense",
        DemoId::RandomAccess => "random-access",
    };
    let doc = serde_json::json!({
        "command": "qdemo",
        "demo": demo_name,
        "params": params,
        "report": report,
    });
    emit(args.out.as_deref(), &pretty(&doc)?)?;

    if ok {
        Ok(Outcome::Clean)
    } else {
        eprintln!("violation: demo {demo_name} failed an accounting check (see report)");
        Ok(Outcome::Violation)
    }
}

/// Stable pretty JSON with a trailing newline.
fn pretty(doc: &serde_json::Value) -> Result<String, String> {
    serde_json::to_string_pretty(doc)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| format!("serializing report: {e}"))
}

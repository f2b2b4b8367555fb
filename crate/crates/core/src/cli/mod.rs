//! Command-line front end. `main` parses arguments, runs one command and
//! maps failures onto exit codes.

pub mod tables;

use std::io::Write;
use std::cmp::Ordering;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use thiserror::Error;

use crate::classical::{self, ClassicalError, Encoding};
use crate::io::{float, IoError, StrategyFile};
use crate::quantum::{self, QuantumError};
use crate::seesaw::{self, SeesawConfig, SeesawError};
use crate::zmod::{self, ZmodError};
use crate::Task;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VERIFY: u8 = 2;
pub const EXIT_NONCONVERGED: u8 = 3;

/// Margin subtracted from observed values before they are compared with a
/// bound, so that strategies sitting exactly on it certify nothing.
pub const VERDICT_SLACK: f64 = 1e-9;

/// Parity deviation accepted as parity-oblivious when verifying a file.
pub const PARITY_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Zmod(#[from] ZmodError),
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
    #[error(transparent)]
    Seesaw(#[from] SeesawError),
    #[error(transparent)]
    File(#[from] IoError),
    #[error("{0}")]
    Usage(String),
    #[error("no restart converged within the iteration limit")]
    NotConverged,
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::File(_) => EXIT_VERIFY,
            CliError::NotConverged => EXIT_NONCONVERGED,
            _ => EXIT_USAGE,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "porec", version, about = "Parity-oblivious random exclusion and retrieval codes")]
pub struct Cli {
    /// Print a single JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for see-saw restarts.
    #[arg(long, global = true, env = "POREC_JOBS")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Exclusion,
    Retrieval,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Task {
        match t {
            TaskArg::Exclusion => Task::Exclusion,
            TaskArg::Retrieval => Task::Retrieval,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableArg {
    #[value(name = "I", alias = "i", alias = "1")]
    One,
    #[value(name = "II", alias = "ii", alias = "2")]
    Two,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConstructionArg {
    /// Optimal qubit exclusion strategy at (2, 3).
    QubitOptimum,
    /// Same states, measurements aligned for retrieval.
    QubitRetrieval,
    /// Qubit strategy for general prime m.
    Projective,
}

#[derive(Args, Debug)]
pub struct SizeArgs {
    #[arg(short = 'n', default_value_t = 2)]
    pub n: usize,
    #[arg(short = 'm')]
    pub m: u32,
    #[arg(long, value_enum, default_value_t = TaskArg::Exclusion)]
    pub task: TaskArg,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Closed-form bounds, gaps and the gap ratio.
    Bounds(SizeArgs),
    /// Exact LP optimum over parity-oblivious classical strategies.
    Oracle {
        #[command(flatten)]
        size: SizeArgs,
        /// Message alphabet size (defaults to m).
        #[arg(short = 'K')]
        k: Option<usize>,
        /// Write the optimal strategy to this file.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// See-saw optimisation of the quantum value.
    Seesaw {
        #[arg(short = 'n', default_value_t = 2)]
        n: usize,
        #[arg(short = 'm')]
        m: u32,
        #[arg(short = 'd')]
        d: usize,
        #[arg(long, value_enum, default_value_t = TaskArg::Exclusion)]
        task: TaskArg,
        /// Drop the parity-obliviousness constraint.
        #[arg(long)]
        unconstrained: bool,
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Write the best strategy to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write per-restart traces as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check a strategy file and report its value and certificates.
    Verify { file: PathBuf },
    /// Reproduce the comparison table (I) or the dimension table (II).
    Tables {
        #[arg(value_enum)]
        which: TableArg,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        restarts: usize,
        /// Closed-form cells only; no optimisation.
        #[arg(long)]
        formula_only: bool,
        /// Also write the table as CSV ("-" for stdout).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Value of a quantum strategy under white noise, or its critical weight.
    Noise {
        file: PathBuf,
        #[arg(long, conflicts_with = "threshold", required_unless_present = "threshold")]
        omega: Option<f64>,
        #[arg(long)]
        threshold: bool,
    },
    /// Write one of the analytic qubit strategies to a file.
    Construct {
        #[arg(value_enum)]
        which: ConstructionArg,
        #[arg(short = 'm', default_value_t = 3)]
        m: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Output of a command: a JSON document and its human-readable rendering.
pub struct Report {
    pub json: Value,
    pub text: String,
}

fn exact_json(q: &num_rational::BigRational) -> Value {
    json!({ "exact": q.to_string(), "value": float(q.to_f64().unwrap_or(f64::NAN)) })
}

fn cmd_bounds(size: &SizeArgs) -> Result<Report, CliError> {
    let task = Task::from(size.task);
    let nc = classical::noncontextual_bound(size.n, size.m, task)?;
    let nc_f = nc.to_f64().unwrap_or(f64::NAN);
    let mut json = json!({
        "n": size.n,
        "m": size.m,
        "task": task.name(),
        "noncontextual": exact_json(&nc),
        "provenance": "formula",
    });
    let mut text = format!("noncontextual bound ({task}, n={}, m={}): {nc} = {nc_f:.10}\n", size.n, size.m);
    if size.n == 2 && size.m >= 3 && task == Task::Exclusion {
        let qp = quantum::projective_qubit_bound(size.m)?;
        let dp = quantum::delta_porec(size.m)?;
        let dr = quantum::delta_rec(size.m)?;
        let ratio = quantum::gap_ratio(size.m)?;
        json["qubit_projective"] = float(qp);
        json["delta_porec"] = json!({ "exact": dp.to_string(), "value": float(dp.to_f64()) });
        json["delta_rec"] = json!({ "exact": dr.to_string(), "value": float(dr.to_f64()) });
        json["gap_ratio"] = json!({ "exact": ratio.to_string(), "value": float(ratio.to_f64()) });
        text.push_str(&format!(
            "qubit projective value: {qp:.10}\n\
             gap over noncontextual: {:.6} ({dp})\n\
             unconstrained gap:      {:.6} ({dr})\n\
             gap ratio:              {ratio}\n",
            dp.to_f64(),
            dr.to_f64()
        ));
    }
    Ok(Report { json, text })
}

fn cmd_oracle(size: &SizeArgs, k: Option<usize>, certificate: Option<&PathBuf>) -> Result<Report, CliError> {
    let task = Task::from(size.task);
    let k = k.unwrap_or(size.m as usize);
    let report = classical::classical_bound_oracle(size.n, size.m, k, task)?;
    let formula = classical::noncontextual_bound(size.n, size.m, task)?;
    let value = report.value_f64();
    if let (Some(path), Some(cert)) = (certificate, &report.certificate) {
        StrategyFile::Classical {
            task,
            strategy: cert.clone(),
        }
        .write(path)?;
    }
    let json = json!({
        "n": size.n,
        "m": size.m,
        "alphabet": k,
        "task": task.name(),
        "value": exact_json(&report.value),
        "method": report.method.tag(),
        "decoders_solved": report.decoders_solved,
        "matches_formula": report.value == formula,
    });
    let text = format!(
        "{}\n{}\nmethod: {}, decoders solved: {}, formula {}: {}\n",
        report.value,
        value,
        report.method.tag(),
        report.decoders_solved,
        formula,
        if report.value == formula { "matches" } else { "DIFFERS" }
    );
    Ok(Report { json, text })
}

#[allow(clippy::too_many_arguments)]
fn cmd_seesaw(
    n: usize,
    m: u32,
    d: usize,
    task: TaskArg,
    unconstrained: bool,
    restarts: usize,
    seed: u64,
    max_iters: usize,
    tol: f64,
    jobs: Option<usize>,
    out: Option<&PathBuf>,
    trace: Option<&PathBuf>,
) -> Result<Report, CliError> {
    let mut cfg = SeesawConfig::new(m, d);
    cfg.n = n;
    cfg.task = task.into();
    cfg.parity_constrained = !unconstrained;
    cfg.restarts = restarts;
    cfg.rng_seed = seed;
    cfg.max_iters = max_iters;
    cfg.convergence_tol = tol;
    cfg.jobs = jobs;
    let result = seesaw::run_seesaw(&cfg)?;
    if let Some(path) = out {
        StrategyFile::Quantum {
            task: cfg.task,
            states: result.states.clone(),
            measurements: result.measurements.clone(),
        }
        .write(path)?;
    }
    if let Some(path) = trace {
        let file = std::fs::File::create(path)?;
        result.write_trace_csv(std::io::BufWriter::new(file))?;
    }
    if result.converged_restarts() == 0 {
        return Err(CliError::NotConverged);
    }
    let json = json!({
        "n": n,
        "m": m,
        "d": d,
        "task": cfg.task.name(),
        "parity_constrained": cfg.parity_constrained,
        "restarts": restarts,
        "seed": seed,
        "best_value": float(result.best_value),
        "best_restart": result.best_restart,
        "converged_restarts": result.converged_restarts(),
        "parity_deviation": float(result.parity_deviation),
        "provenance": format!("seesaw(seed={seed},restarts={restarts})"),
    });
    let text = format!(
        "best value {:.10} (restart {}, {}/{} restarts converged, parity deviation {:.2e})\n",
        result.best_value,
        result.best_restart,
        result.converged_restarts(),
        restarts,
        result.parity_deviation
    );
    Ok(Report { json, text })
}

/// Verdict on what an observed value certifies.
pub fn verdict(task: Task, n: usize, m: u32, value: f64, parity_oblivious: bool, quantum: bool) -> Result<&'static str, CliError> {
    if !parity_oblivious {
        return Ok("not parity-oblivious, no certificate");
    }
    let bound = classical::noncontextual_bound(n, m, task)?
        .to_f64()
        .unwrap_or(f64::NAN);
    let margin = value - VERDICT_SLACK;
    // NaN on either side gives no certificate.
    if margin.partial_cmp(&bound) != Some(Ordering::Greater) {
        return Ok("no certificate");
    }
    if quantum && task == Task::Exclusion && n == 2 && m == 3 {
        return Ok(match quantum::dimension_witness(margin) {
            3 => "contextual, d>=3 certified",
            _ => "contextual, d=2 sufficient",
        });
    }
    Ok("contextual")
}

fn cmd_verify(path: &Path) -> Result<Report, CliError> {
    let file = StrategyFile::read(path)?;
    let space = file.space();
    let task = file.task();
    match &file {
        StrategyFile::Classical { strategy, .. } => {
            let deviation = classical::check_parity_oblivious_classical(strategy)?;
            let value = classical::evaluate_classical(strategy, task);
            let exact = classical::evaluate_classical_exact(strategy, task);
            let ok = match strategy.encoding() {
                Encoding::Exact(_) => deviation == 0.0,
                Encoding::Float(_) => deviation <= PARITY_TOL,
            };
            let verdict = verdict(task, space.n(), space.m(), value, ok, false)?;
            let json = json!({
                "kind": "classical",
                "valid": true,
                "task": task.name(),
                "parity_deviation": float(deviation),
                "value": float(value),
                "value_exact": exact.as_ref().map(|q| q.to_string()),
                "verdict": verdict,
            });
            let text = format!(
                "valid classical strategy (n={}, m={}, K={})\nclass-sum deviation: {deviation:.3e}\nvalue ({task}): {value:.10}{}\nverdict: {verdict}\n",
                space.n(),
                space.m(),
                strategy.alphabet(),
                exact.map(|q| format!(" = {q}")).unwrap_or_default()
            );
            Ok(Report { json, text })
        }
        StrategyFile::Quantum {
            states,
            measurements,
            ..
        } => {
            let deviation = quantum::parity_deviation(states)?;
            let value = quantum::success_probability(states, measurements, task)?;
            let mut witnesses = Vec::new();
            let mut text_w = String::new();
            for mask in zmod::enumerate_parity_masks(space.n(), space.m(), true)? {
                for k in 0..space.m() {
                    for k2 in k + 1..space.m() {
                        let w = quantum::distinguishability_witness(states, &mask, k, k2)?;
                        witnesses.push(json!({
                            "mask": mask.components(),
                            "classes": [k, k2],
                            "guess_probability": float(w),
                        }));
                        text_w.push_str(&format!("  mask {mask} classes ({k},{k2}): {w:.10}\n"));
                    }
                }
            }
            let ok = deviation <= PARITY_TOL;
            let verdict = verdict(task, space.n(), space.m(), value, ok, true)?;
            let json = json!({
                "kind": "quantum",
                "valid": true,
                "task": task.name(),
                "d": states.dim(),
                "parity_deviation": float(deviation),
                "witnesses": witnesses,
                "value": float(value),
                "verdict": verdict,
            });
            let text = format!(
                "valid quantum strategy (n={}, m={}, d={})\nparity deviation: {deviation:.3e}\nclass-pair guessing probabilities:\n{text_w}value ({task}): {value:.10}\nverdict: {verdict}\n",
                space.n(),
                space.m(),
                states.dim()
            );
            Ok(Report { json, text })
        }
    }
}

fn write_csv(path: &PathBuf, csv: &str, stdout_extra: &mut String) -> Result<(), CliError> {
    if path.as_os_str() == "-" {
        stdout_extra.push_str(csv);
    } else {
        std::fs::write(path, csv)?;
    }
    Ok(())
}

fn cmd_tables(
    which: TableArg,
    seed: u64,
    restarts: usize,
    formula_only: bool,
    csv: Option<&PathBuf>,
    jobs: Option<usize>,
) -> Result<Report, CliError> {
    let settings = tables::SeesawSettings {
        restarts,
        seed,
        jobs,
    };
    let settings = (!formula_only).then_some(&settings);
    let (json, mut text, csv_text) = match which {
        TableArg::One => {
            let rows = tables::comparison_table(settings)?;
            (
                json!({ "table": "I", "rows": tables::comparison_json(&rows) }),
                tables::comparison_text(&rows),
                tables::comparison_csv(&rows),
            )
        }
        TableArg::Two => {
            let rows = tables::dimension_table(settings)?;
            (
                json!({ "table": "II", "rows": tables::dimension_json(&rows) }),
                tables::dimension_text(&rows),
                tables::dimension_csv(&rows),
            )
        }
    };
    if let Some(path) = csv {
        write_csv(path, &csv_text, &mut text)?;
    }
    Ok(Report { json, text })
}

fn cmd_noise(path: &Path, omega: Option<f64>, threshold: bool) -> Result<Report, CliError> {
    let file = StrategyFile::read(path)?;
    let StrategyFile::Quantum {
        task,
        states,
        measurements,
    } = &file
    else {
        return Err(CliError::Usage("noise needs a quantum strategy file".into()));
    };
    let space = states.space();
    if threshold {
        if *task != Task::Exclusion {
            return Err(CliError::Usage("the noise threshold is defined for exclusion".into()));
        }
        let value = quantum::success_probability(states, measurements, *task)?;
        let w = quantum::noise_threshold(value, space.n(), space.m())?;
        return Ok(Report {
            json: json!({ "value": float(value), "threshold": float(w) }),
            text: format!("critical noise weight: {w:.6}\n"),
        });
    }
    let omega = omega.ok_or_else(|| CliError::Usage("pass --omega or --threshold".into()))?;
    let noisy = quantum::depolarize(states, omega)?;
    let value = quantum::success_probability(&noisy, measurements, *task)?;
    Ok(Report {
        json: json!({ "omega": float(omega), "value": float(value) }),
        text: format!("value at noise weight {omega}: {value:.10}\n"),
    })
}

fn cmd_construct(which: ConstructionArg, m: u32, out: &Path) -> Result<Report, CliError> {
    let (task, (states, measurements)) = match which {
        ConstructionArg::QubitOptimum => (Task::Exclusion, quantum::optimal_qubit_construction()),
        ConstructionArg::QubitRetrieval => {
            (Task::Retrieval, quantum::optimal_qubit_retrieval_construction())
        }
        ConstructionArg::Projective => (Task::Exclusion, quantum::projective_qubit_construction(m)?),
    };
    let value = quantum::success_probability(&states, &measurements, task)?;
    StrategyFile::Quantum {
        task,
        states,
        measurements,
    }
    .write(out)?;
    Ok(Report {
        json: json!({ "file": out.display().to_string(), "value": float(value) }),
        text: format!("wrote {} (value {value:.10})\n", out.display()),
    })
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Bounds(size) => cmd_bounds(size),
        Command::Oracle {
            size,
            k,
            certificate,
        } => cmd_oracle(size, *k, certificate.as_ref()),
        Command::Seesaw {
            n,
            m,
            d,
            task,
            unconstrained,
            restarts,
            seed,
            max_iters,
            tol,
            out,
            trace,
        } => cmd_seesaw(
            *n,
            *m,
            *d,
            *task,
            *unconstrained,
            *restarts,
            *seed,
            *max_iters,
            *tol,
            cli.jobs,
            out.as_ref(),
            trace.as_ref(),
        ),
        Command::Verify { file } => cmd_verify(file),
        Command::Tables {
            which,
            seed,
            restarts,
            formula_only,
            csv,
        } => cmd_tables(*which, *seed, *restarts, *formula_only, csv.as_ref(), cli.jobs),
        Command::Noise {
            file,
            omega,
            threshold,
        } => cmd_noise(file, *omega, *threshold),
        Command::Construct { which, m, out } => cmd_construct(*which, *m, out),
    }
}

/// Entry point used by the binary.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::from(EXIT_OK)
            };
        }
    };
    let mut stdout = std::io::stdout().lock();
    match run(&cli) {
        Ok(report) => {
            let body = if cli.json {
                format!("{}\n", serde_json::to_string_pretty(&report.json).expect("serialisable"))
            } else {
                report.text
            };
            if stdout.write_all(body.as_bytes()).is_err() {
                return ExitCode::from(EXIT_USAGE);
            }
            ExitCode::from(EXIT_OK)
        }
        Err(e) => {
            if cli.json {
                let doc = json!({ "error": e.to_string(), "exit_code": e.exit_code() });
                let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&doc).expect("serialisable"));
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

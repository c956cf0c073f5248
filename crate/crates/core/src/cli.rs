//! Command-line driver.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or invalid input,
//! 3 I/O failure, 4 numerical failure (the error name goes to stderr).

use std::ffi::OsString;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::filters::apply_spatial;
use crate::filters::{presets, FilterFile, FilterSpec, SpectralContext};
use crate::graph::{build_shift, gen_geometric_graph, PerturbationMode, ShiftKind};
use crate::io;
use crate::linalg::{spectral_norm_symmetric, to_cx, Cx};
use crate::stability::{
    loglog_slope, magnitude_summary, run_verify, stability_sweep, SignalSource, SweepConfig,
    VerifyConfig, DEFAULT_RANDOM_SIGNALS,
};

pub const DEFAULT_KERNEL_WIDTH: f64 = 0.25;

#[derive(Debug, Parser)]
#[command(
    name = "specfilter",
    version,
    about = "Spectral graph filters and their stability under perturbation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Spatial,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Random geometric graph with Gaussian-kernel weights, as JSON.
    GraphGen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_KERNEL_WIDTH)]
        kernel_width: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Filter every row of a signal CSV.
    FilterApply {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        filter: PathBuf,
        #[arg(long)]
        signals: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        #[arg(long, value_enum, default_value_t = ShiftKind::Unnormalized)]
        kind: ShiftKind,
    },
    /// Perturbation sweep: CSV of trials plus a `<out>.meta.json` sidecar.
    StabilitySweep {
        #[arg(long)]
        graph: PathBuf,
        /// Filter JSON path, or `preset:lowpass-poly3`, `preset:cayley3`,
        /// `preset:arma3-allpass`.
        #[arg(long)]
        filter: String,
        #[arg(long, value_delimiter = ',', default_value = "1e-4,1e-3,1e-2")]
        magnitudes: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = PerturbationMode::DenseGaussian)]
        mode: PerturbationMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        signals: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = ShiftKind::Unnormalized)]
        kind: ShiftKind,
        /// Fail when a structured perturbation misses its target norm by
        /// more than 10%.
        #[arg(long)]
        strict: bool,
        /// Worker threads; 0 uses every core. Output does not depend on it.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Randomized checks of every inequality behind the bound.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        instances: usize,
        /// JSON report path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Flip one inequality; the run must then fail.
        #[arg(long)]
        self_test_negative: bool,
    },
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 3,
        Error::InvalidArgument(_)
        | Error::MalformedRow { .. }
        | Error::DuplicateEdge(..)
        | Error::AsymmetricInput(_)
        | Error::DimensionMismatch { .. }
        | Error::Json(_)
        | Error::MissingWeights(_)
        | Error::NoScalarResponse
        | Error::NoSpatialForm
        | Error::WrongVariant { .. } => 2,
        _ => 4,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn run(command: Command) -> Result<u8> {
    match command {
        Command::GraphGen {
            n,
            seed,
            kernel_width,
            out,
        } => {
            let g = gen_geometric_graph(n, seed, kernel_width)?;
            io::write_graph(&out, &g)?;
            println!(
                "wrote graph with {n} vertices and {} edges to {}",
                g.edges().len(),
                out.display()
            );
            Ok(0)
        }
        Command::FilterApply {
            graph,
            filter,
            signals,
            out,
            method,
            kind,
        } => {
            let g = io::load_graph(&graph)?;
            let s = build_shift(&g, kind)?;
            let spec = io::load_filter(&filter)?;
            let rows = io::load_signals(&signals, Some(g.n()))?;
            let inputs: Vec<Vec<Cx>> = rows.iter().map(|r| to_cx(r)).collect();
            let outputs = match method {
                Method::Exact => {
                    let ctx = SpectralContext::new(&s)?;
                    let coef = ctx.coefficients(&spec)?;
                    inputs
                        .iter()
                        .map(|f| ctx.apply_coefficients(&coef, f))
                        .collect::<Result<Vec<_>>>()?
                }
                Method::Spatial => inputs
                    .iter()
                    .map(|f| apply_spatial(&spec, &s, f))
                    .collect::<Result<Vec<_>>>()?,
            };
            io::write_signals(&out, &outputs, !spec.is_real_valued())?;
            println!("filtered {} signals into {}", outputs.len(), out.display());
            Ok(0)
        }
        Command::StabilitySweep {
            graph,
            filter,
            magnitudes,
            trials,
            mode,
            seed,
            signals,
            out,
            kind,
            strict,
            threads,
        } => sweep(SweepArgs {
            graph,
            filter,
            magnitudes,
            trials,
            mode,
            seed,
            signals,
            out,
            kind,
            strict,
            threads,
        }),
        Command::Verify {
            seed,
            instances,
            out,
            self_test_negative,
        } => {
            let report = run_verify(&VerifyConfig {
                seed,
                instances,
                negative_self_test: self_test_negative,
            })?;
            println!("{report}");
            if let Some(path) = out {
                fs::write(&path, serde_json::to_string_pretty(&report)? + "\n")?;
            }
            Ok(if report.passed { 0 } else { 1 })
        }
    }
}

struct SweepArgs {
    graph: PathBuf,
    filter: String,
    magnitudes: Vec<f64>,
    trials: usize,
    mode: PerturbationMode,
    seed: u64,
    signals: Option<PathBuf>,
    out: PathBuf,
    kind: ShiftKind,
    strict: bool,
    threads: usize,
}

#[derive(Serialize)]
struct FilterMeta {
    source: String,
    reconstructed: bool,
    description: Option<&'static str>,
    spec: FilterFile,
}

/// Resolves `preset:<name>` against the operator's spectrum, or loads a file.
fn resolve_filter(arg: &str, lambda_max: f64, norm_shift: f64) -> Result<FilterMeta> {
    let Some(name) = arg.strip_prefix("preset:") else {
        let spec = io::load_filter(Path::new(arg))?;
        return Ok(FilterMeta {
            source: arg.to_string(),
            reconstructed: false,
            description: None,
            spec: FilterFile::from(&spec),
        });
    };
    let (spec, description) = match name {
        "lowpass-poly3" => (
            presets::lowpass_polynomial(3, (0.0, lambda_max.max(f64::MIN_POSITIVE)))?,
            "cubic least-squares fit to exp(-2 lambda / lambda_max) on [0, lambda_max]",
        ),
        "cayley3" => (
            presets::lowpass_cayley(3)?,
            "Re sum_l (-1)^l (4 - l) / 10 C(lambda)^l, l = 0..3: value 1 at lambda = 0",
        ),
        "arma3-allpass" => (
            presets::allpass_rational(3, norm_shift.max(f64::MIN_POSITIVE))?,
            "(1 - i lambda / rho)^3 / (1 + i lambda / rho)^3 with rho = ||Delta||: |g| = 1 on the real line",
        ),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown preset {other:?}; expected lowpass-poly3, cayley3 or arma3-allpass"
            )))
        }
    };
    Ok(FilterMeta {
        source: arg.to_string(),
        reconstructed: true,
        description: Some(description),
        spec: FilterFile::from(&spec),
    })
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn sweep(a: SweepArgs) -> Result<u8> {
    let g = io::load_graph(&a.graph)?;
    let s = build_shift(&g, a.kind)?;
    let norm_shift = spectral_norm_symmetric(s.matrix());
    let lambda = SpectralContext::new(&s)?.eigenvalues().to_vec();
    let filter = resolve_filter(&a.filter, lambda[lambda.len() - 1], norm_shift)?;
    let spec: FilterSpec = filter.spec.clone().into_spec()?;

    let (signals, signal_meta) = match &a.signals {
        Some(path) => {
            let rows = io::load_signals(path, Some(g.n()))?;
            if rows.is_empty() {
                eprintln!(
                    "warning: {} holds no signals; using {DEFAULT_RANDOM_SIGNALS} random signals",
                    path.display()
                );
                (
                    SignalSource::Random(DEFAULT_RANDOM_SIGNALS),
                    json!({"source": "random", "count": DEFAULT_RANDOM_SIGNALS, "fallback_from": path}),
                )
            } else {
                let count = rows.len();
                (
                    SignalSource::Provided(rows.iter().map(|r| to_cx(r)).collect()),
                    json!({"source": "file", "path": path, "count": count}),
                )
            }
        }
        None => (
            SignalSource::Random(DEFAULT_RANDOM_SIGNALS),
            json!({"source": "random", "count": DEFAULT_RANDOM_SIGNALS}),
        ),
    };
    let cfg = SweepConfig {
        magnitudes: a.magnitudes.clone(),
        trials: a.trials,
        mode: a.mode,
        base_seed: a.seed,
        signals,
        strict: a.strict,
        threads: a.threads,
    };
    let (records, seminorm) = stability_sweep(&s, &spec, &cfg)?;

    let file = fs::File::create(&a.out)?;
    let mut w = BufWriter::new(file);
    io::write_sweep_csv(&mut w, &records)?;
    std::io::Write::flush(&mut w)?;

    let summary = magnitude_summary(&records);
    let xs: Vec<f64> = summary.iter().map(|m| m.mean_norm_e).collect();
    let ys: Vec<f64> = summary.iter().map(|m| m.mean_op_err).collect();
    let slope = loglog_slope(&xs, &ys);
    let violations: usize = summary.iter().map(|m| m.violations).sum();
    let meta = json!({
        "command": "stability-sweep",
        "graph": a.graph,
        "n": g.n(),
        "kind": a.kind.as_str(),
        "mode": a.mode.as_str(),
        "strict": a.strict,
        "magnitudes": a.magnitudes,
        "trials": a.trials,
        "base_seed": a.seed,
        "trial_seed_rule": "derive_seed(base_seed, [magnitude_index, trial_index])",
        "signals": signal_meta,
        "filter": filter,
        "seminorm": seminorm,
        "norm_shift": norm_shift,
        "spectrum": [lambda[0], lambda[lambda.len() - 1]],
        "conventions": {
            "operator_norm": "spectral norm (largest singular value)",
            "norm_E": "spectral norm of Delta' - Delta",
            "rel_norm_E": "norm_E / ||Delta||",
            "op_err": "||g(Delta) - g(Delta')||",
            "bound": "seminorm * ((||Delta|| + 1) norm_E / (1 - norm_E) + norm_E)",
            "rel_signal_err": "||g(Delta) f - g(Delta') f||_2 / ||g(Delta) f||_2, 0 when both vanish",
            "float_format": "17 significant digits",
        },
        "summary": summary,
        "loglog_slope": slope,
        "violations": violations,
    });
    fs::write(
        sidecar_path(&a.out),
        serde_json::to_string_pretty(&meta)? + "\n",
    )?;

    for m in &summary {
        println!(
            "magnitude {:.1e}: mean ||E|| {:.3e}, mean op_err {:.3e}, mean rel signal err {:.3e}, {} violations",
            m.magnitude_target, m.mean_norm_e, m.mean_op_err, m.mean_rel_signal_err, m.violations
        );
    }
    if let Some(slope) = slope {
        println!("log-log slope of mean op_err against mean ||E||: {slope:.4}");
    }
    println!("wrote {} records to {}", records.len(), a.out.display());
    Ok(0)
}

//! `peakfn`: construct and verify peak functions from the command line.
//!
//! Exit codes: 0 pass, 1 verification failure, 2 input error, 3 numerical
//! nonconvergence.

mod commands;
mod inputs;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use peakfn_core::numerics::par::Exec;
use peakfn_core::numerics::ToleranceProfile;
use peakfn_core::verify::{SampleValue, VerifyConfig};
use peakfn_core::Error;
use serde_json::{json, Value};

use commands::{Ctx, Outcome};
use inputs::Inputs;

#[derive(Debug, Parser)]
#[command(name = "peakfn", version, about = "Peak functions, Shilov boundaries and proper holomorphic maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads: 1 runs sequentially, 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write sampled |f| values as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Interior samples (per region for `extension-probe`).
    #[arg(long, global = true, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 1_000)]
    boundary_samples: usize,
    /// Radius of the neighbourhood excluded from the margin.
    #[arg(long, global = true, default_value_t = 0.1)]
    radius: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Interior / boundary / exterior membership of a point.
    Classify {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Build a peak function at a boundary point and verify it.
    Peak {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Peak-point classification on a pseudoconvex Reinhardt domain.
    ReinhardtClassify {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Laurent monomials concentrating at a point of a Reinhardt domain.
    Laurent {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// A single value, a list `1,2,4` or a range `1..8`.
        #[arg(long, default_value = "1")]
        mu: String,
        #[arg(long, default_value_t = 3.0)]
        n_depth: f64,
        #[arg(long, default_value_t = 0.3)]
        u_radius: f64,
    },
    /// Push a peak function forward through a proper map.
    Transfer {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        source_peak: PathBuf,
        /// Target domain; defaults to the symmetrized polydisc for symmetrization maps.
        #[arg(long)]
        domain: Option<PathBuf>,
        /// Also verify the source peak on this domain.
        #[arg(long)]
        source_domain: Option<PathBuf>,
    },
    /// Pull a peak function back to one point of a fiber.
    Pullback {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        target_peak: PathBuf,
        #[arg(long)]
        fiber_index: usize,
        /// Source domain.
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, default_value_t = 8)]
        terms: usize,
        #[arg(long, default_value_t = 0.2)]
        r0: f64,
    },
    /// Carathéodory lower bounds along a sequence of target points.
    CfcProbe {
        #[arg(long)]
        map: PathBuf,
        /// JSON array of points.
        #[arg(long)]
        sequence: PathBuf,
        /// Base point; defaults to the image of the origin.
        #[arg(long, allow_hyphen_values = true)]
        base: Option<String>,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// Logarithmically convex hull of a Reinhardt domain.
    Envelope {
        #[arg(long)]
        domain: PathBuf,
    },
    /// Staircase domain versus its envelope for the function w/z.
    ExtensionProbe {
        #[arg(long)]
        steps: usize,
    },
    /// Carathéodory lower bound between two interior points of the symmetrized polydisc.
    CarathLb {
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// Re-run a saved report from its embedded inputs and compare.
    Verify {
        #[arg(long)]
        report: PathBuf,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Peak { .. } => "peak",
            Command::ReinhardtClassify { .. } => "reinhardt-classify",
            Command::Laurent { .. } => "laurent",
            Command::Transfer { .. } => "transfer",
            Command::Pullback { .. } => "pullback",
            Command::CfcProbe { .. } => "cfc-probe",
            Command::Envelope { .. } => "envelope",
            Command::ExtensionProbe { .. } => "extension-probe",
            Command::CarathLb { .. } => "carath-lb",
            Command::Verify { .. } => "verify",
        }
    }
}

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

fn error_code(e: &Error) -> u8 {
    match e {
        Error::NonConvergence { .. }
        | Error::SearchFailure { .. }
        | Error::RecursionBudgetExceeded { .. }
        | Error::ExponentSearchFailure { .. }
        | Error::PoleHit { .. }
        | Error::BranchViolation { .. } => EXIT_NUMERIC,
        Error::FiberBoundaryMismatch { .. } => EXIT_FAIL,
        _ => EXIT_INPUT,
    }
}

fn exec_for(threads: usize) -> Exec {
    if threads == 1 || !cfg!(feature = "parallel") {
        return Exec::Sequential;
    }
    #[cfg(feature = "parallel")]
    if threads > 1 {
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    Exec::Parallel
}

fn dispatch(cli: &Cli, inputs: &mut Inputs) -> peakfn_core::Result<Outcome> {
    let ctx = Ctx {
        exec: exec_for(cli.threads),
        tol: ToleranceProfile::default(),
        verify: VerifyConfig {
            interior: cli.samples,
            boundary: cli.boundary_samples,
            radius: cli.radius,
            seed: cli.seed,
            ..VerifyConfig::default()
        },
    };
    match &cli.command {
        Command::Classify { domain, point } => commands::classify(&ctx, inputs, domain, point),
        Command::Peak { domain, point } => commands::peak(&ctx, inputs, domain, point),
        Command::ReinhardtClassify { domain, point } => commands::reinhardt_classify(&ctx, inputs, domain, point),
        Command::Laurent { domain, point, mu, n_depth, u_radius } => {
            commands::laurent(&ctx, inputs, domain, point, mu, *n_depth, *u_radius)
        }
        Command::Transfer { map, source_peak, domain, source_domain } => {
            commands::transfer(&ctx, inputs, map, source_peak, domain.as_deref(), source_domain.as_deref())
        }
        Command::Pullback { map, target_peak, fiber_index, domain, terms, r0 } => {
            commands::pullback(&ctx, inputs, map, target_peak, *fiber_index, domain, *terms, *r0)
        }
        Command::CfcProbe { map, sequence, base, grid } => {
            commands::cfc(&ctx, inputs, map, sequence, base.as_deref(), *grid)
        }
        Command::Envelope { domain } => commands::envelope_cmd(&ctx, inputs, domain),
        Command::ExtensionProbe { steps } => commands::extension(&ctx, *steps),
        Command::CarathLb { from, to, grid } => commands::carath(&ctx, from, to, *grid),
        Command::Verify { .. } => Err(Error::InvalidInput("a saved report cannot replay `verify`".into())),
    }
}

/// Runs one command and assembles its report.
fn run(cli: &Cli, argv: &[String], inputs: &mut Inputs) -> (u8, Value, Vec<SampleValue>) {
    let (code, result, error, samples) = match dispatch(cli, inputs) {
        Ok(o) => (if o.passed { EXIT_PASS } else { EXIT_FAIL }, o.result, Value::Null, o.samples),
        Err(e) => (error_code(&e), Value::Null, Value::String(e.to_string()), Vec::new()),
    };
    let report = json!({
        "tool": "peakfn",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cli.command.name(),
        "invocation": { "argv": argv, "inputs": inputs.recorded() },
        "exit_code": code,
        "result": result,
        "error": error,
    });
    (code, report, samples)
}

fn write_csv(path: &Path, samples: &[SampleValue]) -> std::io::Result<()> {
    let dim = samples.first().map_or(0, |s| s.point.len());
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    let mut header: Vec<String> = (1..=dim).flat_map(|j| [format!("re_{j}"), format!("im_{j}")]).collect();
    header.push("abs_value".into());
    w.write_record(&header)?;
    for s in samples {
        let mut row: Vec<String> = s.point.iter().flat_map(|c| [c.re.to_string(), c.im.to_string()]).collect();
        row.push(s.abs_value.to_string());
        w.write_record(&row)?;
    }
    w.flush()
}

fn emit(cli: &Cli, report: &Value, samples: &[SampleValue]) -> Result<(), String> {
    let text = serde_json::to_string_pretty(report).map_err(|e| e.to_string())? + "\n";
    match &cli.out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display()))?,
        None => print!("{text}"),
    }
    if let Some(p) = &cli.csv {
        write_csv(p, samples).map_err(|e| format!("cannot write {}: {e}", p.display()))?;
    }
    Ok(())
}

fn replay(path: &Path) -> Result<(u8, Value), Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("report: cannot read {}: {e}", path.display())))?;
    let saved: Value = peakfn_core::io::parse_json(&text, "report")?;
    let argv: Vec<String> = peakfn_core::io::from_value(saved["invocation"]["argv"].clone(), "report")?;
    let embedded = match &saved["invocation"]["inputs"] {
        Value::Object(m) => m.clone(),
        _ => return Err(Error::InvalidInput("report: field `invocation.inputs` must be an object".into())),
    };
    let original = Cli::try_parse_from(&argv)
        .map_err(|e| Error::InvalidInput(format!("report: embedded argv does not parse: {e}")))?;
    let (code, rerun, _) = run(&original, &argv, &mut Inputs::replay(embedded));
    let same_result = rerun["result"] == saved["result"] && rerun["error"] == saved["error"];
    let same_code = rerun["exit_code"] == saved["exit_code"];
    let reproduced = same_result && same_code;
    let report = json!({
        "tool": "peakfn",
        "version": env!("CARGO_PKG_VERSION"),
        "command": "verify",
        "report": path,
        "replayed_command": original.command.name(),
        "original_exit_code": saved["exit_code"],
        "rerun_exit_code": code,
        "reproduced": reproduced,
    });
    Ok((if reproduced { EXIT_PASS } else { EXIT_FAIL }, report))
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS });
        }
    };
    let (code, report, samples) = if let Command::Verify { report } = &cli.command {
        match replay(report) {
            Ok((code, r)) => (code, r, Vec::new()),
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(error_code(&e));
            }
        }
    } else {
        run(&cli, &argv, &mut Inputs::from_files())
    };
    if let Value::String(msg) = &report["error"] {
        eprintln!("error: {msg}");
    }
    if let Err(msg) = emit(&cli, &report, &samples) {
        eprintln!("error: {msg}");
        return ExitCode::from(EXIT_INPUT);
    }
    ExitCode::from(code)
}

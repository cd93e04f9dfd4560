//! Verification CLI: named suites, seeded simulations, machine-readable
//! reports.
//!
//! Exit codes: 0 all checks pass, 1 at least one check failed, 2 config
//! error, 3 internal error, 4 i/o error.

use clap::{Parser, Subcommand};
use mralab::report::{check_catalog, render, run_suite, Format, Params, ReportError, Suite};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mralab", version, about = "verification suites for the q-Bessel multiresolution constructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and emit a report.
    Run {
        /// bessel | qcalc | transforms | mra | cuntz | frames | markov | bwm | all
        #[arg(long)]
        suite: String,
        /// Numeric override, repeatable: --param q=0.4 --param seed=7
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Flat JSON object of overrides; explicit --param flags win.
        #[arg(long)]
        config: Option<std::path::PathBuf>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        /// json | csv-summary
        #[arg(long, default_value = "json")]
        format: String,
        /// Also write the seeded markov path as CSV (columns step,state).
        #[arg(long, value_name = "FILE")]
        path_csv: Option<std::path::PathBuf>,
    },
    /// Print the check ids a suite runs, with one-line descriptions.
    ListChecks {
        #[arg(long)]
        suite: String,
    },
}

fn build_params(
    config: Option<&std::path::Path>,
    flags: &[String],
) -> Result<Params, ReportError> {
    let mut params = Params::default();
    if let Ok(seed) = std::env::var("MRALAB_SEED") {
        let v: u64 = seed
            .parse()
            .map_err(|_| ReportError::Config(format!("MRALAB_SEED={seed} is not an integer")))?;
        params.seed = v;
    }
    if let Some(path) = config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ReportError::Config(format!("cannot read {}: {e}", path.display())))?;
        let doc: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| ReportError::Config(format!("config parse: {e}")))?;
        let obj = doc
            .as_object()
            .ok_or_else(|| ReportError::Config("config must be a flat JSON object".into()))?;
        for (k, v) in obj {
            let num = v
                .as_f64()
                .ok_or_else(|| ReportError::Config(format!("key {k:?} must be numeric")))?;
            params.set(k, num)?;
        }
    }
    for flag in flags {
        let (k, v) = flag
            .split_once('=')
            .ok_or_else(|| ReportError::Config(format!("--param {flag:?} is not KEY=VALUE")))?;
        let num: f64 = v
            .parse()
            .map_err(|_| ReportError::Config(format!("--param {flag:?}: value is not numeric")))?;
        params.set(k, num)?;
    }
    Ok(params)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            suite,
            params,
            config,
            out,
            format,
            path_csv,
        } => {
            let Some(suite) = Suite::parse(&suite) else {
                eprintln!("mralab: unknown suite {suite:?}");
                return ExitCode::from(2);
            };
            let Some(format) = Format::parse(&format) else {
                eprintln!("mralab: unknown format {format:?}");
                return ExitCode::from(2);
            };
            let params = match build_params(config.as_deref(), &params) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("mralab: {e}");
                    return ExitCode::from(2);
                }
            };
            let report = match run_suite(suite, &params) {
                Ok(r) => r,
                Err(ReportError::Config(e)) => {
                    eprintln!("mralab: config error: {e}");
                    return ExitCode::from(2);
                }
                Err(e) => {
                    eprintln!("mralab: {e}");
                    return ExitCode::from(3);
                }
            };
            if let Some(csv_path) = path_csv {
                use mralab::markov;
                let tm = match markov::build_transition(
                    params.n_states,
                    params.q,
                    markov::Normalization::RowExact,
                ) {
                    Ok(t) => t,
                    Err(e) => {
                        eprintln!("mralab: {e}");
                        return ExitCode::from(3);
                    }
                };
                let path = match markov::simulate(&tm, 0, params.steps, params.seed) {
                    Ok(p) => p,
                    Err(e) => {
                        eprintln!("mralab: {e}");
                        return ExitCode::from(3);
                    }
                };
                if let Err(e) = std::fs::write(&csv_path, path.to_csv()) {
                    eprintln!("mralab: cannot write {}: {e}", csv_path.display());
                    return ExitCode::from(4);
                }
            }
            let text = render(&report, format);
            if let Some(path) = out {
                if let Err(e) = std::fs::write(&path, &text) {
                    eprintln!("mralab: cannot write {}: {e}", path.display());
                    return ExitCode::from(4);
                }
            } else {
                print!("{text}");
            }
            if report.has_failure() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Command::ListChecks { suite } => {
            let Some(suite) = Suite::parse(&suite) else {
                eprintln!("mralab: unknown suite {suite:?}");
                return ExitCode::from(2);
            };
            for (id, doc) in check_catalog(suite) {
                println!("{id}  {doc}");
            }
            ExitCode::SUCCESS
        }
    }
}

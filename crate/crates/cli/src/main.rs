use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gou_cli::commands::{self, SimulateArgs, What};
use gou_cli::criteria::{self, RunOptions, Suite};
use gou_cli::{CliError, ProcessSpec, EXIT_INPUT, EXIT_OK};
use gou_core::{McConfig, PathConfig};

/// Exact no-ruin decisions and Monte Carlo checks for generalized
/// Ornstein-Uhlenbeck processes.
#[derive(Parser)]
#[command(name = "gou", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide no-ruin and print the report as JSON.
    Check {
        /// Spec file, `-` for stdin, or an inline JSON document.
        spec: String,
        /// Report δ(z) at these starting values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        delta_at: Vec<f64>,
    },
    /// Write one CSV per path and a manifest.
    Simulate {
        spec: String,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
        #[command(flatten)]
        path: PathArgs,
        #[arg(long, default_value_t = 1)]
        paths: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo estimates with 95% intervals.
    Estimate {
        spec: String,
        #[arg(long, value_enum)]
        what: WhatArg,
        /// Starting values (ruin, theorem3).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        z: Vec<f64>,
        #[command(flatten)]
        path: PathArgs,
        #[arg(long, default_value_t = 10_000)]
        paths: usize,
    },
    /// Run the acceptance criteria.
    Validate {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Multiplier on Monte Carlo path counts; anything but 1 is a smoke run.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Also write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args)]
struct PathArgs {
    #[arg(long, default_value_t = 10.0)]
    horizon: f64,
    /// Grid step (ignored when the driver has no Gaussian part).
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Drop density-tier jumps smaller than this.
    #[arg(long)]
    truncation_eps: Option<f64>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum WhatArg {
    Ruin,
    Negprob,
    Zinf,
    Theorem3,
}

impl From<WhatArg> for What {
    fn from(w: WhatArg) -> What {
        match w {
            WhatArg::Ruin => What::Ruin,
            WhatArg::Negprob => What::Negprob,
            WhatArg::Zinf => What::Zinf,
            WhatArg::Theorem3 => What::Theorem3,
        }
    }
}

fn print_json<T: serde::Serialize>(v: &T) {
    print_text(&(serde_json::to_string_pretty(v).expect("output serialises") + "\n"));
}

/// A closed pipe downstream is not an error of ours.
fn print_text(s: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(s.as_bytes());
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.cmd {
        Cmd::Check { spec, delta_at } => {
            let out = commands::check(&ProcessSpec::load(&spec)?, &delta_at)?;
            print_json(&out);
            Ok(out.exit_code())
        }
        Cmd::Simulate { spec, z, path, paths, out } => {
            let args = SimulateArgs {
                z,
                horizon: path.horizon,
                step: path.step,
                seed: path.seed,
                paths,
                truncation_eps: path.truncation_eps,
            };
            let m = commands::simulate(&ProcessSpec::load(&spec)?, args, &out)?;
            print_json(&m);
            Ok(EXIT_OK)
        }
        Cmd::Estimate { spec, what, z, path, paths } => {
            let spec = ProcessSpec::load(&spec)?;
            let cfg = McConfig {
                path: PathConfig {
                    truncation_eps: path.truncation_eps,
                    ..PathConfig::new(path.horizon, path.step, path.seed)?
                },
                n_paths: paths,
            };
            if paths == 0 {
                return Err(CliError::Input("--paths must be at least 1".into()));
            }
            print_json(&commands::estimate(&spec, what.into(), &z, cfg)?);
            Ok(EXIT_OK)
        }
        Cmd::Validate { suite, seed, scale, json } => {
            if !(scale > 0.0 && scale.is_finite()) {
                return Err(CliError::Input("--scale must be positive".into()));
            }
            let report = criteria::run_suite(suite, &RunOptions { seed, scale });
            print_text(&criteria::render_table(&report));
            let text = serde_json::to_string_pretty(&report).expect("report serialises");
            match json {
                Some(p) => std::fs::write(&p, text)
                    .map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display())))?,
                None => print_text(&(text + "\n")),
            }
            Ok(if report.passed { EXIT_OK } else { EXIT_INPUT })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

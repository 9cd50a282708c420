//! Command-line entry point.
//!
//! Exit codes: 0 all checks pass, 1 at least one check failed,
//! 2 configuration or precondition error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fracp_cli::{run_evaluate, run_experiment, sweep, CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "fracp", about = "Fractional p-Laplacian experiment driver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the operator pointwise on the configured closed form.
    Evaluate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solve the configured Dirichlet problem and write the solution table.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solve and run the configured verification checks.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Check name; repeatable. Overrides the config's check list.
        #[arg(long = "check")]
        checks: Vec<String>,
    },
    /// Run the experiment once per value of a swept parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Axis to sweep (s, p, grid_nodes, r, h). Defaults to the config's
        /// [sweep] section.
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated values. Defaults to the config's [sweep] section.
        #[arg(long)]
        values: Option<String>,
    },
}

fn load(config: &PathBuf) -> Result<(ExperimentConfig, Vec<u8>), CliError> {
    let raw = std::fs::read(config)?;
    let text = String::from_utf8_lossy(&raw);
    let cfg = ExperimentConfig::parse(&text)?;
    Ok((cfg, raw))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Evaluate { config, out, seed } => {
            let (cfg, _) = load(&config)?;
            let _ = seed;
            let results = run_evaluate(&cfg, &out)?;
            for (x, v, e) in &results {
                println!("({}, {}) -> {v:.10e} (err est {e:.2e})", x[0], x[1]);
            }
            println!("wrote {}", out.join("evaluate.csv").display());
            Ok(0)
        }
        Command::Solve { config, out, seed } => {
            let (cfg, raw) = load(&config)?;
            let outcome = run_experiment(&cfg, &raw, &out, seed, Some(&[]))?;
            println!(
                "solved: u_mid = {:.6e}, min interior = {:.6e}",
                outcome.stats.u_mid, outcome.stats.u_min_interior
            );
            println!("wrote {}", out.join("solution.csv").display());
            Ok(0)
        }
        Command::Verify {
            config,
            out,
            seed,
            checks,
        } => {
            let (cfg, raw) = load(&config)?;
            let selector = if checks.is_empty() {
                None
            } else {
                Some(checks.as_slice())
            };
            let outcome = run_experiment(&cfg, &raw, &out, seed, selector)?;
            for r in &outcome.reports {
                print!("{}", r.to_text());
            }
            println!("wrote {}", out.join("reports.csv").display());
            Ok(outcome.exit_code())
        }
        Command::Sweep {
            config,
            out,
            seed,
            axis,
            values,
        } => {
            let (cfg, raw) = load(&config)?;
            let (axis, values) = match (axis, values) {
                (Some(a), Some(v)) => {
                    let parsed: Result<Vec<f64>, _> =
                        v.split(',').map(|t| t.trim().parse::<f64>()).collect();
                    (
                        a,
                        parsed.map_err(|e| {
                            CliError::ConfigInvalid(format!("bad sweep values: {e}"))
                        })?,
                    )
                }
                _ => {
                    let sw = cfg.sweep.clone().ok_or_else(|| {
                        CliError::ConfigInvalid(
                            "no [sweep] section and no --axis/--values flags".into(),
                        )
                    })?;
                    (sw.axis, sw.values)
                }
            };
            let outcome = sweep(&cfg, &raw, &axis, &values, &out, seed)?;
            for (i, row) in outcome.rows.iter().enumerate() {
                println!("{i}: {axis} = {} -> {}", row.value, row.status);
            }
            println!("wrote {}", out.join("sweep_summary.csv").display());
            Ok(if outcome.any_precondition {
                2
            } else if outcome.all_passed {
                0
            } else {
                1
            })
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

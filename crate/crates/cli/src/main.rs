use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lpbm_cli::{catalog, curve, run, CliError, ScenarioConfig};

#[derive(Parser)]
#[command(name = "lpbm", version, about = "Numerical checks of L^p Brunn-Minkowski inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check of a scenario and write report.json, detail.csv and summary.txt.
    Run {
        config: PathBuf,
        /// Treat boundary verdicts as failures.
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the scenario output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available checks.
    ListChecks,
    /// Print a named curve of a scenario as CSV.
    EmitCurve { config: PathBuf, curve: String },
    /// Print the scenario with every default filled in.
    Materialize { config: PathBuf },
}

fn execute(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Run {
            config,
            strict,
            jobs,
            seed,
            out,
        } => {
            let mut scenario = ScenarioConfig::load(&config)?;
            if let Some(seed) = seed {
                scenario.seed = seed;
            }
            let materialized = scenario.materialize()?;
            let report = run::run_scenario(&materialized, jobs)?;
            let dir = out.unwrap_or_else(|| PathBuf::from(&materialized.output));
            run::write_outputs(&report, &materialized, &dir)?;
            print!("{}", run::summary(&report));
            Ok(if report.failed(strict) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::ListChecks => {
            print!("{}", catalog::render());
            Ok(ExitCode::SUCCESS)
        }
        Command::EmitCurve { config, curve: name } => {
            let points = curve::evaluate_curve(&ScenarioConfig::load(&config)?, &name)?;
            curve::write_csv(&points, std::io::stdout().lock()).map_err(|source| CliError::Io {
                path: "stdout".into(),
                source,
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Materialize { config } => {
            let materialized = ScenarioConfig::load(&config)?.materialize()?;
            println!("{}", serde_json::to_string_pretty(&materialized).expect("configurations serialize"));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("lpbm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

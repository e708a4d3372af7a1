use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spinorbit_cli::runner::{output_dir, run};
use spinorbit_cli::scenario::{Scenario, DEFAULT_SCENARIO};
use spinorbit_cli::suites::{run_suite, Suite};
use spinorbit_cli::{CliError, EXIT_CHECK_FAILED, EXIT_PASS, EXIT_SINGULARITY};

#[derive(Debug, Parser)]
#[command(name = "spinorbit", version, about = "Integrable relativistic spin-orbit flows: scenario runs and invariant suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate a scenario file and write trajectory, report, log and plot script
    Run {
        /// Flat TOML scenario, or `default` for the bundled one
        scenario: PathBuf,
        /// Output directory (default: $SPINORBIT_OUT_DIR/<name> or spinorbit-out/<name>)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one randomized invariant suite and print its residuals
    Verify {
        /// brackets, casimirs, involution, chart-equivalence, quadrature,
        /// twistor-massless, twistor-flow or flag-massive
        suite: String,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Random states or scenarios (suite default when omitted)
        #[arg(long)]
        trials: Option<usize>,
    },
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Run { scenario, out } => {
            let sc = if !scenario.exists() && scenario.as_os_str() == "default" {
                Scenario::parse(DEFAULT_SCENARIO)?
            } else {
                Scenario::load(&scenario)?
            };
            let name = sc
                .name
                .clone()
                .or_else(|| scenario.file_stem().map(|s| s.to_string_lossy().into_owned()))
                .unwrap_or_else(|| "scenario".into());
            let prep = sc.prepare()?;
            let dir = output_dir(out.as_deref(), &name);
            let outcome = run(&prep, &dir)?;
            print!("{}", spinorbit_cli::runner::render_log(&outcome.report));
            println!("output     {}", outcome.dir.display());
            if outcome.code == EXIT_SINGULARITY {
                eprintln!("integration stopped at a singularity; partial output written");
            }
            Ok(outcome.code)
        }
        Command::Verify { suite, seed, trials } => {
            let suite: Suite = suite.parse()?;
            if trials == Some(0) {
                return Err(CliError::Usage("trials must be positive".into()));
            }
            let report = run_suite(suite, seed, trials.unwrap_or_else(|| suite.default_trials()));
            print!("{}", report.render());
            Ok(if report.passed() { EXIT_PASS } else { EXIT_CHECK_FAILED })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

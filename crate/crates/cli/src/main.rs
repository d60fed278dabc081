use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tricopter_core::harness::{
    emit_csv, parse_config, parse_config_str, presets, read_csv_file, report_metrics, run_scenario,
    sweep_report, write_csv_file, Scenario, TraceRow,
};
use tricopter_core::{Axis, Error};

#[derive(Parser)]
#[command(
    name = "tricopter",
    version,
    about = "Tricopter attitude-control simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its trace as CSV.
    Run {
        config: PathBuf,
        /// Output file; stdout if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the noise seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Bundled scenario used as the base the file is applied over.
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Run the open-loop sweeps on all three axes and print the readings.
    SweepTables {
        /// Directory for sweep_roll.csv, sweep_pitch.csv, sweep_yaw.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-loop step on one axis; prints the response metrics.
    StepResponse {
        axis: Axis,
        #[arg(allow_negative_numbers = true)]
        degrees: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Step-response metrics of a CSV trace.
    Metrics { trace: PathBuf },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run {
            config,
            out,
            seed,
            scenario,
        } => {
            let mut s = load(&config, scenario.as_deref())?;
            if let Some(seed) = seed {
                s.noise.seed = seed;
            }
            let rows = run_scenario(&s)?;
            write_trace(&rows, out.as_deref())
        }
        Command::SweepTables { out } => {
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir)?;
            }
            for axis in Axis::ALL {
                let s = presets::sweep(axis);
                let rows = run_scenario(&s)?;
                println!("{}", sweep_report(&s, &rows, axis)?);
                if let Some(dir) = &out {
                    write_csv_file(&rows, dir.join(format!("sweep_{axis}.csv")))?;
                }
            }
            Ok(())
        }
        Command::StepResponse { axis, degrees, out } => {
            let rows = run_scenario(&presets::step_response(axis, degrees))?;
            if let Some(path) = &out {
                write_csv_file(&rows, path)?;
            }
            print!("{}", report_metrics(&rows)?);
            Ok(())
        }
        Command::Metrics { trace } => {
            let rows =
                read_csv_file(&trace).map_err(|e| unreadable(&trace, e, Error::TraceFormat))?;
            print!("{}", report_metrics(&rows)?);
            Ok(())
        }
    }
}

/// A missing or unreadable input is the caller's mistake, so it is reported
/// as a validation failure rather than an I/O abort.
fn unreadable(path: &Path, e: Error, wrap: fn(String) -> Error) -> Error {
    match e {
        Error::Io(io) => wrap(format!("cannot read {}: {io}", path.display())),
        other => other,
    }
}

fn load(config: &Path, base: Option<&str>) -> Result<Scenario, Error> {
    match base {
        None => parse_config(config).map_err(|e| unreadable(config, e, Error::ConfigParse)),
        Some(name) => {
            let base = presets::bundled(name)?;
            let text = std::fs::read_to_string(config)
                .map_err(|e| unreadable(config, e.into(), Error::ConfigParse))?;
            parse_config_str(&text, Some(&base))
        }
    }
}

fn write_trace(rows: &[TraceRow], out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => {
            write_csv_file(rows, path)?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            let written = emit_csv(rows, &mut stdout).and_then(|_| stdout.flush());
            // a closed pipe (`| head`) is the reader's choice, not a failure
            if let Err(e) = written {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(e.into());
                }
            }
        }
    }
    Ok(())
}

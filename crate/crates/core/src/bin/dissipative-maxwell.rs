use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dissipative_maxwell::cli::report::{to_json, with_extension, write_atomic};
use dissipative_maxwell::cli::{
    load_config, resource_report, resources_to_csv, run_scenario, sweep_convergence, sweep_to_csv,
    verify_scenario, RunConfig,
};
use dissipative_maxwell::Error;

/// Dissipative Maxwell simulation through dilated quantum channels.
///
/// Log verbosity follows RUST_LOG. Exit status: 0 success, 1 check failure,
/// 2 usage or configuration error.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the configured state and write the report.
    Run { config: PathBuf },
    /// Check operator, channel and circuit invariants for the configuration.
    Verify { config: PathBuf },
    /// Measure the splitting error over a ladder of time steps.
    Sweep {
        config: PathBuf,
        /// Comma-separated time steps, e.g. 0.04,0.02,0.01.
        #[arg(long, value_delimiter = ',', required = true)]
        dt_ladder: Vec<f64>,
    },
    /// Gate counts of both dilations over a range of register sizes.
    Resources {
        config: PathBuf,
        /// Inclusive range of system qubit counts, e.g. 4..8.
        #[arg(long, value_parser = parse_range)]
        n_range: (usize, usize),
    },
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a: usize = a
        .trim()
        .parse()
        .map_err(|_| format!("bad lower bound {a:?}"))?;
    let b: usize = b
        .trim()
        .trim_start_matches('=')
        .parse()
        .map_err(|_| format!("bad upper bound {b:?}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Parse(_)
            | Error::Schema { .. }
            | Error::Validation { .. }
            | Error::InvalidPlan(_)
            | Error::InvalidGrid(_)
            | Error::NegativeDamping { .. }
            | Error::NonPositiveCoupling { .. }
            | Error::NegativeResonance { .. }
            | Error::NonPositiveVacuum { .. }
            | Error::LayoutMismatch(_)
            | Error::ZeroField
            | Error::NegativeTimeStep(_)
            | Error::UndefinedSlope
            | Error::DimensionTooLarge { .. }
    )
}

fn write_tables(
    config: &RunConfig,
    stem: &str,
    csv: Option<String>,
    json: String,
) -> Result<(), Error> {
    let Some(base) = &config.output.report else {
        println!("{json}");
        return Ok(());
    };
    let base = with_extension(base, stem);
    let formats = &config.output.formats;
    if let Some(csv) =
        csv.filter(|_| formats.contains(&dissipative_maxwell::cli::config::Format::Csv))
    {
        write_atomic(&with_extension(&base, "csv"), csv.as_bytes())?;
    }
    if formats.contains(&dissipative_maxwell::cli::config::Format::Json) {
        write_atomic(&with_extension(&base, "json"), json.as_bytes())?;
    }
    Ok(())
}

fn execute(command: Command) -> Result<bool, Error> {
    // an unreadable config file is a configuration error, not a runtime one
    let config = |p: &Path| {
        load_config(p).map_err(|e| match e {
            Error::Io(m) => Error::Parse(format!("{}: {m}", p.display())),
            e => e,
        })
    };
    match command {
        Command::Run { config: path } => {
            let outcome = run_scenario(&config(&path)?)?;
            let last = &outcome.summary.last;
            println!(
                "{} steps of {} at dt = {:e}: energy {:.6e} -> {:.6e}, cumulative p0 {:.6}",
                outcome.report.records.len(),
                outcome.summary.method,
                outcome.summary.dt,
                outcome.summary.initial.total_energy,
                last.total_energy,
                last.cumulative_p0
            );
            for c in &outcome.report.checks {
                println!(
                    "{} {}: {}",
                    if c.passed { "ok  " } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            Ok(outcome.report.passed())
        }
        Command::Verify { config: path } => {
            let cfg = config(&path)?;
            let report = verify_scenario(&cfg)?;
            for c in &report.checks {
                println!(
                    "{} {}: {}",
                    if c.passed { "ok  " } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            write_tables(&cfg, "verify", None, to_json(&report)?)?;
            Ok(report.passed())
        }
        Command::Sweep {
            config: path,
            dt_ladder,
        } => {
            let cfg = config(&path)?;
            let table = sweep_convergence(&cfg, &dt_ladder)?;
            for r in &table.rows {
                println!(
                    "dt {:.4e}  steps {:>6}  epsilon {:.6e}",
                    r.dt, r.steps, r.epsilon
                );
            }
            match table.slope {
                Some(s) => println!("log-log slope {s:.4}"),
                None => println!("log-log slope undefined (vanishing error)"),
            }
            write_tables(&cfg, "sweep", Some(sweep_to_csv(&table)?), to_json(&table)?)?;
            Ok(table.monotone)
        }
        Command::Resources {
            config: path,
            n_range,
        } => {
            let cfg = config(&path)?;
            let table = resource_report(&cfg, n_range.0..=n_range.1)?;
            for r in &table.rows {
                println!(
                    "n {:>2}  {:<5}  cnot {:>8}  rotations {:>8}",
                    r.n, r.method, r.cnot_count, r.rotation_count
                );
            }
            for fit in [&table.kraus_fit, &table.lcu_fit].into_iter().flatten() {
                println!(
                    "fit {}: c = {:.4}, R^2 = {:.4}",
                    fit.shape, fit.c, fit.r_squared
                );
            }
            write_tables(
                &cfg,
                "resources",
                Some(resources_to_csv(&table)?),
                to_json(&table)?,
            )?;
            Ok(table.ordering_holds)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_config_error(&e) { 2 } else { 1 })
        }
    }
}

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use refarray::capacity::transport_capacity;
use refarray::channel::{linear_to_db, PhaseVector};
use refarray::experiments::{
    format_float, parse_config, run_achievable_sweep, run_upper_bound_sweep, run_validation_suite,
    sweep_csv, validation_csv, ExperimentConfig, Property, ValidationOptions, ALL_PROPERTIES,
    DEFAULT_CONFIG,
};
use refarray::optimizer::{
    interference_cancellation_demo, optimize_phases, CancellationSetup, Objective,
};
use refarray::{sinr, Error, Scenario};

/// Reflect-array capacity experiments. Results are written as CSV.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config file; the built-in defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for the placement search.
    #[arg(long)]
    workers: Option<usize>,
    /// Output file; stdout when omitted and the config names none.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form capacity bound over the configured sweep.
    UpperBound(Common),
    /// Joint placement and phase search over the configured sweep.
    Achievable(Common),
    /// Optimises phases for the configured tx/rx positions.
    PhaseOpt(Common),
    /// Two-transmitter interference cancellation for each `demo_elements` size.
    DemoCancel(Common),
    /// Runs the seeded property suite; exits 1 if any property fails.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Comma-separated property names; an empty list runs nothing.
        #[arg(long)]
        properties: Option<String>,
        /// Allowed Monte-Carlo versus closed-form SINR gap in dB.
        #[arg(long, default_value_t = 0.2)]
        mc_tolerance_db: f64,
    },
}

enum Failure {
    Validation,
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

fn load(common: &Common) -> Result<ExperimentConfig, Error> {
    let text = match &common.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?,
        None => DEFAULT_CONFIG.to_string(),
    };
    let mut cfg = parse_config(&text)?;
    if let Some(seed) = common.seed {
        cfg.set_seed(seed);
    }
    if let Some(w) = common.workers {
        if w == 0 {
            return Err(Error::InvalidArgument("--workers must be >= 1".into()));
        }
        cfg.set_workers(w);
    }
    if cfg.arrays > 2 {
        eprintln!("note: arrays 3 and 4 are placed at (D/2, D) and (D, D/2)");
    }
    Ok(cfg)
}

fn emit(common: &Common, cfg: &ExperimentConfig, csv: &str) -> Result<(), Error> {
    let target = common
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(PathBuf::from));
    match target {
        Some(path) => {
            std::fs::write(&path, csv).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn phase_opt(cfg: &ExperimentConfig) -> Result<String, Error> {
    let scenario = Scenario::new(cfg.room()?, cfg.layouts()?, cfg.deployment()?, cfg.params)?;
    let zero = PhaseVector::zeros(scenario.element_count());
    let best = optimize_phases(&scenario, Objective::MinSinr, &cfg.phase)?;
    let report = transport_capacity(&scenario, &best.phases)?;
    let mut out =
        String::from("link,sinr_zero_phase_db,sinr_optimized_db,feasible,transport_capacity\n");
    for l in 0..scenario.pairs() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            l + 1,
            format_float(linear_to_db(sinr(&scenario, &zero, l)?)),
            format_float(linear_to_db(report.per_link_sinr[l])),
            report.per_link_sinr[l] >= cfg.params.sinr_threshold,
            format_float(report.transport_capacity)
        );
    }
    Ok(out)
}

fn demo_cancel(cfg: &ExperimentConfig) -> Result<String, Error> {
    let mut out = String::from("elements,baseline_sinr_db,optimized_sinr_db,improvement_db\n");
    for &n in &cfg.demo_elements {
        let setup = CancellationSetup::two_transmitter(n, cfg.element_spacing, cfg.params)?;
        let r = interference_cancellation_demo(&setup, &cfg.phase)?;
        let _ = writeln!(
            out,
            "{n},{},{},{}",
            format_float(r.baseline_db),
            format_float(r.optimized_db),
            format_float(r.optimized_db - r.baseline_db)
        );
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::UpperBound(c) => {
            let cfg = load(c)?;
            emit(
                c,
                &cfg,
                &sweep_csv(cfg.sweep_axis, &run_upper_bound_sweep(&cfg)?),
            )?;
        }
        Command::Achievable(c) => {
            let cfg = load(c)?;
            emit(
                c,
                &cfg,
                &sweep_csv(cfg.sweep_axis, &run_achievable_sweep(&cfg)?),
            )?;
        }
        Command::PhaseOpt(c) => {
            let cfg = load(c)?;
            emit(c, &cfg, &phase_opt(&cfg)?)?;
        }
        Command::DemoCancel(c) => {
            let cfg = load(c)?;
            emit(c, &cfg, &demo_cancel(&cfg)?)?;
        }
        Command::Validate {
            common,
            properties,
            mc_tolerance_db,
        } => {
            let cfg = load(common)?;
            let selected = match properties {
                None => ALL_PROPERTIES.to_vec(),
                Some(list) => list
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|name| {
                        Property::parse(name).ok_or_else(|| {
                            Error::InvalidArgument(format!("unknown property `{name}`"))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            };
            let options = ValidationOptions {
                properties: selected,
                mc_tolerance_db: *mc_tolerance_db,
                mc_symbols: cfg.mc_symbols,
                ..ValidationOptions::default()
            };
            let report = run_validation_suite(cfg.seed, &options)?;
            emit(common, &cfg, &validation_csv(&report))?;
            if report.iter().any(|o| !o.passed) {
                return Err(Failure::Validation);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => {
            eprintln!("error: one or more properties failed");
            ExitCode::from(1)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::BudgetExceeded(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

//! `afdm-sim` — command-line front end for the experiment harness.
//!
//! Four subcommands: `simulate` runs a config file's Monte Carlo
//! experiment, `abep` evaluates its union-bound overlay without
//! simulating, `compare` runs a built-in named comparison, and
//! `validate` cross-checks the numerics against independent oracles.
//! CSV goes to stdout unless `--out` names a file; everything
//! diagnostic goes to stderr so pipelines stay clean.
//!
//! Exit codes: 0 success, 2 configuration problem, 3 runtime failure
//! (I/O, failed self-check).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use afdm_sim::config::ExperimentSpec;
use afdm_sim::recipes::{run_recipe, RECIPES};
use afdm_sim::records::{emit_csv, sort_records, to_csv, BerRecord, StopReason};
use afdm_sim::runner::{abep_records, run_experiment, with_threads};
use afdm_sim::validate;
use afdm_sim::{Result, SimError};

#[derive(Parser)]
#[command(
    name = "afdm-sim",
    version,
    about = "Simulation and analysis harness for AFDM with index modulation",
    after_help = "EXAMPLES:\n    \
        afdm-sim validate\n    \
        afdm-sim simulate --config experiment.toml --out ber.csv\n    \
        afdm-sim abep --config experiment.toml\n    \
        afdm-sim compare               (lists the built-in comparisons)\n    \
        afdm-sim compare ml-vs-bound --threads 4 --out curve.csv"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo experiment described by a config file
    Simulate(RunArgs),
    /// Evaluate the union-bound ABEP on the config's SNR grid (no simulation)
    Abep(RunArgs),
    /// Run a built-in comparison; omit the name to list them
    Compare {
        /// Comparison name, e.g. `ml-vs-bound`
        name: Option<String>,
        /// Replace every built-in seed with this one
        #[arg(long)]
        seed: Option<u64>,
        /// Write CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: SIM_THREADS env var, then all cores)
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Cross-check the numerics against built-in oracles
    Validate {
        /// Seed for the randomized checks
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Experiment description (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Override the config's seed
    #[arg(long)]
    seed: Option<u64>,
    /// Write CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: SIM_THREADS env var, then all cores)
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Abep(args) => abep(args),
        Command::Compare { name, seed, out, threads } => compare(name, seed, out, threads),
        Command::Validate { seed } => run_checks(seed),
    }
}

/// `--threads` wins, then the SIM_THREADS environment variable, then
/// rayon's own default (all cores).
fn thread_count(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| std::env::var("SIM_THREADS").ok().and_then(|s| s.parse().ok()))
}

fn load_spec(args: &RunArgs) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::from_file(&args.config)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    for w in &spec.warnings {
        eprintln!("warning: {w}");
    }
    Ok(spec)
}

fn emit(mut records: Vec<BerRecord>, out: Option<&PathBuf>) -> Result<()> {
    sort_records(&mut records);
    match out {
        Some(path) => emit_csv(&records, path),
        None => {
            print!("{}", to_csv(&records));
            Ok(())
        }
    }
}

fn simulate(args: RunArgs) -> Result<()> {
    let spec = load_spec(&args)?;
    let points = with_threads(thread_count(args.threads), || run_experiment(&spec))?;
    for p in &points {
        if p.stop == StopReason::TrialCap {
            eprintln!(
                "note: {} dB stopped at the trial cap ({} trials, {} errors)",
                p.record.snr_db, p.trials, p.record.errors
            );
        }
    }
    emit(points.into_iter().map(|p| p.record).collect(), args.out.as_ref())
}

fn abep(args: RunArgs) -> Result<()> {
    let spec = load_spec(&args)?;
    emit(abep_records(&spec)?, args.out.as_ref())
}

fn compare(
    name: Option<String>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    threads: Option<usize>,
) -> Result<()> {
    let Some(name) = name else {
        println!("built-in comparisons:");
        for (name, blurb) in RECIPES {
            println!("  {name:<18} {blurb}");
        }
        return Ok(());
    };
    let records = with_threads(thread_count(threads), || run_recipe(&name, seed))?;
    emit(records, out.as_ref())
}

fn run_checks(seed: u64) -> Result<()> {
    let outcomes = validate::run_all(seed);
    for c in &outcomes {
        println!("{}  {:<24} {}", if c.pass { "  ok" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = outcomes.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        return Err(SimError::Check(format!("{failed} of {} checks failed", outcomes.len())));
    }
    Ok(())
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vndn_cli::{
    compare_instances, results_dir, run_matrix, run_one, write_matrix, write_run, CliError, Instance, MatrixSpec,
    RESULTS_DIR_ENV,
};
use vndn_core::ndn::DeploymentMode;
use vndn_core::sim::ScenarioConfig;

#[derive(Parser)]
#[command(name = "vndn", version, about = "Vehicular NDN deployment simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one run and write its metrics CSV and manifest.
    Run(RunArgs),
    /// Execute every deployment x scenario x seed and write summaries.
    Matrix(MatrixArgs),
    /// Compare two instances of a results directory on data received.
    Compare(CompareArgs),
}

#[derive(Args)]
struct Common {
    /// Scenario config (TOML). Built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Results root; a subdirectory named by the config hash is used.
    #[arg(long, env = RESULTS_DIR_ENV, default_value = "results")]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    deployment: Option<DeploymentMode>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    scenario: Option<u8>,
}

#[derive(Args)]
struct MatrixArgs {
    #[command(flatten)]
    common: Common,
    /// Base seed; defaults to the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Runs per instance.
    #[arg(long, default_value_t = 31)]
    seeds: u64,
    /// Restrict to one deployment.
    #[arg(long)]
    deployment: Option<DeploymentMode>,
    /// Restrict to one scenario.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    scenario: Option<u8>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct CompareArgs {
    /// Results directory written by `run` or `matrix`.
    dir: PathBuf,
    /// First instance, e.g. Proposal-1.
    a: Instance,
    /// Second instance.
    b: Instance,
}

fn load_config(path: Option<&Path>) -> Result<ScenarioConfig, CliError> {
    match path {
        Some(p) => ScenarioConfig::load(p).map_err(|e| CliError::Config(e.to_string())),
        None => Ok(ScenarioConfig::default()),
    }
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let mut cfg = load_config(args.common.config.as_deref())?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(d) = args.deployment {
        cfg.mode.deployment = d;
    }
    if let Some(s) = args.scenario {
        cfg.apps.scenario = s;
    }
    let metrics = run_one(&cfg)?;
    let dir = results_dir(&args.common.out, &cfg);
    let (csv, manifest) = write_run(&dir, &cfg, &metrics, args.seed)?;
    let t = metrics.totals();
    println!(
        "{}: {} interests, {} data, satisfaction {:.4}",
        Instance::new(cfg.mode.deployment, cfg.apps.scenario),
        t.interests_sent,
        t.data_received,
        t.satisfaction_ratio()
    );
    println!("{}", csv.display());
    println!("{}", manifest.display());
    Ok(())
}

fn cmd_matrix(args: MatrixArgs) -> Result<(), CliError> {
    let base = load_config(args.common.config.as_deref())?;
    let base_seed = args.seed.unwrap_or(base.seed);
    let mut spec = MatrixSpec::new(base, base_seed, args.seeds);
    spec.instances
        .retain(|i| args.deployment.is_none_or(|d| i.mode == d) && args.scenario.is_none_or(|s| i.scenario == s));
    spec.progress = true;
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let outcome = run_matrix(&spec, jobs)?;
    let dir = results_dir(&args.common.out, &spec.base);
    write_matrix(&dir, &spec, &outcome)?;
    for s in &outcome.summaries {
        println!(
            "{:<11} satisfaction {:.4} (min {:.4}, max {:.4})  data {:.0}",
            s.instance, s.satisfaction_mean, s.satisfaction_min, s.satisfaction_max, s.data_mean
        );
    }
    println!("{}", dir.display());
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    let c = compare_instances(&args.dir, args.a, args.b)?;
    println!(
        "{} vs {} on {}: n1={} n2={} U={} p={:.6} A12={:.4}",
        c.instance_a, c.instance_b, c.metric, c.n1, c.n2, c.u_statistic, c.p_value, c.a12
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Matrix(a) => cmd_matrix(a),
        Command::Compare(a) => cmd_compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vndn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

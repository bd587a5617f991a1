//! Command-line entry point.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use stripeplan_cli::config::ExperimentConfig;
use stripeplan_cli::experiment::{deploy_all_clusters, run_clustering, run_experiment, write_json};
use stripeplan_cli::report::{emit_report, read_raw_csv};

#[derive(Parser)]
#[command(
    name = "stripeplan",
    about = "Plan radio stripe deployments for indoor near-field wireless power transfer",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Experiment config JSON.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for grid cells (overrides the config; 0 = auto).
    #[arg(long)]
    workers: Option<usize>,
    /// Comma-separated deployment methods (overrides the config).
    #[arg(long, value_delimiter = ',')]
    method: Option<Vec<String>>,
    /// Comma-separated precoders: mrt, sdp (overrides the config).
    #[arg(long, value_delimiter = ',')]
    precoder: Option<Vec<String>>,
}

impl CommonArgs {
    fn load(&self) -> anyhow::Result<ExperimentConfig> {
        let mut config = ExperimentConfig::load(&self.config)?;
        if let Some(out) = &self.out {
            config.out_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(workers) = self.workers {
            config.workers = workers;
        }
        if let Some(methods) = &self.method {
            config.methods = methods.clone();
        }
        if let Some(precoders) = &self.precoder {
            config.precoders = precoders.clone();
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Assign hotspots to stripes and place cluster heads.
    Cluster(CommonArgs),
    /// Optimize element placement for each cluster (base scenario).
    Deploy(CommonArgs),
    /// Monte Carlo evaluation of the minimum received power (no sweep).
    Evaluate(CommonArgs),
    /// Full pipeline over the configured sweep grid.
    Sweep(CommonArgs),
    /// Summarize a finished run into summary.csv and plot scripts.
    Report {
        /// Output directory of a finished run (contains raw.csv).
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn cluster_cmd(args: &CommonArgs) -> anyhow::Result<ExitCode> {
    let config = args.load()?;
    let scenario = stripeplan::scenario::load_scenario(&config.scenario)?;
    let run = run_clustering(&config, &scenario)?;
    std::fs::create_dir_all(&config.out_dir)?;
    write_json(&config.out_dir.join("cluster.json"), &run.solution)?;
    write_json(&config.out_dir.join("cluster_trace.json"), &run.trace)?;
    println!(
        "clustered {} hotspots into {} stripes; max penalized loss {:.6e}",
        scenario.hotspots.len(),
        run.solution.num_stripes(),
        run.solution.objective
    );
    Ok(ExitCode::SUCCESS)
}

fn deploy_cmd(args: &CommonArgs) -> anyhow::Result<ExitCode> {
    let config = args.load()?;
    let scenario = stripeplan::scenario::load_scenario(&config.scenario)?;
    let cluster_path = config.out_dir.join("cluster.json");
    let cluster = if cluster_path.exists() {
        serde_json::from_str(&std::fs::read_to_string(&cluster_path)?)
            .context("parsing cluster.json")?
    } else {
        let run = run_clustering(&config, &scenario)?;
        std::fs::create_dir_all(&config.out_dir)?;
        write_json(&cluster_path, &run.solution)?;
        run.solution
    };
    std::fs::create_dir_all(config.out_dir.join("deployments"))?;
    for method in config.parsed_methods() {
        let deps = deploy_all_clusters(&config, &scenario, &cluster, method)?;
        let path = config
            .out_dir
            .join("deployments")
            .join(format!("none_0_{}.json", method.name()));
        write_json(&path, &deps)?;
        let worst = deps.iter().map(|d| d.objective).fold(f64::INFINITY, f64::min);
        println!(
            "{}: deployed {} stripes, min weighted gain {:.6e}",
            method.name(),
            deps.len(),
            worst
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn pipeline_cmd(args: &CommonArgs, with_sweep: bool) -> anyhow::Result<ExitCode> {
    let mut config = args.load()?;
    if !with_sweep {
        config.sweep = None;
    }
    let output = run_experiment(&config)?;
    emit_report(&output.rows, &config.out_dir)?;
    println!(
        "wrote {} rows to {}",
        output.rows.len(),
        config.out_dir.join("raw.csv").display()
    );
    if output.any_failed {
        eprintln!("one or more cells failed; see the status column");
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

fn run() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Cluster(args) => cluster_cmd(&args),
        Command::Deploy(args) => deploy_cmd(&args),
        Command::Evaluate(args) => pipeline_cmd(&args, false),
        Command::Sweep(args) => pipeline_cmd(&args, true),
        Command::Report { out } => {
            let rows = read_raw_csv(&out.join("raw.csv"))?;
            let cells = emit_report(&rows, &out)?;
            println!(
                "summarized {} cells into {}",
                cells.len(),
                out.join("summary.csv").display()
            );
            Ok(ExitCode::SUCCESS)
        }
    }
}

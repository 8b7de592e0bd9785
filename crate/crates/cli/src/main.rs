//! Command-line driver: five subcommands covering ground-truth export, the
//! drift sweep, clustering, refinement, and the noise study. Each reads a
//! flat key = value config file; `--seed`, `--out`, and `--step` override
//! the corresponding config entries (and therefore the manifest hash).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use eigensweep::config::PipelineConfig;
use eigensweep::ite::parse_records_csv;
use eigensweep::pipeline::{
    run_cluster, run_exact, run_noise_study, run_refine, run_sweep, ClusterArtifacts,
    PipelineContext, PipelineError, SweepStart,
};

#[derive(Parser)]
#[command(
    name = "eigensweep",
    about = "Eigenspectrum estimation by drift sweeps over a shifted-squared Hamiltonian",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Pipeline config file (flat key = value format).
    #[arg(long)]
    config: PathBuf,
    /// Override the config's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the drift grid step.
    #[arg(long)]
    step: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Export the dense spectrum with drift intervals and their centers.
    Exact(Common),
    /// Run the drift sweep and write parameter records plus a manifest.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Warm-start initial parameters from a prior report's cluster medians.
        #[arg(long, value_name = "REPORT_JSON")]
        warm_start: Option<PathBuf>,
    },
    /// Cluster a records file into a report and box-plot data.
    Cluster {
        #[command(flatten)]
        common: Common,
        /// Records CSV from `sweep`; defaults to <out>/records.csv.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Refine cluster medians against the uniform-superposition baseline.
    Refine {
        #[command(flatten)]
        common: Common,
        /// Report JSON from `cluster`; defaults to <out>/report.json.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Sweep two-qubit noise levels and test the error trend per step.
    NoiseStudy(Common),
}

fn load_config(common: &Common) -> Result<PipelineConfig, PipelineError> {
    let text = fs::read_to_string(&common.config)?;
    let mut config = PipelineConfig::parse(&text)?;
    if let Some(seed) = common.seed {
        config.base_seed = seed;
    }
    if let Some(out) = &common.out {
        config.output_dir = out.display().to_string();
    }
    if let Some(step) = common.step {
        config.grid.step = step;
    }
    config.validate()?;
    Ok(config)
}

fn load_report(path: &PathBuf) -> Result<ClusterArtifacts, PipelineError> {
    let text = fs::read_to_string(path)?;
    eigensweep::pipeline::parse_cluster_artifacts(&text)
}

fn run(cli: Cli) -> Result<(), PipelineError> {
    match cli.command {
        Command::Exact(common) => {
            let config = load_config(&common)?;
            let out_dir = config.output_dir.clone();
            let ctx = PipelineContext::new(config)?;
            let path = run_exact(&ctx, &out_dir)?;
            println!("spectrum written to {}", path.display());
        }
        Command::Sweep { common, warm_start } => {
            let config = load_config(&common)?;
            let out_dir = config.output_dir.clone();
            let ctx = PipelineContext::new(config)?;
            let prior = warm_start.as_ref().map(load_report).transpose()?;
            let start = match &prior {
                Some(artifacts) => SweepStart::Warm(&artifacts.report),
                None => SweepStart::Cold,
            };
            let outcome = run_sweep(&ctx, start, &out_dir)?;
            println!(
                "{} records over {} grid points ({} failed) written to {}/records.csv",
                outcome.records.len(),
                outcome.grid.len(),
                outcome.failures.len(),
                out_dir,
            );
        }
        Command::Cluster { common, records } => {
            let config = load_config(&common)?;
            let out_dir = config.output_dir.clone();
            let records_path =
                records.unwrap_or_else(|| PathBuf::from(&out_dir).join("records.csv"));
            let text = fs::read_to_string(&records_path)?;
            let records = parse_records_csv(&text)?;
            let artifacts = run_cluster(&config, &records, &out_dir)?;
            println!(
                "k={} clusters (hopkins mean {:.3}, p {:.3e}) written to {}/report.json",
                artifacts.report.k,
                artifacts.report.hopkins_mean,
                artifacts.report.hopkins_p,
                out_dir,
            );
            for point in &artifacts.estimates.points {
                println!(
                    "  median_s {:+.6}  interval [{:+.6}, {:+.6}]",
                    point.median_s, point.s_interval.0, point.s_interval.1
                );
            }
            if artifacts.estimates.single_cluster {
                println!("  warning: single cluster; levels unresolved");
            }
        }
        Command::Refine { common, report } => {
            let config = load_config(&common)?;
            let out_dir = config.output_dir.clone();
            let report_path =
                report.unwrap_or_else(|| PathBuf::from(&out_dir).join("report.json"));
            let artifacts = load_report(&report_path)?;
            let ctx = PipelineContext::new(config)?;
            let rows = run_refine(&ctx, &artifacts.report, &out_dir)?;
            println!("refined {} clusters, written to {}/refined.csv", rows.len(), out_dir);
            for row in &rows {
                println!(
                    "  cluster {}: {} -> {:+.9} in {} iterations (baseline {})",
                    row.cluster_id, row.method, row.eigenvalue, row.iterations,
                    row.baseline_iterations,
                );
            }
        }
        Command::NoiseStudy(common) => {
            let config = load_config(&common)?;
            let out_dir = config.output_dir.clone();
            let ctx = PipelineContext::new(config)?;
            let outcome = run_noise_study(&ctx, &out_dir)?;
            println!(
                "{} rows over levels {:?} written to {}/noise_study.csv",
                outcome.rows.len(),
                outcome.levels,
                out_dir,
            );
            for trend in &outcome.trends {
                println!(
                    "  step {}: S={} z={:+.3} p={:.3}",
                    trend.step, trend.mk.s, trend.mk.z, trend.mk.p_value
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

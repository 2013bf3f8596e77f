use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use ris_secrecy_cli::config::ExperimentConfig;
use ris_secrecy_cli::report::{write_csv, Report};
use ris_secrecy_cli::{stats, sweep};

#[derive(Parser)]
#[command(name = "ris-secrecy", version, about = "Secrecy outage of RIS-assisted vehicular links")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo histograms and KS distances against the analytic SNR laws.
    StatsVerify(Args),
    /// SOP over the configured grid with the configured methods.
    SopSweep(Args),
    /// Closed form, single integral and Monte Carlo against each other.
    CrossValidate(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; falls back to the config's `output`, then the working directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    jobs: Option<usize>,
}

fn finish(report: &Report, out: &std::path::Path, name: &str) -> Result<bool> {
    report.write(&out.join(name))?;
    for g in &report.gates {
        println!("{} {} value={:.6e} tolerance={:.6e}", if g.pass { "PASS" } else { "FAIL" }, g.name, g.value, g.tolerance);
    }
    Ok(report.all_pass())
}

fn run(cli: Cli) -> Result<bool> {
    let (Command::StatsVerify(args) | Command::SopSweep(args) | Command::CrossValidate(args)) = &cli.command;
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = args.out.clone().or_else(|| cfg.output.clone()).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = args.jobs {
        anyhow::ensure!(j > 0, "--jobs must be positive");
        pool = pool.num_threads(j);
    }
    let pool = pool.build()?;
    pool.install(|| match &cli.command {
        Command::StatsVerify(_) => {
            let v = stats::stats_verify(&cfg)?;
            write_csv(&out.join("stats_verify.csv"), &v.rows)?;
            finish(&v.report, &out, "stats_verify_report.json")
        }
        Command::SopSweep(_) => {
            let rows = sweep::sop_sweep(&cfg);
            write_csv(&out.join("sop_sweep.csv"), &rows)?;
            let failed = rows.iter().filter(|r| !r.is_ok()).count();
            if failed > 0 {
                eprintln!("{failed} of {} rows carry an error status", rows.len());
            }
            Ok(true)
        }
        Command::CrossValidate(_) => {
            let v = sweep::cross_validate(&cfg);
            write_csv(&out.join("cross_validate.csv"), &v.rows)?;
            finish(&v.report, &out, "cross_validate_report.json")
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

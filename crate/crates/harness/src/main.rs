use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use drg_harness::studies;
use drg_harness::{ExperimentSpec, Norm};

#[derive(Parser)]
#[command(name = "drg", version, about = "Energy-preserving DRG integrator experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one method and write its trajectory.
    Run(Common),
    /// Error at t_end over a list of step sizes, with fitted slopes.
    Order(Common),
    /// Energy error against time for several methods.
    Drift(Common),
    /// Fine SIA and coarse IA trajectories on the spinning top.
    Levels(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Output path; overrides `out` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Error norm for order-study slopes.
    #[arg(long, value_parser = ["ambient", "riemannian"])]
    norm: Option<String>,
}

fn load(c: &Common, default_out: &str) -> Result<(ExperimentSpec, PathBuf)> {
    let mut spec = ExperimentSpec::from_path(&c.config)?;
    if let Some(n) = &c.norm {
        spec.norm = Norm::parse(n).expect("clap restricts the values");
    }
    let out = c.out.clone().or_else(|| spec.out.clone()).unwrap_or_else(|| default_out.into());
    Ok((spec, out))
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(c) => {
            let (spec, out) = load(&c, "run.csv")?;
            let res = studies::run(&spec)?;
            studies::save_run(&res, &out)?;
            println!(
                "{}: {} steps, max |dH| = {:e}, wrote {}",
                res.label,
                res.record.iterations.len(),
                res.record.max_energy_drift(),
                out.display()
            );
        }
        Command::Order(c) => {
            let (spec, out) = load(&c, "order")?;
            let series = studies::order(&spec)?;
            let paths = studies::save_order(&series, &out)?;
            for (s, p) in series.iter().zip(&paths) {
                for (h, e) in &s.failures {
                    eprintln!("warning: {} at h = {h}: {e}", s.label);
                }
                println!("{}: slope ({}) = {:.3}, wrote {}", s.label, spec.norm, s.slope, p.display());
            }
        }
        Command::Drift(c) => {
            let (spec, out) = load(&c, "drift.csv")?;
            let d = studies::drift(&spec)?;
            drg_harness::csvio::write_drift(&out, &d.times, &d.columns)?;
            for (label, e) in &d.failures {
                eprintln!("warning: {label}: {e}");
            }
            for (label, col) in &d.columns {
                let worst = col.iter().filter(|x| x.is_finite()).fold(0.0f64, |a, x| a.max(x.abs()));
                println!("{label}: max |dH| = {worst:e}");
            }
            println!("wrote {}", out.display());
        }
        Command::Levels(c) => {
            let (spec, out) = load(&c, "levels")?;
            let pairs = studies::levels(&spec)?;
            let paths = studies::save_levels(&pairs, &out)?;
            println!("wrote {} files to {}", paths.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

use anyhow::Result;
use clap::{Parser, Subcommand};
use nnls_wedge::commands::describe;
use nnls_wedge::{cmd_compare, cmd_match, cmd_predict, cmd_scatter, load_or_scatter, ExperimentConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "nnls-wedge", version, about = "Curved-wedge asymptotics for the nonlocal NLS equation with step-like data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides [output].dir.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tolerance override, e.g. --tol assumption2=0.02 (repeatable).
    #[arg(long = "tol", value_name = "KEY=VALUE")]
    tol: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the scattering data and write the spectral cache.
    Scatter(Common),
    /// Evaluate the asymptotic predictions on the wedge grid.
    Predict(Common),
    /// Run the direct solver and compare it with the predictions.
    Compare(Common),
    /// Check the alpha -> 1 limit against the straight-line asymptotics.
    Match(Common),
}

fn setup(c: &Common) -> Result<(ExperimentConfig, PathBuf)> {
    let mut cfg = ExperimentConfig::load(&c.config)?;
    for kv in &c.tol {
        cfg.tolerances.set(kv)?;
    }
    cfg.validate()?;
    let out = cfg.output_dir(c.out.as_deref());
    Ok((cfg, out))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Scatter(c) => {
            let (cfg, out) = setup(&c)?;
            let (sd, path) = cmd_scatter(&cfg, &out)?;
            println!("case {:?}, k1 = {}, assumption2 = {:.3e}", sd.case, sd.k1, sd.assumption2);
            println!("wrote {}", path.display());
        }
        Command::Predict(c) => {
            let (cfg, out) = setup(&c)?;
            let sd = load_or_scatter(&cfg, &out)?;
            let res = cmd_predict(&cfg, &sd, &out)?;
            print!("{}", describe(&res.summary));
            println!("{} rows written to {}", res.records.len(), out.join("predict.csv").display());
        }
        Command::Compare(c) => {
            let (cfg, out) = setup(&c)?;
            let sd = load_or_scatter(&cfg, &out)?;
            let res = cmd_compare(&cfg, &sd, &out)?;
            print!("{}", describe(&res.summary));
            println!("{} rows written to {}", res.records.len(), out.join("compare.csv").display());
            if let Some(msg) = res.aborted {
                eprintln!("warning: {msg}");
                return Ok(ExitCode::from(2));
            }
        }
        Command::Match(c) => {
            let (cfg, out) = setup(&c)?;
            let sd = load_or_scatter(&cfg, &out)?;
            let reports = cmd_match(&cfg, &sd, &out)?;
            for r in &reports {
                let worst = r.phase_rows.iter().map(|row| row.residual).fold(0.0, f64::max);
                println!("s = {}: phase residual max {worst:.3e}, decreasing {}", r.s, r.phase_residual_decreasing);
            }
            println!("wrote {}", out.join("match.txt").display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tdse1d::config::load_config;
use tdse1d::runner::{k_grid, output_dir, run_scenario, run_sweep_to};
use tdse1d::scenarios::{SWEEP_K_FROM, SWEEP_K_STEP, SWEEP_K_TO};
use tdse1d::Error;

/// Crank-Nicolson simulator for the 1D time-dependent Schrödinger equation.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario, writing snapshots, probe currents and a manifest.
    Run {
        config: PathBuf,
        /// Output directory (overrides `[output] dir`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transmission/reflection sweep over incident wavevectors.
    Sweep {
        config: PathBuf,
        #[arg(long, default_value_t = SWEEP_K_FROM)]
        k_from: f64,
        #[arg(long, default_value_t = SWEEP_K_TO)]
        k_to: f64,
        #[arg(long, default_value_t = SWEEP_K_STEP)]
        k_step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and check a configuration without running it.
    Validate { config: PathBuf },
}

fn exit_code(e: &Error) -> ExitCode {
    if e.is_numeric() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out } => load_config(&config).and_then(|s| {
            s.validate()?;
            let dir = out.unwrap_or_else(|| output_dir(&s));
            let m = run_scenario(&s, &dir)?;
            println!(
                "{} steps, {} snapshots, {} probes -> {}",
                m.steps_completed,
                m.snapshots.len(),
                m.probes.len(),
                dir.display()
            );
            Ok(ExitCode::SUCCESS)
        }),
        Command::Sweep {
            config,
            k_from,
            k_to,
            k_step,
            out,
        } => load_config(&config).and_then(|s| {
            s.validate()?;
            let ks = k_grid(k_from, k_to, k_step)?;
            let dir = out.unwrap_or_else(|| output_dir(&s));
            let (entries, manifest) = run_sweep_to(&s, &ks, &dir)?;
            for e in &entries {
                match &e.outcome {
                    Ok(r) => println!("k = {:.3}  T = {:.4} (exact {:.4})  R = {:.4}", r.k, r.t_num, r.t_ana, r.r_num),
                    Err(err) => eprintln!("k = {:.3}  failed: {err}", e.k),
                }
            }
            println!("{} -> {}", manifest.file, dir.display());
            // a failed k is recorded in the outputs but still fails the command
            Ok(match entries.iter().find_map(|e| e.outcome.as_ref().err()) {
                Some(err) => exit_code(err),
                None => ExitCode::SUCCESS,
            })
        }),
        Command::Validate { config } => load_config(&config).and_then(|s| {
            s.validate()?;
            println!("ok");
            Ok(ExitCode::SUCCESS)
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

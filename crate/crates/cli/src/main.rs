use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ecdyn_core::experiments::{
    refinement_study, run_experiment, write_refinement_report, ExperimentConfig,
};
use ecdyn_core::Error;

/// Runs the friction, delamination and bulk experiments on the bar and
/// writes energy, trace, hysteresis and damage histories as CSV.
#[derive(Parser, Debug)]
#[command(name = "ecdyn", version)]
struct Cli {
    /// friction, delamination or bulk
    #[arg(long)]
    experiment: Option<String>,
    /// 1, 2 or 3 (80, 320, 720 elements)
    #[arg(long)]
    mesh_level: Option<String>,
    /// Time step [s]
    #[arg(long)]
    dt: Option<String>,
    /// Horizon [s]
    #[arg(long)]
    t_end: Option<String>,
    /// cn, split or be
    #[arg(long)]
    scheme: Option<String>,
    /// Friction threshold or yield stress [Pa]
    #[arg(long)]
    sigma_y: Option<String>,
    /// Adhesive fracture toughness [J/m^2]
    #[arg(long)]
    toughness: Option<String>,
    /// Peak traction [Pa]
    #[arg(long)]
    amplitude: Option<String>,
    /// Cycle period [s]
    #[arg(long)]
    period: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run the mesh refinement study (levels 1, 2, 3 with dt, dt/2, dt/3)
    #[arg(long)]
    refine: bool,
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut text = match &cli.config {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?,
        None => String::new(),
    };
    if let Some(e) = &cli.experiment {
        text.push_str(&format!("\nexperiment={e}\n"));
    }
    let mut cfg = ExperimentConfig::parse_str(&text)?;
    let flags = [
        ("mesh_level", &cli.mesh_level),
        ("dt", &cli.dt),
        ("t_end", &cli.t_end),
        ("scheme", &cli.scheme),
        ("sigma_y", &cli.sigma_y),
        ("toughness", &cli.toughness),
        ("amplitude", &cli.amplitude),
        ("period", &cli.period),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn exit_code(e: &Error) -> ExitCode {
    match e {
        Error::Config(_) => ExitCode::from(2),
        Error::Io(_) | Error::Csv(_) => ExitCode::from(1),
        _ => ExitCode::from(3),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("ecdyn: {e}");
            return ExitCode::from(2);
        }
    };
    let result = if cli.refine {
        refinement_study(&cfg, &[1, 2, 3], &[1, 2, 3]).and_then(|report| {
            write_refinement_report(&report, cfg.tau, &cfg.out)?;
            for p in &report.pairwise {
                println!(
                    "levels {}-{}: relative L2 difference {:.3e}",
                    p.level_a, p.level_b, p.relative_l2
                );
            }
            println!(
                "window_end={:.6e} observed_order={:.3}",
                report.window_end, report.observed_order
            );
            Ok(())
        })
    } else {
        run_experiment(&cfg).map(|summary| println!("{}", summary.line()))
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ecdyn: {e}");
            exit_code(&e)
        }
    }
}

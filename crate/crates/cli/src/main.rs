mod artifacts;
mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use artifacts::Emitter;
use config::{Overrides, RunConfig};

/// Numerical experiments for directed positive currents near a hyperbolic
/// fixed point: leaf geometry, boundary-data extension, bidisc mass decay,
/// curve and kernel asymptotics, and edge-flux scans.
#[derive(Parser)]
#[command(name = "currentlab", version, arg_required_else_help = true)]
struct Cli {
    /// TOML run configuration; defaults apply when omitted
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory root (artifacts land in <out>/<command>/)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Sector parameter a
    #[arg(long, global = true)]
    a: Option<f64>,

    /// Sector parameter b (negative values are mirrored)
    #[arg(long, global = true)]
    b: Option<f64>,

    /// Modulus profile, "kind" or "kind:param" (power, log_power)
    #[arg(long, global = true)]
    profile: Option<String>,

    /// Profile amplitude
    #[arg(long = "A", global = true)]
    amplitude: Option<f64>,

    /// Worker threads (0 = library default)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Seed for randomized spot checks
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a leaf and draw the sector exhaustion
    Leaf,
    /// Extend boundary data and verify harmonicity spot checks
    Extend,
    /// Mass of the directed current on shrinking bidiscs
    Mass,
    /// Curve and kernel asymptotics checks
    Lemmas,
    /// Edge-flux decay scans with controls
    Ddc,
    /// Normalized mass decay against the modulus reference
    Sharpness,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Leaf => "leaf",
            Command::Extend => "extend",
            Command::Mass => "mass",
            Command::Lemmas => "lemmas",
            Command::Ddc => "ddc",
            Command::Sharpness => "sharpness",
        }
    }

    fn run(&self, cfg: &RunConfig, em: &mut Emitter) -> Result<()> {
        match self {
            Command::Leaf => commands::cmd_leaf(cfg, em),
            Command::Extend => commands::cmd_extend(cfg, em),
            Command::Mass => commands::cmd_mass(cfg, em),
            Command::Lemmas => commands::cmd_lemmas(cfg, em),
            Command::Ddc => commands::cmd_ddc(cfg, em),
            Command::Sharpness => commands::cmd_sharpness(cfg, em),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    cfg.apply(&Overrides {
        out: cli.out.clone(),
        a: cli.a,
        b: cli.b,
        profile: cli.profile.clone(),
        amplitude: cli.amplitude,
        threads: cli.threads,
        seed: cli.seed,
    })?;
    cfg.validate()?;
    commands::init_threads(cfg.run.threads)?;

    let name = cli.cmd.name();
    let dir = cfg.run.out_dir.join(name);
    let mut em = Emitter::new(&dir)?;
    let outcome = cli.cmd.run(&cfg, &mut em);
    let completed = outcome.is_ok();

    for (key, ok) in em.passes() {
        println!("[{}] {key}", if ok { "PASS" } else { "FAIL" });
    }
    let all_passed = em.finish(name, &cfg, completed)?;
    println!("artifacts: {}", dir.display());

    if let Err(e) = outcome {
        eprintln!("error: {e:#}");
        return Ok(false);
    }
    Ok(all_passed)
}

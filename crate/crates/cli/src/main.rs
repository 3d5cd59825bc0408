//! `jumpflow` — experiment orchestration for the jump-noise SPDE laboratory.
//!
//! Every subcommand reads one TOML experiment config, runs its task, writes
//! CSV artifacts plus a run manifest into the output directory, and exits 0
//! only if every requested claim passed. Worker count follows
//! `RAYON_NUM_THREADS`.

mod config;
mod manifest;
mod output;
mod tasks;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::manifest::Manifest;
use crate::tasks::{run_task, RunContext};

#[derive(Parser)]
#[command(
    name = "jumpflow",
    version,
    about = "Simulate weakly dissipative SPDEs driven by pure-jump noise and verify their structural hypotheses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment configuration file (TOML).
    #[arg(long, global = true, default_value = "configs/plaplace_reference.toml")]
    config: PathBuf,

    /// Master seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for CSVs and manifests.
    #[arg(long, global = true, default_value = "runs")]
    out: PathBuf,

    /// Override every path-ensemble size.
    #[arg(long, global = true)]
    paths: Option<usize>,

    /// Write full state vectors into trajectory exports.
    #[arg(long, global = true)]
    full_state: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one trajectory and export it.
    Simulate,
    /// Noise engine diagnostics and distributional statistics.
    NoiseTest,
    /// Structural condition checks on the drift operator.
    VerifyConditions,
    /// Monte Carlo verifiers for the structural hypotheses.
    Verify {
        /// Claim to check: A0, A1-1, A1-2, A1-3, e-property, or all
        /// (default: the config's claim list).
        #[arg(long)]
        claim: Option<String>,
    },
    /// Accessibility-to-zero estimation.
    Access,
    /// Invariant-measure uniqueness diagnostics.
    Ergodic,
    /// Lyapunov moment growth check.
    Lyapunov,
    /// The full battery: everything above except simulate.
    All,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::NoiseTest => "noise-test",
            Command::VerifyConditions => "verify-conditions",
            Command::Verify { .. } => "verify",
            Command::Access => "access",
            Command::Ergodic => "ergodic",
            Command::Lyapunov => "lyapunov",
            Command::All => "all",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let mut cfg = config::parse_config(&cli.config).map_err(|e| anyhow::anyhow!("{e}"))?;
    if let Command::Verify { claim: Some(claim) } = &cli.command {
        cfg.task.verify.claims = vec![claim.clone()];
    }
    let seed = cli.seed.unwrap_or(cfg.seeds.master);
    std::fs::create_dir_all(&cli.out)?;
    let config_digest =
        output::effective_config_digest(&cfg.raw, seed, cli.paths, cli.full_state);

    let discarded = cfg.build_noise().ok().map(|n| n.discarded_variance());
    let ctx = RunContext {
        raw_echo: cfg.raw.clone(),
        cfg,
        out_dir: cli.out.clone(),
        seed,
        paths_override: cli.paths,
        full_state: cli.full_state,
        config_digest: config_digest.clone(),
    };

    let started = Instant::now();
    let outcome = run_task(cli.command.name(), &ctx)?;
    let wall = started.elapsed().as_secs_f64();

    let all_pass = outcome.claims.iter().all(|(_, ok)| *ok);
    for (claim, ok) in &outcome.claims {
        println!("{claim}: {}", if *ok { "pass" } else { "FAIL" });
    }

    let manifest = Manifest {
        command: cli.command.name().to_string(),
        master_seed: seed,
        config_digest,
        config_echo: ctx.raw_echo.clone(),
        discarded_small_jump_variance: discarded,
        claims: outcome.claims,
        outputs: outcome.outputs,
        extras: outcome.extras,
        wall_time_seconds: wall,
    };
    let manifest_path = cli
        .out
        .join(format!("manifest_{}.toml", cli.command.name()));
    manifest.write(&manifest_path)?;
    println!(
        "manifest: {} ({} outputs)",
        manifest_path.display(),
        manifest.outputs.len()
    );
    Ok(all_pass)
}

//! `helmcont`: command-line driver for the continuation experiments.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration,
//! 3 numerical failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use helmcont::config::RunConfig;
use helmcont::Error;

#[derive(Parser, Debug)]
#[command(name = "helmcont", version, about = "Cauchy continuation experiments for Helmholtz-type equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override a configuration key, e.g. `--set cutoff.eps=0.1`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Print nothing but errors.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Continue manufactured Cauchy data from Γ₀ to Γ₁.
    Continue,
    /// Stability ratios over a list of wave numbers.
    Sweep,
    /// Singular spectrum of the Neumann-to-trace operator and plateau metrics.
    Svd,
    /// Growth of an excluded mode next to a kept one.
    DemoJohn,
    /// Sobolev and high-frequency norms of a field dump.
    Norms {
        /// Field dump (overrides `norms.field`).
        field: Option<PathBuf>,
    },
}

impl Command {
    fn id(&self) -> &'static str {
        match self {
            Command::Continue => "continue",
            Command::Sweep => "sweep",
            Command::Svd => "svd",
            Command::DemoJohn => "demo-john",
            Command::Norms { .. } => "norms",
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 1,
        Error::Config { .. } | Error::InvalidParameter { .. } | Error::Geometry(_) => 2,
        _ => 3,
    }
}

fn kind(code: u8) -> &'static str {
    match code {
        1 => "io",
        2 => "config",
        _ => "numerical",
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var("HELMCONT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| Error::Config {
        key: "HELMCONT_THREADS".into(),
        message: format!("must be a positive integer, got `{raw}`"),
    })?;
    // fails only if a pool already exists
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Error> {
    configure_threads()?;
    let text = match &cli.config {
        Some(p) => std::fs::read_to_string(p)?,
        None => String::new(),
    };
    let mut cfg = RunConfig::load(&text, &cli.set)?;
    cfg.command = Some(cli.command.id().to_string());
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    if let Command::Norms { field: Some(f) } = &cli.command {
        cfg.norms.field = Some(f.clone());
    }
    let ui = commands::Ui { quiet: cli.quiet };
    std::fs::create_dir_all(&cfg.output.dir)?;
    std::fs::write(cfg.output.dir.join("manifest.toml"), cfg.manifest()?)?;
    match cli.command {
        Command::Continue => commands::cmd_continue(&cfg, &ui),
        Command::Sweep => commands::cmd_sweep(&cfg, &ui),
        Command::Svd => commands::cmd_svd(&cfg, &ui),
        Command::DemoJohn => commands::cmd_demo_john(&cfg, &ui),
        Command::Norms { .. } => commands::cmd_norms(&cfg, &ui),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("error[{}]: {e}", kind(code));
            ExitCode::from(code)
        }
    }
}

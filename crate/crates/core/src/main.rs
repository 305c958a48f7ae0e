use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use bso_lock::harness::{parse_config, run_command, Subcommand};

/// Bloch-Siegert phase readout, phase teleportation and remote frequency locking.
#[derive(Debug, Parser)]
#[command(name = "bso-lock", version)]
struct Cli {
    #[arg(value_enum)]
    subcommand: Subcommand,

    /// JSON config; `{}` gives all defaults. A run manifest is also accepted.
    #[arg(long)]
    config: PathBuf,

    /// Overrides `master_seed`.
    #[arg(long)]
    seed: Option<u64>,

    #[arg(long, default_value = ".")]
    out: PathBuf,

    /// Dotted override such as `teleport.pairs_x=1000`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = parse_config(&cli.config, &cli.set, cli.seed)
        .and_then(|config| run_command(cli.subcommand, &config, &cli.out));
    match result {
        Ok(manifest) => {
            for o in &manifest.outputs {
                println!("{}", cli.out.join(o).display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("bso-lock: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

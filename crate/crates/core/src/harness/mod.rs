//! Configuration, CSV output and run manifests for the `bso-lock` binary.
//!
//! A run is fully determined by `(subcommand, resolved config)`; the master
//! seed lives in the config. Each run writes one or more CSV files and a
//! `<subcommand>.manifest.json` next to them. Passing a manifest back as
//! `--config` repeats the run.

mod commands;
pub mod config;
pub mod csv;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use self::config::{parse_config, parse_config_str, Config, SCHEMA_VERSION};
pub use self::csv::{emit_csv, Cell, CsvTable};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error at `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("cannot read config {}: {source}", path.display())]
    ConfigIo {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("malformed table: {0}")]
    Table(String),

    #[error(transparent)]
    Runtime(#[from] crate::Error),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2 for configuration problems, 3 for everything that fails while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config { .. } | HarnessError::ConfigIo { .. } => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    BsoScan,
    Ladder,
    Reversal,
    Teleport,
    Lock,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::BsoScan => "bso-scan",
            Subcommand::Ladder => "ladder",
            Subcommand::Reversal => "reversal",
            Subcommand::Teleport => "teleport",
            Subcommand::Lock => "lock",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Subcommand,
    pub artifact_version: String,
    pub schema_version: u32,
    pub master_seed: u64,
    pub resolved_config: Config,
    /// File names relative to the manifest's directory.
    pub outputs: Vec<String>,
    pub summary: serde_json::Value,
}

/// Runs `command` and writes its CSV files and manifest into `out_dir`.
pub fn run_command(
    command: Subcommand,
    config: &Config,
    out_dir: &Path,
) -> Result<RunManifest, HarnessError> {
    config.validate()?;
    let output = match command {
        Subcommand::BsoScan => commands::bso_scan(config),
        Subcommand::Ladder => commands::ladder(config),
        Subcommand::Reversal => commands::reversal(config),
        Subcommand::Teleport => commands::teleport(config),
        Subcommand::Lock => commands::lock(config),
    }?;
    // validate every table before touching the disk
    let rendered = output
        .tables
        .iter()
        .map(|(name, t)| t.to_bytes().map(|b| (name.clone(), b)))
        .collect::<Result<Vec<_>, _>>()?;
    std::fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    for (name, bytes) in &rendered {
        let path = out_dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| HarnessError::io(&path, e))?;
    }
    let manifest = RunManifest {
        command,
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        schema_version: SCHEMA_VERSION,
        master_seed: config.master_seed,
        resolved_config: config.clone(),
        outputs: rendered.into_iter().map(|(n, _)| n).collect(),
        summary: output.summary,
    };
    let path = out_dir.join(format!("{}.manifest.json", command.name()));
    let mut text =
        serde_json::to_string_pretty(&manifest).map_err(|e| HarnessError::Table(e.to_string()))?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| HarnessError::io(&path, e))?;
    Ok(manifest)
}

//! Configuration files and the command runner behind the `respoles` binary.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use thiserror::Error;

use crate::mst::MstError;
use crate::observables::ObservableError;
use crate::poles::{Contour, PoleError};

pub use commands::{convergence_sweep, run_command, validation_suite, CheckLine, ConvergenceRecord, ConvergenceSweep};
pub use config::{
    ConfigError, ContourConfig, ContourKind, ConvergenceConfig, CrystalConfig, ModeMapConfig, OutputConfig,
    Permittivity, RefineConfig, RunConfig, SpectrumConfig, ToleranceConfig, TruncationConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Transmission ratio over a wavenumber range.
    Spectrum,
    /// Pole and residue from contour moments.
    FindPole,
    /// Müller refinement started from the contour estimate.
    RefinePole,
    /// Field map of the resonance mode.
    ModeMap,
    /// Pole and residue eigenvalue versus the number of contour nodes.
    Convergence,
    /// Invariant checks on the configured scene.
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::FindPole => "find-pole",
            Command::RefinePole => "refine-pole",
            Command::ModeMap => "mode-map",
            Command::Convergence => "convergence",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "respoles", version, about = "Resonance poles of finite 2D photonic crystals")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// TOML run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides `[output] dir`).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Contour node count (overrides `[contour] nodes`).
    #[arg(long)]
    pub nodes: Option<usize>,
    /// `circle:cx,cy,r` or `poly:x1,y1;x2,y2;...` (overrides `[contour]`).
    #[arg(long)]
    pub contour: Option<String>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Pole(#[from] PoleError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
    #[error(transparent)]
    Mst(#[from] MstError),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{failed} validation check(s) failed")]
    ValidationFailed { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Pole(PoleError::NoPoleEnclosed { .. }) => 3,
            CliError::Pole(PoleError::MultiplePoles { .. }) => 4,
            CliError::ValidationFailed { .. } => 5,
            _ => 1,
        }
    }
}

/// Applies command-line overrides to a parsed config.
pub fn apply_overrides(
    mut config: RunConfig,
    output: Option<&Path>,
    nodes: Option<usize>,
    contour: Option<&str>,
) -> Result<RunConfig, CliError> {
    let nodes_now = nodes.unwrap_or(config.contour.nodes);
    if let Some(text) = contour {
        let c = Contour::parse(text, nodes_now).map_err(|e| ConfigError {
            path: "--contour".into(),
            line: None,
            message: e.to_string(),
        })?;
        config.contour = ContourConfig::from_contour(&c);
    }
    if nodes_now < 3 {
        return Err(ConfigError {
            path: "--nodes".into(),
            line: None,
            message: format!("must be at least 3, got {nodes_now}"),
        }
        .into());
    }
    config.contour.nodes = nodes_now;
    if let Some(dir) = output {
        config.output.dir = dir.display().to_string();
    }
    Ok(config)
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let args = Args::parse();
    let result = RunConfig::load(&args.config)
        .map_err(CliError::from)
        .and_then(|c| apply_overrides(c, args.output.as_deref(), args.nodes, args.contour.as_deref()))
        .and_then(|c| {
            let dir = PathBuf::from(&c.output.dir);
            run_command(args.command, &c, &dir)
        });
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("respoles {}: {e}", args.command.name());
            ExitCode::from(e.exit_code())
        }
    }
}

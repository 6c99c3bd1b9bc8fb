//! Command-line flags and the validated run configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub const DEFAULT_ALPHA: f64 = 0.8;
pub const DEFAULT_GRID: GridSpec = GridSpec { min: 0.02, max: 0.98, steps: 97 };

#[derive(Debug, Parser)]
#[command(
    name = "refsys",
    version,
    about = "Verify the Hardy reference-system model and report its pseudo-probabilities"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,

    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = OutputFormat::Text)]
    pub format: OutputFormat,

    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Use this absolute tolerance for every check.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Items 1-4 and the invariant suite at one alpha.
    Verify {
        #[arg(long, default_value_t = DEFAULT_ALPHA, allow_negative_numbers = true)]
        alpha: f64,
    },
    /// One row per alpha on an inclusive, evenly spaced grid.
    Sweep(GridArgs),
    /// Pseudo-probability reports at one alpha, or over a grid.
    Paradox {
        #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["alpha_min", "alpha_max", "steps"])]
        alpha: Option<f64>,
        #[command(flatten)]
        grid: OptionalGridArgs,
    },
    /// Narrated walkthrough at alpha = 0.8.
    Demo,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = DEFAULT_GRID.min, allow_negative_numbers = true)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = DEFAULT_GRID.max, allow_negative_numbers = true)]
    pub alpha_max: f64,
    #[arg(long, default_value_t = DEFAULT_GRID.steps)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct OptionalGridArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Verify,
    Sweep,
    Paradox,
    Demo,
}

/// Inclusive grid of `steps` points from `min` to `max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, steps: usize) -> Result<Self, ConfigError> {
        if steps < 1 {
            return Err(ConfigError(format!("steps must be at least 1, got {steps}")));
        }
        if !in_open_unit(min) || !in_open_unit(max) {
            return Err(ConfigError(format!("grid bounds must lie in (0, 1), got [{min}, {max}]")));
        }
        if min >= max {
            return Err(ConfigError(format!("alpha-min {min} must be below alpha-max {max}")));
        }
        Ok(GridSpec { min, max, steps })
    }

    /// Ascending points; a single step yields `min`.
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let h = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps).map(|k| if k + 1 == self.steps { self.max } else { self.min + h * k as f64 }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaSpec {
    Point(f64),
    Grid(GridSpec),
}

impl AlphaSpec {
    pub fn points(&self) -> Vec<f64> {
        match self {
            AlphaSpec::Point(a) => vec![*a],
            AlphaSpec::Grid(g) => g.points(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub alpha: AlphaSpec,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub tolerance_override: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn in_open_unit(x: f64) -> bool {
    x.is_finite() && x > 0.0 && x < 1.0
}

fn point(alpha: f64) -> Result<AlphaSpec, ConfigError> {
    if in_open_unit(alpha) {
        Ok(AlphaSpec::Point(alpha))
    } else {
        Err(ConfigError(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, ConfigError> {
        let (command, alpha) = match cli.command {
            CliCommand::Verify { alpha } => (Command::Verify, point(alpha)?),
            CliCommand::Sweep(g) => {
                (Command::Sweep, AlphaSpec::Grid(GridSpec::new(g.alpha_min, g.alpha_max, g.steps)?))
            }
            CliCommand::Paradox { alpha, grid } => {
                let alpha = match (alpha, grid.alpha_min, grid.alpha_max, grid.steps) {
                    (Some(a), ..) => point(a)?,
                    (None, None, None, None) => point(DEFAULT_ALPHA)?,
                    (None, min, max, steps) => AlphaSpec::Grid(GridSpec::new(
                        min.unwrap_or(DEFAULT_GRID.min),
                        max.unwrap_or(DEFAULT_GRID.max),
                        steps.unwrap_or(DEFAULT_GRID.steps),
                    )?),
                };
                (Command::Paradox, alpha)
            }
            CliCommand::Demo => (Command::Demo, AlphaSpec::Point(DEFAULT_ALPHA)),
        };
        if let Some(t) = cli.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(ConfigError(format!("tolerance must be positive and finite, got {t}")));
            }
        }
        Ok(RunConfig {
            command,
            alpha,
            output_format: cli.format,
            output_path: cli.output,
            tolerance_override: cli.tolerance,
        })
    }

    pub fn parse_from<I, T>(args: I) -> Result<Self, ParseOutcome>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args).map_err(ParseOutcome::Clap)?;
        RunConfig::from_cli(cli).map_err(ParseOutcome::Invalid)
    }
}

/// Why argument parsing did not yield a configuration.
#[derive(Debug)]
pub enum ParseOutcome {
    /// Includes `--help` and `--version`, which are not failures.
    Clap(clap::Error),
    Invalid(ConfigError),
}

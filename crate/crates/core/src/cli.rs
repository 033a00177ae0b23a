//! Command-line front end.
//!
//! Every flag can also be given in a TOML config file (`--config`) under the
//! same name without the leading dashes; flags win over the file. The run
//! report is a JSON document whose `config` object uses the same keys, so a
//! report is enough to repeat a run.

use std::ffi::OsString;
use std::fs;
use std::hash::{BuildHasher, Hasher};
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{render, Background, PassReport, RenderConfig, SpotMode, StopRule};
use crate::imgio::{self, CodecError};
use crate::raster::ChannelMask;
use crate::sampler::GridParams;
use crate::spots::{RectParams, ReferencePoint, ThresholdParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    /// `--help` / `--version` output; not a failure.
    #[error("{0}")]
    Info(String),

    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: CodecError,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Info(_) => EXIT_OK,
            CliError::Usage(_) => EXIT_VALIDATION,
            CliError::Io { .. } | CliError::Image { .. } => EXIT_IO,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Circle,
    RectSource,
    RectDisplaced,
    ThreshSource,
    ThreshDisplaced,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackgroundArg {
    White,
    Mean,
    Source,
}

impl From<BackgroundArg> for Background {
    fn from(b: BackgroundArg) -> Self {
        match b {
            BackgroundArg::White => Background::White,
            BackgroundArg::Mean => Background::Mean,
            BackgroundArg::Source => Background::Source,
        }
    }
}

impl From<Background> for BackgroundArg {
    fn from(b: Background) -> Self {
        match b {
            Background::White => BackgroundArg::White,
            Background::Mean => BackgroundArg::Mean,
            Background::Source => BackgroundArg::Source,
        }
    }
}

/// Raw settings, shared by the command line and the config file. Every field
/// is optional here; requirements are checked in [`Settings::resolve`].
#[derive(Debug, Clone, Default, PartialEq, Parser, Serialize, Deserialize)]
#[command(
    name = "impressionist",
    version,
    about = "Impressionist / pointillist rendering of raster images"
)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Settings {
    /// Source image (.ppm, .png or .bmp).
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,

    /// Rendered image (.ppm or .png).
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,

    /// Write a JSON run report here.
    #[arg(long, value_name = "PATH")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,

    /// TOML file with default values for any of these options.
    #[arg(long, value_name = "PATH")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Spot shape.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeArg>,

    /// Canvas initialization [default: white].
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub background: Option<BackgroundArg>,

    /// Generator seed; chosen at random and reported when omitted.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,

    /// Smallest lattice stride.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_min: Option<usize>,

    /// Largest lattice stride.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_max: Option<usize>,

    /// Jitter half-width [default: 0].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<usize>,

    /// Circle radius (circle).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<usize>,

    /// Base rectangle side, also the contrast probe distance (rect-*).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<usize>,

    /// Short rectangle side (rect-*).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_small: Option<usize>,

    /// Long rectangle side (rect-*).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_big: Option<usize>,

    /// Contrast threshold (rect-*).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,

    /// Neighbourhood half-width (thresh-*).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pi: Option<usize>,

    /// Tone threshold (thresh-*).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_prime: Option<f64>,

    /// Run exactly this many passes.
    #[arg(long, conflicts_with_all = ["coverage", "max_passes"])]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passes: Option<usize>,

    /// Stop once this fraction of the canvas is covered.
    #[arg(long, requires = "max_passes")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<f64>,

    /// Pass limit for --coverage.
    #[arg(long, requires = "coverage")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_passes: Option<usize>,

    /// Channels to paint, any subset of "rgb" [default: rgb].
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channels: Option<String>,
}

/// A fully validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub input: PathBuf,
    pub output: PathBuf,
    pub report: Option<PathBuf>,
    pub config: RenderConfig,
    /// False when the seed was drawn at startup.
    pub seed_given: bool,
}

impl Settings {
    /// Fills every unset field from `base`. The stopping rule is taken as a
    /// group: if any of `passes`, `coverage`, `max-passes` is set here, none
    /// are inherited.
    pub fn or(self, base: Settings) -> Settings {
        let own_stop =
            self.passes.is_some() || self.coverage.is_some() || self.max_passes.is_some();
        let (passes, coverage, max_passes) = if own_stop {
            (self.passes, self.coverage, self.max_passes)
        } else {
            (base.passes, base.coverage, base.max_passes)
        };
        Settings {
            input: self.input.or(base.input),
            output: self.output.or(base.output),
            report: self.report.or(base.report),
            config: self.config.or(base.config),
            mode: self.mode.or(base.mode),
            background: self.background.or(base.background),
            seed: self.seed.or(base.seed),
            s_min: self.s_min.or(base.s_min),
            s_max: self.s_max.or(base.s_max),
            delta: self.delta.or(base.delta),
            rho: self.rho.or(base.rho),
            lambda: self.lambda.or(base.lambda),
            lambda_small: self.lambda_small.or(base.lambda_small),
            lambda_big: self.lambda_big.or(base.lambda_big),
            tau: self.tau.or(base.tau),
            pi: self.pi.or(base.pi),
            tau_prime: self.tau_prime.or(base.tau_prime),
            passes,
            coverage,
            max_passes,
            channels: self.channels.or(base.channels),
        }
    }

    /// Checks requirements for the chosen mode and builds the render
    /// configuration. Parameters belonging to other modes are ignored.
    pub fn resolve(&self, fallback_seed: impl FnOnce() -> u64) -> Result<Invocation, CliError> {
        let mut missing = Vec::new();
        macro_rules! need {
            ($field:ident, $flag:literal) => {
                match self.$field.clone() {
                    Some(v) => v,
                    None => {
                        missing.push(concat!("--", $flag));
                        Default::default()
                    }
                }
            };
        }
        let input = need!(input, "input");
        let output = need!(output, "output");
        let Some(mode) = self.mode else {
            missing.push("--mode");
            return Err(missing_flags(&missing));
        };
        let s_min = need!(s_min, "s-min");
        let s_max = need!(s_max, "s-max");
        let spot = match mode {
            ModeArg::Circle => Partial::Circle(need!(rho, "rho")),
            ModeArg::RectSource | ModeArg::RectDisplaced => Partial::Rect(
                need!(lambda, "lambda"),
                need!(lambda_small, "lambda-small"),
                need!(lambda_big, "lambda-big"),
                need!(tau, "tau"),
            ),
            ModeArg::ThreshSource | ModeArg::ThreshDisplaced => {
                Partial::Thresh(need!(pi, "pi"), need!(tau_prime, "tau-prime"))
            }
        };
        let stop = match (self.passes, self.coverage, self.max_passes) {
            (Some(count), None, None) => Some(StopRule::Passes { count }),
            (None, Some(target), Some(max_passes)) => {
                Some(StopRule::Coverage { target, max_passes })
            }
            (None, None, None) => {
                missing.push("--passes (or --coverage with --max-passes)");
                None
            }
            (None, Some(_), None) => {
                missing.push("--max-passes");
                None
            }
            (None, None, Some(_)) => {
                missing.push("--coverage");
                None
            }
            (Some(_), _, _) => {
                return Err(usage(
                    "--passes cannot be combined with --coverage / --max-passes",
                ))
            }
        };
        if !missing.is_empty() {
            return Err(missing_flags_for(mode, &missing));
        }
        let stop = stop.expect("stop rule present when nothing is missing");
        stop.validate().map_err(|e| usage(e.to_string()))?;

        let invalid = |e: crate::Error| usage(e.to_string());
        let reference = match mode {
            ModeArg::RectDisplaced | ModeArg::ThreshDisplaced => ReferencePoint::Displaced,
            _ => ReferencePoint::Source,
        };
        let mode = match spot {
            Partial::Circle(rho) => SpotMode::Circle { rho },
            Partial::Rect(l, ls, lb, tau) => SpotMode::Rect {
                params: RectParams::new(l, ls, lb, tau).map_err(invalid)?,
                reference,
            },
            Partial::Thresh(pi, tau_prime) => SpotMode::Threshold {
                params: ThresholdParams::new(pi, tau_prime).map_err(invalid)?,
                reference,
            },
        };
        let grid = GridParams::new(s_min, s_max, self.delta.unwrap_or(0)).map_err(invalid)?;
        let mask = match &self.channels {
            Some(s) => s.parse::<ChannelMask>().map_err(invalid)?,
            None => ChannelMask::RGB,
        };
        let (seed, seed_given) = match self.seed {
            Some(s) => (s, true),
            None => (fallback_seed(), false),
        };
        Ok(Invocation {
            input,
            output,
            report: self.report.clone(),
            config: RenderConfig {
                mode,
                background: self.background.map(Into::into).unwrap_or(Background::White),
                seed,
                grid,
                mask,
                stop,
            },
            seed_given,
        })
    }

    /// The settings that reproduce `cfg`, restricted to the keys its mode
    /// uses.
    pub fn from_config(cfg: &RenderConfig) -> Settings {
        let mut s = Settings {
            background: Some(cfg.background.into()),
            seed: Some(cfg.seed),
            s_min: Some(cfg.grid.s_min()),
            s_max: Some(cfg.grid.s_max()),
            delta: Some(cfg.grid.delta()),
            channels: Some(cfg.mask.to_string()),
            ..Settings::default()
        };
        let displaced = |r: ReferencePoint| r == ReferencePoint::Displaced;
        match cfg.mode {
            SpotMode::Circle { rho } => {
                s.mode = Some(ModeArg::Circle);
                s.rho = Some(rho);
            }
            SpotMode::Rect { params, reference } => {
                s.mode = Some(if displaced(reference) {
                    ModeArg::RectDisplaced
                } else {
                    ModeArg::RectSource
                });
                s.lambda = Some(params.lambda());
                s.lambda_small = Some(params.lambda_small());
                s.lambda_big = Some(params.lambda_big());
                s.tau = Some(params.tau());
            }
            SpotMode::Threshold { params, reference } => {
                s.mode = Some(if displaced(reference) {
                    ModeArg::ThreshDisplaced
                } else {
                    ModeArg::ThreshSource
                });
                s.pi = Some(params.pi_size());
                s.tau_prime = Some(params.tau_prime());
            }
        }
        match cfg.stop {
            StopRule::Passes { count } => s.passes = Some(count),
            StopRule::Coverage { target, max_passes } => {
                s.coverage = Some(target);
                s.max_passes = Some(max_passes);
            }
        }
        s
    }
}

enum Partial {
    Circle(usize),
    Rect(usize, usize, usize, f64),
    Thresh(usize, f64),
}

fn missing_flags(missing: &[&str]) -> CliError {
    usage(format!("missing required options: {}", missing.join(", ")))
}

fn missing_flags_for(mode: ModeArg, missing: &[&str]) -> CliError {
    let name = mode
        .to_possible_value()
        .map(|v| v.get_name().to_owned())
        .unwrap_or_default();
    usage(format!(
        "mode {name} is missing required options: {}",
        missing.join(", ")
    ))
}

fn read_config_file(path: &Path) -> Result<Settings, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Seed for runs that did not ask for one.
pub fn entropy_seed() -> u64 {
    let mut h = std::collections::hash_map::RandomState::new().build_hasher();
    if let Ok(t) = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH) {
        h.write_u128(t.as_nanos());
    }
    h.write_u32(std::process::id());
    h.finish()
}

/// Parses `argv` (program name first) and merges any config file.
pub fn parse_invocation<I, T>(argv: I) -> Result<Invocation, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let flags = Settings::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CliError::Info(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    })?;
    let settings = match &flags.config {
        Some(path) => {
            let file = read_config_file(path)?;
            flags.or(file)
        }
        None => flags,
    };
    settings.resolve(entropy_seed)
}

/// The JSON run report.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub generator: &'static str,
    pub config: Settings,
    pub seed_given: bool,
    pub passes: Vec<PassReport>,
    pub final_coverage: f64,
}

pub fn build_report(inv: &Invocation, passes: Vec<PassReport>) -> RunReport {
    let mut config = Settings::from_config(&inv.config);
    config.input = Some(inv.input.clone());
    config.output = Some(inv.output.clone());
    RunReport {
        generator: "splitmix64",
        config,
        seed_given: inv.seed_given,
        final_coverage: passes.last().map_or(0.0, |p| p.coverage),
        passes,
    }
}

/// Loads, renders, and writes the output image and optional report.
pub fn execute(inv: &Invocation) -> Result<RunReport, CliError> {
    let src = imgio::load(&inv.input).map_err(|source| CliError::Image {
        path: inv.input.clone(),
        source,
    })?;
    let out = render(&src, &inv.config).map_err(|e| usage(e.to_string()))?;
    imgio::save(&inv.output, &out.canvas).map_err(|source| CliError::Image {
        path: inv.output.clone(),
        source,
    })?;
    let report = build_report(inv, out.reports);
    if let Some(path) = &inv.report {
        let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
        text.push('\n');
        fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(report)
}

/// Full CLI entry point; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = parse_invocation(argv).and_then(|inv| {
        if !inv.seed_given {
            eprintln!("seed: {}", inv.config.seed);
        }
        execute(&inv)
    });
    match result {
        Ok(report) => {
            eprintln!(
                "{} passes, coverage {:.4}",
                report.passes.len(),
                report.final_coverage
            );
            EXIT_OK
        }
        Err(CliError::Info(text)) => {
            print!("{text}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

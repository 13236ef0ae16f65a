//! Command dispatch: load inputs, call the library, write the report.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use framelab_core::conditions::{
    carleson_delta, circle_concentration, rescaling_condition_b, uniform_separation_split,
    Verdict, DEFAULT_SEPARATION_THRESHOLD,
};
use framelab_core::experiments::{
    norm_ratio_experiment, run_sweep, Preset, SweepConfig, DEFAULT_PHASE_SEED,
    DEFAULT_TRUNCATION_FACTOR,
};
use framelab_core::frames::{frame_bounds_with_tol, COMPLETENESS_TOL};
use framelab_core::operators::SeedVector;
use framelab_core::systems::{build_system, IterativeSystemSpec, ScalingRule};
use framelab_core::Error as CoreError;
use thiserror::Error;

use crate::config::{parse_config, ConfigError};
use crate::report::{float, verdict_label, write_report, CarlesonReport, Format, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    FrameBounds,
    Carleson,
    NormRatio,
    CheckB,
    Concentration,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PresetName {
    Interpolating,
    Circle,
    Annulus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub tol: Option<f64>,
    pub rng_seed: Option<u64>,
    pub dims: Vec<usize>,
    pub preset: Option<PresetName>,
    pub params: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            config: None,
            out: None,
            format: Format::Json,
            tol: None,
            rng_seed: None,
            dims: Vec::new(),
            preset: None,
            params: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    /// Pass, complete, or indeterminate.
    Success = 0,
    /// A fail verdict or an incomplete family.
    Failure = 1,
    Error = 2,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug)]
pub struct Outcome {
    pub status: ExitStatus,
    pub summary: String,
    pub report: Option<Report>,
}

fn param<T: FromStr>(cfg: &RunConfig, key: &str) -> Result<Option<T>, RunError> {
    cfg.params
        .get(key)
        .map(|v| {
            v.parse()
                .map_err(|_| RunError::Usage(format!("--param {key}={v}: cannot parse value")))
        })
        .transpose()
}

fn required<T: FromStr>(cfg: &RunConfig, key: &str) -> Result<T, RunError> {
    param(cfg, key)?.ok_or_else(|| RunError::Usage(format!("missing --param {key}=<value>")))
}

fn allow_params(cfg: &RunConfig, allowed: &[&str]) -> Result<(), RunError> {
    match cfg.params.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(RunError::Usage(format!(
            "unknown --param {k} for this command (accepted: {})",
            if allowed.is_empty() { "none".to_string() } else { allowed.join(", ") }
        ))),
        None => Ok(()),
    }
}

fn load_spec(cfg: &RunConfig) -> Result<IterativeSystemSpec, RunError> {
    let path = cfg
        .config
        .as_ref()
        .ok_or_else(|| RunError::Usage("--config <path> is required".into()))?;
    let text = fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(parse_config(&text)?)
}

fn family(spec: &IterativeSystemSpec) -> Result<Vec<SeedVector>, RunError> {
    Ok(build_system(spec)?.into_iter().map(|v| v.vector).collect())
}

fn verdict_status(v: Verdict) -> ExitStatus {
    match v {
        Verdict::Fail => ExitStatus::Failure,
        Verdict::Pass | Verdict::Indeterminate => ExitStatus::Success,
    }
}

/// Runs a command and returns its report, exit status, and summary line.
pub fn execute(cfg: &RunConfig) -> Result<(Report, ExitStatus, String), RunError> {
    if cfg.command != Command::Sweep && (!cfg.dims.is_empty() || cfg.preset.is_some()) {
        return Err(RunError::Usage("--dims and --preset apply to sweep only".into()));
    }
    match cfg.command {
        Command::FrameBounds => {
            allow_params(cfg, &[])?;
            let spec = load_spec(cfg)?;
            let tol = cfg.tol.unwrap_or(COMPLETENESS_TOL);
            let r = frame_bounds_with_tol(&family(&spec)?, spec.model(), tol)?;
            let summary = format!(
                "frame-bounds: lower={} upper={} complete={} (d={}, M={})",
                float(r.lower),
                float(r.upper),
                r.complete,
                r.ambient_dim,
                r.family_size
            );
            let status = if r.complete { ExitStatus::Success } else { ExitStatus::Failure };
            Ok((Report::Frame(r), status, summary))
        }
        Command::Carleson => {
            allow_params(cfg, &["parts"])?;
            let spec = load_spec(cfg)?;
            let points: Vec<_> = spec.model().atoms().iter().map(|a| a.z).collect();
            let parts = param(cfg, "parts")?.unwrap_or(spec.seeds().len());
            let threshold = cfg.tol.unwrap_or(DEFAULT_SEPARATION_THRESHOLD);
            let delta = carleson_delta(&points)?;
            let split = uniform_separation_split(&points, parts, threshold)?;
            let summary = format!(
                "carleson: delta={} split into {parts} classes at threshold {threshold}: {}",
                float(delta),
                verdict_label(&split)
            );
            let status = verdict_status(split.verdict);
            Ok((Report::Carleson(CarlesonReport { delta, split }), status, summary))
        }
        Command::NormRatio => {
            allow_params(cfg, &["N", "seed"])?;
            let spec = load_spec(cfg)?;
            let count: usize = param(cfg, "N")?.unwrap_or(200);
            let index: usize = param(cfg, "seed")?.unwrap_or(0);
            let seed = spec
                .seeds()
                .get(index)
                .ok_or_else(|| RunError::Usage(format!("seed {index} does not exist")))?;
            let r = norm_ratio_experiment(spec.model(), seed, count).map_err(|e| match e {
                CoreError::KernelSeed { .. } => CoreError::KernelSeed { seed: index },
                other => other,
            })?;
            let summary = format!(
                "norm-ratio: rho_{}={} support_radius={} gap={}",
                count - 1,
                float(r.final_ratio),
                float(r.support_radius),
                float(r.gap)
            );
            Ok((Report::NormRatio(r), ExitStatus::Success, summary))
        }
        Command::CheckB => {
            allow_params(cfg, &["eta", "delta", "gap_cap"])?;
            let spec = load_spec(cfg)?;
            let eta = param(cfg, "eta")?.unwrap_or(0);
            let delta: f64 = required(cfg, "delta")?;
            let gap_cap = required(cfg, "gap_cap")?;
            let r = rescaling_condition_b(&spec, eta, delta, gap_cap)?;
            let summary = format!(
                "check-b: {} (eta={eta}, delta={delta}, gap_cap={gap_cap})",
                verdict_label(&r)
            );
            let status = verdict_status(r.verdict);
            Ok((Report::Condition(r), status, summary))
        }
        Command::Concentration => {
            allow_params(cfg, &["delta"])?;
            let spec = load_spec(cfg)?;
            let delta: f64 = required(cfg, "delta")?;
            let r = circle_concentration(spec.model(), spec.seeds(), delta)?;
            let summary = format!(
                "concentration: {} offenders across {} radii (delta={delta})",
                r.offender_count(),
                r.radius_count()
            );
            Ok((Report::Concentration(r), ExitStatus::Success, summary))
        }
        Command::Sweep => {
            if cfg.config.is_some() {
                return Err(RunError::Usage(
                    "sweep is configured by --preset, --dims and --param".into(),
                ));
            }
            let config = sweep_config(cfg)?;
            let r = run_sweep(&config)?;
            let status = if r.partial { ExitStatus::Error } else { ExitStatus::Success };
            let summary = format!(
                "sweep {}: {} dims; {}",
                r.preset,
                r.rows.len(),
                r.trend.summary
            );
            Ok((Report::Sweep(r), status, summary))
        }
    }
}

/// Builds the sweep configuration from `--preset`, `--dims`, `--rng-seed` and
/// `--param` (`factor`, `scaling`, `radius`, `r_min`, `r_max`).
pub fn sweep_config(cfg: &RunConfig) -> Result<SweepConfig, RunError> {
    let name = cfg
        .preset
        .ok_or_else(|| RunError::Usage("--preset is required for sweep".into()))?;
    let preset = match name {
        PresetName::Interpolating => {
            allow_params(cfg, &["factor", "scaling"])?;
            Preset::Interpolating
        }
        PresetName::Circle => {
            allow_params(cfg, &["factor", "scaling", "radius"])?;
            Preset::Circle {
                radius: param(cfg, "radius")?.unwrap_or(1.0),
            }
        }
        PresetName::Annulus => {
            allow_params(cfg, &["factor", "scaling", "r_min", "r_max"])?;
            Preset::Annulus {
                r_min: param(cfg, "r_min")?.unwrap_or(0.3),
                r_max: param(cfg, "r_max")?.unwrap_or(1.0),
                phase_seed: cfg.rng_seed.unwrap_or(DEFAULT_PHASE_SEED),
            }
        }
    };
    let scaling = match cfg.params.get("scaling").map(String::as_str) {
        None | Some("normalized") => ScalingRule::Normalized,
        Some("unscaled") => ScalingRule::Unscaled,
        Some(other) => {
            return Err(RunError::Usage(format!(
                "--param scaling={other}: expected normalized or unscaled"
            )))
        }
    };
    let dims = if cfg.dims.is_empty() { vec![8, 16, 32] } else { cfg.dims.clone() };
    let mut config = SweepConfig::new(preset, dims, scaling);
    config.factor = param(cfg, "factor")?.unwrap_or(DEFAULT_TRUNCATION_FACTOR);
    Ok(config)
}

/// Executes the command, writes the report to `--out` when given, and maps
/// every error to exit status 2.
pub fn dispatch(cfg: &RunConfig) -> Outcome {
    match execute(cfg) {
        Ok((report, status, summary)) => {
            if let Some(path) = &cfg.out {
                if let Err(source) = write_report(&report, cfg.format, path) {
                    let e = RunError::Io {
                        path: path.clone(),
                        source,
                    };
                    return Outcome {
                        status: ExitStatus::Error,
                        summary: format!("error: {e}"),
                        report: Some(report),
                    };
                }
            }
            Outcome {
                status,
                summary,
                report: Some(report),
            }
        }
        Err(e) => Outcome {
            status: ExitStatus::Error,
            summary: format!("error: {e}"),
            report: None,
        },
    }
}

//! Preset operators and dimension sweeps over iterative systems.
//!
//! A sweep builds one system per dimension `d` with `M = factor * d` powers
//! of a single seed and records its frame bounds. Bounds that stay put as `d`
//! grows are consistent with a frame in the limit; a lower bound that keeps
//! shrinking is consistent with a system that is not one. Finite truncations
//! give evidence only.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{frame_bounds, FrameReport};
use crate::operators::{
    norm_ratio_sequence, support_radius, NormalOperatorModel, SeedVector, SpectralAtom,
};
use crate::systems::{build_system, IterativeSystemSpec, ScalingRule};

/// Seed of the phase generator used by the annulus preset unless overridden.
pub const DEFAULT_PHASE_SEED: u64 = 0x5eed_f4a3;

pub const DEFAULT_TRUNCATION_FACTOR: usize = 8;

/// Relative tolerance when testing a sequence of lower bounds for monotonicity.
pub const MONOTONE_TOL: f64 = 1e-12;

/// Atoms `1 - 2^-n` for `n = 1..=d`, seed coordinates `sqrt(1 - z_n^2)`.
///
/// For `d > 53` the tail atoms round to exactly 1 in double precision and
/// merge into one atom of higher multiplicity carrying a zero seed block.
pub fn preset_interpolating_diagonal(d: usize) -> Result<(NormalOperatorModel, SeedVector)> {
    if d == 0 {
        return Err(Error::InvalidParameter {
            name: "d",
            reason: "must be at least 1".into(),
        });
    }
    let zs: Vec<f64> = (1..=d).map(|n| 1.0 - 0.5f64.powi(n as i32)).collect();
    let model = NormalOperatorModel::new(zs.iter().map(|&z| SpectralAtom::real(z, 1.0, 1)).collect())?;
    let seed: Vec<f64> = model
        .atoms()
        .iter()
        .flat_map(|a| {
            let x = (1.0 - a.z.re * a.z.re).max(0.0).sqrt();
            std::iter::repeat_n(x, a.mult)
        })
        .collect();
    Ok((model, SeedVector::from_real(&seed)?))
}

/// `d` equispaced atoms on `|z| = radius`, weight `1/d`, all-ones seed.
pub fn preset_circle(d: usize, radius: f64) -> Result<(NormalOperatorModel, SeedVector)> {
    if d < 2 {
        return Err(Error::InvalidParameter {
            name: "d",
            reason: "must be at least 2".into(),
        });
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter {
            name: "radius",
            reason: format!("must be positive, got {radius}"),
        });
    }
    let w = 1.0 / d as f64;
    let atoms = (0..d)
        .map(|k| SpectralAtom::new(circle_point(k, d, radius), w, 1))
        .collect();
    Ok((NormalOperatorModel::new(atoms)?, SeedVector::from_real(&vec![1.0; d])?))
}

fn circle_point(k: usize, d: usize, radius: f64) -> Complex64 {
    // exact values at the quarter turns
    if (4 * k).is_multiple_of(d) {
        let unit = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ][(4 * k / d) % 4];
        unit * radius
    } else {
        Complex64::from_polar(radius, TAU * k as f64 / d as f64)
    }
}

/// `d` atoms with moduli equispaced on `[r_min, r_max]`, phases drawn from a
/// ChaCha8 generator seeded with `phase_seed`, weight `1/d`, all-ones seed.
pub fn preset_annulus(
    d: usize,
    r_min: f64,
    r_max: f64,
    phase_seed: u64,
) -> Result<(NormalOperatorModel, SeedVector)> {
    if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
        return Err(Error::InvalidRadii { r_min, r_max });
    }
    if d < 2 {
        return Err(Error::InvalidParameter {
            name: "d",
            reason: "must be at least 2".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(phase_seed);
    let w = 1.0 / d as f64;
    let step = (r_max - r_min) / (d - 1) as f64;
    let atoms = (0..d)
        .map(|k| {
            let r = if k == d - 1 { r_max } else { r_min + step * k as f64 };
            let theta: f64 = rng.gen_range(0.0..TAU);
            SpectralAtom::new(Complex64::from_polar(r, theta), w, 1)
        })
        .collect();
    Ok((NormalOperatorModel::new(atoms)?, SeedVector::from_real(&vec![1.0; d])?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Preset {
    Interpolating,
    Circle { radius: f64 },
    Annulus { r_min: f64, r_max: f64, phase_seed: u64 },
}

impl Preset {
    pub fn build(&self, d: usize) -> Result<(NormalOperatorModel, SeedVector)> {
        match *self {
            Preset::Interpolating => preset_interpolating_diagonal(d),
            Preset::Circle { radius } => preset_circle(d, radius),
            Preset::Annulus {
                r_min,
                r_max,
                phase_seed,
            } => preset_annulus(d, r_min, r_max, phase_seed),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Preset::Interpolating => "interpolating",
            Preset::Circle { .. } => "circle",
            Preset::Annulus { .. } => "annulus",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub preset: Preset,
    pub dims: Vec<usize>,
    /// `M = factor * d`.
    pub factor: usize,
    pub scaling: ScalingRule,
}

impl SweepConfig {
    pub fn new(preset: Preset, dims: Vec<usize>, scaling: ScalingRule) -> Self {
        Self {
            preset,
            dims,
            factor: DEFAULT_TRUNCATION_FACTOR,
            scaling,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.dims.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter {
                name: "dims",
                reason: "must be nonempty and strictly increasing".into(),
            });
        }
        if self.factor < 2 {
            return Err(Error::InvalidParameter {
                name: "factor",
                reason: format!("must be at least 2, got {}", self.factor),
            });
        }
        if matches!(self.scaling, ScalingRule::Explicit { .. }) {
            return Err(Error::InvalidScaling(
                "sweeps support unscaled, normalized and shifted rules".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub d: usize,
    pub m: usize,
    pub lower: f64,
    pub upper: f64,
    /// `upper / lower`; `None` when `lower = 0`.
    pub ratio: Option<f64>,
    pub complete: bool,
    /// Set when this dimension could not be evaluated.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trend {
    /// Every step strictly decreases the lower bound (beyond `MONOTONE_TOL`).
    pub lower_strictly_decreasing: bool,
    /// No step increases the lower bound beyond `MONOTONE_TOL`.
    pub lower_nonincreasing: bool,
    /// `lower(d_max) / lower(d_min)`; `None` when `lower(d_min) = 0` or fewer than two rows.
    pub decay_factor: Option<f64>,
    /// Smallest per-step relative decrease `1 - lower(d_(k+1)) / lower(d_k)`.
    pub min_step_decrease: Option<f64>,
    /// Relative change of the lower bound between the last two rows.
    pub last_step_change: Option<f64>,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub preset: String,
    pub rows: Vec<SweepRow>,
    pub trend: Trend,
    /// True when some dimension failed and its row is flagged.
    pub partial: bool,
}

fn evaluate(config: &SweepConfig, d: usize) -> Result<(usize, FrameReport)> {
    let m = config.factor * d;
    let (model, seed) = config.preset.build(d)?;
    let spec = IterativeSystemSpec::with_all_indices(model, vec![seed], config.scaling.clone(), m)?;
    let family: Vec<SeedVector> = build_system(&spec)?.into_iter().map(|v| v.vector).collect();
    Ok((m, frame_bounds(&family, spec.model())?))
}

fn trend(rows: &[SweepRow]) -> Trend {
    let lowers: Vec<f64> = rows.iter().filter(|r| r.error.is_none()).map(|r| r.lower).collect();
    let steps: Vec<(f64, f64)> = lowers.windows(2).map(|w| (w[0], w[1])).collect();
    let strictly = !steps.is_empty()
        && steps.iter().all(|&(a, b)| b < a - MONOTONE_TOL * a.abs());
    let nonincreasing = steps.iter().all(|&(a, b)| b <= a + MONOTONE_TOL * a.abs());
    let decay_factor = match (lowers.first(), lowers.last()) {
        (Some(&a), Some(&b)) if lowers.len() > 1 && a > 0.0 => Some(b / a),
        _ => None,
    };
    let min_step_decrease = steps
        .iter()
        .map(|&(a, b)| if a > 0.0 { 1.0 - b / a } else { f64::NAN })
        .try_fold(f64::INFINITY, |acc: f64, x| (!x.is_nan()).then_some(acc.min(x)))
        .filter(|_| !steps.is_empty());
    let last_step_change = steps
        .last()
        .and_then(|&(a, b)| (a > 0.0).then(|| (b - a).abs() / a));
    let summary = if rows.iter().any(|r| r.error.is_some()) {
        "partial sweep: some dimensions failed".to_string()
    } else if strictly {
        format!(
            "lower bound strictly decreasing across dims (lower(d_max)/lower(d_min) = {}); consistent with a non-frame limit at this scale",
            decay_factor.map_or("n/a".to_string(), |f| format!("{f:.3e}"))
        )
    } else if last_step_change.is_some_and(|c| c <= 0.2) {
        "lower bound stable across the last doubling; consistent with a frame limit at this scale"
            .to_string()
    } else {
        "no clear trend at this scale".to_string()
    };
    Trend {
        lower_strictly_decreasing: strictly,
        lower_nonincreasing: nonincreasing,
        decay_factor,
        min_step_decrease,
        last_step_change,
        summary,
    }
}

/// Frame bounds for every dimension in the config. Rows are evaluated in
/// parallel and reported in dimension order; a failing dimension yields a
/// flagged row and a partial report.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let rows: Vec<SweepRow> = config
        .dims
        .par_iter()
        .map(|&d| match evaluate(config, d) {
            Ok((m, r)) => SweepRow {
                d,
                m,
                lower: r.lower,
                upper: r.upper,
                ratio: (r.lower > 0.0).then(|| r.upper / r.lower),
                complete: r.complete,
                error: None,
            },
            Err(e) => SweepRow {
                d,
                m: config.factor * d,
                lower: 0.0,
                upper: 0.0,
                ratio: None,
                complete: false,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let partial = rows.iter().any(|r| r.error.is_some());
    Ok(SweepReport {
        preset: config.preset.label().to_string(),
        trend: trend(&rows),
        rows,
        partial,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRatioReport {
    /// `(n, rho_n)` for `n = 0..N`.
    pub table: Vec<(usize, f64)>,
    pub support_radius: f64,
    pub final_ratio: f64,
    /// `support_radius - rho_(N-1)`.
    pub gap: f64,
}

pub fn norm_ratio_experiment(
    model: &NormalOperatorModel,
    seed: &SeedVector,
    count: usize,
) -> Result<NormRatioReport> {
    if count == 0 {
        return Err(Error::InvalidParameter {
            name: "N",
            reason: "must be at least 1".into(),
        });
    }
    let rho = norm_ratio_sequence(model, seed, count).map_err(|e| match e {
        Error::KernelVector => Error::KernelSeed { seed: 0 },
        other => other,
    })?;
    let radius = support_radius(model, seed)?;
    let final_ratio = *rho.last().unwrap();
    Ok(NormRatioReport {
        table: rho.into_iter().enumerate().collect(),
        support_radius: radius,
        final_ratio,
        gap: radius - final_ratio,
    })
}

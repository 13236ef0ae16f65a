//! Iterative systems `{c_(n,x) A^n x}` over seeds `x` and indices `n in J_x`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::log_sum_exp;
use crate::operators::{
    in_kernel, power_log_terms, power_norm_log, NormalOperatorModel, SeedVector,
};

/// How the powers of each seed are rescaled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ScalingRule {
    Unscaled,
    /// `c_n = 1 / ||A^n x||`.
    Normalized,
    /// `c_n = 1 / ||A^(n + o_n) x||` with `|o_n| <= eta`. A single offset
    /// applies to every index; otherwise offsets align with index positions.
    ShiftedNormalized { offsets: Vec<i64>, eta: usize },
    /// One nonzero coefficient per index position, per seed.
    Explicit { coefficients: Vec<Vec<Complex64>> },
}

/// The powers `J_x` used for one seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum IndexSet {
    /// `0, 1, ..., count - 1`.
    All { count: usize },
    Arithmetic { start: usize, step: usize, count: usize },
    /// Strictly increasing, nonempty.
    Explicit { values: Vec<usize> },
}

impl IndexSet {
    pub fn indices(&self) -> Vec<usize> {
        match self {
            IndexSet::All { count } => (0..*count).collect(),
            IndexSet::Arithmetic { start, step, count } => {
                (0..*count).map(|k| start + k * step).collect()
            }
            IndexSet::Explicit { values } => values.clone(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            IndexSet::All { count } | IndexSet::Arithmetic { count, .. } => *count,
            IndexSet::Explicit { values } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self, seed: usize) -> Result<()> {
        let invalid = |reason: &str| Error::InvalidIndexSet {
            seed,
            reason: reason.into(),
        };
        match self {
            IndexSet::All { count: 0 }
            | IndexSet::Arithmetic { count: 0, .. } => Err(invalid("must be nonempty")),
            IndexSet::Arithmetic { step: 0, count, .. } if *count > 1 => {
                Err(invalid("step must be positive"))
            }
            IndexSet::Explicit { values } if values.is_empty() => Err(invalid("must be nonempty")),
            IndexSet::Explicit { values } if values.windows(2).any(|w| w[1] <= w[0]) => {
                Err(invalid("values must be strictly increasing"))
            }
            _ => Ok(()),
        }
    }
}

/// A fully validated description of `{c_(n,x) A^n x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterativeSystemSpec {
    model: NormalOperatorModel,
    seeds: Vec<SeedVector>,
    index_sets: Vec<IndexSet>,
    rule: ScalingRule,
    truncation: usize,
}

impl IterativeSystemSpec {
    pub fn new(
        model: NormalOperatorModel,
        seeds: Vec<SeedVector>,
        index_sets: Vec<IndexSet>,
        rule: ScalingRule,
        truncation: usize,
    ) -> Result<Self> {
        if seeds.is_empty() {
            return Err(Error::LengthMismatch {
                what: "seeds",
                expected: 1,
                found: 0,
            });
        }
        if index_sets.len() != seeds.len() {
            return Err(Error::LengthMismatch {
                what: "index sets per seed",
                expected: seeds.len(),
                found: index_sets.len(),
            });
        }
        if truncation == 0 {
            return Err(Error::InvalidParameter {
                name: "truncation",
                reason: "must be positive".into(),
            });
        }
        for (i, (seed, set)) in seeds.iter().zip(&index_sets).enumerate() {
            if seed.len() != model.dim() {
                return Err(Error::DimensionMismatch {
                    expected: model.dim(),
                    found: seed.len(),
                });
            }
            set.validate(i)?;
            if set.len() > truncation {
                return Err(Error::InvalidIndexSet {
                    seed: i,
                    reason: format!("{} indices exceed truncation {}", set.len(), truncation),
                });
            }
        }
        match &rule {
            ScalingRule::ShiftedNormalized { offsets, eta } => {
                if *eta == 0 {
                    return Err(Error::InvalidScaling("eta must be a positive integer".into()));
                }
                if offsets.is_empty() {
                    return Err(Error::InvalidScaling("offsets must be nonempty".into()));
                }
                if offsets.len() > 1 {
                    for set in &index_sets {
                        if offsets.len() < set.len() {
                            return Err(Error::LengthMismatch {
                                what: "shifted offsets",
                                expected: set.len(),
                                found: offsets.len(),
                            });
                        }
                    }
                }
            }
            ScalingRule::Explicit { coefficients } => {
                if coefficients.len() != seeds.len() {
                    return Err(Error::LengthMismatch {
                        what: "explicit coefficient lists",
                        expected: seeds.len(),
                        found: coefficients.len(),
                    });
                }
                for (coeffs, set) in coefficients.iter().zip(&index_sets) {
                    if coeffs.len() != set.len() {
                        return Err(Error::LengthMismatch {
                            what: "explicit coefficients",
                            expected: set.len(),
                            found: coeffs.len(),
                        });
                    }
                    if coeffs.iter().any(|c| *c == Complex64::new(0.0, 0.0) || !c.is_finite()) {
                        return Err(Error::InvalidScaling(
                            "explicit coefficients must be nonzero and finite".into(),
                        ));
                    }
                }
            }
            ScalingRule::Unscaled | ScalingRule::Normalized => {}
        }
        Ok(Self {
            model,
            seeds,
            index_sets,
            rule,
            truncation,
        })
    }

    /// Every seed uses `J = {0, ..., truncation - 1}`.
    pub fn with_all_indices(
        model: NormalOperatorModel,
        seeds: Vec<SeedVector>,
        rule: ScalingRule,
        truncation: usize,
    ) -> Result<Self> {
        let sets = vec![IndexSet::All { count: truncation }; seeds.len()];
        Self::new(model, seeds, sets, rule, truncation)
    }

    pub fn model(&self) -> &NormalOperatorModel {
        &self.model
    }

    pub fn seeds(&self) -> &[SeedVector] {
        &self.seeds
    }

    pub fn index_sets(&self) -> &[IndexSet] {
        &self.index_sets
    }

    pub fn rule(&self) -> &ScalingRule {
        &self.rule
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }
}

/// `log |c_(n,x)|` and `arg c_(n,x)` for one index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingEntry {
    pub n: usize,
    pub log_abs: f64,
    pub phase: f64,
}

fn shifted_index(n: usize, offset: i64, eta: usize, seed: usize) -> Result<usize> {
    let i = n as i64 + offset;
    if offset.unsigned_abs() as usize > eta || i < 0 {
        return Err(Error::OffsetOutOfRange {
            seed,
            n,
            offset,
            eta,
        });
    }
    Ok(i as usize)
}

/// Scaling coefficients of every seed, in index order.
pub fn scaling_coefficients(spec: &IterativeSystemSpec) -> Result<Vec<Vec<ScalingEntry>>> {
    let model = &spec.model;
    spec.seeds
        .iter()
        .zip(&spec.index_sets)
        .enumerate()
        .map(|(s, (seed, set))| {
            let indices = set.indices();
            let needs_norm = matches!(
                spec.rule,
                ScalingRule::Normalized | ScalingRule::ShiftedNormalized { .. }
            );
            if needs_norm && (seed.is_zero() || in_kernel(model, seed)?) {
                return Err(Error::KernelSeed { seed: s });
            }
            indices
                .iter()
                .enumerate()
                .map(|(pos, &n)| {
                    let (log_abs, phase) = match &spec.rule {
                        ScalingRule::Unscaled => (0.0, 0.0),
                        ScalingRule::Normalized => (-power_norm_log(model, seed, n)?, 0.0),
                        ScalingRule::ShiftedNormalized { offsets, eta } => {
                            let offset = if offsets.len() == 1 {
                                offsets[0]
                            } else {
                                offsets[pos]
                            };
                            let i = shifted_index(n, offset, *eta, s)?;
                            (-power_norm_log(model, seed, i)?, 0.0)
                        }
                        ScalingRule::Explicit { coefficients } => {
                            let c = coefficients[s][pos];
                            (c.norm().ln(), c.arg())
                        }
                    };
                    Ok(ScalingEntry { n, log_abs, phase })
                })
                .collect()
        })
        .collect()
}

/// One member `c_(n,x) A^n x` of an iterative system.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemVector {
    pub seed: usize,
    pub n: usize,
    pub vector: SeedVector,
}

/// `A^n x` scaled by `exp(log_scale + i phase)`, with every coordinate built
/// from its log-magnitude so intermediate powers never overflow.
fn scaled_power(
    model: &NormalOperatorModel,
    x: &SeedVector,
    n: usize,
    log_scale: f64,
    phase: f64,
) -> Result<SeedVector> {
    let mut out = vec![Complex64::new(0.0, 0.0); x.len()];
    let nf = n as f64;
    for (i, atom) in model.atoms().iter().enumerate() {
        let (log_mod, angle) = if n == 0 {
            (0.0, 0.0)
        } else if atom.modulus() == 0.0 {
            continue;
        } else {
            (nf * atom.modulus().ln(), nf * atom.z.arg())
        };
        for k in model.block(i) {
            let xk = x.as_slice()[k];
            if xk == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mag = (log_mod + log_scale + xk.norm().ln()).exp();
            out[k] = Complex64::from_polar(mag, angle + phase + xk.arg());
        }
    }
    SeedVector::new(out)
}

/// Builds the family, seed-major and in increasing `n` within each seed.
pub fn build_system(spec: &IterativeSystemSpec) -> Result<Vec<SystemVector>> {
    let coeffs = scaling_coefficients(spec)?;
    let mut family = Vec::with_capacity(coeffs.iter().map(Vec::len).sum());
    for (s, (seed, entries)) in spec.seeds.iter().zip(&coeffs).enumerate() {
        for e in entries {
            family.push(SystemVector {
                seed: s,
                n: e.n,
                vector: scaled_power(&spec.model, seed, e.n, e.log_abs, e.phase)?,
            });
        }
    }
    Ok(family)
}

/// `A^n x / ||A^n x||`.
pub fn normalized_vector(
    model: &NormalOperatorModel,
    x: &SeedVector,
    n: usize,
) -> Result<SeedVector> {
    let norms = model.block_norms(x)?;
    if norms.iter().all(|&b| b == 0.0) {
        return Err(Error::ZeroVector);
    }
    if n > 0 && in_kernel(model, x)? {
        return Err(Error::KernelSeed { seed: 0 });
    }
    // exponents n*log|z| - log||A^n x|| stay bounded whatever the size of n
    let log_norm = 0.5 * log_sum_exp(&power_log_terms(model, &norms, n))?;
    scaled_power(model, x, n, -log_norm, 0.0)
}

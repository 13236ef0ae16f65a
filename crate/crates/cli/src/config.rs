//! JSON configuration for an iterative system.
//!
//! ```json
//! {
//!   "operator": { "atoms": [ { "z": { "re": 0.5, "im": 0.0 }, "weight": 1.0, "mult": 1 } ] },
//!   "seeds": [ [ { "re": 1.0, "im": 0.0 } ] ],
//!   "indices": [ { "type": "all", "M": 4 } ],
//!   "scaling": { "type": "unscaled" },
//!   "truncation": 4
//! }
//! ```
//!
//! `indices` is optional and defaults to `{"type": "all", "M": truncation}`
//! for every seed; `mult` defaults to 1.

use framelab_core::operators::{NormalOperatorModel, SeedVector, SpectralAtom};
use framelab_core::systems::{scaling_coefficients, IndexSet, IterativeSystemSpec, ScalingRule};
use framelab_core::Error as CoreError;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid {path}: {reason}")]
    Validation { path: String, reason: String },
}

impl ConfigError {
    fn at(path: impl Into<String>, reason: impl ToString) -> Self {
        ConfigError::Validation {
            path: path.into(),
            reason: reason.to_string(),
        }
    }

    /// Field path of a validation error.
    pub fn path(&self) -> Option<&str> {
        match self {
            ConfigError::Validation { path, .. } => Some(path),
            ConfigError::Parse { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<ComplexValue> for Complex64 {
    fn from(c: ComplexValue) -> Self {
        Complex64::new(c.re, c.im)
    }
}

impl From<Complex64> for ComplexValue {
    fn from(c: Complex64) -> Self {
        ComplexValue { re: c.re, im: c.im }
    }
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    pub z: ComplexValue,
    pub weight: f64,
    #[serde(default = "one")]
    pub mult: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    pub atoms: Vec<AtomConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum IndexConfig {
    All {
        #[serde(rename = "M")]
        m: usize,
    },
    Arithmetic {
        start: usize,
        step: usize,
        #[serde(rename = "M")]
        m: usize,
    },
    Explicit {
        values: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalingConfig {
    Unscaled,
    Normalized,
    Shifted { offsets: Vec<i64>, eta: usize },
    Explicit { coefficients: Vec<Vec<ComplexValue>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub operator: OperatorConfig,
    pub seeds: Vec<Vec<ComplexValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indices: Option<Vec<IndexConfig>>,
    pub scaling: ScalingConfig,
    pub truncation: usize,
}

/// Parses and fully validates a configuration, including dimensions and the
/// scaling coefficients the rule would produce.
pub fn parse_config(text: &str) -> Result<IterativeSystemSpec, ConfigError> {
    let raw: SystemConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    raw.to_spec()
}

/// Inverse of [`parse_config`]; index sets are always written out.
pub fn serialize_spec(spec: &IterativeSystemSpec) -> String {
    let mut text = serde_json::to_string_pretty(&SystemConfig::from_spec(spec))
        .expect("config types serialize");
    text.push('\n');
    text
}

impl SystemConfig {
    pub fn from_spec(spec: &IterativeSystemSpec) -> Self {
        let complex = |v: &[Complex64]| v.iter().map(|&c| c.into()).collect::<Vec<ComplexValue>>();
        SystemConfig {
            operator: OperatorConfig {
                atoms: spec
                    .model()
                    .atoms()
                    .iter()
                    .map(|a| AtomConfig {
                        z: a.z.into(),
                        weight: a.weight,
                        mult: a.mult,
                    })
                    .collect(),
            },
            seeds: spec.seeds().iter().map(|s| complex(s.as_slice())).collect(),
            indices: Some(
                spec.index_sets()
                    .iter()
                    .map(|set| match set {
                        IndexSet::All { count } => IndexConfig::All { m: *count },
                        IndexSet::Arithmetic { start, step, count } => IndexConfig::Arithmetic {
                            start: *start,
                            step: *step,
                            m: *count,
                        },
                        IndexSet::Explicit { values } => IndexConfig::Explicit {
                            values: values.clone(),
                        },
                    })
                    .collect(),
            ),
            scaling: match spec.rule() {
                ScalingRule::Unscaled => ScalingConfig::Unscaled,
                ScalingRule::Normalized => ScalingConfig::Normalized,
                ScalingRule::ShiftedNormalized { offsets, eta } => ScalingConfig::Shifted {
                    offsets: offsets.clone(),
                    eta: *eta,
                },
                ScalingRule::Explicit { coefficients } => ScalingConfig::Explicit {
                    coefficients: coefficients.iter().map(|c| complex(c)).collect(),
                },
            },
            truncation: spec.truncation(),
        }
    }

    pub fn to_spec(&self) -> Result<IterativeSystemSpec, ConfigError> {
        let atoms = &self.operator.atoms;
        if atoms.is_empty() {
            return Err(ConfigError::at("operator.atoms", "must be nonempty"));
        }
        for (i, a) in atoms.iter().enumerate() {
            if !(a.weight > 0.0) {
                return Err(ConfigError::at(format!("atoms[{i}].weight"), "must be positive"));
            }
            if a.mult == 0 {
                return Err(ConfigError::at(format!("atoms[{i}].mult"), "must be at least 1"));
            }
            if let Some(j) = atoms[..i].iter().position(|b| b.z == a.z) {
                return Err(ConfigError::at(
                    format!("atoms[{i}].z"),
                    format!("repeats atoms[{j}].z; raise its mult instead"),
                ));
            }
        }
        let model = NormalOperatorModel::new(
            atoms
                .iter()
                .map(|a| SpectralAtom::new(a.z.into(), a.weight, a.mult))
                .collect(),
        )
        .map_err(field_path)?;

        if self.seeds.is_empty() {
            return Err(ConfigError::at("seeds", "must be nonempty"));
        }
        let mut seeds = Vec::with_capacity(self.seeds.len());
        for (i, s) in self.seeds.iter().enumerate() {
            if s.len() != model.dim() {
                return Err(ConfigError::at(
                    format!("seeds[{i}]"),
                    format!("has {} coordinates, operator dimension is {}", s.len(), model.dim()),
                ));
            }
            let coords = s.iter().map(|&c| c.into()).collect();
            seeds.push(SeedVector::new(coords).map_err(|e| ConfigError::at(format!("seeds[{i}]"), e))?);
        }

        let index_sets = match &self.indices {
            None => vec![IndexSet::All { count: self.truncation }; seeds.len()],
            Some(list) if list.len() != seeds.len() => {
                return Err(ConfigError::at(
                    "indices",
                    format!("expected one entry per seed ({}), found {}", seeds.len(), list.len()),
                ))
            }
            Some(list) => list
                .iter()
                .map(|c| match c {
                    IndexConfig::All { m } => IndexSet::All { count: *m },
                    IndexConfig::Arithmetic { start, step, m } => IndexSet::Arithmetic {
                        start: *start,
                        step: *step,
                        count: *m,
                    },
                    IndexConfig::Explicit { values } => IndexSet::Explicit {
                        values: values.clone(),
                    },
                })
                .collect(),
        };

        let rule = match &self.scaling {
            ScalingConfig::Unscaled => ScalingRule::Unscaled,
            ScalingConfig::Normalized => ScalingRule::Normalized,
            ScalingConfig::Shifted { offsets, eta } => ScalingRule::ShiftedNormalized {
                offsets: offsets.clone(),
                eta: *eta,
            },
            ScalingConfig::Explicit { coefficients } => ScalingRule::Explicit {
                coefficients: coefficients
                    .iter()
                    .map(|c| c.iter().map(|&z| z.into()).collect())
                    .collect(),
            },
        };

        let spec = IterativeSystemSpec::new(model, seeds, index_sets, rule, self.truncation)
            .map_err(field_path)?;
        scaling_coefficients(&spec).map_err(field_path)?;
        Ok(spec)
    }
}

fn field_path(e: CoreError) -> ConfigError {
    let path = match &e {
        CoreError::InvalidAtom { index, field, .. } => format!("atoms[{index}].{field}"),
        CoreError::NoAtoms => "operator.atoms".into(),
        CoreError::InvalidIndexSet { seed, .. } => format!("indices[{seed}]"),
        CoreError::KernelSeed { seed } => format!("seeds[{seed}]"),
        CoreError::InvalidParameter { name, .. } => (*name).into(),
        _ => "scaling".into(),
    };
    ConfigError::at(path, e)
}

//! Normal operators with finite atomic spectral measure, written directly in
//! spectral coordinates.
//!
//! A model is a list of atoms `(z, w, m)`: the operator multiplies an
//! `m`-dimensional coordinate block by `z`, and the block contributes
//! `w * |block|^2` to the squared norm. This is multiplication by `z` on
//! `L^2(mu)` for the atomic measure `mu = sum w * delta_z`, with multiplicity.

use std::ops::Range;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::log_sum_exp;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralAtom {
    pub z: Complex64,
    pub weight: f64,
    pub mult: usize,
}

impl SpectralAtom {
    pub fn new(z: Complex64, weight: f64, mult: usize) -> Self {
        Self { z, weight, mult }
    }

    pub fn real(z: f64, weight: f64, mult: usize) -> Self {
        Self::new(Complex64::new(z, 0.0), weight, mult)
    }

    pub fn modulus(&self) -> f64 {
        self.z.norm()
    }
}

/// Diagonalized normal operator: distinct spectral atoms with weights and
/// multiplicities. Coordinates are laid out atom by atom.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalOperatorModel {
    atoms: Vec<SpectralAtom>,
    offsets: Vec<usize>,
}

impl NormalOperatorModel {
    /// Validates the atoms and merges atoms sharing the same `z`.
    ///
    /// Merging adds multiplicities and keeps the first occurrence's position,
    /// so it is only possible when the merged atoms carry the same weight.
    pub fn new(atoms: Vec<SpectralAtom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::NoAtoms);
        }
        let mut merged: Vec<SpectralAtom> = Vec::with_capacity(atoms.len());
        for (index, atom) in atoms.into_iter().enumerate() {
            if !atom.z.is_finite() {
                return Err(Error::InvalidAtom {
                    index,
                    field: "z",
                    reason: "must be finite".into(),
                });
            }
            if !(atom.weight > 0.0) || !atom.weight.is_finite() {
                return Err(Error::InvalidAtom {
                    index,
                    field: "weight",
                    reason: format!("must be positive and finite, got {}", atom.weight),
                });
            }
            if atom.mult == 0 {
                return Err(Error::InvalidAtom {
                    index,
                    field: "mult",
                    reason: "must be at least 1".into(),
                });
            }
            match merged.iter_mut().find(|a| a.z == atom.z) {
                Some(existing) if existing.weight == atom.weight => existing.mult += atom.mult,
                Some(existing) => {
                    return Err(Error::InvalidAtom {
                        index,
                        field: "z",
                        reason: format!(
                            "duplicates an earlier atom with weight {} (got weight {})",
                            existing.weight, atom.weight
                        ),
                    })
                }
                None => merged.push(atom),
            }
        }
        let mut offsets = Vec::with_capacity(merged.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for a in &merged {
            acc += a.mult;
            offsets.push(acc);
        }
        Ok(Self {
            atoms: merged,
            offsets,
        })
    }

    /// One atom per value, weight 1, multiplicity 1.
    pub fn diagonal(values: &[Complex64]) -> Result<Self> {
        Self::new(
            values
                .iter()
                .map(|&z| SpectralAtom::new(z, 1.0, 1))
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[SpectralAtom] {
        &self.atoms
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn op_norm(&self) -> f64 {
        self.atoms.iter().map(SpectralAtom::modulus).fold(0.0, f64::max)
    }

    /// Coordinate range of atom `i`.
    pub fn block(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Per-coordinate weights (each atom's weight repeated `mult` times).
    pub fn coordinate_weights(&self) -> Vec<f64> {
        self.atoms
            .iter()
            .flat_map(|a| std::iter::repeat_n(a.weight, a.mult))
            .collect()
    }

    fn check(&self, v: &SeedVector) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Weighted inner product, linear in the first argument.
    pub fn inner(&self, u: &SeedVector, v: &SeedVector) -> Result<Complex64> {
        self.check(u)?;
        self.check(v)?;
        Ok(self
            .atoms
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let r = self.block(i);
                let dot: Complex64 = u.0[r.clone()]
                    .iter()
                    .zip(&v.0[r])
                    .map(|(x, y)| x * y.conj())
                    .sum();
                dot * a.weight
            })
            .sum())
    }

    pub fn norm(&self, v: &SeedVector) -> Result<f64> {
        Ok(self.inner(v, v)?.re.max(0.0).sqrt())
    }

    /// Euclidean norm of each atom block of `v` (unweighted).
    pub fn block_norms(&self, v: &SeedVector) -> Result<Vec<f64>> {
        self.check(v)?;
        Ok((0..self.atoms.len())
            .map(|i| {
                v.0[self.block(i)]
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .collect())
    }
}

/// Coefficients of a vector in the spectral coordinates of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SeedVector(Vec<Complex64>);

impl SeedVector {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if let Some(index) = coeffs.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(coeffs))
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); dim])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|z| *z == Complex64::new(0.0, 0.0))
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self(self.0.iter().map(|z| z * c).collect())
    }
}

impl std::ops::Index<usize> for SeedVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

/// Multiplies each atom block by its spectral value.
pub fn apply(model: &NormalOperatorModel, v: &SeedVector) -> Result<SeedVector> {
    model.check(v)?;
    let mut out = v.0.clone();
    for (i, a) in model.atoms.iter().enumerate() {
        for x in &mut out[model.block(i)] {
            *x *= a.z;
        }
    }
    Ok(SeedVector(out))
}

/// Per-atom terms `log(w * |z|^(2n) * |block|^2)`; `-inf` for atoms that
/// contribute nothing.
pub(crate) fn power_log_terms(
    model: &NormalOperatorModel,
    block_norms: &[f64],
    n: usize,
) -> Vec<f64> {
    model
        .atoms
        .iter()
        .zip(block_norms)
        .map(|(a, &b)| {
            if b == 0.0 {
                return f64::NEG_INFINITY;
            }
            let base = a.weight.ln() + 2.0 * b.ln();
            if n == 0 {
                base
            } else if a.z == Complex64::new(0.0, 0.0) {
                f64::NEG_INFINITY
            } else {
                base + 2.0 * n as f64 * a.modulus().ln()
            }
        })
        .collect()
}

fn nonzero_block_norms(model: &NormalOperatorModel, v: &SeedVector) -> Result<Vec<f64>> {
    let norms = model.block_norms(v)?;
    if norms.iter().all(|&b| b == 0.0) {
        return Err(Error::ZeroVector);
    }
    Ok(norms)
}

/// `log ||A^n v||`, accumulated in the log domain so large `n` neither
/// overflows nor underflows. Returns `-inf` when `A^n v = 0`.
pub fn power_norm_log(model: &NormalOperatorModel, v: &SeedVector, n: usize) -> Result<f64> {
    let norms = nonzero_block_norms(model, v)?;
    Ok(0.5 * log_sum_exp(&power_log_terms(model, &norms, n))?)
}

/// Largest `|z|` over atoms on which `v` has a nonzero block.
pub fn support_radius(model: &NormalOperatorModel, v: &SeedVector) -> Result<f64> {
    let norms = nonzero_block_norms(model, v)?;
    Ok(model
        .atoms
        .iter()
        .zip(&norms)
        .filter(|(_, &b)| b > 0.0)
        .map(|(a, _)| a.modulus())
        .fold(0.0, f64::max))
}

/// Ratios `||A^(n+1) v|| / ||A^n v||` for `n = 0..count`.
pub fn norm_ratio_sequence(
    model: &NormalOperatorModel,
    v: &SeedVector,
    count: usize,
) -> Result<Vec<f64>> {
    let norms = nonzero_block_norms(model, v)?;
    let log_norm = |n: usize| -> Result<f64> {
        Ok(0.5 * log_sum_exp(&power_log_terms(model, &norms, n))?)
    };
    let mut prev = log_norm(0)?;
    let mut out = Vec::with_capacity(count);
    for n in 0..count {
        let next = log_norm(n + 1)?;
        if next == f64::NEG_INFINITY {
            return Err(Error::KernelVector);
        }
        out.push((next - prev).exp());
        prev = next;
    }
    Ok(out)
}

/// A single ratio `||A^(n+1) v|| / ||A^n v||`, without computing the
/// preceding ones.
pub fn norm_ratio_at(model: &NormalOperatorModel, v: &SeedVector, n: usize) -> Result<f64> {
    let norms = nonzero_block_norms(model, v)?;
    let lo = 0.5 * log_sum_exp(&power_log_terms(model, &norms, n))?;
    let hi = 0.5 * log_sum_exp(&power_log_terms(model, &norms, n + 1))?;
    if hi == f64::NEG_INFINITY {
        return Err(Error::KernelVector);
    }
    Ok((hi - lo).exp())
}

pub fn is_invertible(model: &NormalOperatorModel) -> bool {
    model.atoms.iter().all(|a| a.modulus() > 0.0)
}

/// True when `v` lies in `ker(A)`, i.e. `Av = 0`.
pub fn in_kernel(model: &NormalOperatorModel, v: &SeedVector) -> Result<bool> {
    let norms = model.block_norms(v)?;
    Ok(model
        .atoms
        .iter()
        .zip(&norms)
        .all(|(a, &b)| b == 0.0 || a.modulus() == 0.0))
}

/// Splits `v` into its part on `z = 0` atoms (the kernel) and the rest.
pub fn kernel_component(
    model: &NormalOperatorModel,
    v: &SeedVector,
) -> Result<(SeedVector, SeedVector)> {
    model.check(v)?;
    let mut kernel = SeedVector::zeros(v.len());
    let mut rest = SeedVector::zeros(v.len());
    for (i, a) in model.atoms.iter().enumerate() {
        let target = if a.modulus() == 0.0 {
            &mut kernel
        } else {
            &mut rest
        };
        for k in model.block(i) {
            target.0[k] = v.0[k];
        }
    }
    Ok((kernel, rest))
}

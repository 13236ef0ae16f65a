//! Finite-window checks for separation, syndeticity, rescaling and spectral
//! concentration hypotheses on iterative systems.
//!
//! Properties that are asymptotic in nature (syndetic sequences, "finitely
//! many", infima over all n) can only be evaluated on the window at hand;
//! those checks return [`Verdict::Indeterminate`] when the window does not
//! decide them.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{hermitian_extreme_eigs, ComplexMatrix};
use crate::operators::{in_kernel, power_norm_log, support_radius, NormalOperatorModel, SeedVector};
use crate::systems::{scaling_coefficients, IterativeSystemSpec};

/// Default Carleson constant a class must reach in [`uniform_separation_split`].
pub const DEFAULT_SEPARATION_THRESHOLD: f64 = 1e-3;

/// Point sets up to this size fall back to exhaustive partition search.
pub const EXHAUSTIVE_SPLIT_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedGaps {
    pub seed: usize,
    pub good_count: usize,
    pub first_good: Option<usize>,
    pub last_good: Option<usize>,
    /// Largest difference between consecutive good indices.
    pub max_gap: usize,
    /// Distance from the last good index to the end of the window.
    pub trailing_gap: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    SyndeticGaps {
        seeds: Vec<SeedGaps>,
    },
    Partition {
        classes: Vec<Vec<usize>>,
        class_deltas: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub verdict: Verdict,
    pub witness: Witness,
    pub parameters: BTreeMap<String, f64>,
}

fn check_disk(points: &[Complex64]) -> Result<()> {
    for (index, p) in points.iter().enumerate() {
        let modulus = p.norm();
        if !(modulus < 1.0) {
            return Err(Error::PointOutsideDisk { index, modulus });
        }
    }
    Ok(())
}

/// `|a - b| / |1 - conj(a) b|`.
pub fn pseudo_hyperbolic(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (Complex64::new(1.0, 0.0) - a.conj() * b).norm()
}

fn log_rho(a: Complex64, b: Complex64) -> f64 {
    if a == b {
        f64::NEG_INFINITY
    } else {
        pseudo_hyperbolic(a, b).ln()
    }
}

/// `inf_n prod_{k != n} rho(l_n, l_k)`, accumulated as sums of logs.
/// A single point gives 1; coincident points give 0.
pub fn carleson_delta(points: &[Complex64]) -> Result<f64> {
    check_disk(points)?;
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut min_log = 0.0f64;
    for (n, &a) in points.iter().enumerate() {
        let s: f64 = points
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != n)
            .map(|(_, &b)| log_rho(a, b))
            .sum();
        min_log = min_log.min(s);
    }
    Ok(min_log.exp())
}

/// Classes with running per-member log products.
#[derive(Clone, Default)]
struct Class {
    members: Vec<usize>,
    logs: Vec<f64>,
}

impl Class {
    fn admits(&self, points: &[Complex64], p: usize, floor: f64) -> Option<(Vec<f64>, f64)> {
        let mut own = 0.0;
        let mut updated = Vec::with_capacity(self.logs.len());
        for (&m, &l) in self.members.iter().zip(&self.logs) {
            let r = log_rho(points[m], points[p]);
            let nl = l + r;
            if nl < floor {
                return None;
            }
            updated.push(nl);
            own += r;
        }
        if own < floor {
            return None;
        }
        Some((updated, own))
    }

    fn push(&mut self, p: usize, updated: Vec<f64>, own: f64) {
        self.logs = updated;
        self.logs.push(own);
        self.members.push(p);
    }

    fn delta(&self) -> f64 {
        self.logs.iter().copied().fold(0.0, f64::min).exp()
    }
}

fn greedy_split(points: &[Complex64], parts: usize, floor: f64) -> Option<Vec<Class>> {
    let mut classes: Vec<Class> = Vec::new();
    'points: for p in 0..points.len() {
        for class in classes.iter_mut() {
            if let Some((updated, own)) = class.admits(points, p, floor) {
                class.push(p, updated, own);
                continue 'points;
            }
        }
        if classes.len() == parts {
            return None;
        }
        let mut class = Class::default();
        class.push(p, Vec::new(), 0.0);
        classes.push(class);
    }
    Some(classes)
}

fn exhaustive_split(
    points: &[Complex64],
    parts: usize,
    floor: f64,
    next: usize,
    classes: &mut Vec<Class>,
) -> bool {
    if next == points.len() {
        return true;
    }
    for c in 0..classes.len() {
        if let Some((updated, own)) = classes[c].admits(points, next, floor) {
            let saved = classes[c].clone();
            classes[c].push(next, updated, own);
            if exhaustive_split(points, parts, floor, next + 1, classes) {
                return true;
            }
            classes[c] = saved;
        }
    }
    if classes.len() < parts {
        let mut class = Class::default();
        class.push(next, Vec::new(), 0.0);
        classes.push(class);
        if exhaustive_split(points, parts, floor, next + 1, classes) {
            return true;
        }
        classes.pop();
    }
    false
}

/// Tries to split `points` into at most `parts` classes, each with Carleson
/// constant at least `threshold`.
///
/// Greedy first-fit runs first. When it fails, sets of at most
/// [`EXHAUSTIVE_SPLIT_LIMIT`] points are searched exhaustively (fail means no
/// such partition exists); larger sets are reported indeterminate.
pub fn uniform_separation_split(
    points: &[Complex64],
    parts: usize,
    threshold: f64,
) -> Result<ConditionReport> {
    check_disk(points)?;
    if parts == 0 {
        return Err(Error::InvalidParameter {
            name: "parts",
            reason: "must be at least 1".into(),
        });
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "threshold",
            reason: format!("must lie in (0, 1], got {threshold}"),
        });
    }
    let floor = threshold.ln();
    let mut parameters = BTreeMap::new();
    parameters.insert("parts".to_string(), parts as f64);
    parameters.insert("threshold".to_string(), threshold);

    let found = greedy_split(points, parts, floor).or_else(|| {
        if points.len() > EXHAUSTIVE_SPLIT_LIMIT {
            return None;
        }
        let mut classes = Vec::new();
        exhaustive_split(points, parts, floor, 0, &mut classes).then_some(classes)
    });
    let (verdict, classes) = match found {
        Some(classes) => (Verdict::Pass, classes),
        None if points.len() <= EXHAUSTIVE_SPLIT_LIMIT => (Verdict::Fail, Vec::new()),
        None => (Verdict::Indeterminate, Vec::new()),
    };
    Ok(ConditionReport {
        verdict,
        witness: Witness::Partition {
            class_deltas: classes.iter().map(Class::delta).collect(),
            classes: classes.into_iter().map(|c| c.members).collect(),
        },
        parameters,
    })
}

/// `(max successive difference, first index)` of a strictly increasing list.
pub fn syndetic_gap(indices: &[usize]) -> Result<(usize, usize)> {
    let first = *indices.first().ok_or(Error::EmptyInput)?;
    let mut max_gap = 0;
    for (position, w) in indices.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(Error::NotSorted {
                position: position + 1,
            });
        }
        max_gap = max_gap.max(w[1] - w[0]);
    }
    Ok((max_gap, first))
}

/// Evaluates the rescaling hypothesis on the spec's finite window.
///
/// Seeds whose index set fills the truncation are treated as carrying an
/// infinite `J_x`; seeds with shorter index sets are exempt. An index `n` is
/// good when `|c_n| * ||A^i x|| >= delta` for some `i >= 0` with
/// `|i - n| <= eta`. The verdict is
/// - `Fail` if some checked seed has no good index, or its good indices stop
///   more than `gap_cap` before the end of the window;
/// - `Pass` if every checked seed has consecutive good indices at most
///   `gap_cap` apart;
/// - `Indeterminate` otherwise.
pub fn rescaling_condition_b(
    spec: &IterativeSystemSpec,
    eta: usize,
    delta: f64,
    gap_cap: usize,
) -> Result<ConditionReport> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidDelta(delta));
    }
    let model = spec.model();
    let coeffs = scaling_coefficients(spec)?;
    let log_delta = delta.ln();
    let slack = 1e-12 * log_delta.abs().max(1.0);

    let mut seeds = Vec::new();
    for (s, (seed, set)) in spec.seeds().iter().zip(spec.index_sets()).enumerate() {
        if set.len() != spec.truncation() {
            continue;
        }
        let indices = set.indices();
        let window_end = *indices.last().unwrap();
        let max_power = window_end + eta;
        let log_norms: Vec<f64> = if seed.is_zero() {
            vec![f64::NEG_INFINITY; max_power + 1]
        } else {
            (0..=max_power)
                .map(|i| power_norm_log(model, seed, i))
                .collect::<Result<_>>()?
        };
        let good: Vec<usize> = coeffs[s]
            .iter()
            .filter(|e| {
                let lo = e.n.saturating_sub(eta);
                (lo..=e.n + eta).any(|i| e.log_abs + log_norms[i] >= log_delta - slack)
            })
            .map(|e| e.n)
            .collect();
        let max_gap = good.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0);
        seeds.push(SeedGaps {
            seed: s,
            good_count: good.len(),
            first_good: good.first().copied(),
            last_good: good.last().copied(),
            max_gap,
            trailing_gap: good.last().map_or(window_end, |&g| window_end - g),
        });
    }

    let verdict = if seeds
        .iter()
        .any(|g| g.good_count == 0 || g.trailing_gap > gap_cap)
    {
        Verdict::Fail
    } else if seeds.iter().all(|g| g.max_gap <= gap_cap) {
        Verdict::Pass
    } else {
        Verdict::Indeterminate
    };
    let mut parameters = BTreeMap::new();
    parameters.insert("eta".to_string(), eta as f64);
    parameters.insert("delta".to_string(), delta);
    parameters.insert("gap_cap".to_string(), gap_cap as f64);
    Ok(ConditionReport {
        verdict,
        witness: Witness::SyndeticGaps { seeds },
        parameters,
    })
}

/// Extremes of a ratio sequence together with where they occur.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioBounds {
    pub alpha: f64,
    pub beta: f64,
    pub argmin: usize,
    pub argmax: usize,
}

impl RatioBounds {
    fn from_ranges(ranges: impl Iterator<Item = (f64, f64)>) -> Option<Self> {
        let mut out: Option<Self> = None;
        for (n, (lo, hi)) in ranges.enumerate() {
            let b = out.get_or_insert(Self {
                alpha: lo,
                beta: hi,
                argmin: n,
                argmax: n,
            });
            if lo < b.alpha {
                b.alpha = lo;
                b.argmin = n;
            }
            if hi > b.beta {
                b.beta = hi;
                b.argmax = n;
            }
        }
        out
    }
}

/// Min and max of `|P_n x|^2 / (1 - |l_n|^2)` over the window.
pub fn singleton_ratio_check(lambdas: &[Complex64], seed_norms_sq: &[f64]) -> Result<RatioBounds> {
    if lambdas.len() != seed_norms_sq.len() || lambdas.is_empty() {
        return Err(Error::LengthMismatch {
            what: "eigenvalues and seed projection norms",
            expected: lambdas.len().max(1),
            found: seed_norms_sq.len(),
        });
    }
    check_disk(lambdas)?;
    if let Some(i) = seed_norms_sq.iter().position(|&s| !(s >= 0.0)) {
        return Err(Error::InvalidParameter {
            name: "seed_norms_sq",
            reason: format!("entry {i} is negative or NaN"),
        });
    }
    let ratios = lambdas
        .iter()
        .zip(seed_norms_sq)
        .map(|(l, &s)| {
            let r = s / (1.0 - l.norm_sqr());
            (r, r)
        });
    Ok(RatioBounds::from_ranges(ratios).expect("nonempty"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EigenspaceBounds {
    Bounds(RatioBounds),
    /// An eigenspace has larger dimension than the number of seeds.
    RankExceedsSeeds {
        index: usize,
        rank: usize,
        seeds: usize,
    },
}

/// For each eigenvalue `l_n`, the extreme eigenvalues of
/// `sum_i (P_n x_i)(P_n x_i)^H / (1 - |l_n|^2)` on the eigenspace; returns the
/// overall min and max.
///
/// `projections[n][i]` holds the coordinates of `P_n x_i` in an orthonormal
/// basis of the n-th eigenspace.
pub fn condition_iii_check(
    lambdas: &[Complex64],
    projections: &[Vec<Vec<Complex64>>],
) -> Result<EigenspaceBounds> {
    if lambdas.len() != projections.len() || lambdas.is_empty() {
        return Err(Error::LengthMismatch {
            what: "eigenvalues and projection lists",
            expected: lambdas.len().max(1),
            found: projections.len(),
        });
    }
    check_disk(lambdas)?;
    let mut ranges = Vec::with_capacity(lambdas.len());
    for (n, (l, seeds)) in lambdas.iter().zip(projections).enumerate() {
        let rank = seeds.first().map_or(0, Vec::len);
        if seeds.iter().any(|v| v.len() != rank) {
            return Err(Error::DimensionMismatch {
                expected: rank,
                found: seeds.iter().map(Vec::len).find(|&k| k != rank).unwrap(),
            });
        }
        if rank == 0 {
            return Err(Error::InvalidParameter {
                name: "projections",
                reason: format!("eigenspace {n} has no coordinates"),
            });
        }
        if rank > seeds.len() {
            return Ok(EigenspaceBounds::RankExceedsSeeds {
                index: n,
                rank,
                seeds: seeds.len(),
            });
        }
        let mut m = ComplexMatrix::zeros(rank, rank);
        for v in seeds {
            for a in 0..rank {
                for b in 0..rank {
                    m[(a, b)] += v[a] * v[b].conj();
                }
            }
        }
        let (lo, hi) = hermitian_extreme_eigs(&m)?;
        let scale = 1.0 - l.norm_sqr();
        ranges.push((lo / scale, hi / scale));
    }
    Ok(EigenspaceBounds::Bounds(
        RatioBounds::from_ranges(ranges.into_iter()).expect("nonempty"),
    ))
}

/// Eigenvalues of a model and, per eigenspace, the coordinates of each seed's
/// projection in an orthonormal basis of that eigenspace.
pub fn eigenspace_projections(
    model: &NormalOperatorModel,
    seeds: &[SeedVector],
) -> Result<(Vec<Complex64>, Vec<Vec<Vec<Complex64>>>)> {
    let lambdas = model.atoms().iter().map(|a| a.z).collect();
    let mut projections = Vec::with_capacity(model.atoms().len());
    for (i, atom) in model.atoms().iter().enumerate() {
        let sw = atom.weight.sqrt();
        let mut per_seed = Vec::with_capacity(seeds.len());
        for seed in seeds {
            if seed.len() != model.dim() {
                return Err(Error::DimensionMismatch {
                    expected: model.dim(),
                    found: seed.len(),
                });
            }
            per_seed.push(seed.as_slice()[model.block(i)].iter().map(|z| z * sw).collect());
        }
        projections.push(per_seed);
    }
    Ok((lambdas, projections))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiiProfile {
    /// Distinct support radii of the seeds outside the kernel, ascending.
    pub radii: Vec<f64>,
    /// Index into `radii` of each seed's support radius; `None` for seeds in
    /// the kernel.
    pub seed_assignment: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Offender {
    pub atom: usize,
    pub z: Complex64,
    pub modulus: f64,
    /// 0 for the inner disk, `i` for the gap between radii `i - 1` and `i`.
    pub region: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub profile: RadiiProfile,
    pub delta: f64,
    pub offenders: Vec<Offender>,
    /// Offender count per region, aligned with `profile.radii`.
    pub region_counts: Vec<usize>,
    pub seed_count: usize,
    pub non_kernel_seed_count: usize,
}

impl ConcentrationReport {
    pub fn offender_count(&self) -> usize {
        self.offenders.len()
    }

    pub fn radius_count(&self) -> usize {
        self.profile.radii.len()
    }
}

/// Classifies atoms against the seeds' support radii `r_1 < ... < r_N`.
///
/// Offenders are atoms with modulus in `[0, r_1 - delta]` or in
/// `[r_(i-1) + delta, r_i - delta]` for some `i >= 2`.
pub fn circle_concentration(
    model: &NormalOperatorModel,
    seeds: &[SeedVector],
    delta: f64,
) -> Result<ConcentrationReport> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidDelta(delta));
    }
    let mut seed_radii = Vec::with_capacity(seeds.len());
    for seed in seeds {
        if seed.is_zero() || in_kernel(model, seed)? {
            seed_radii.push(None);
        } else {
            seed_radii.push(Some(support_radius(model, seed)?));
        }
    }
    let mut radii: Vec<f64> = seed_radii.iter().flatten().copied().collect();
    if radii.is_empty() {
        return Err(Error::KernelVector);
    }
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    if delta >= radii[0] {
        return Err(Error::InvalidDelta(delta));
    }
    let seed_assignment = seed_radii
        .iter()
        .map(|r| r.map(|r| radii.iter().position(|&x| x == r).unwrap()))
        .collect();

    let mut offenders = Vec::new();
    let mut region_counts = vec![0; radii.len()];
    for (atom, a) in model.atoms().iter().enumerate() {
        let m = a.modulus();
        let region = (0..radii.len()).find(|&i| {
            let lower_ok = i == 0 || m >= radii[i - 1] + delta;
            lower_ok && m <= radii[i] - delta
        });
        if let Some(region) = region {
            region_counts[region] += 1;
            offenders.push(Offender {
                atom,
                z: a.z,
                modulus: m,
                region,
            });
        }
    }
    Ok(ConcentrationReport {
        profile: RadiiProfile {
            radii,
            seed_assignment,
        },
        delta,
        offenders,
        region_counts,
        seed_count: seeds.len(),
        non_kernel_seed_count: seed_radii.iter().flatten().count(),
    })
}

/// `sqrt(1 - |l_n|^2) * phi(l_n)` for the power series with the given
/// coefficients.
pub fn hardy_evaluate(phi_coeffs: &[Complex64], lambdas: &[Complex64]) -> Result<Vec<Complex64>> {
    check_disk(lambdas)?;
    Ok(lambdas
        .iter()
        .map(|&l| {
            let value = phi_coeffs
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * l + c);
            value * (1.0 - l.norm_sqr()).sqrt()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::SpectralAtom;
    use crate::systems::{IndexSet, ScalingRule};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn carleson_examples() {
        assert_eq!(carleson_delta(&[c(0., 0.)]).unwrap(), 1.0);
        assert!((carleson_delta(&[c(0., 0.), c(0.5, 0.)]).unwrap() - 0.5).abs() < 1e-15);
        let a = c(0.3, -0.2);
        assert_eq!(carleson_delta(&[a, a]).unwrap(), 0.0);
        assert!(matches!(
            carleson_delta(&[c(1.0, 0.)]),
            Err(Error::PointOutsideDisk { index: 0, .. })
        ));
    }

    #[test]
    fn split_examples() {
        let a = c(0.3, 0.1);
        let r = uniform_separation_split(&[a, a], 2, DEFAULT_SEPARATION_THRESHOLD).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        match r.witness {
            Witness::Partition { classes, .. } => assert_eq!(classes, vec![vec![0], vec![1]]),
            _ => panic!("wrong witness"),
        }
        let r = uniform_separation_split(&[c(0., 0.), c(0.5, 0.)], 1, DEFAULT_SEPARATION_THRESHOLD)
            .unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        match r.witness {
            Witness::Partition { class_deltas, .. } => {
                assert!((class_deltas[0] - 0.5).abs() < 1e-15)
            }
            _ => panic!("wrong witness"),
        }
        let r = uniform_separation_split(&[a, a], 1, DEFAULT_SEPARATION_THRESHOLD).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn split_needs_exhaustive_search() {
        // greedy puts p0 and p1 together, leaving p3 with no class; the
        // exhaustive search finds {p0, p3}, {p1, p2}
        let p = [c(0.66, 0.04), c(-0.03, 0.3), c(0.43, 0.12), c(0.21, 0.15)];
        assert!(greedy_split(&p, 2, 0.4f64.ln()).is_none());
        let r = uniform_separation_split(&p, 2, 0.4).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        if let Witness::Partition { classes, class_deltas } = r.witness {
            assert_eq!(classes, vec![vec![0, 3], vec![1, 2]]);
            assert!(class_deltas.iter().all(|&d| d >= 0.4));
        }
    }

    #[test]
    fn split_indeterminate_for_large_sets() {
        let p: Vec<Complex64> = (0..13).map(|_| c(0.1, 0.1)).collect();
        let r = uniform_separation_split(&p, 2, DEFAULT_SEPARATION_THRESHOLD).unwrap();
        assert_eq!(r.verdict, Verdict::Indeterminate);
        let r = uniform_separation_split(&p[..12], 2, DEFAULT_SEPARATION_THRESHOLD).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn syndetic_examples() {
        assert_eq!(syndetic_gap(&[0, 2, 4, 6]).unwrap(), (2, 0));
        assert_eq!(syndetic_gap(&[1, 2, 4, 8, 16]).unwrap(), (8, 1));
        assert_eq!(syndetic_gap(&[5]).unwrap(), (0, 5));
        assert_eq!(syndetic_gap(&[1, 3, 3]), Err(Error::NotSorted { position: 2 }));
        assert_eq!(syndetic_gap(&[]), Err(Error::EmptyInput));
    }

    fn two_atom_spec(rule: ScalingRule, m: usize) -> IterativeSystemSpec {
        let model = NormalOperatorModel::diagonal(&[c(0.5, 0.), c(0.8, 0.3)]).unwrap();
        let seed = SeedVector::from_real(&[1.0, 0.7]).unwrap();
        IterativeSystemSpec::with_all_indices(model, vec![seed], rule, m).unwrap()
    }

    fn gaps(r: &ConditionReport) -> &[SeedGaps] {
        match &r.witness {
            Witness::SyndeticGaps { seeds } => seeds,
            _ => panic!("wrong witness"),
        }
    }

    #[test]
    fn condition_b_normalized_passes() {
        let spec = two_atom_spec(ScalingRule::Normalized, 40);
        let r = rescaling_condition_b(&spec, 0, 1.0, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(gaps(&r)[0].max_gap, 1);
        assert_eq!(gaps(&r)[0].good_count, 40);
    }

    #[test]
    fn condition_b_arithmetic_gap_is_step() {
        let model = NormalOperatorModel::diagonal(&[c(0.5, 0.), c(0.9, 0.)]).unwrap();
        let seed = SeedVector::from_real(&[1.0, 1.0]).unwrap();
        let sets = vec![IndexSet::Arithmetic {
            start: 1,
            step: 3,
            count: 10,
        }];
        let spec = IterativeSystemSpec::new(model, vec![seed], sets, ScalingRule::Normalized, 10)
            .unwrap();
        let r = rescaling_condition_b(&spec, 0, 0.5, 3).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(gaps(&r)[0].max_gap, 3);
    }

    #[test]
    fn condition_b_exempts_finite_index_sets() {
        let model = NormalOperatorModel::diagonal(&[c(0.5, 0.)]).unwrap();
        let seed = SeedVector::from_real(&[1.0]).unwrap();
        let sets = vec![IndexSet::All { count: 3 }];
        let spec =
            IterativeSystemSpec::new(model, vec![seed], sets, ScalingRule::Unscaled, 10).unwrap();
        let r = rescaling_condition_b(&spec, 0, 3.0, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(gaps(&r).is_empty());
    }

    #[test]
    fn condition_b_eta_widens_search() {
        // c_n = 1/||A^(n+1) x|| = 2^(n+1): with eta = 0 the product is 2 at
        // every n, with eta = 1 the power i = n - 1 lifts it to 4 for n >= 1
        let spec = IterativeSystemSpec::with_all_indices(
            NormalOperatorModel::diagonal(&[c(0.5, 0.)]).unwrap(),
            vec![SeedVector::from_real(&[1.0]).unwrap()],
            ScalingRule::ShiftedNormalized {
                offsets: vec![1],
                eta: 1,
            },
            20,
        )
        .unwrap();
        assert_eq!(
            rescaling_condition_b(&spec, 0, 3.0, 1).unwrap().verdict,
            Verdict::Fail
        );
        assert_eq!(
            rescaling_condition_b(&spec, 1, 3.0, 1).unwrap().verdict,
            Verdict::Pass
        );
    }

    #[test]
    fn condition_b_invalid_delta() {
        let spec = two_atom_spec(ScalingRule::Normalized, 4);
        assert_eq!(
            rescaling_condition_b(&spec, 0, 0.0, 1),
            Err(Error::InvalidDelta(0.0))
        );
    }

    #[test]
    fn condition_b_interior_gap_is_indeterminate() {
        let model = NormalOperatorModel::diagonal(&[c(0.5, 0.)]).unwrap();
        let seed = SeedVector::from_real(&[1.0]).unwrap();
        // good at n = 0, 1, 5, 6, 7: interior gap 4, trailing gap 0
        let coeffs: Vec<Complex64> = (0..8)
            .map(|n| {
                let base = 2f64.powi(n);
                if (2..5).contains(&n) {
                    c(base * 1e-3, 0.)
                } else {
                    c(base, 0.)
                }
            })
            .collect();
        let spec = IterativeSystemSpec::with_all_indices(
            model,
            vec![seed],
            ScalingRule::Explicit {
                coefficients: vec![coeffs],
            },
            8,
        )
        .unwrap();
        let r = rescaling_condition_b(&spec, 0, 0.5, 2).unwrap();
        assert_eq!(r.verdict, Verdict::Indeterminate);
        assert_eq!(gaps(&r)[0].max_gap, 4);
        assert_eq!(rescaling_condition_b(&spec, 0, 0.5, 4).unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn singleton_ratio_examples() {
        let lambdas: Vec<Complex64> = (1..=30).map(|n| c(1.0 - 0.5f64.powi(n), 0.)).collect();
        let norms: Vec<f64> = lambdas.iter().map(|l| 1.0 - l.norm_sqr()).collect();
        let b = singleton_ratio_check(&lambdas, &norms).unwrap();
        assert!((b.alpha - 1.0).abs() < 1e-9 && (b.beta - 1.0).abs() < 1e-9);

        let decaying: Vec<f64> = (1..=30).map(|n| 0.25f64.powi(n)).collect();
        let short = singleton_ratio_check(&lambdas[..10], &decaying[..10]).unwrap();
        let long = singleton_ratio_check(&lambdas, &decaying).unwrap();
        assert!(long.alpha < short.alpha);
        assert_eq!(long.argmin, 29);
        // 2^-n / (2 - 2^-n) at n = 30
        let expected = 0.5f64.powi(30) / (2.0 - 0.5f64.powi(30));
        assert!((long.alpha - expected).abs() < 1e-6 * expected);

        assert!(matches!(
            singleton_ratio_check(&[], &[]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            singleton_ratio_check(&[c(1.0, 0.)], &[1.0]),
            Err(Error::PointOutsideDisk { .. })
        ));
    }

    #[test]
    fn condition_iii_examples() {
        let lambdas = vec![c(0.5, 0.), c(0.0, 0.3)];
        let projections = vec![vec![vec![c(0.6, 0.)]], vec![vec![c(0.2, 0.1)]]];
        let single = singleton_ratio_check(&lambdas, &[0.36, 0.05]).unwrap();
        match condition_iii_check(&lambdas, &projections).unwrap() {
            EigenspaceBounds::Bounds(b) => {
                assert!((b.alpha - single.alpha).abs() < 1e-12);
                assert!((b.beta - single.beta).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }

        let l = c(0.6, 0.);
        let s = (1.0 - l.norm_sqr()).sqrt();
        let proj = vec![vec![vec![c(s, 0.), c(0., 0.)], vec![c(0., 0.), c(0., s)]]];
        match condition_iii_check(&[l], &proj).unwrap() {
            EigenspaceBounds::Bounds(b) => {
                assert!((b.alpha - 1.0).abs() < 1e-12 && (b.beta - 1.0).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }

        let proj = vec![vec![vec![c(s, 0.), c(0., 0.)]]];
        assert_eq!(
            condition_iii_check(&[l], &proj).unwrap(),
            EigenspaceBounds::RankExceedsSeeds {
                index: 0,
                rank: 2,
                seeds: 1
            }
        );
    }

    #[test]
    fn eigenspace_projection_weights() {
        let model = NormalOperatorModel::new(vec![
            SpectralAtom::real(0.5, 4.0, 1),
            SpectralAtom::real(0.2, 1.0, 2),
        ])
        .unwrap();
        let seed = SeedVector::from_real(&[1.0, 2.0, 3.0]).unwrap();
        let (l, p) = eigenspace_projections(&model, &[seed]).unwrap();
        assert_eq!(l, vec![c(0.5, 0.), c(0.2, 0.)]);
        assert_eq!(p[0][0], vec![c(2.0, 0.)]);
        assert_eq!(p[1][0], vec![c(2.0, 0.), c(3.0, 0.)]);
    }

    #[test]
    fn concentration_examples() {
        let model = NormalOperatorModel::diagonal(
            &(0..8)
                .map(|k| Complex64::from_polar(1.0, k as f64 * 0.7))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let seed = SeedVector::from_real(&[1.0; 8]).unwrap();
        let r = circle_concentration(&model, &[seed], 0.1).unwrap();
        assert_eq!(r.profile.radii.len(), 1);
        assert!((r.profile.radii[0] - 1.0).abs() < 1e-15);
        assert_eq!(r.offender_count(), 0);

        let model = NormalOperatorModel::diagonal(&[c(0.5, 0.), c(0., 1.0)]).unwrap();
        let seeds = vec![
            SeedVector::from_real(&[1.0, 0.0]).unwrap(),
            SeedVector::from_real(&[1.0, 1.0]).unwrap(),
        ];
        let r = circle_concentration(&model, &seeds, 0.1).unwrap();
        assert_eq!(r.profile.radii, vec![0.5, 1.0]);
        assert_eq!(r.profile.seed_assignment, vec![Some(0), Some(1)]);
    }

    #[test]
    fn concentration_regions() {
        let model =
            NormalOperatorModel::diagonal(&[c(0.1, 0.), c(0.5, 0.), c(0.7, 0.), c(0.95, 0.), c(1.0, 0.)])
                .unwrap();
        let seeds = vec![
            SeedVector::from_real(&[1.0, 1.0, 0.0, 0.0, 0.0]).unwrap(),
            SeedVector::from_real(&[0.0, 0.0, 1.0, 1.0, 1.0]).unwrap(),
        ];
        let r = circle_concentration(&model, &seeds, 0.05).unwrap();
        assert_eq!(r.profile.radii, vec![0.5, 1.0]);
        // 0.1 sits inside B_0.45; 0.7 inside [0.55, 0.95]; 0.95 on the closed edge
        assert_eq!(r.region_counts, vec![1, 2]);
        assert_eq!(
            r.offenders.iter().map(|o| o.atom).collect::<Vec<_>>(),
            vec![0, 2, 3]
        );
    }

    #[test]
    fn concentration_equispaced_moduli() {
        // moduli 0.2 + 0.7 k / 49; the offender region is [0, 0.85], i.e.
        // 70 k <= 65 * 49 in integers
        let zs: Vec<Complex64> = (0..50).map(|k| c(0.2 + 0.7 * k as f64 / 49.0, 0.)).collect();
        let model = NormalOperatorModel::diagonal(&zs).unwrap();
        let seed = SeedVector::from_real(&[1.0; 50]).unwrap();
        let r = circle_concentration(&model, &[seed], 0.05).unwrap();
        let expected = (0..50).filter(|k| 70 * k <= 65 * 49).count();
        assert_eq!(expected, 46);
        assert_eq!(r.offender_count(), expected);
        assert!(r.offenders.iter().all(|o| o.modulus <= 0.85));
    }

    #[test]
    fn concentration_errors() {
        let model = NormalOperatorModel::diagonal(&[c(0., 0.), c(0.5, 0.)]).unwrap();
        let kernel = SeedVector::from_real(&[1.0, 0.0]).unwrap();
        assert_eq!(
            circle_concentration(&model, &[kernel.clone()], 0.1),
            Err(Error::KernelVector)
        );
        let seed = SeedVector::from_real(&[1.0, 1.0]).unwrap();
        assert_eq!(
            circle_concentration(&model, &[seed.clone()], 0.5),
            Err(Error::InvalidDelta(0.5))
        );
        let r = circle_concentration(&model, &[kernel, seed], 0.1).unwrap();
        assert_eq!(r.profile.seed_assignment, vec![None, Some(0)]);
        assert_eq!((r.seed_count, r.non_kernel_seed_count), (2, 1));
    }

    #[test]
    fn hardy_examples() {
        let v = hardy_evaluate(&[c(1., 0.)], &[c(0., 0.)]).unwrap();
        assert_eq!(v, vec![c(1., 0.)]);
        let v = hardy_evaluate(&[c(0., 0.), c(1., 0.)], &[c(0.5, 0.)]).unwrap();
        assert!((v[0] - c(3f64.sqrt() / 4.0, 0.)).norm() < 1e-15);
        let v = hardy_evaluate(&[], &[c(0.5, 0.), c(0., 0.2)]).unwrap();
        assert!(v.iter().all(|z| z.norm() == 0.0));
        assert!(hardy_evaluate(&[c(1., 0.)], &[c(0., 1.)]).is_err());
    }
}

//! Frame analysis of finite families in a model's weighted space.
//!
//! Vectors are mapped to Euclidean coordinates by scaling each coordinate
//! with `sqrt(w)`, so the synthesis matrix `F` (columns = family members)
//! satisfies `sum_k |<y, f_k>|^2 = |F^H y~|^2`. The optimal frame bounds are
//! then the squared extreme singular values of `F`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{singular_values, Cholesky, ComplexMatrix};
use crate::operators::{NormalOperatorModel, SeedVector};

/// A family counts as complete when `lower > COMPLETENESS_TOL * upper`.
pub const COMPLETENESS_TOL: f64 = 1e-12;

/// Singular values at or below `RANK_TOL * sigma_max` do not count toward rank.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub lower: f64,
    pub upper: f64,
    pub ambient_dim: usize,
    pub family_size: usize,
    pub complete: bool,
}

fn check_family(family: &[SeedVector], model: &NormalOperatorModel) -> Result<()> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    for f in family {
        if f.len() != model.dim() {
            return Err(Error::DimensionMismatch {
                expected: model.dim(),
                found: f.len(),
            });
        }
    }
    Ok(())
}

fn sqrt_weights(model: &NormalOperatorModel) -> Vec<f64> {
    model.coordinate_weights().iter().map(|w| w.sqrt()).collect()
}

/// `d x M` matrix whose k-th column is the k-th family member in
/// `sqrt(w)`-weighted coordinates.
pub fn synthesis_matrix(family: &[SeedVector], model: &NormalOperatorModel) -> Result<ComplexMatrix> {
    check_family(family, model)?;
    let sw = sqrt_weights(model);
    let columns: Vec<Vec<Complex64>> = family
        .iter()
        .map(|f| f.as_slice().iter().zip(&sw).map(|(z, s)| z * s).collect())
        .collect();
    ComplexMatrix::from_columns(model.dim(), &columns)
}

/// Optimal frame bounds with the default completeness tolerance.
pub fn frame_bounds(family: &[SeedVector], model: &NormalOperatorModel) -> Result<FrameReport> {
    frame_bounds_with_tol(family, model, COMPLETENESS_TOL)
}

/// Optimal frame bounds over the whole ambient space.
///
/// `lower` is reported as exactly zero whenever the family is incomplete,
/// i.e. whenever `sigma_min^2 <= tol * sigma_max^2`.
pub fn frame_bounds_with_tol(
    family: &[SeedVector],
    model: &NormalOperatorModel,
    tol: f64,
) -> Result<FrameReport> {
    let f = synthesis_matrix(family, model)?;
    let sv = singular_values(&f)?;
    let upper = sv[0] * sv[0];
    let d = model.dim();
    let sigma_min = if family.len() < d { 0.0 } else { sv[d - 1] };
    let raw_lower = sigma_min * sigma_min;
    let complete = raw_lower > tol * upper;
    Ok(FrameReport {
        lower: if complete { raw_lower } else { 0.0 },
        upper,
        ambient_dim: d,
        family_size: family.len(),
        complete,
    })
}

/// `(<y, f_k>)_k` under the weighted inner product.
pub fn analysis_coefficients(
    family: &[SeedVector],
    model: &NormalOperatorModel,
    y: &SeedVector,
) -> Result<Vec<Complex64>> {
    check_family(family, model)?;
    family.iter().map(|f| model.inner(y, f)).collect()
}

/// `S^{-1} f_k` for the frame operator `S = sum_k f_k <., f_k>`.
pub fn canonical_dual(family: &[SeedVector], model: &NormalOperatorModel) -> Result<Vec<SeedVector>> {
    let report = frame_bounds(family, model)?;
    if !report.complete {
        return Err(Error::NotAFrame {
            lower: report.lower,
        });
    }
    let f = synthesis_matrix(family, model)?;
    let chol = Cholesky::new(&f.gram_rows()).map_err(|_| Error::NotAFrame {
        lower: report.lower,
    })?;
    let sw = sqrt_weights(model);
    (0..f.cols())
        .map(|k| {
            let g = chol.solve(&f.column(k))?;
            SeedVector::new(g.iter().zip(&sw).map(|(z, s)| z / s).collect())
        })
        .collect()
}

/// `sum_k <y, g_k> f_k`.
pub fn reconstruct(
    family: &[SeedVector],
    duals: &[SeedVector],
    model: &NormalOperatorModel,
    y: &SeedVector,
) -> Result<SeedVector> {
    if duals.len() != family.len() {
        return Err(Error::LengthMismatch {
            what: "dual family",
            expected: family.len(),
            found: duals.len(),
        });
    }
    let coeffs = analysis_coefficients(duals, model, y)?;
    let mut out = vec![Complex64::new(0.0, 0.0); model.dim()];
    for (c, f) in coeffs.iter().zip(family) {
        for (o, z) in out.iter_mut().zip(f.as_slice()) {
            *o += c * z;
        }
    }
    SeedVector::new(out)
}

/// Numerical rank of the synthesis matrix and whether it equals the dimension.
pub fn completeness_rank(family: &[SeedVector], model: &NormalOperatorModel) -> Result<(usize, bool)> {
    let f = synthesis_matrix(family, model)?;
    let sv = singular_values(&f)?;
    let rank = if sv[0] == 0.0 {
        0
    } else {
        sv.iter().filter(|&&s| s > RANK_TOL * sv[0]).count()
    };
    Ok((rank, rank == model.dim()))
}

/// Optimal Bessel (upper frame) bound.
pub fn bessel_bound(family: &[SeedVector], model: &NormalOperatorModel) -> Result<f64> {
    let sv = singular_values(&synthesis_matrix(family, model)?)?;
    Ok(sv[0] * sv[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::SpectralAtom;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(v: &[f64]) -> SeedVector {
        SeedVector::from_real(v).unwrap()
    }

    fn unit_model(d: usize) -> NormalOperatorModel {
        NormalOperatorModel::diagonal(
            &(0..d).map(|k| c(0.1 * (k + 1) as f64, 0.0)).collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn synthesis_examples() {
        let m = unit_model(2);
        let f = synthesis_matrix(&[real(&[1.0, 0.0])], &m).unwrap();
        assert_eq!((f.rows(), f.cols()), (2, 1));
        assert_eq!(f.column(0), vec![c(1., 0.), c(0., 0.)]);

        let m = NormalOperatorModel::new(vec![SpectralAtom::real(0.5, 4.0, 1)]).unwrap();
        let f = synthesis_matrix(&[real(&[1.0])], &m).unwrap();
        assert_eq!(f[(0, 0)], c(2.0, 0.0));

        let m = unit_model(2);
        let f = synthesis_matrix(&[real(&[1.0, 2.0]), real(&[3.0, 4.0])], &m).unwrap();
        assert_eq!(f.column(1), vec![c(3., 0.), c(4., 0.)]);

        assert_eq!(synthesis_matrix(&[], &m), Err(Error::EmptyFamily));
        assert!(matches!(
            synthesis_matrix(&[real(&[1.0])], &m),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn frame_bound_examples() {
        let m = unit_model(3);
        let basis = vec![real(&[1., 0., 0.]), real(&[0., 1., 0.]), real(&[0., 0., 1.])];
        let r = frame_bounds(&basis, &m).unwrap();
        assert!((r.lower - 1.0).abs() < 1e-14 && (r.upper - 1.0).abs() < 1e-14);
        assert!(r.complete);
        assert_eq!((r.ambient_dim, r.family_size), (3, 3));

        // Gram eigenvalues of {e1, e1, e2} are 2 and 1
        let m = unit_model(2);
        let fam = vec![real(&[1., 0.]), real(&[1., 0.]), real(&[0., 1.])];
        let r = frame_bounds(&fam, &m).unwrap();
        assert!((r.lower - 1.0).abs() < 1e-14 && (r.upper - 2.0).abs() < 1e-14);

        let r = frame_bounds(&[real(&[1., 0.])], &m).unwrap();
        assert_eq!(r.lower, 0.0);
        assert!(!r.complete);

        assert_eq!(frame_bounds(&[], &m), Err(Error::EmptyFamily));
    }

    #[test]
    fn geometric_series_bound() {
        // sum_n 4^-n -> 4/3
        let m = NormalOperatorModel::new(vec![SpectralAtom::real(0.5, 1.0, 1)]).unwrap();
        let fam: Vec<SeedVector> = (0..60).map(|n| real(&[0.5f64.powi(n)])).collect();
        let r = frame_bounds(&fam, &m).unwrap();
        assert!((r.lower - 4.0 / 3.0).abs() < 1e-14);
        assert!((r.upper - 4.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn analysis_examples() {
        let m = unit_model(2);
        let fam = vec![real(&[1., 0.]), real(&[0., 1.])];
        let a = analysis_coefficients(&fam, &m, &fam[0]).unwrap();
        assert_eq!(a, vec![c(1., 0.), c(0., 0.)]);
        let a = analysis_coefficients(&fam, &m, &SeedVector::zeros(2)).unwrap();
        assert!(a.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn canonical_dual_examples() {
        let m = unit_model(2);
        let fam = vec![real(&[1., 0.]), real(&[0., 1.])];
        let duals = canonical_dual(&fam, &m).unwrap();
        for (g, f) in duals.iter().zip(&fam) {
            for (a, b) in g.as_slice().iter().zip(f.as_slice()) {
                assert!((a - b).norm() < 1e-14);
            }
        }

        let m1 = unit_model(1);
        let duals = canonical_dual(&[real(&[2.0])], &m1).unwrap();
        assert!((duals[0][0] - c(0.5, 0.0)).norm() < 1e-15);

        assert!(matches!(
            canonical_dual(&[real(&[1., 0.])], &m),
            Err(Error::NotAFrame { .. })
        ));
    }

    #[test]
    fn weighted_dual_reconstructs() {
        let m = NormalOperatorModel::new(vec![
            SpectralAtom::real(0.2, 0.5, 1),
            SpectralAtom::real(0.6, 3.0, 2),
        ])
        .unwrap();
        let fam = vec![
            real(&[1., 2., 0.]),
            SeedVector::new(vec![c(0., 1.), c(1., 0.), c(1., -1.)]).unwrap(),
            real(&[0.5, 0., 2.]),
            real(&[1., 1., 1.]),
        ];
        let duals = canonical_dual(&fam, &m).unwrap();
        let y = SeedVector::new(vec![c(0.3, -0.2), c(1.0, 0.4), c(-2.0, 0.0)]).unwrap();
        let back = reconstruct(&fam, &duals, &m, &y).unwrap();
        for (a, b) in back.as_slice().iter().zip(y.as_slice()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn completeness_rank_examples() {
        let m = unit_model(2);
        let fam: Vec<SeedVector> = (0..4).map(|n| real(&[0.1f64.powi(n), 0.0])).collect();
        assert_eq!(completeness_rank(&fam, &m).unwrap(), (1, false));

        let m = NormalOperatorModel::diagonal(&[c(0.3, 0.), c(0.6, 0.)]).unwrap();
        let fam: Vec<SeedVector> = (0..4)
            .map(|n| real(&[0.3f64.powi(n), 0.6f64.powi(n)]))
            .collect();
        assert_eq!(completeness_rank(&fam, &m).unwrap(), (2, true));

        let fam = vec![SeedVector::zeros(2); 3];
        assert_eq!(completeness_rank(&fam, &m).unwrap(), (0, false));
    }

    #[test]
    fn bessel_examples() {
        let m = unit_model(2);
        let fam = vec![real(&[1., 0.]), real(&[0., 1.])];
        assert!((bessel_bound(&fam, &m).unwrap() - 1.0).abs() < 1e-14);
        let tripled: Vec<SeedVector> = fam.iter().map(|f| f.scaled(c(3.0, 0.0))).collect();
        assert!((bessel_bound(&tripled, &m).unwrap() - 9.0).abs() < 1e-13);

        let a = vec![real(&[1., 1.]), real(&[0., 2.])];
        let b = vec![real(&[3., -1.]), real(&[1., 0.5])];
        let union: Vec<SeedVector> = a.iter().chain(&b).cloned().collect();
        let ub = bessel_bound(&union, &m).unwrap();
        assert!(ub <= bessel_bound(&a, &m).unwrap() + bessel_bound(&b, &m).unwrap() + 1e-12);
        assert!(ub >= bessel_bound(&a, &m).unwrap().max(bessel_bound(&b, &m).unwrap()) - 1e-12);
    }
}

//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here is small and deterministic: cyclic Jacobi sweeps for
//! Hermitian eigenvalues, one-sided (Hestenes) Jacobi for singular values,
//! and a Cholesky solve for Hermitian positive definite systems. Matrices in
//! this crate rarely exceed a few hundred columns.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Entrywise tolerance for `max |m - m*|` when a Hermitian input is required.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Relative eigenvalue floor below which a Hermitian matrix counts as singular.
pub const PD_REL_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch {
                    expected: ncols,
                    found: row.len(),
                });
            }
            data.extend(row.iter().map(|&x| Complex64::new(x, 0.0)));
        }
        Self::from_row_major(nrows, ncols, data)
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Complex64>]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    found: col.len(),
                });
            }
            for (i, &z) in col.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        Ok(m)
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn conj_transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].conj();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// `self * self^H`.
    pub fn gram_rows(&self) -> Self {
        let mut g = Self::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            let ri = &self.data[i * self.cols..(i + 1) * self.cols];
            for j in i..self.rows {
                let rj = &self.data[j * self.cols..(j + 1) * self.cols];
                let s: Complex64 = ri.iter().zip(rj).map(|(a, b)| a * b.conj()).sum();
                g[(i, j)] = s;
                g[(j, i)] = s.conj();
            }
        }
        g
    }

    /// Largest entrywise deviation `max |m_ij - conj(m_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if m.rows != m.cols {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    if m.rows == 0 {
        return Err(Error::EmptyMatrix);
    }
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL || deviation.is_nan() {
        return Err(Error::NonHermitian { deviation });
    }
    Ok(())
}

/// All eigenvalues of a Hermitian matrix in ascending order.
///
/// The n×n Hermitian `A + iB` is embedded as the real symmetric
/// `[[A, -B], [B, A]]`, whose spectrum is that of the original with every
/// eigenvalue doubled. Cyclic Jacobi then runs on the embedding.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let n = m.rows;
    let size = 2 * n;
    let mut a = vec![0.0; size * size];
    for i in 0..n {
        for j in 0..n {
            // symmetrize so the embedding is exactly symmetric
            let z = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            a[i * size + j] = z.re;
            a[(i + n) * size + (j + n)] = z.re;
            a[i * size + (j + n)] = -z.im;
            a[(i + n) * size + j] = z.im;
        }
    }
    let mut eigs = symmetric_jacobi_eigenvalues(&mut a, size);
    eigs.sort_by(f64::total_cmp);
    // pairs are equal up to rounding; keep one from each
    Ok(eigs.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

fn symmetric_jacobi_eigenvalues(a: &mut [f64], n: usize) -> Vec<f64> {
    let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if frob == 0.0 {
        return vec![0.0; n];
    }
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-2 * frob {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // skip rotations that would not change the diagonal in floating point
                if apq.abs() < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()).max(f64::MIN_POSITIVE)
                {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    let new_rp = c * arp - s * arq;
                    let new_rq = s * arp + c * arq;
                    a[r * n + p] = new_rp;
                    a[p * n + r] = new_rp;
                    a[r * n + q] = new_rq;
                    a[q * n + r] = new_rq;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// Smallest and largest eigenvalue of a Hermitian matrix.
pub fn hermitian_extreme_eigs(m: &ComplexMatrix) -> Result<(f64, f64)> {
    let eigs = hermitian_eigenvalues(m)?;
    Ok((eigs[0], eigs[eigs.len() - 1]))
}

/// Singular values in descending order, `min(rows, cols)` of them.
///
/// One-sided Jacobi orthogonalizes the columns of `m` (or of `m^H` when that
/// has fewer columns); the final column norms are the singular values.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    if m.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let work = if m.cols <= m.rows {
        m.clone()
    } else {
        m.conj_transpose()
    };
    let len = work.rows;
    let ncols = work.cols;
    let mut columns: Vec<Vec<Complex64>> = (0..ncols).map(|j| work.column(j)).collect();
    let mut norms_sq: Vec<f64> = columns.iter().map(|c| norm_sq(c)).collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..ncols {
            for j in (i + 1)..ncols {
                let alpha = norms_sq[i];
                let beta = norms_sq[j];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma: Complex64 = columns[i]
                    .iter()
                    .zip(&columns[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta.abs() > 1e150 {
                    0.5 / zeta
                } else {
                    let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = columns.split_at_mut(j);
                let ci = &mut left[i];
                let cj = &mut right[0];
                for k in 0..len {
                    let gi = ci[k];
                    let h = cj[k] * phase.conj();
                    ci[k] = gi * c - h * s;
                    cj[k] = gi * s + h * c;
                }
                norms_sq[i] = norm_sq(ci);
                norms_sq[j] = norm_sq(cj);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = norms_sq.iter().map(|x| x.sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

fn norm_sq(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `(sigma_min, sigma_max)` where `sigma_min` is the `rows`-th largest
/// singular value, or zero when `cols < rows`.
pub fn svd_extremes(m: &ComplexMatrix) -> Result<(f64, f64)> {
    let sv = singular_values(m)?;
    let sigma_max = sv[0];
    let sigma_min = if m.cols < m.rows { 0.0 } else { sv[m.rows - 1] };
    Ok((sigma_min, sigma_max))
}

/// `log(sum(exp(terms)))` with a max shift. `-inf` entries contribute nothing.
pub fn log_sum_exp(terms: &[f64]) -> Result<f64> {
    if terms.is_empty() {
        return Err(Error::EmptyInput);
    }
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return Ok(max);
    }
    if terms.len() == 1 {
        return Ok(terms[0]);
    }
    let sum: f64 = terms.iter().map(|&t| (t - max).exp()).sum();
    Ok(max + sum.ln())
}

/// Cholesky factor `L` with `m = L L^H` of a Hermitian positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    lower: Vec<Complex64>,
    matrix: ComplexMatrix,
}

impl Cholesky {
    /// Factors `m` after checking that it is Hermitian and that
    /// `min_eig > 1e-12 * max_eig`.
    pub fn new(m: &ComplexMatrix) -> Result<Self> {
        let (min_eig, max_eig) = hermitian_extreme_eigs(m)?;
        if !(max_eig > 0.0) || min_eig <= PD_REL_TOL * max_eig {
            return Err(Error::SingularOperator { min_eig, max_eig });
        }
        let n = m.rows;
        let mut l = vec![Complex64::new(0.0, 0.0); n * n];
        for j in 0..n {
            let mut diag = m[(j, j)].re;
            for k in 0..j {
                diag -= l[j * n + k].norm_sqr();
            }
            if diag <= 0.0 {
                return Err(Error::SingularOperator { min_eig, max_eig });
            }
            let djj = diag.sqrt();
            l[j * n + j] = Complex64::new(djj, 0.0);
            for i in (j + 1)..n {
                let mut s = m[(i, j)];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / djj;
            }
        }
        Ok(Self {
            n,
            lower: l,
            matrix: m.clone(),
        })
    }

    fn substitute(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let l = &self.lower;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[i * n + k] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l[k * n + i].conj() * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        y
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: b.len(),
            });
        }
        let mut x = self.substitute(b);
        // one step of iterative refinement
        let mx = self.matrix.mul_vec(&x)?;
        let residual: Vec<Complex64> = b.iter().zip(&mx).map(|(bi, mi)| bi - mi).collect();
        let correction = self.substitute(&residual);
        for (xi, ci) in x.iter_mut().zip(&correction) {
            *xi += ci;
        }
        Ok(x)
    }
}

/// Solves `m x = b` for Hermitian positive definite `m`.
pub fn solve_hermitian_psd(m: &ComplexMatrix, b: &[Complex64]) -> Result<Vec<Complex64>> {
    if b.len() != m.rows {
        return Err(Error::DimensionMismatch {
            expected: m.rows,
            found: b.len(),
        });
    }
    Cholesky::new(m)?.solve(b)
}

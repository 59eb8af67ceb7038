//! Dense complex matrices, vectorization and spectral helpers.
//!
//! Operators are plain `DMatrix<C64>`; structural predicates live on the
//! [`OperatorExt`] extension trait. Vectorization is column stacking, so
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`, which coincides with nalgebra's
//! column-major storage.

pub mod subspace;
pub mod superop;

use nalgebra::{ComplexField, DMatrix, DVector, Dyn, Schur, SVD};
use ndarray::Array2;
use ndarray_linalg::{Lapack, Scalar, SVD as _};
pub use num_complex::Complex64 as C64;

use crate::{Error, Result};

pub type Operator = DMatrix<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(d: usize) -> Operator {
    Operator::identity(d, d)
}

/// The matrix unit `E_{ij}` (zero-based indices).
pub fn matrix_unit(d: usize, i: usize, j: usize) -> Operator {
    let mut m = Operator::zeros(d, d);
    m[(i, j)] = ONE;
    m
}

pub fn diag(values: &[f64]) -> Operator {
    Operator::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&v| r(v))))
}

pub fn from_real(m: &DMatrix<f64>) -> Operator {
    m.map(r)
}

/// Row-major construction from real entries.
pub fn real_matrix(d: usize, rows: &[f64]) -> Operator {
    DMatrix::<f64>::from_row_slice(d, d, rows).map(r)
}

pub fn vec_op(x: &Operator) -> DVector<C64> {
    DVector::from_column_slice(x.as_slice())
}

pub fn unvec(v: &[C64], d: usize) -> Operator {
    Operator::from_column_slice(d, d, v)
}

/// `tr(X† Y)`.
pub fn hs_inner(x: &Operator, y: &Operator) -> C64 {
    x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum()
}

pub fn hs_norm(x: &Operator) -> f64 {
    x.norm()
}

/// Largest singular value.
pub fn op_norm(x: &Operator) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    robust_svd(x).singular_values.max()
}

/// Thin SVD computed by LAPACK (`gesvd`).
///
/// nalgebra's complex SVD loses accuracy on superoperator matrices
/// (reconstruction errors near `1e-6` at `d = 4`), which is far above the
/// rank tolerances used for kernels, so every rank decision goes through here.
pub fn robust_svd<T>(m: &DMatrix<T>) -> SVD<T, Dyn, Dyn>
where
    T: ComplexField<RealField = f64> + Scalar<Real = f64> + Lapack,
{
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return m.clone().svd(true, true);
    }
    let a = Array2::from_shape_fn((rows, cols), |(i, j)| m[(i, j)]);
    match a.svd(true, true) {
        Ok((Some(u), s, Some(vt))) => SVD {
            u: Some(DMatrix::from_fn(rows, k, |i, j| u[(i, j)])),
            v_t: Some(DMatrix::from_fn(k, cols, |i, j| vt[(i, j)])),
            singular_values: DVector::from_fn(k, |i, _| s[i]),
        },
        _ => m.clone().svd(true, true),
    }
}

pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    a * b - b * a
}

/// Eigen-decomposition of a hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: Operator,
}

impl HermitianEigen {
    pub fn new(a: &Operator) -> Self {
        let h = (a + a.adjoint()) * r(0.5);
        let eig = h.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = Operator::from_fn(a.nrows(), a.nrows(), |row, col| eig.eigenvectors[(row, order[col])]);
        Self { values, vectors }
    }

    /// `V diag(f(λ)) V†`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> Operator {
        let d = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.values.iter().enumerate() {
            let fl = f(l);
            for i in 0..d {
                scaled[(i, j)] *= fl;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// Spectral projections with eigenvalues clustered when neighbouring gaps
    /// fall below `gap`. Returns `(mean eigenvalue, projection)` pairs.
    pub fn spectral_projections(&self, gap: f64) -> Vec<(f64, Operator)> {
        let d = self.values.len();
        let mut out = Vec::new();
        let mut start = 0;
        while start < d {
            let mut end = start + 1;
            while end < d && self.values[end] - self.values[end - 1] < gap {
                end += 1;
            }
            let cols = self.vectors.columns(start, end - start);
            let p = &cols * cols.adjoint();
            let mean = self.values[start..end].iter().sum::<f64>() / (end - start) as f64;
            out.push((mean, p));
            start = end;
        }
        out
    }
}

pub trait OperatorExt {
    fn dim(&self) -> usize;
    fn dagger(&self) -> Operator;
    fn hermitian_residual(&self) -> f64;
    fn is_hermitian(&self, eq_tol: f64) -> bool;
    /// Smallest eigenvalue of the hermitian part.
    fn min_eigenvalue(&self) -> f64;
    fn is_psd(&self, eq_tol: f64, psd_tol: f64) -> bool;
    fn is_projection(&self, eq_tol: f64) -> bool;
    fn is_unitary(&self, eq_tol: f64) -> bool;
    fn is_normal(&self, eq_tol: f64) -> bool;
}

impl OperatorExt for Operator {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn dagger(&self) -> Operator {
        self.adjoint()
    }

    fn hermitian_residual(&self) -> f64 {
        (self - self.adjoint()).norm()
    }

    fn is_hermitian(&self, eq_tol: f64) -> bool {
        self.is_square() && self.hermitian_residual() <= eq_tol * self.norm().max(1.0)
    }

    fn min_eigenvalue(&self) -> f64 {
        HermitianEigen::new(self).values.first().copied().unwrap_or(0.0)
    }

    fn is_psd(&self, eq_tol: f64, psd_tol: f64) -> bool {
        self.is_hermitian(eq_tol) && self.min_eigenvalue() >= -psd_tol * self.norm().max(1.0)
    }

    fn is_projection(&self, eq_tol: f64) -> bool {
        self.is_hermitian(eq_tol) && (self * self - self).norm() <= eq_tol * self.norm().max(1.0)
    }

    fn is_unitary(&self, eq_tol: f64) -> bool {
        self.is_square() && (self.adjoint() * self - identity(self.nrows())).norm() <= eq_tol * (self.nrows() as f64).max(1.0)
    }

    fn is_normal(&self, eq_tol: f64) -> bool {
        let n = self.norm().max(1.0);
        (self.adjoint() * self - self * self.adjoint()).norm() <= eq_tol * n * n
    }
}

pub fn ensure_square(m: &Operator) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(m.nrows())
}

pub fn ensure_dim(m: &Operator, d: usize) -> Result<()> {
    let found = ensure_square(m)?;
    if found != d {
        return Err(Error::DimensionMismatch { expected: d, found });
    }
    Ok(())
}

/// Principal square root of a PSD matrix. Eigenvalues in `[-psd_tol, 0)`
/// are clamped to zero; anything more negative is rejected.
pub fn psd_sqrt(a: &Operator, eq_tol: f64, psd_tol: f64) -> Result<Operator> {
    ensure_square(a)?;
    let res = a.hermitian_residual();
    if res > eq_tol * a.norm().max(1.0) {
        return Err(Error::NotHermitian { what: "operator".into(), residual: res });
    }
    let eig = HermitianEigen::new(a);
    let min = eig.values.first().copied().unwrap_or(0.0);
    if min < -psd_tol * a.norm().max(1.0) {
        return Err(Error::NotPsd { what: "operator".into(), min_eig: min });
    }
    Ok(eig.apply_fn(|l| r(l.max(0.0).sqrt())))
}

/// Inverse square root of a positive definite matrix.
pub fn pd_inv_sqrt(a: &Operator) -> Result<Operator> {
    let eig = HermitianEigen::new(a);
    let min = eig.values.first().copied().unwrap_or(0.0);
    let max = eig.values.last().copied().unwrap_or(0.0);
    if min <= 1e-14 * max.max(1.0) {
        return Err(Error::IllConditioned(format!("matrix is singular (min eigenvalue {min:.3e})")));
    }
    Ok(eig.apply_fn(|l| r(1.0 / l.sqrt())))
}

/// Eigenvalues of a general complex square matrix via the complex Schur form.
pub fn eigenvalues(m: &Operator) -> Result<Vec<C64>> {
    ensure_square(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(m.clone(), 1e-15, 100_000)
        .ok_or_else(|| Error::NoConvergence("Schur decomposition did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Real part of the rightmost eigenvalue.
pub fn spectral_abscissa(m: &Operator) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
}

/// Block matrix `[[X_ij]]` from a `k x k` grid of `d x d` blocks.
pub fn block_matrix(blocks: &[Vec<Operator>]) -> Operator {
    let k = blocks.len();
    let d = blocks[0][0].nrows();
    let mut out = Operator::zeros(k * d, k * d);
    for (i, row) in blocks.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            out.view_mut((i * d, j * d), (d, d)).copy_from(b);
        }
    }
    out
}

pub fn block(m: &Operator, d: usize, i: usize, j: usize) -> Operator {
    m.view((i * d, j * d), (d, d)).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn robust_svd_handles_wide_dynamic_range() {
        let mut g = crate::random::rng(3);
        for _ in 0..20 {
            let mut m = crate::random::random_operator(&mut g, 16);
            for k in 0..16 {
                for j in 2..16 {
                    m[(k, j)] *= r(10f64.powi(-(30 + 5 * j as i32)));
                }
            }
            let svd = robust_svd(&m);
            assert!((svd.clone().recompose().unwrap() - &m).norm() < 1e-12 * m.norm());
            assert_eq!(svd.singular_values.iter().filter(|&&s| s > 1e-7).count(), 2);
        }
    }

    #[test]
    fn vec_is_column_stacking() {
        let x = Operator::from_row_slice(2, 2, &[r(1.0), r(2.0), r(3.0), r(4.0)]);
        let v = vec_op(&x);
        assert_eq!(v.as_slice(), &[r(1.0), r(3.0), r(2.0), r(4.0)]);
        assert_eq!(unvec(v.as_slice(), 2), x);
    }

    #[test]
    fn sqrt_of_projection_is_itself() {
        let p = matrix_unit(2, 0, 0);
        let s = psd_sqrt(&p, 1e-9, 1e-9).unwrap();
        assert!((s - p).norm() < 1e-14);
    }

    #[test]
    fn sqrt_rejects_negative() {
        assert!(matches!(psd_sqrt(&diag(&[1.0, -0.5]), 1e-9, 1e-9), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn sqrt_clamps_tiny_negative() {
        let s = psd_sqrt(&diag(&[4.0, -1e-12]), 1e-9, 1e-9).unwrap();
        assert!((s - diag(&[2.0, 0.0])).norm() < 1e-14);
    }

    #[test]
    fn spectral_projections_cluster_degenerate_eigenvalues() {
        let a = diag(&[1.0, 3.0, 1.0 + 1e-9]);
        let eig = HermitianEigen::new(&a);
        let projs = eig.spectral_projections(1e-6 * 3.0);
        assert_eq!(projs.len(), 2);
        assert!((&projs[0].1 - diag(&[1.0, 0.0, 1.0])).norm() < 1e-12);
        assert!((&projs[1].1 - diag(&[0.0, 1.0, 0.0])).norm() < 1e-12);
    }

    #[test]
    fn predicates() {
        let p = matrix_unit(3, 1, 1);
        assert!(p.is_projection(1e-9));
        assert!(p.is_psd(1e-9, 1e-9));
        assert!(!matrix_unit(2, 0, 1).is_hermitian(1e-9));
        let sx = real_matrix(2, &[0.0, 1.0, 1.0, 0.0]);
        assert!(sx.is_unitary(1e-12));
        assert!(!sx.is_psd(1e-9, 1e-9));
    }

    #[test]
    fn eigenvalues_of_complex_matrix() {
        let m = Operator::from_row_slice(2, 2, &[c(0.0, 1.0), r(1.0), r(0.0), c(0.0, -2.0)]);
        let mut ev = eigenvalues(&m).unwrap();
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - c(0.0, -2.0)).norm() < 1e-12);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-12);
    }
}

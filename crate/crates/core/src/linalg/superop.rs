//! Linear maps on `d x d` matrices stored as `d² x d²` matrices acting on
//! column-stacked vectors.

use nalgebra::DMatrix;

use super::{identity, matrix_unit, unvec, vec_op, HermitianEigen, Operator, OperatorExt, C64};
use crate::{Error, Result, Tolerances};

/// Cached structural facts. `None` means "not known"; `Some` values must
/// agree with [`SuperOperator::computed_flags`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SuperFlags {
    pub trace_preserving: Option<bool>,
    pub unital: Option<bool>,
    pub hermiticity_preserving: Option<bool>,
    pub completely_positive: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuperOperator {
    dim: usize,
    matrix: DMatrix<C64>,
    pub flags: SuperFlags,
}

impl SuperOperator {
    pub fn from_matrix(dim: usize, matrix: DMatrix<C64>) -> Result<Self> {
        let n = dim * dim;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.nrows().max(matrix.ncols()) });
        }
        Ok(Self { dim, matrix, flags: SuperFlags::default() })
    }

    pub(crate) fn from_matrix_unchecked(dim: usize, matrix: DMatrix<C64>) -> Self {
        debug_assert_eq!(matrix.nrows(), dim * dim);
        Self { dim, matrix, flags: SuperFlags::default() }
    }

    /// Tabulates a linear map by its action on the matrix units.
    pub fn from_fn(dim: usize, f: impl Fn(&Operator) -> Operator) -> Self {
        let n = dim * dim;
        let mut m = DMatrix::zeros(n, n);
        for j in 0..dim {
            for i in 0..dim {
                let out = f(&matrix_unit(dim, i, j));
                m.column_mut(i + j * dim).copy_from(&vec_op(&out));
            }
        }
        Self::from_matrix_unchecked(dim, m)
    }

    pub fn with_flags(mut self, flags: SuperFlags) -> Self {
        self.flags = flags;
        self
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix_unchecked(dim, DMatrix::identity(dim * dim, dim * dim)).with_flags(SuperFlags {
            trace_preserving: Some(true),
            unital: Some(true),
            hermiticity_preserving: Some(true),
            completely_positive: Some(true),
        })
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_matrix_unchecked(dim, DMatrix::zeros(dim * dim, dim * dim))
    }

    /// `X ↦ A X B`, i.e. `Bᵀ ⊗ A`.
    pub fn sandwich(a: &Operator, b: &Operator) -> Self {
        Self::from_matrix_unchecked(a.nrows(), b.transpose().kronecker(a))
    }

    /// `L_A: X ↦ A X`.
    pub fn left_mul(a: &Operator) -> Self {
        Self::sandwich(a, &identity(a.nrows()))
    }

    /// `R_A: X ↦ X A`.
    pub fn right_mul(a: &Operator) -> Self {
        Self::sandwich(&identity(a.nrows()), a)
    }

    /// One-element measurement `M_B: X ↦ B† X B`.
    pub fn measurement(b: &Operator) -> Self {
        Self::sandwich(&b.adjoint(), b)
    }

    /// The transpose map in the standard basis.
    pub fn transpose(dim: usize) -> Self {
        Self::from_fn(dim, |x| x.transpose()).with_flags(SuperFlags {
            trace_preserving: Some(true),
            unital: Some(true),
            hermiticity_preserving: Some(true),
            completely_positive: Some(dim <= 1),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn apply(&self, x: &Operator) -> Result<Operator> {
        super::ensure_dim(x, self.dim)?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &Operator) -> Operator {
        let v = &self.matrix * vec_op(x);
        unvec(v.as_slice(), self.dim)
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &SuperOperator) -> Result<SuperOperator> {
        self.same_dim(other)?;
        Ok(Self::from_matrix_unchecked(self.dim, &self.matrix * &other.matrix))
    }

    pub fn add(&self, other: &SuperOperator) -> Result<SuperOperator> {
        self.same_dim(other)?;
        Ok(Self::from_matrix_unchecked(self.dim, &self.matrix + &other.matrix))
    }

    pub fn sub(&self, other: &SuperOperator) -> Result<SuperOperator> {
        self.same_dim(other)?;
        Ok(Self::from_matrix_unchecked(self.dim, &self.matrix - &other.matrix))
    }

    pub fn scale(&self, s: C64) -> SuperOperator {
        Self::from_matrix_unchecked(self.dim, &self.matrix * s)
    }

    /// `[self, other] = self∘other − other∘self`.
    pub fn commutator(&self, other: &SuperOperator) -> Result<SuperOperator> {
        self.same_dim(other)?;
        Ok(Self::from_matrix_unchecked(self.dim, &self.matrix * &other.matrix - &other.matrix * &self.matrix))
    }

    pub fn pow(&self, n: u32) -> SuperOperator {
        let mut acc = DMatrix::identity(self.matrix.nrows(), self.matrix.ncols());
        let mut base = self.matrix.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Self::from_matrix_unchecked(self.dim, acc)
    }

    /// Frobenius norm of the representing matrix.
    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    fn same_dim(&self, other: &SuperOperator) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    /// `‖Φ(X†) − Φ(X)†‖` over the matrix units (zero iff hermiticity-preserving).
    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let e = matrix_unit(d, i, j);
                let lhs = self.apply_unchecked(&e.adjoint());
                let rhs = self.apply_unchecked(&e).adjoint();
                worst = worst.max((lhs - rhs).norm());
            }
        }
        worst
    }

    /// `‖vec(I)† M − vec(I)†‖`: zero iff `tr Φ(X) = tr X` for every X.
    pub fn trace_preserving_residual(&self) -> f64 {
        let vi = vec_op(&identity(self.dim));
        (vi.adjoint() * &self.matrix - vi.adjoint()).norm()
    }

    /// `‖Φ(I) − I‖`.
    pub fn unital_residual(&self) -> f64 {
        let i = identity(self.dim);
        (self.apply_unchecked(&i) - i).norm()
    }

    pub fn is_trace_preserving(&self, tol: &Tolerances) -> bool {
        tol.close(self.trace_preserving_residual(), self.dim as f64)
    }

    pub fn is_unital(&self, tol: &Tolerances) -> bool {
        tol.close(self.unital_residual(), self.dim as f64)
    }

    pub fn is_hermiticity_preserving(&self, tol: &Tolerances) -> bool {
        tol.close(self.hermiticity_residual(), self.norm())
    }

    /// Choi matrix `C = Σ_ij E_ij ⊗ Φ(E_ij)` on `C^d ⊗ C^d`.
    pub fn choi(&self) -> Operator {
        let d = self.dim;
        let mut c = Operator::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let out = self.apply_unchecked(&matrix_unit(d, i, j));
                c.view_mut((i * d, j * d), (d, d)).copy_from(&out);
            }
        }
        c
    }

    /// Smallest eigenvalue of the hermitian part of the Choi matrix.
    pub fn choi_min_eigenvalue(&self) -> f64 {
        HermitianEigen::new(&self.choi()).values[0]
    }

    pub fn is_completely_positive(&self, tol: &Tolerances) -> bool {
        let choi = self.choi();
        choi.is_hermitian(tol.eq_tol) && HermitianEigen::new(&choi).values[0] >= -tol.psd_tol * choi.norm().max(1.0)
    }

    pub fn computed_flags(&self, tol: &Tolerances) -> SuperFlags {
        SuperFlags {
            trace_preserving: Some(self.is_trace_preserving(tol)),
            unital: Some(self.is_unital(tol)),
            hermiticity_preserving: Some(self.is_hermiticity_preserving(tol)),
            completely_positive: Some(self.is_completely_positive(tol)),
        }
    }

    pub fn recompute_flags(mut self, tol: &Tolerances) -> Self {
        self.flags = self.computed_flags(tol);
        self
    }

    /// Cached flag or recomputation.
    pub fn cp(&self, tol: &Tolerances) -> bool {
        self.flags.completely_positive.unwrap_or_else(|| self.is_completely_positive(tol))
    }

    pub fn unital(&self, tol: &Tolerances) -> bool {
        self.flags.unital.unwrap_or_else(|| self.is_unital(tol))
    }

    pub fn trace_preserving(&self, tol: &Tolerances) -> bool {
        self.flags.trace_preserving.unwrap_or_else(|| self.is_trace_preserving(tol))
    }

    /// Dual with respect to the trace pairing `⟨T, S⟩ = tr(TS)`.
    ///
    /// Implemented as the Hilbert–Schmidt adjoint `M†`, which agrees with the
    /// bilinear-pairing dual exactly when the map is hermiticity-preserving;
    /// other maps are rejected.
    pub fn trace_dual(&self, tol: &Tolerances) -> Result<SuperOperator> {
        let res = self.hermiticity_residual();
        if !tol.close(res, self.norm()) {
            return Err(Error::NotHermiticityPreserving(res));
        }
        let f = self.flags;
        Ok(Self::from_matrix_unchecked(self.dim, self.matrix.adjoint()).with_flags(SuperFlags {
            trace_preserving: f.unital,
            unital: f.trace_preserving,
            hermiticity_preserving: Some(true),
            completely_positive: f.completely_positive,
        }))
    }

    /// `|tr(Φ(T) X) − tr(T Φ♯(X))|`.
    pub fn pairing_residual(&self, dual: &SuperOperator, t: &Operator, x: &Operator) -> f64 {
        let lhs = (self.apply_unchecked(t) * x).trace();
        let rhs = (t * dual.apply_unchecked(x)).trace();
        (lhs - rhs).norm()
    }

    /// Amplification `id_k ⊗ Φ` applied block-wise to a `k x k` block matrix.
    pub fn apply_amplified(&self, k: usize, x: &Operator) -> Result<Operator> {
        let d = self.dim;
        if x.nrows() != k * d || x.ncols() != k * d {
            return Err(Error::DimensionMismatch { expected: k * d, found: x.nrows() });
        }
        let mut out = Operator::zeros(k * d, k * d);
        for i in 0..k {
            for j in 0..k {
                let b = super::block(x, d, i, j);
                out.view_mut((i * d, j * d), (d, d)).copy_from(&self.apply_unchecked(&b));
            }
        }
        Ok(out)
    }

    /// `Φ(I)` convenience.
    pub fn apply_to_identity(&self) -> Operator {
        self.apply_unchecked(&identity(self.dim))
    }
}

/// Identity superoperator matrix of the right size.
pub(crate) fn id_matrix(dim: usize) -> DMatrix<C64> {
    DMatrix::identity(dim * dim, dim * dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, matrix_unit, r};
    use crate::random::{random_operator, rng};

    #[test]
    fn identity_applies_as_identity() {
        let x = random_operator(&mut rng(1), 3);
        let out = SuperOperator::identity(3).apply(&x).unwrap();
        assert!((out - x).norm() < 1e-15);
    }

    #[test]
    fn left_mul_on_identity() {
        let a = diag(&[2.0, 3.0]);
        let out = SuperOperator::left_mul(&a).apply(&identity(2)).unwrap();
        assert!((out - a).norm() < 1e-15);
    }

    #[test]
    fn transpose_sends_e12_to_e21() {
        let out = SuperOperator::transpose(2).apply(&matrix_unit(2, 0, 1)).unwrap();
        assert_eq!(out, matrix_unit(2, 1, 0));
    }

    #[test]
    fn sandwich_matches_direct_product() {
        let mut g = rng(7);
        for d in 1..=4 {
            let (a, b, x) = (random_operator(&mut g, d), random_operator(&mut g, d), random_operator(&mut g, d));
            let out = SuperOperator::sandwich(&a, &b).apply(&x).unwrap();
            assert!((out - &a * &x * &b).norm() < 1e-12);
            let l = SuperOperator::left_mul(&a).apply(&x).unwrap();
            assert!((l - &a * &x).norm() < 1e-12);
            let rr = SuperOperator::right_mul(&b).apply(&x).unwrap();
            assert!((rr - &x * &b).norm() < 1e-12);
        }
    }

    #[test]
    fn apply_rejects_wrong_dim() {
        let err = SuperOperator::identity(2).apply(&identity(3)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, found: 3 }));
    }

    #[test]
    fn dual_of_identity_is_identity() {
        let tol = Tolerances::default();
        let d = SuperOperator::identity(3).trace_dual(&tol).unwrap();
        assert_eq!(d.matrix(), SuperOperator::identity(3).matrix());
    }

    #[test]
    fn dual_rejects_non_hermiticity_preserving() {
        let a = matrix_unit(2, 0, 1) * r(1.0) + identity(2);
        let err = SuperOperator::left_mul(&a).trace_dual(&Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::NotHermiticityPreserving(_)));
    }

    #[test]
    fn pow_matches_repeated_compose() {
        let mut g = rng(3);
        let m = SuperOperator::sandwich(&random_operator(&mut g, 2), &random_operator(&mut g, 2));
        let mut acc = SuperOperator::identity(2);
        for _ in 0..5 {
            acc = acc.compose(&m).unwrap();
        }
        assert!((acc.matrix() - m.pow(5).matrix()).norm() < 1e-9 * acc.norm());
    }
}

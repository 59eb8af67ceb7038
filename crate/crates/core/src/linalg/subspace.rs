//! Linear subspaces of `M_d` with Hilbert–Schmidt orthonormal bases.

use nalgebra::DMatrix;

use super::{matrix_unit, r, robust_svd, unvec, vec_op, Operator, C64};
use crate::{Error, Result, Tolerances};

/// Relative cutoff for rank decisions on spanning sets that are already
/// well scaled (orthonormal inputs, hermitian re-basing).
const SPAN_CUTOFF: f64 = 1e-7;

/// Singular-value margin that triggers a near-threshold warning.
const WARN_FACTOR: f64 = 1e3;

#[derive(Debug, Clone)]
pub struct OperatorSubspace {
    dim: usize,
    basis: Vec<Operator>,
    pub tol: Tolerances,
    hermitian: bool,
    /// `(largest kept-in-kernel ratio σ/max(1, σ_max), smallest excluded ratio)`
    /// from the kernel computation that produced this subspace, if any.
    pub sigma_gap: Option<(f64, f64)>,
}

impl OperatorSubspace {
    /// Orthonormalises an arbitrary spanning set (rank decided relative to
    /// the largest singular value of the stacked vectorisations).
    pub fn span(dim: usize, ops: &[Operator], tol: Tolerances) -> Self {
        let basis = orthonormalize(dim, ops, SPAN_CUTOFF.max(tol.rank_tol));
        Self::from_orthonormal(dim, basis, tol)
    }

    fn from_orthonormal(dim: usize, basis: Vec<Operator>, tol: Tolerances) -> Self {
        let mut s = Self { dim, basis, tol, hermitian: false, sigma_gap: None };
        s.hermitize();
        s
    }

    pub fn zero(dim: usize, tol: Tolerances) -> Self {
        Self { dim, basis: Vec::new(), tol, hermitian: true, sigma_gap: None }
    }

    /// All of `M_d`, spanned by the hermitian matrix-unit combinations.
    pub fn full(dim: usize, tol: Tolerances) -> Self {
        let units: Vec<Operator> = (0..dim).flat_map(|i| (0..dim).map(move |j| matrix_unit(dim, i, j))).collect();
        Self::span(dim, &units, tol)
    }

    pub fn scalars(dim: usize, tol: Tolerances) -> Self {
        Self::span(dim, &[super::identity(dim)], tol)
    }

    pub fn diagonals(dim: usize, tol: Tolerances) -> Self {
        let units: Vec<Operator> = (0..dim).map(|i| matrix_unit(dim, i, i)).collect();
        Self::span(dim, &units, tol)
    }

    pub fn op_dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the subspace.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Operator] {
        &self.basis
    }

    /// Whether the basis consists of hermitian operators.
    pub fn is_hermitian_basis(&self) -> bool {
        self.hermitian
    }

    /// `d² x k` matrix whose columns are the vectorised basis elements.
    pub fn basis_matrix(&self) -> DMatrix<C64> {
        let n = self.dim * self.dim;
        let mut m = DMatrix::zeros(n, self.basis.len());
        for (k, b) in self.basis.iter().enumerate() {
            m.column_mut(k).copy_from(&vec_op(b));
        }
        m
    }

    /// Orthogonal projector onto the subspace, as a `d² x d²` matrix.
    pub fn projector(&self) -> DMatrix<C64> {
        let b = self.basis_matrix();
        &b * b.adjoint()
    }

    pub fn project(&self, x: &Operator) -> Operator {
        self.basis
            .iter()
            .fold(Operator::zeros(self.dim, self.dim), |acc, b| acc + b * super::hs_inner(b, x))
    }

    /// `‖X − proj(X)‖_HS`.
    pub fn residual(&self, x: &Operator) -> f64 {
        (x - self.project(x)).norm()
    }

    /// Membership with residual: true iff `residual <= eq_tol · max(1, ‖X‖)`.
    pub fn contains(&self, x: &Operator) -> (bool, f64) {
        let res = self.residual(x);
        (res <= self.tol.eq_tol * x.norm().max(1.0), res)
    }

    /// Largest containment residual of `self`'s basis in `other`.
    pub fn containment_residual_in(&self, other: &OperatorSubspace) -> f64 {
        self.basis.iter().map(|b| other.residual(b)).fold(0.0, f64::max)
    }

    /// Mutual-containment distance: zero iff the subspaces coincide, about one
    /// when their dimensions differ.
    pub fn distance(&self, other: &OperatorSubspace) -> f64 {
        self.containment_residual_in(other).max(other.containment_residual_in(self))
    }

    pub fn intersect(&self, other: &OperatorSubspace) -> Result<OperatorSubspace> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let n = self.dim * self.dim;
        let id = DMatrix::<C64>::identity(n, n);
        let a = &id - self.projector();
        let b = &id - other.projector();
        let mut stacked = DMatrix::zeros(2 * n, n);
        stacked.view_mut((0, 0), (n, n)).copy_from(&a);
        stacked.view_mut((n, 0), (n, n)).copy_from(&b);
        Ok(kernel_subspace(&stacked, self.dim, &self.tol))
    }

    /// Whether `X ∈ V ⇒ X† ∈ V`, with the worst residual.
    pub fn star_closure_residual(&self) -> f64 {
        self.basis.iter().map(|b| self.residual(&b.adjoint())).fold(0.0, f64::max)
    }

    /// Worst containment residual over all products `b_i b_j` of basis elements.
    pub fn product_closure_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for bi in &self.basis {
            for bj in &self.basis {
                worst = worst.max(self.residual(&(bi * bj)));
            }
        }
        worst
    }

    /// Multiplication- and `*`-closed, with residuals at most `10 · eq_tol`.
    pub fn is_algebra(&self) -> bool {
        let thr = 10.0 * self.tol.eq_tol;
        self.star_closure_residual() <= thr && self.product_closure_residual() <= thr
    }

    /// Human-readable warnings about near-threshold singular values.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some((kept, excluded)) = self.sigma_gap {
            let rt = self.tol.rank_tol;
            if excluded.is_finite() && excluded < WARN_FACTOR * rt {
                out.push(format!(
                    "smallest excluded singular value ratio {excluded:.3e} lies within a factor {WARN_FACTOR} of rank_tol {rt:.1e}"
                ));
            }
            if kept > rt / WARN_FACTOR {
                out.push(format!(
                    "largest kernel singular value ratio {kept:.3e} lies within a factor {WARN_FACTOR} of rank_tol {rt:.1e}"
                ));
            }
        }
        out
    }

    /// Sparse, real representatives of the subspace for reporting witnesses.
    ///
    /// Order: reduced-row-echelon basis of the diagonal part, then hermitian
    /// and anti-hermitian parts of the reduced-row-echelon basis of the
    /// whole space, then the stored basis.
    pub fn canonical_elements(&self) -> Vec<Operator> {
        let d = self.dim;
        let mut out: Vec<Operator> = Vec::new();
        let push = |x: Operator, out: &mut Vec<Operator>| {
            let x = x.map(|z| C64::new(clean(z.re), clean(z.im)));
            if x.norm() > 1e-12 && !out.iter().any(|y| (y - &x).norm() < 1e-10) {
                out.push(x);
            }
        };
        if let Ok(diag_part) = self.intersect(&OperatorSubspace::diagonals(d, self.tol)) {
            let rows: Vec<Vec<C64>> = diag_part.basis.iter().map(|b| (0..d).map(|i| b[(i, i)]).collect()).collect();
            for row in rref(rows) {
                let x = Operator::from_diagonal(&nalgebra::DVector::from_vec(row));
                push((&x + x.adjoint()) * r(0.5), &mut out);
            }
        }
        let rows: Vec<Vec<C64>> = self.basis.iter().map(|b| b.as_slice().to_vec()).collect();
        for row in rref(rows) {
            let x = unvec(&row, d);
            push((&x + x.adjoint()) * r(0.5), &mut out);
            push((&x - x.adjoint()) * C64::new(0.0, -0.5), &mut out);
        }
        for b in &self.basis {
            push(b.clone(), &mut out);
        }
        out
    }

    /// Re-basis with hermitian elements when the subspace is `*`-closed.
    fn hermitize(&mut self) {
        if self.basis.is_empty() {
            self.hermitian = true;
            return;
        }
        let d = self.dim;
        let n = d * d;
        let k = self.basis.len();
        let mut real = DMatrix::<f64>::zeros(2 * n, 2 * k);
        for (idx, b) in self.basis.iter().enumerate() {
            let h = (b + b.adjoint()) * r(0.5);
            let a = (b - b.adjoint()) * C64::new(0.0, -0.5);
            for (col, m) in [(2 * idx, &h), (2 * idx + 1, &a)] {
                for (p, z) in m.iter().enumerate() {
                    real[(p, col)] = z.re;
                    real[(n + p, col)] = z.im;
                }
            }
        }
        let svd = robust_svd(&real);
        let smax = svd.singular_values.max();
        let u = svd.u.expect("requested U");
        let keep: Vec<usize> =
            (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > SPAN_CUTOFF * smax).collect();
        if keep.len() != k {
            return;
        }
        let herm: Vec<Operator> = keep
            .iter()
            .map(|&i| {
                let col = u.column(i);
                let v: Vec<C64> = (0..n).map(|p| C64::new(col[p], col[n + p])).collect();
                let x = unvec(&v, d);
                (&x + x.adjoint()) * r(0.5)
            })
            .collect();
        let original = OperatorSubspace { dim: d, basis: std::mem::take(&mut self.basis), tol: self.tol, hermitian: false, sigma_gap: None };
        if herm.iter().all(|h| original.residual(h) <= 10.0 * self.tol.eq_tol) {
            self.basis = herm;
            self.hermitian = true;
        } else {
            self.basis = original.basis;
        }
    }
}

fn clean(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        0.0
    } else {
        x
    }
}

/// Numerical kernel of a matrix with `d²` columns: right singular vectors
/// whose singular values are at most `rank_tol · max(σ_max, 1)`, unvectorised and
/// re-based hermitian when the kernel is `*`-closed.
pub fn kernel_subspace(m: &DMatrix<C64>, d: usize, tol: &Tolerances) -> OperatorSubspace {
    let n = d * d;
    assert_eq!(m.ncols(), n, "kernel_subspace expects d² columns");
    let padded;
    let a = if m.nrows() < n {
        let mut p = DMatrix::zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        padded = p;
        &padded
    } else {
        m
    };
    let svd = robust_svd(a);
    let v_t = svd.v_t.expect("requested V");
    let sv = &svd.singular_values;
    let smax = sv.max();
    // floor at 1 so that a numerically zero constraint matrix has a full kernel
    let cutoff = tol.rank_tol * smax.max(1.0);
    let mut basis = Vec::new();
    let mut kept_ratio: f64 = 0.0;
    let mut excluded_ratio = f64::INFINITY;
    for i in 0..sv.len() {
        let ratio = sv[i] / smax.max(1.0);
        if sv[i] <= cutoff || smax == 0.0 {
            let row = v_t.row(i);
            let v: Vec<C64> = row.iter().map(|z| z.conj()).collect();
            basis.push(unvec(&v, d));
            kept_ratio = kept_ratio.max(ratio);
        } else {
            excluded_ratio = excluded_ratio.min(ratio);
        }
    }
    let mut s = OperatorSubspace::from_orthonormal(d, basis, *tol);
    s.sigma_gap = Some((kept_ratio, excluded_ratio));
    s
}

/// Smallest `*`-closed, multiplication-closed subspace containing the
/// generators (and the identity when `unital`).
pub fn algebra_closure(generators: &[Operator], unital: bool, tol: &Tolerances) -> Result<OperatorSubspace> {
    let first = generators.first().ok_or_else(|| Error::Empty("algebra_closure needs a generator".into()))?;
    let d = super::ensure_square(first)?;
    for g in generators {
        super::ensure_dim(g, d)?;
    }
    let mut gs = Gs::new(d, tol.eq_tol);
    if unital {
        gs.add(&super::identity(d));
    }
    for g in generators {
        gs.add(g);
        gs.add(&g.adjoint());
    }
    let cap = d * d + 2;
    for _ in 0..cap {
        let before = gs.basis.len();
        let snapshot = gs.basis.clone();
        for a in &snapshot {
            gs.add(&a.adjoint());
            for b in &snapshot {
                gs.add(&(a * b));
            }
        }
        if gs.basis.len() == before {
            return Ok(OperatorSubspace::from_orthonormal(d, gs.basis, *tol));
        }
    }
    Err(Error::NoConvergence(format!("algebra closure did not stabilise within {cap} rounds")))
}

/// Incremental Gram–Schmidt with re-orthogonalisation.
struct Gs {
    basis: Vec<Operator>,
    thr: f64,
}

impl Gs {
    fn new(_d: usize, thr: f64) -> Self {
        Self { basis: Vec::new(), thr }
    }

    fn add(&mut self, x: &Operator) {
        let scale = x.norm();
        if scale == 0.0 {
            return;
        }
        let mut v = x / r(scale);
        for _ in 0..2 {
            for b in &self.basis {
                let c = super::hs_inner(b, &v);
                v -= b * c;
            }
        }
        let n = v.norm();
        if n > self.thr.max(1e-8) {
            self.basis.push(v / r(n));
        }
    }
}

/// Orthonormal basis of `span(ops)` via SVD of the stacked vectorisations.
fn orthonormalize(d: usize, ops: &[Operator], rel_cutoff: f64) -> Vec<Operator> {
    if ops.is_empty() {
        return Vec::new();
    }
    let n = d * d;
    let mut m = DMatrix::zeros(n, ops.len());
    for (k, x) in ops.iter().enumerate() {
        m.column_mut(k).copy_from(&vec_op(x));
    }
    let svd = robust_svd(&m);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return Vec::new();
    }
    let u = svd.u.expect("requested U");
    (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rel_cutoff * smax)
        .map(|i| unvec(u.column(i).as_slice(), d))
        .collect()
}

/// Reduced row echelon form with partial pivoting; zero rows dropped.
fn rref(mut rows: Vec<Vec<C64>>) -> Vec<Vec<C64>> {
    if rows.is_empty() {
        return rows;
    }
    let ncols = rows[0].len();
    let scale = rows.iter().flat_map(|r| r.iter()).map(|z| z.norm()).fold(0.0, f64::max);
    let mut pivot_row = 0;
    for col in 0..ncols {
        if pivot_row == rows.len() {
            break;
        }
        let (best, best_abs) = (pivot_row..rows.len())
            .map(|i| (i, rows[i][col].norm()))
            .fold((pivot_row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_abs <= 1e-9 * scale {
            continue;
        }
        rows.swap(pivot_row, best);
        let p = rows[pivot_row][col];
        for z in rows[pivot_row].iter_mut() {
            *z /= p;
        }
        let prow = rows[pivot_row].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != pivot_row {
                let f = row[col];
                if f.norm() > 0.0 {
                    for (z, pz) in row.iter_mut().zip(prow.iter()) {
                        *z -= f * pz;
                    }
                }
            }
        }
        pivot_row += 1;
    }
    rows.truncate(pivot_row);
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, identity, matrix_unit, OperatorExt};
    use crate::random::{random_operator, rng};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn assert_orthonormal(s: &OperatorSubspace) {
        for (i, a) in s.basis().iter().enumerate() {
            for (j, b) in s.basis().iter().enumerate() {
                let g = crate::linalg::hs_inner(a, b);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g - r(expect)).norm() < 1e-10, "gram[{i}][{j}] = {g}");
            }
        }
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        let k = kernel_subspace(&DMatrix::identity(4, 4), 2, &tol());
        assert!(k.is_empty());
    }

    #[test]
    fn kernel_of_zero_is_everything() {
        let k = kernel_subspace(&DMatrix::zeros(9, 9), 3, &tol());
        assert_eq!(k.len(), 9);
        assert!(k.is_hermitian_basis());
        assert_orthonormal(&k);
    }

    #[test]
    fn kernel_of_wide_matrix() {
        // one constraint on M_2: x11 - x22 = 0
        let mut m = DMatrix::zeros(1, 4);
        m[(0, 0)] = r(1.0);
        m[(0, 3)] = r(-1.0);
        let k = kernel_subspace(&m, 2, &tol());
        assert_eq!(k.len(), 3);
        assert!(k.contains(&identity(2)).0);
        assert!(!k.contains(&diag(&[1.0, -1.0])).0);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let mut g = rng(11);
        let a = random_operator(&mut g, 9);
        let b = random_operator(&mut g, 9);
        // rank-deficient: product of 9x5 and 5x9
        let m = a.columns(0, 5) * b.rows(0, 5);
        let k = kernel_subspace(&m, 3, &tol());
        assert_eq!(k.len(), 4);
        let smax = m.singular_values().max();
        for x in k.basis() {
            assert!((&m * vec_op(x)).norm() <= 10.0 * tol().rank_tol * smax);
        }
    }

    #[test]
    fn diagonal_membership() {
        let v = OperatorSubspace::diagonals(2, tol());
        let (inside, res) = v.contains(&matrix_unit(2, 0, 1));
        assert!(!inside);
        assert!((res - 1.0).abs() < 1e-12);
        assert!(OperatorSubspace::full(2, tol()).contains(&random_operator(&mut rng(2), 2)).0);
    }

    #[test]
    fn intersections() {
        let t = tol();
        let v = OperatorSubspace::diagonals(3, t);
        assert!(v.intersect(&v).unwrap().distance(&v) < 1e-10);
        let s = v.intersect(&OperatorSubspace::scalars(3, t)).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.contains(&identity(3)).0);
    }

    #[test]
    fn closure_examples() {
        let t = tol();
        assert_eq!(algebra_closure(&[identity(2)], true, &t).unwrap().len(), 1);
        let dg = algebra_closure(&[diag(&[1.0, 2.0])], true, &t).unwrap();
        assert_eq!(dg.len(), 2);
        assert!(dg.distance(&OperatorSubspace::diagonals(2, t)) < 1e-10);
        let full = algebra_closure(&[matrix_unit(2, 0, 1)], true, &t).unwrap();
        assert_eq!(full.len(), 4);
        assert!(full.is_algebra());
        assert!(full.basis().iter().all(|b| b.is_hermitian(1e-12)));
    }

    #[test]
    fn closure_rejects_empty() {
        assert!(matches!(algebra_closure(&[], true, &tol()), Err(Error::Empty(_))));
    }

    #[test]
    fn canonical_elements_prefer_echelon_diagonals() {
        // span{diag(1,0,1/2), diag(0,1,1/2)} written in a rotated basis
        let a = diag(&[1.0, 1.0, 1.0]);
        let b = diag(&[1.0, -1.0, 0.0]);
        let v = OperatorSubspace::span(3, &[a, b], tol());
        let c = v.canonical_elements();
        assert!((&c[0] - diag(&[1.0, 0.0, 0.5])).norm() < 1e-10, "{}", c[0]);
        assert!((&c[1] - diag(&[0.0, 1.0, 0.5])).norm() < 1e-10);
    }

    #[test]
    fn non_star_closed_span_keeps_complex_basis() {
        let v = OperatorSubspace::span(2, &[matrix_unit(2, 0, 1)], tol());
        assert!(!v.is_hermitian_basis());
        assert!(v.star_closure_residual() > 0.5);
        assert!(!v.is_algebra());
    }
}

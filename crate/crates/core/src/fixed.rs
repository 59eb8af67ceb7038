//! Fixed points, multiplicative and bimodule domains, the scale of
//! constants, and the discrete Noether verdicts.
//!
//! Unless stated otherwise the maps here are Heisenberg-picture (unital)
//! maps acting on observables. The Noether verdicts take the
//! Schrödinger-picture map and dualise internally.

use nalgebra::DMatrix;
use rand::Rng;

use crate::channels::positivity_profile;
use crate::linalg::subspace::{algebra_closure, kernel_subspace};
use crate::linalg::superop::id_matrix;
use crate::linalg::{c, ensure_dim, identity, matrix_unit, op_norm, psd_sqrt, r, HermitianEigen, Operator, OperatorExt, C64};
use crate::random::{eval_poly, random_poly, random_state, rng};
use crate::{AnalysisOptions, Error, NoetherVerdict, OperatorSubspace, Result, SuperOperator, Tolerances};

/// `{X : Φ(X) = X}`.
pub fn fixed_point_space(s: &SuperOperator, tol: &Tolerances) -> OperatorSubspace {
    kernel_subspace(&(s.matrix() - id_matrix(s.dim())), s.dim(), tol)
}

fn require_unital_cp(s: &SuperOperator, tol: &Tolerances) -> Result<()> {
    if !s.unital(tol) {
        return Err(Error::NotUnital(s.unital_residual()));
    }
    if !s.cp(tol) {
        return Err(Error::NotCompletelyPositive(s.choi_min_eigenvalue()));
    }
    Ok(())
}

fn stack(blocks: &[DMatrix<C64>]) -> DMatrix<C64> {
    let cols = blocks[0].ncols();
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.view_mut((at, 0), (b.nrows(), cols)).copy_from(b);
        at += b.nrows();
    }
    out
}

/// Multiplicative domain of a unital CP map, via the linear characterisation
/// `Φ(ba) = Φ(b)Φ(a)` and `Φ(ab) = Φ(a)Φ(b)` for every matrix unit `b`.
pub fn multiplicative_domain(s: &SuperOperator, tol: &Tolerances) -> Result<OperatorSubspace> {
    require_unital_cp(s, tol)?;
    let d = s.dim();
    let m = s.matrix();
    let mut blocks = Vec::with_capacity(2 * d * d);
    for i in 0..d {
        for j in 0..d {
            let e = matrix_unit(d, i, j);
            let pe = s.apply_unchecked(&e);
            // a ↦ Φ(e a) − Φ(e) Φ(a)
            blocks.push(m * SuperOperator::left_mul(&e).matrix() - SuperOperator::left_mul(&pe).matrix() * m);
            // a ↦ Φ(a e) − Φ(a) Φ(e)
            blocks.push(m * SuperOperator::right_mul(&e).matrix() - SuperOperator::right_mul(&pe).matrix() * m);
        }
    }
    Ok(kernel_subspace(&stack(&blocks), d, tol))
}

/// `{a : Φ(ab) = aΦ(b), Φ(ba) = Φ(b)a for all b}`.
pub fn bimodule_domain(s: &SuperOperator, tol: &Tolerances) -> OperatorSubspace {
    let d = s.dim();
    let m = s.matrix();
    let mut blocks = Vec::with_capacity(2 * d * d);
    for i in 0..d {
        for j in 0..d {
            let e = matrix_unit(d, i, j);
            let pe = s.apply_unchecked(&e);
            blocks.push(m * SuperOperator::right_mul(&e).matrix() - SuperOperator::right_mul(&pe).matrix());
            blocks.push(m * SuperOperator::left_mul(&e).matrix() - SuperOperator::left_mul(&pe).matrix());
        }
    }
    kernel_subspace(&stack(&blocks), d, tol)
}

#[derive(Debug, Clone)]
pub struct FixedStructureReport {
    pub fix: OperatorSubspace,
    pub mult_domain: OperatorSubspace,
    pub bimodule: OperatorSubspace,
    /// `fix ∩ mult_domain`.
    pub constants2: OperatorSubspace,
    pub fix_is_algebra: bool,
    /// Hermitian `a ∈ fix` with `a² ∉ fix`, when `fix` is not an algebra.
    pub witnesses: Vec<Operator>,
    pub constants2_bimodule_distance: f64,
    pub constants2_closure_residual: f64,
}

impl FixedStructureReport {
    /// Internal identities: `bimodule = constants2 ⊆ fix`, `constants2` is an
    /// algebra, and `fix` is an algebra iff `dim fix = dim constants2`.
    pub fn consistent(&self) -> bool {
        let thr = 10.0 * self.fix.tol.eq_tol;
        self.bimodule.containment_residual_in(&self.constants2) <= thr
            && self.constants2.containment_residual_in(&self.fix) <= thr
            && self.constants2_bimodule_distance <= thr
            && self.constants2.is_algebra()
            && self.fix_is_algebra == (self.fix.len() == self.constants2.len())
    }
}

pub fn constants_scale(s: &SuperOperator, tol: &Tolerances) -> Result<FixedStructureReport> {
    require_unital_cp(s, tol)?;
    let fix = fixed_point_space(s, tol);
    let mult_domain = multiplicative_domain(s, tol)?;
    let bimodule = bimodule_domain(s, tol);
    let constants2 = fix.intersect(&mult_domain)?;
    let fix_is_algebra = fix.is_algebra();
    let witnesses = if fix_is_algebra { Vec::new() } else { square_witness(&fix).into_iter().collect() };
    Ok(FixedStructureReport {
        constants2_bimodule_distance: constants2.distance(&bimodule),
        constants2_closure_residual: constants2.product_closure_residual().max(constants2.star_closure_residual()),
        fix,
        mult_domain,
        bimodule,
        constants2,
        fix_is_algebra,
        witnesses,
    })
}

/// First hermitian element of `v` (canonical representatives first, then
/// pairwise sums of basis elements) whose square leaves `v`; falls back to
/// the candidate with the largest square residual.
pub fn square_witness(v: &OperatorSubspace) -> Option<Operator> {
    let thr = 10.0 * v.tol.eq_tol;
    let mut candidates: Vec<Operator> = v.canonical_elements().into_iter().filter(|x| x.is_hermitian(1e-9)).collect();
    let b = v.basis();
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            let x = (&b[i] + &b[j]) * r(0.5f64.sqrt());
            candidates.push((&x + x.adjoint()) * r(0.5));
        }
    }
    let mut best: Option<(f64, Operator)> = None;
    for x in candidates {
        let sq = &x * &x;
        let res = v.residual(&sq);
        if res > thr * sq.norm().max(1.0) {
            return Some(x);
        }
        if best.as_ref().is_none_or(|(r0, _)| res > *r0) {
            best = Some((res, x));
        }
    }
    best.filter(|(res, _)| *res > thr).map(|(_, x)| x)
}

fn is_fixed(s: &SuperOperator, x: &Operator, tol: &Tolerances) -> (bool, f64) {
    let res = (s.apply_unchecked(x) - x).norm();
    (tol.close(res, x.norm()), res)
}

/// Propagation of fixed points to the generated algebra for a unital CP map.
pub fn propagation_check(s: &SuperOperator, a: &Operator, tol: &Tolerances) -> Result<NoetherVerdict> {
    ensure_dim(a, s.dim())?;
    require_unital_cp(s, tol)?;
    let mut v = NoetherVerdict::new(a.clone());
    let g = Some("propagation");
    let (a_fix, ra) = is_fixed(s, a, tol);
    let (ada_fix, rada) = is_fixed(s, &(a.adjoint() * a), tol);
    let (aad_fix, raad) = is_fixed(s, &(a * a.adjoint()), tol);
    v.push(None, "a fixed", a_fix, ra);
    v.push(None, "a*a fixed", ada_fix, rada);
    v.push(None, "aa* fixed", aad_fix, raad);
    v.push(g, "(i) a, a*a, aa* fixed", a_fix && ada_fix && aad_fix, ra.max(rada).max(raad));

    let pa = s.apply_unchecked(a);
    let d1 = s.apply_unchecked(&(a.adjoint() * a)) - pa.adjoint() * &pa;
    let d2 = s.apply_unchecked(&(a * a.adjoint())) - &pa * pa.adjoint();
    let defect = d1.norm().max(d2.norm());
    let scale = a.norm() * a.norm();
    v.push(g, "(ii) a fixed, Schwarz defects of a and a* vanish", a_fix && tol.close(defect, scale), ra.max(defect));

    let alg = algebra_closure(std::slice::from_ref(a), true, tol)?;
    let worst = alg.basis().iter().map(|b| (s.apply_unchecked(b) - b).norm()).fold(0.0, f64::max);
    v.push(g, "(iii) C*(I,a) fixed", tol.close(worst, 1.0), worst);

    if a.is_normal(tol.eq_tol) {
        v.push(g, "(normal) a and a*a fixed", a_fix && ada_fix, ra.max(rada));
    }
    Ok(v.finish())
}

/// `M_B: X ↦ B† X B`.
pub fn measurement_superop(b: &Operator) -> SuperOperator {
    SuperOperator::measurement(b)
}

/// Spanning set of density matrices: `|i⟩⟨i|`, and `|ψ⟩⟨ψ|` for
/// `ψ = (e_i + e_j)/√2` and `ψ = (e_i + i e_j)/√2`, `i < j`.
pub fn tomographic_states(d: usize) -> Vec<Operator> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(matrix_unit(d, i, i));
    }
    for i in 0..d {
        for j in i + 1..d {
            for phase in [c(1.0, 0.0), c(0.0, 1.0)] {
                let mut v = Operator::zeros(d, 1);
                v[(i, 0)] = r(0.5f64.sqrt());
                v[(j, 0)] = phase * 0.5f64.sqrt();
                out.push(&v * v.adjoint());
            }
        }
    }
    out
}

/// Worst `|tr(Ψ(ρ)X) − tr(ρX)|` over the tomographic states: zero iff the
/// expectation of `X` is conserved in every state.
fn expectation_drift(schrodinger: &SuperOperator, x: &Operator) -> f64 {
    tomographic_states(schrodinger.dim())
        .iter()
        .map(|rho| ((schrodinger.apply_unchecked(rho) * x).trace() - (rho * x).trace()).norm())
        .fold(0.0, f64::max)
}

pub(crate) fn commutator_clause(a: &SuperOperator, b: &SuperOperator, tol: &Tolerances) -> (bool, f64) {
    let res = a.commutator(b).expect("dims agree").norm();
    (tol.close(res, a.norm() * b.norm()), res)
}

/// Discrete Noether verdict for a trace-preserving map `Ψ` (Schrödinger
/// picture) and an operator `A`.
///
/// For CP maps: `[L_A,Ψ]=0 ⟺ A, A*A constants ⟺ [R_A,Ψ♯]=0 ⟺ A, A*A
/// fixed by Ψ♯`, and the mirror statement with `R_A` and `AA*`. For
/// hermitian `A` the two collapse into one group, joined by the sampled
/// expectation and standard-deviation clauses. For positive-only maps
/// these clauses are reported as not applicable.
pub fn noether_discrete(s: &SuperOperator, a: &Operator, opts: &AnalysisOptions) -> Result<NoetherVerdict> {
    let tol = &opts.tol;
    ensure_dim(a, s.dim())?;
    if !s.trace_preserving(tol) {
        return Err(Error::NotTracePreserving(s.trace_preserving_residual()));
    }
    let dual = s.trace_dual(tol)?;
    let cp = s.cp(tol);
    let mut v = NoetherVerdict::new(a.clone());
    if !cp {
        v.note("map is not completely positive: clauses of the CP theorems are reported as not applicable");
    }
    let hermitian = a.is_hermitian(tol.eq_tol);
    let ada = a.adjoint() * a;
    let aad = a * a.adjoint();
    let la = SuperOperator::left_mul(a);
    let ra = SuperOperator::right_mul(a);

    let (a_const, r_a) = {
        let res = expectation_drift(s, a);
        (tol.close(res, a.norm()), res)
    };
    let (ada_const, r_ada) = {
        let res = expectation_drift(s, &ada);
        (tol.close(res, ada.norm()), res)
    };
    let (aad_const, r_aad) = {
        let res = expectation_drift(s, &aad);
        (tol.close(res, aad.norm()), res)
    };
    let (a_fix, f_a) = is_fixed(&dual, a, tol);
    let (ada_fix, f_ada) = is_fixed(&dual, &ada, tol);
    let (aad_fix, f_aad) = is_fixed(&dual, &aad, tol);

    v.push(None, "A constant", a_const, r_a);
    v.push(None, "A*A constant", ada_const, r_ada);
    v.push(None, "AA* constant", aad_const, r_aad);

    let push = |v: &mut NoetherVerdict, group: &str, name: &str, (holds, res): (bool, f64)| {
        if cp {
            v.push(Some(group), name, holds, res);
        } else {
            v.push_not_applicable(Some(group), name, holds, res);
        }
    };
    let (gl, gr) = if hermitian { ("hermitian", "hermitian") } else { ("L_A", "R_A") };

    push(&mut v, gl, "[L_A,Psi]=0", commutator_clause(&la, s, tol));
    push(&mut v, gl, "A and A*A are constants of Psi", (a_const && ada_const, r_a.max(r_ada)));
    push(&mut v, gl, "[R_A,Psi#]=0", commutator_clause(&ra, &dual, tol));
    push(&mut v, gl, "A and A*A are fixed points of Psi#", (a_fix && ada_fix, f_a.max(f_ada)));

    push(&mut v, gr, "[R_A,Psi]=0", commutator_clause(&ra, s, tol));
    push(&mut v, gr, "A and AA* are constants of Psi", (a_const && aad_const, r_a.max(r_aad)));
    push(&mut v, gr, "[L_A,Psi#]=0", commutator_clause(&la, &dual, tol));
    push(&mut v, gr, "A and AA* are fixed points of Psi#", (a_fix && aad_fix, f_a.max(f_aad)));

    if hermitian {
        let a2 = a * a;
        let mut g = rng(opts.seed);
        let n_states = opts.samples.clamp(1, 20);
        let states: Vec<Operator> = (0..n_states).map(|_| random_state(&mut g, s.dim())).collect();
        let mut exp_res: f64 = 0.0;
        let mut sd_res: f64 = 0.0;
        for rho in &states {
            let (e0, v0) = mean_var(rho, a, &a2);
            let mut cur = rho.clone();
            for _ in 1..=3 {
                cur = s.apply_unchecked(&cur);
                let (en, vn) = mean_var(&cur, a, &a2);
                let m2 = (cur.clone() * &a2).trace().re - (rho * &a2).trace().re;
                exp_res = exp_res.max((en - e0).abs()).max(m2.abs());
                sd_res = sd_res.max((en - e0).abs()).max((vn - v0).abs());
            }
        }
        let scale = a2.norm();
        push(&mut v, "hermitian", "expectations of A and A^2 independent of n", (tol.close(exp_res, scale), exp_res));
        push(&mut v, "hermitian", "expectation and standard deviation of A independent of n", (tol.close(sd_res, scale), sd_res));
        let (a2_fix, f_a2) = is_fixed(&dual, &a2, tol);
        push(&mut v, "hermitian", "A and A^2 are fixed points of Psi#", (a_fix && a2_fix, f_a.max(f_a2)));
    }
    Ok(v.finish())
}

/// `(tr ρA, tr ρA² − (tr ρA)²)`.
fn mean_var(rho: &Operator, a: &Operator, a2: &Operator) -> (f64, f64) {
    let e = (rho * a).trace().re;
    let m2 = (rho * a2).trace().re;
    (e, m2 - e * e)
}

/// Positive + trace-preserving check for the stochastic theorems.
pub(crate) fn require_stochastic(s: &SuperOperator, opts: &AnalysisOptions) -> Result<()> {
    let tol = &opts.tol;
    if !s.trace_preserving(tol) {
        return Err(Error::NotTracePreserving(s.trace_preserving_residual()));
    }
    if !s.cp(tol) {
        let prof = positivity_profile(s, 1, opts.samples, tol, opts.seed);
        if let Some(crate::channels::KPositivity::Violated { min_eigenvalue, .. }) = prof.k_positivity.first() {
            return Err(Error::NotPositive(*min_eigenvalue));
        }
    }
    Ok(())
}

/// Spectral projections of a hermitian `A`, eigenvalues clustered at
/// relative gap `1e-6 · ‖A‖`.
pub fn spectral_projections(a: &Operator) -> Vec<(f64, Operator)> {
    let gap = 1e-6 * op_norm(a).max(f64::MIN_POSITIVE);
    HermitianEigen::new(a).spectral_projections(gap)
}

/// Measurement-form Noether verdict for a stochastic map and PSD `A`:
/// `[Ψ, M_{A^{1/2}}] = 0 ⟺ [Ψ♯, M_{A^{1/2}}] = 0 ⟺ Ψ♯(A) = A, Ψ♯(A²) = A²`,
/// together with the spectral-projection and functional-calculus forms.
pub fn noether_measurement(s: &SuperOperator, a: &Operator, opts: &AnalysisOptions) -> Result<NoetherVerdict> {
    let tol = &opts.tol;
    ensure_dim(a, s.dim())?;
    if !a.is_psd(tol.eq_tol, tol.psd_tol) {
        return Err(Error::NotPsd { what: "observable".into(), min_eig: a.min_eigenvalue() });
    }
    require_stochastic(s, opts)?;
    let dual = s.trace_dual(tol)?;
    let d = s.dim();
    let root = psd_sqrt(a, tol.eq_tol, tol.psd_tol)?;
    let m_root = SuperOperator::measurement(&root);
    let a2 = a * a;
    let g = Some("measurement");
    let mut v = NoetherVerdict::new(a.clone());

    let (a_fix, f_a) = is_fixed(&dual, a, tol);
    let (a2_fix, f_a2) = is_fixed(&dual, &a2, tol);
    v.push(None, "Psi#(A)=A", a_fix, f_a);
    v.push(None, "Psi#(A^2)=A^2", a2_fix, f_a2);

    let (h, res) = commutator_clause(s, &m_root, tol);
    v.push(g, "[Psi,M_sqrtA]=0", h, res);
    let (h, res) = commutator_clause(&dual, &m_root, tol);
    v.push(g, "[Psi#,M_sqrtA]=0", h, res);
    v.push(g, "Psi#(A)=A and Psi#(A^2)=A^2", a_fix && a2_fix, f_a.max(f_a2));

    let projs = spectral_projections(a);
    let (mut ok_s, mut ok_d, mut res_s, mut res_d) = (true, true, 0.0f64, 0.0f64);
    for (_, e) in &projs {
        let me = SuperOperator::measurement(e);
        let (h1, r1) = commutator_clause(&me, s, tol);
        let (h2, r2) = commutator_clause(&me, &dual, tol);
        ok_s &= h1;
        ok_d &= h2;
        res_s = res_s.max(r1);
        res_d = res_d.max(r2);
    }
    v.push(g, "[M_E,Psi]=0 for every spectral projection E", ok_s, res_s);
    v.push(g, "[M_E,Psi#]=0 for every spectral projection E", ok_d, res_d);

    let mut rg = rng(opts.seed ^ 0x00f0_0d);
    let eig = HermitianEigen::new(a);
    let (mut ok_s, mut ok_d, mut res_s, mut res_d) = (true, true, 0.0f64, 0.0f64);
    for _ in 0..3 {
        let deg = rg.random_range(1..=3);
        let coeffs = random_poly(&mut rg, deg);
        let fa = eig.apply_fn(|x| r(eval_poly(&coeffs, x)));
        let mf = SuperOperator::measurement(&fa);
        let (h1, r1) = commutator_clause(&mf, s, tol);
        let (h2, r2) = commutator_clause(&mf, &dual, tol);
        ok_s &= h1;
        ok_d &= h2;
        res_s = res_s.max(r1);
        res_d = res_d.max(r2);
    }
    v.push(g, "[M_f(A),Psi]=0 for sampled polynomials f", ok_s, res_s);
    v.push(g, "[M_f(A),Psi#]=0 for sampled polynomials f", ok_d, res_d);
    let _ = identity(d);
    Ok(v.finish())
}

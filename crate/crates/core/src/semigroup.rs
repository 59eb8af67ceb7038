//! Lindblad generators, norm-continuous semigroups, constants of motion and
//! ergodic projections.

use nalgebra::DMatrix;

use crate::channels::Picture;
use crate::fixed::{commutator_clause, fixed_point_space};
use crate::linalg::subspace::kernel_subspace;
use crate::linalg::superop::id_matrix;
use crate::linalg::{eigenvalues, ensure_dim, ensure_square, identity, psd_sqrt, r, spectral_abscissa, Operator, OperatorExt, C64};
use crate::random::{random_state, rng};
use crate::{AnalysisOptions, Error, NoetherVerdict, OperatorSubspace, Result, SuperOperator, Tolerances};

/// Jump operators `L_k` and a hermitian Hamiltonian `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladGenerator {
    dim: usize,
    lindblad_ops: Vec<Operator>,
    hamiltonian: Operator,
    picture: Picture,
}

impl LindbladGenerator {
    pub fn new(lindblad_ops: Vec<Operator>, hamiltonian: Operator, picture: Picture) -> Result<Self> {
        let dim = ensure_square(&hamiltonian)?;
        for l in &lindblad_ops {
            ensure_dim(l, dim)?;
        }
        let tol = Tolerances::default();
        if !hamiltonian.is_hermitian(tol.eq_tol) {
            return Err(Error::NotHermitian { what: "hamiltonian".into(), residual: hamiltonian.hermitian_residual() });
        }
        Ok(Self { dim, lindblad_ops, hamiltonian, picture })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn picture(&self) -> Picture {
        self.picture
    }

    pub fn lindblad_ops(&self) -> &[Operator] {
        &self.lindblad_ops
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    /// Same jump operators and Hamiltonian, other picture.
    pub fn dual(&self) -> Self {
        Self { picture: self.picture.flip(), ..self.clone() }
    }

    /// Direct evaluation of the generator on `x`, without the superoperator.
    pub fn apply(&self, x: &Operator) -> Operator {
        let mut out = Operator::zeros(self.dim, self.dim);
        for l in &self.lindblad_ops {
            let ld = l.adjoint();
            let ldl = &ld * l;
            let jump = match self.picture {
                Picture::Schrodinger => l * x * &ld,
                Picture::Heisenberg => &ld * x * l,
            };
            out += jump - (&ldl * x + x * &ldl) * r(0.5);
        }
        let comm = x * &self.hamiltonian - &self.hamiltonian * x;
        match self.picture {
            Picture::Schrodinger => out + comm * C64::i(),
            Picture::Heisenberg => out - comm * C64::i(),
        }
    }
}

/// Superoperator of the generator in its picture.
pub fn lindblad_super(g: &LindbladGenerator) -> SuperOperator {
    let d = g.dim;
    let id = identity(d);
    let mut m = DMatrix::<C64>::zeros(d * d, d * d);
    for l in &g.lindblad_ops {
        let ldl = l.adjoint() * l;
        let jump = match g.picture {
            Picture::Schrodinger => l.map(|z| z.conj()).kronecker(l),
            Picture::Heisenberg => l.transpose().kronecker(&l.adjoint()),
        };
        m += jump - (ldl.transpose().kronecker(&id) + id.kronecker(&ldl)) * r(0.5);
    }
    let h = &g.hamiltonian;
    let comm = h.transpose().kronecker(&id) - id.kronecker(h);
    m += match g.picture {
        Picture::Schrodinger => comm * C64::i(),
        Picture::Heisenberg => comm * (-C64::i()),
    };
    SuperOperator::from_matrix_unchecked(d, m)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Lindblad(LindbladGenerator),
    /// `Ψ − id` for a channel `Ψ` given in `picture`.
    ChannelMinusId { channel: SuperOperator, picture: Picture },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemigroupSpec {
    pub generator: Generator,
    pub time_grid: Vec<f64>,
}

impl SemigroupSpec {
    pub fn lindblad(g: LindbladGenerator) -> Self {
        Self { generator: Generator::Lindblad(g), time_grid: crate::tol::DEFAULT_TIMES.to_vec() }
    }

    pub fn channel_minus_id(channel: SuperOperator, picture: Picture) -> Self {
        Self { generator: Generator::ChannelMinusId { channel, picture }, time_grid: crate::tol::DEFAULT_TIMES.to_vec() }
    }

    pub fn with_times(mut self, times: Vec<f64>) -> Self {
        self.time_grid = times;
        self
    }

    pub fn dim(&self) -> usize {
        match &self.generator {
            Generator::Lindblad(g) => g.dim,
            Generator::ChannelMinusId { channel, .. } => channel.dim(),
        }
    }

    pub fn picture(&self) -> Picture {
        match &self.generator {
            Generator::Lindblad(g) => g.picture,
            Generator::ChannelMinusId { picture, .. } => *picture,
        }
    }

    /// Whether the semigroup is known to consist of CP maps.
    pub fn is_cp(&self, tol: &Tolerances) -> bool {
        match &self.generator {
            Generator::Lindblad(_) => true,
            Generator::ChannelMinusId { channel, .. } => channel.cp(tol),
        }
    }

    /// Generator superoperator in the semigroup's own picture.
    pub fn generator_super(&self) -> SuperOperator {
        match &self.generator {
            Generator::Lindblad(g) => lindblad_super(g),
            Generator::ChannelMinusId { channel, .. } => {
                SuperOperator::from_matrix_unchecked(channel.dim(), channel.matrix() - id_matrix(channel.dim()))
            }
        }
    }

    /// Generator in the requested picture.
    pub fn generator_in(&self, picture: Picture, tol: &Tolerances) -> Result<SuperOperator> {
        if picture == self.picture() {
            return Ok(self.generator_super());
        }
        match &self.generator {
            Generator::Lindblad(g) => Ok(lindblad_super(&g.dual())),
            Generator::ChannelMinusId { channel, .. } => {
                let dual = channel.trace_dual(tol)?;
                Ok(SuperOperator::from_matrix_unchecked(dual.dim(), dual.matrix() - id_matrix(dual.dim())))
            }
        }
    }

    pub fn schrodinger(&self, tol: &Tolerances) -> Result<SuperOperator> {
        self.generator_in(Picture::Schrodinger, tol)
    }

    pub fn heisenberg(&self, tol: &Tolerances) -> Result<SuperOperator> {
        self.generator_in(Picture::Heisenberg, tol)
    }

    /// The same semigroup viewed in the other picture.
    pub fn dual(&self, tol: &Tolerances) -> Result<Self> {
        let generator = match &self.generator {
            Generator::Lindblad(g) => Generator::Lindblad(g.dual()),
            Generator::ChannelMinusId { channel, picture } => {
                Generator::ChannelMinusId { channel: channel.trace_dual(tol)?, picture: picture.flip() }
            }
        };
        Ok(Self { generator, time_grid: self.time_grid.clone() })
    }
}

fn expm(m: &DMatrix<C64>) -> DMatrix<C64> {
    m.clone().exp()
}

/// `exp(t·ψ)` in the semigroup's picture.
pub fn evolve(spec: &SemigroupSpec, t: f64) -> Result<SuperOperator> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    let g = spec.generator_super();
    if t == 0.0 {
        return Ok(SuperOperator::identity(g.dim()));
    }
    Ok(SuperOperator::from_matrix_unchecked(g.dim(), expm(&(g.matrix() * r(t)))))
}

/// Spectral abscissa of the generator.
pub fn growth_bound(spec: &SemigroupSpec) -> Result<f64> {
    spectral_abscissa(spec.generator_super().matrix())
}

/// Resolvent `(λI − ψ)^{-1}`.
fn resolvent(g: &SuperOperator, lambda: f64) -> Result<DMatrix<C64>> {
    let n = g.matrix().nrows();
    let a = DMatrix::<C64>::identity(n, n) * r(lambda) - g.matrix();
    let inv = a.clone().try_inverse().ok_or_else(|| Error::IllConditioned(format!("λI − ψ is singular at λ = {lambda}")))?;
    let cond = a.norm() * inv.norm();
    if !cond.is_finite() || cond > 1e12 {
        return Err(Error::IllConditioned(format!("resolvent condition number {cond:.3e} at λ = {lambda}")));
    }
    Ok(inv)
}

/// Yosida approximant `λψ(λI − ψ)^{-1} = λ²R − λI`.
pub fn yosida_generator(spec: &SemigroupSpec, lambda: f64) -> Result<SuperOperator> {
    check_lambda(spec, lambda)?;
    let g = spec.generator_super();
    let res = resolvent(&g, lambda)?;
    let n = res.nrows();
    Ok(SuperOperator::from_matrix_unchecked(g.dim(), res * r(lambda * lambda) - DMatrix::identity(n, n) * r(lambda)))
}

fn check_lambda(spec: &SemigroupSpec, lambda: f64) -> Result<()> {
    let bound = growth_bound(spec)?.max(0.0);
    if !(lambda > bound) || !lambda.is_finite() {
        return Err(Error::BelowGrowthBound { lambda, bound });
    }
    Ok(())
}

/// `e^{−λt} Σ_n (λt)^n/n! (λR)^n`, truncated once past the Poisson mode and
/// the remaining terms fall below `eq_tol`.
pub fn yosida_approx(spec: &SemigroupSpec, t: f64, lambda: f64, tol: &Tolerances) -> Result<SuperOperator> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    check_lambda(spec, lambda)?;
    let g = spec.generator_super();
    let d = g.dim();
    if t == 0.0 {
        return Ok(SuperOperator::identity(d));
    }
    let lr = resolvent(&g, lambda)? * r(lambda);
    let n = lr.nrows();
    let mu = lambda * t;
    let ln_mu = mu.ln();
    let mut power = DMatrix::<C64>::identity(n, n);
    let mut log_w = -mu;
    let mut acc = &power * r(log_w.exp());
    let cap = (mu + 40.0 * mu.sqrt() + 200.0) as usize;
    let mut small_run = 0;
    for k in 1..=cap {
        log_w += ln_mu - (k as f64).ln();
        power = &power * &lr;
        let term = &power * r(log_w.exp());
        let size = term.norm();
        acc += term;
        if (k as f64) > mu && size < tol.eq_tol * 1e-3 {
            small_run += 1;
            if small_run >= 5 {
                return Ok(SuperOperator::from_matrix_unchecked(d, acc));
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::NoConvergence(format!("Yosida series did not converge within {cap} terms")))
}

/// Kernel of the Heisenberg generator with residual and time cross-checks.
#[derive(Debug, Clone)]
pub struct ConstantsOfMotion {
    pub subspace: OperatorSubspace,
    /// Largest stationarity residual over the basis, evaluated directly.
    pub stationarity_residual: f64,
    /// `(t, distance between ker ψ♯ and Fix(Ψ_t♯))`.
    pub time_checks: Vec<(f64, f64)>,
}

pub fn constants_of_motion(spec: &SemigroupSpec, opts: &AnalysisOptions) -> Result<ConstantsOfMotion> {
    let tol = &opts.tol;
    let heis = spec.heisenberg(tol)?;
    let subspace = kernel_subspace(heis.matrix(), heis.dim(), tol);
    let direct: Box<dyn Fn(&Operator) -> Operator> = match &spec.generator {
        Generator::Lindblad(g) => {
            let h = if g.picture == Picture::Heisenberg { g.clone() } else { g.dual() };
            Box::new(move |x| h.apply(x))
        }
        Generator::ChannelMinusId { .. } => {
            let heis = heis.clone();
            Box::new(move |x| heis.apply_unchecked(x))
        }
    };
    let stationarity_residual = subspace.basis().iter().map(|b| direct(b).norm() / b.norm()).fold(0.0, f64::max);
    let mut time_checks = Vec::new();
    for &t in &spec.time_grid {
        if t <= 0.0 {
            continue;
        }
        let et = SuperOperator::from_matrix_unchecked(heis.dim(), expm(&(heis.matrix() * r(t))));
        let fix = fixed_point_space(&et, tol);
        time_checks.push((t, fix.distance(&subspace)));
    }
    Ok(ConstantsOfMotion { subspace, stationarity_residual, time_checks })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErgodicMode {
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ErgodicMethod {
    /// `Φ^{2^k}` converged.
    Squaring { squarings: u32 },
    /// Cesàro means converged after `terms` powers.
    Cesaro { terms: usize },
    /// Spectral projection onto the kernel of `Φ − id` (or `ψ♯`).
    Spectral,
}

#[derive(Debug, Clone)]
pub struct ErgodicProjection {
    pub projection: SuperOperator,
    pub method: ErgodicMethod,
    /// Smallest modulus of a nonzero eigenvalue of `Φ − id` (or `ψ♯`).
    pub spectral_gap: f64,
    /// Distance between the spectral projection and a long time average
    /// (continuous mode only).
    pub time_average_residual: Option<f64>,
}

const CESARO_CAP: usize = 100_000;

fn spectral_gap(m: &DMatrix<C64>, tol: &Tolerances) -> Result<f64> {
    let ev = eigenvalues(m)?;
    let scale = m.norm().max(1.0);
    Ok(ev.iter().map(|z| z.norm()).filter(|&a| a > tol.rank_tol.sqrt() * scale).fold(f64::INFINITY, f64::min))
}

/// `K (W†K)^{-1} W†` with `K = ker M`, `W = ker M†`.
fn kernel_projection(m: &DMatrix<C64>, d: usize, tol: &Tolerances) -> Result<DMatrix<C64>> {
    let k = kernel_subspace(m, d, tol).basis_matrix();
    let w = kernel_subspace(&m.adjoint(), d, tol).basis_matrix();
    if k.ncols() != w.ncols() {
        return Err(Error::IllConditioned(format!(
            "left and right kernels differ in dimension ({} vs {}); peripheral spectrum not separated",
            k.ncols(),
            w.ncols()
        )));
    }
    if k.ncols() == 0 {
        return Ok(DMatrix::zeros(d * d, d * d));
    }
    let gram = w.adjoint() * &k;
    let inv = gram.clone().try_inverse().ok_or_else(|| Error::IllConditioned("kernel pairing is singular".into()))?;
    if inv.norm() * gram.norm() > 1e10 {
        return Err(Error::IllConditioned("kernel pairing is ill-conditioned".into()));
    }
    Ok(k * inv * w.adjoint())
}

fn is_idempotent(p: &DMatrix<C64>, tol: &Tolerances) -> bool {
    (p * p - p).norm() <= tol.eq_tol * p.norm().max(1.0)
}

/// Ergodic projection of a unital map by squaring, Cesàro averaging, then
/// the spectral fallback.
pub fn ergodic_projection_discrete(phi: &SuperOperator, tol: &Tolerances) -> Result<ErgodicProjection> {
    if !phi.unital(tol) {
        return Err(Error::NotUnital(phi.unital_residual()));
    }
    let d = phi.dim();
    let n = d * d;
    let minus_id = phi.matrix() - id_matrix(d);
    let spectral_gap = spectral_gap(&minus_id, tol)?;
    let finish = |p: DMatrix<C64>, method| ErgodicProjection {
        projection: SuperOperator::from_matrix_unchecked(d, p).recompute_flags(tol),
        method,
        spectral_gap,
        time_average_residual: None,
    };

    // Φ^{2^k} converges only when 1 is the sole peripheral eigenvalue; with a
    // slow second eigenvalue the squarings would erode the eigenvalue-1 part.
    let ev = eigenvalues(phi.matrix())?;
    let squaring_converges = ev.iter().all(|z| (z - r(1.0)).norm() <= 1e-8 || z.norm() <= 1.0 - 1e-6);
    let invariant = |p: &DMatrix<C64>| (phi.matrix() * p - p).norm() <= tol.eq_tol * p.norm().max(1.0);
    let mut q = phi.matrix().clone();
    for k in 0..if squaring_converges { 64u32 } else { 0 } {
        let q2 = &q * &q;
        let step = (&q2 - &q).norm();
        if !step.is_finite() || step > 1e6 {
            break;
        }
        if step <= tol.eq_tol * 1e-1 && is_idempotent(&q2, tol) {
            if invariant(&q2) {
                return Ok(finish(q2, ErgodicMethod::Squaring { squarings: k + 1 }));
            }
            break;
        }
        q = q2;
    }

    // A_{2m} = (A_m + Φ^m A_m)/2
    let mut avg = DMatrix::<C64>::identity(n, n);
    let mut pw = phi.matrix().clone();
    let mut m = 1usize;
    while 2 * m <= CESARO_CAP {
        let next = (&avg + &pw * &avg) * r(0.5);
        let step = (&next - &avg).norm();
        avg = next;
        pw = &pw * &pw;
        m *= 2;
        if step <= tol.eq_tol * 1e-1 && is_idempotent(&avg, tol) && invariant(&avg) {
            return Ok(finish(avg, ErgodicMethod::Cesaro { terms: m }));
        }
    }

    let p = kernel_projection(&minus_id, d, tol)
        .map_err(|e| Error::NoConvergence(format!("ergodic projection failed (spectral gap {spectral_gap:.3e}): {e}")))?;
    Ok(finish(p, ErgodicMethod::Spectral))
}

/// `(1/T)∫_0^T exp(sA) ds` via the exponential of `[[A, I], [0, 0]]`.
pub fn time_average(a: &DMatrix<C64>, horizon: f64) -> DMatrix<C64> {
    let n = a.nrows();
    let mut aug = DMatrix::<C64>::zeros(2 * n, 2 * n);
    aug.view_mut((0, 0), (n, n)).copy_from(&(a * r(horizon)));
    aug.view_mut((0, n), (n, n)).copy_from(&(DMatrix::<C64>::identity(n, n) * r(horizon)));
    let e = expm(&aug);
    e.view((0, n), (n, n)).into_owned() * r(1.0 / horizon)
}

/// Ergodic projection of the Heisenberg semigroup generated by `ψ♯`.
pub fn ergodic_projection_continuous(spec: &SemigroupSpec, tol: &Tolerances) -> Result<ErgodicProjection> {
    let heis = spec.heisenberg(tol)?;
    let d = heis.dim();
    let spectral_gap = spectral_gap(heis.matrix(), tol)?;
    let p = kernel_projection(heis.matrix(), d, tol)
        .map_err(|e| Error::NoConvergence(format!("ergodic projection failed (spectral gap {spectral_gap:.3e}): {e}")))?;
    let horizon = if spectral_gap.is_finite() { (1e4 / spectral_gap).min(1e8) } else { 1.0 };
    let avg = time_average(heis.matrix(), horizon);
    let residual = (&avg - &p).norm();
    Ok(ErgodicProjection {
        projection: SuperOperator::from_matrix_unchecked(d, p).recompute_flags(tol),
        method: ErgodicMethod::Spectral,
        spectral_gap,
        time_average_residual: Some(residual),
    })
}

/// Dispatch: a channel must be unital (Heisenberg picture); a semigroup
/// spec in discrete mode uses its time-one map.
pub enum ErgodicInput<'a> {
    Channel(&'a SuperOperator),
    Semigroup(&'a SemigroupSpec),
}

pub fn ergodic_projection(input: ErgodicInput<'_>, mode: ErgodicMode, tol: &Tolerances) -> Result<ErgodicProjection> {
    match (input, mode) {
        (ErgodicInput::Channel(phi), ErgodicMode::Discrete) => ergodic_projection_discrete(phi, tol),
        (ErgodicInput::Channel(phi), ErgodicMode::Continuous) => {
            ergodic_projection_continuous(&SemigroupSpec::channel_minus_id(phi.clone(), Picture::Heisenberg), tol)
        }
        (ErgodicInput::Semigroup(spec), ErgodicMode::Discrete) => {
            let heis = spec.heisenberg(tol)?;
            let one = SuperOperator::from_matrix_unchecked(heis.dim(), expm(heis.matrix())).recompute_flags(tol);
            ergodic_projection_discrete(&one, tol)
        }
        (ErgodicInput::Semigroup(spec), ErgodicMode::Continuous) => ergodic_projection_continuous(spec, tol),
    }
}

#[derive(Debug, Clone)]
pub struct ConditionalExpectationReport {
    pub passes: bool,
    pub max_residual: f64,
    pub range: OperatorSubspace,
    pub range_is_algebra: bool,
    /// Element `r` of the range with the first bimodule failure.
    pub witness: Option<Operator>,
}

/// Bimodule test `P(ar) = P(a)r`, `P(ra) = rP(a)` for `r` in the range and
/// `a` over matrix units.
pub fn conditional_expectation_check(p: &SuperOperator, tol: &Tolerances) -> Result<ConditionalExpectationReport> {
    if !is_idempotent(p.matrix(), tol) {
        return Err(Error::NotIdempotent((p.matrix() * p.matrix() - p.matrix()).norm()));
    }
    let d = p.dim();
    let range = fixed_point_space(p, tol);
    let thr = 10.0 * tol.eq_tol;
    let mut max_residual: f64 = 0.0;
    let mut witness = None;
    for rr in range.canonical_elements() {
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let a = crate::linalg::matrix_unit(d, i, j);
                let pa = p.apply_unchecked(&a);
                let r1 = (p.apply_unchecked(&(&a * &rr)) - &pa * &rr).norm();
                let r2 = (p.apply_unchecked(&(&rr * &a)) - &rr * &pa).norm();
                worst = worst.max(r1).max(r2);
            }
        }
        let scale = rr.norm().max(1.0) * p.norm().max(1.0);
        if worst > thr * scale && witness.is_none() {
            witness = Some(rr.clone());
        }
        max_residual = max_residual.max(worst / scale);
    }
    let range_is_algebra = range.is_algebra();
    Ok(ConditionalExpectationReport { passes: witness.is_none(), max_residual, range, range_is_algebra, witness })
}

/// `(tr ρA, tr ρA² − (tr ρA)², std dev)`.
pub fn quantum_stats(a: &Operator, rho: &Operator, tol: &Tolerances) -> Result<(f64, f64, f64)> {
    let d = ensure_square(a)?;
    ensure_dim(rho, d)?;
    if !a.is_hermitian(tol.eq_tol) {
        return Err(Error::NotHermitian { what: "observable".into(), residual: a.hermitian_residual() });
    }
    if !rho.is_psd(tol.eq_tol, tol.psd_tol) {
        return Err(Error::InvalidState(format!("state is not PSD (min eigenvalue {:.3e})", rho.min_eigenvalue())));
    }
    let tr = rho.trace();
    if (tr - r(1.0)).norm() > tol.eq_tol {
        return Err(Error::InvalidState(format!("state trace is {} rather than 1", tr.re)));
    }
    let e = (rho * a).trace().re;
    let var = (rho * a * a).trace().re - e * e;
    if var < -tol.psd_tol {
        return Err(Error::InvalidState(format!("negative variance {var:.3e}")));
    }
    Ok((e, var, var.max(0.0).sqrt()))
}

fn in_kernel(g: &SuperOperator, x: &Operator, tol: &Tolerances) -> (bool, f64) {
    let res = g.apply_unchecked(x).norm();
    (tol.close(res, g.norm() * x.norm()), res)
}

/// Continuous-time Noether verdict.
///
/// Groups: `L_A` (or `hermitian` for hermitian `A`), `R_A`, and for PSD `A`
/// the measurement form. Domain-invariance clauses are trivially true in
/// finite dimensions and are reported as diagnostics.
pub fn noether_continuous(spec: &SemigroupSpec, a: &Operator, opts: &AnalysisOptions) -> Result<NoetherVerdict> {
    let tol = &opts.tol;
    ensure_dim(a, spec.dim())?;
    let psi = spec.schrodinger(tol)?;
    let heis = spec.heisenberg(tol)?;
    let times = opts.positive_times();
    let flows: Vec<(SuperOperator, SuperOperator)> = times
        .iter()
        .map(|&t| {
            (
                SuperOperator::from_matrix_unchecked(psi.dim(), expm(&(psi.matrix() * r(t)))),
                SuperOperator::from_matrix_unchecked(heis.dim(), expm(&(heis.matrix() * r(t)))),
            )
        })
        .collect();
    let cp = spec.is_cp(tol);
    let mut v = NoetherVerdict::new(a.clone());
    v.note("dom(psi) is the whole matrix algebra; domain-invariance clauses hold trivially");
    if !cp {
        v.note("semigroup is not completely positive: clauses of the CP theorems are reported as not applicable");
    }
    let hermitian = a.is_hermitian(tol.eq_tol);
    let ada = a.adjoint() * a;
    let aad = a * a.adjoint();
    let la = SuperOperator::left_mul(a);
    let ra = SuperOperator::right_mul(a);

    let (k_a, rk_a) = in_kernel(&heis, a, tol);
    let (k_ada, rk_ada) = in_kernel(&heis, &ada, tol);
    let (k_aad, rk_aad) = in_kernel(&heis, &aad, tol);
    v.push(None, "A in ker psi#", k_a, rk_a);
    v.push(None, "A*A in ker psi#", k_ada, rk_ada);
    v.push(None, "AA* in ker psi#", k_aad, rk_aad);
    v.push(None, "L_A and R_A leave dom(psi) invariant", true, 0.0);

    let over_times = |x: &SuperOperator, pick: fn(&(SuperOperator, SuperOperator)) -> &SuperOperator| {
        let mut ok = true;
        let mut res: f64 = 0.0;
        for f in &flows {
            let (h, rr) = commutator_clause(x, pick(f), tol);
            ok &= h;
            res = res.max(rr);
        }
        (ok, res)
    };
    fn schr(f: &(SuperOperator, SuperOperator)) -> &SuperOperator {
        &f.0
    }
    fn dual(f: &(SuperOperator, SuperOperator)) -> &SuperOperator {
        &f.1
    }

    let push = |v: &mut NoetherVerdict, group: &str, name: &str, (holds, res): (bool, f64)| {
        if cp {
            v.push(Some(group), name, holds, res);
        } else {
            v.push_not_applicable(Some(group), name, holds, res);
        }
    };
    let (gl, gr) = if hermitian { ("hermitian", "hermitian") } else { ("L_A", "R_A") };
    push(&mut v, gl, "[L_A,Psi_t]=0 at sampled t", over_times(&la, schr));
    push(&mut v, gl, "[R_A,Psi_t#]=0 at sampled t", over_times(&ra, dual));
    push(&mut v, gl, "[L_A,psi]=0", commutator_clause(&la, &psi, tol));
    push(&mut v, gl, "A and A*A in ker psi#", (k_a && k_ada, rk_a.max(rk_ada)));

    push(&mut v, gr, "[R_A,Psi_t]=0 at sampled t", over_times(&ra, schr));
    push(&mut v, gr, "[L_A,Psi_t#]=0 at sampled t", over_times(&la, dual));
    push(&mut v, gr, "[R_A,psi]=0", commutator_clause(&ra, &psi, tol));
    push(&mut v, gr, "A and AA* in ker psi#", (k_a && k_aad, rk_a.max(rk_aad)));

    if hermitian {
        let a2 = a * a;
        let (k_a2, rk_a2) = in_kernel(&heis, &a2, tol);
        push(&mut v, "hermitian", "A and A^2 in ker psi#", (k_a && k_a2, rk_a.max(rk_a2)));
        let mut g = rng(opts.seed);
        let mut exp_res: f64 = 0.0;
        let mut var_res: f64 = 0.0;
        for _ in 0..opts.samples.clamp(1, 20) {
            let rho = random_state(&mut g, spec.dim());
            let drho = psi.apply_unchecked(&rho);
            let de = (&drho * a).trace().re;
            let de2 = (&drho * &a2).trace().re;
            let e = (&rho * a).trace().re;
            exp_res = exp_res.max(de.abs()).max(de2.abs());
            // d/dt var = d/dt tr(ρA²) − 2 tr(ρA) d/dt tr(ρA)
            var_res = var_res.max(de.abs()).max((de2 - 2.0 * e * de).abs());
        }
        let scale = psi.norm() * a2.norm();
        push(&mut v, "hermitian", "d/dt of expectations of A and A^2 vanish", (tol.close(exp_res, scale), exp_res));
        push(&mut v, "hermitian", "d/dt of expectation and variance of A vanish", (tol.close(var_res, scale), var_res));
    }

    if a.is_psd(tol.eq_tol, tol.psd_tol) {
        let root = psd_sqrt(a, tol.eq_tol, tol.psd_tol)?;
        let m = SuperOperator::measurement(&root);
        let a2 = a * a;
        let (k_a2, rk_a2) = in_kernel(&heis, &a2, tol);
        let g = Some("measurement");
        let (h, res) = commutator_clause(&m, &psi, tol);
        v.push(g, "[M_sqrtA,psi]=0", h, res);
        let (h, res) = commutator_clause(&m, &heis, tol);
        v.push(g, "[M_sqrtA,psi#]=0", h, res);
        let (h, res) = over_times(&m, schr);
        v.push(g, "[M_sqrtA,Psi_t]=0 at sampled t", h, res);
        v.push(g, "A and A^2 in ker psi# (measurement form)", k_a && k_a2, rk_a.max(rk_a2));
    }
    Ok(v.finish())
}

//! Quantum operations, stochastic maps and their dilations.

use std::fmt;
use std::str::FromStr;

use crate::linalg::superop::SuperFlags;
use crate::linalg::{block_matrix, ensure_dim, ensure_square, identity, matrix_unit, psd_sqrt, r, HermitianEigen, Operator, OperatorExt, C64};
use crate::random::{random_pure_state, random_psd, rng};
use crate::{Error, Result, SuperOperator, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Picture {
    /// Acts on density matrices; trace-preserving.
    Schrodinger,
    /// Acts on observables; unital.
    Heisenberg,
}

impl Picture {
    pub fn flip(self) -> Self {
        match self {
            Picture::Schrodinger => Picture::Heisenberg,
            Picture::Heisenberg => Picture::Schrodinger,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Picture::Schrodinger => "schrodinger",
            Picture::Heisenberg => "heisenberg",
        }
    }
}

impl fmt::Display for Picture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Picture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "schrodinger" | "schroedinger" | "schrödinger" => Ok(Picture::Schrodinger),
            "heisenberg" => Ok(Picture::Heisenberg),
            other => Err(Error::Input(format!("unknown picture {other:?} (expected schrodinger or heisenberg)"))),
        }
    }
}

/// `X ↦ Σ_k A_k X A_k†`.
///
/// In the Schrödinger picture `Σ A_k† A_k = I` (trace-preserving); in the
/// Heisenberg picture `Σ A_k A_k† = I` (unital).
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    kraus_ops: Vec<Operator>,
    picture: Picture,
}

impl KrausChannel {
    pub fn new(kraus_ops: Vec<Operator>, picture: Picture, tol: &Tolerances) -> Result<Self> {
        let first = kraus_ops.first().ok_or_else(|| Error::InvalidChannel("no Kraus operators".into()))?;
        let d = ensure_square(first)?;
        tol.check_dim(d)?;
        for a in &kraus_ops {
            ensure_dim(a, d)?;
        }
        let ch = Self { dim: d, kraus_ops, picture };
        let res = ch.normalization_residual();
        if !tol.close(res, d as f64) {
            let what = match picture {
                Picture::Schrodinger => "Σ A_k† A_k ≠ I (not trace-preserving)",
                Picture::Heisenberg => "Σ A_k A_k† ≠ I (not unital)",
            };
            return Err(Error::InvalidChannel(format!("{what}; residual {res:.3e}")));
        }
        Ok(ch)
    }

    pub(crate) fn new_unchecked(kraus_ops: Vec<Operator>, picture: Picture) -> Self {
        let dim = kraus_ops[0].nrows();
        Self { dim, kraus_ops, picture }
    }

    pub fn identity(dim: usize, picture: Picture) -> Self {
        Self::new_unchecked(vec![identity(dim)], picture)
    }

    /// Unitary conjugation `X ↦ U X U†`.
    pub fn unitary(u: Operator, picture: Picture, tol: &Tolerances) -> Result<Self> {
        if !u.is_unitary(tol.eq_tol) {
            return Err(Error::InvalidChannel("conjugating operator is not unitary".into()));
        }
        Self::new(vec![u], picture, tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus_ops(&self) -> &[Operator] {
        &self.kraus_ops
    }

    pub fn picture(&self) -> Picture {
        self.picture
    }

    /// `‖Σ A†A − I‖` (Schrödinger) or `‖Σ AA† − I‖` (Heisenberg).
    pub fn normalization_residual(&self) -> f64 {
        let d = self.dim;
        let sum = self.kraus_ops.iter().fold(Operator::zeros(d, d), |acc, a| match self.picture {
            Picture::Schrodinger => acc + a.adjoint() * a,
            Picture::Heisenberg => acc + a * a.adjoint(),
        });
        (sum - identity(d)).norm()
    }

    /// Trace dual: Kraus operators `A_k†`, opposite picture.
    pub fn dual(&self) -> Self {
        Self { dim: self.dim, kraus_ops: self.kraus_ops.iter().map(|a| a.adjoint()).collect(), picture: self.picture.flip() }
    }

    pub fn apply(&self, x: &Operator) -> Result<Operator> {
        ensure_dim(x, self.dim)?;
        Ok(self.kraus_ops.iter().fold(Operator::zeros(self.dim, self.dim), |acc, a| acc + a * x * a.adjoint()))
    }

    /// Superoperator `Σ_k conj(A_k) ⊗ A_k` with flags set from the picture.
    pub fn to_super(&self) -> SuperOperator {
        let n = self.dim * self.dim;
        let m = self
            .kraus_ops
            .iter()
            .fold(nalgebra::DMatrix::zeros(n, n), |acc, a| acc + a.map(|z| z.conj()).kronecker(a));
        let (tp, unital) = match self.picture {
            Picture::Schrodinger => (Some(true), None),
            Picture::Heisenberg => (None, Some(true)),
        };
        SuperOperator::from_matrix(self.dim, m).expect("sizes agree").with_flags(SuperFlags {
            trace_preserving: tp,
            unital,
            hermiticity_preserving: Some(true),
            completely_positive: Some(true),
        })
    }
}

/// Superoperator of a Kraus channel.
pub fn channel_super(ch: &KrausChannel) -> SuperOperator {
    ch.to_super()
}

/// Lüders operation `T ↦ Σ A_n^{1/2} T A_n^{1/2}` for PSD effects summing to `I`.
pub fn build_luders(effects: &[Operator], tol: &Tolerances) -> Result<KrausChannel> {
    let first = effects.first().ok_or_else(|| Error::InvalidChannel("no effects".into()))?;
    let d = ensure_square(first)?;
    let mut sum = Operator::zeros(d, d);
    let mut ops = Vec::with_capacity(effects.len());
    for (n, e) in effects.iter().enumerate() {
        ensure_dim(e, d)?;
        let sqrt = psd_sqrt(e, tol.eq_tol, tol.psd_tol).map_err(|err| match err {
            Error::NotPsd { min_eig, .. } => Error::NotPsd { what: format!("effect {n}"), min_eig },
            Error::NotHermitian { residual, .. } => Error::NotHermitian { what: format!("effect {n}"), residual },
            other => other,
        })?;
        sum += e;
        ops.push(sqrt);
    }
    let res = (sum - identity(d)).norm();
    if !tol.close(res, d as f64) {
        return Err(Error::InvalidChannel(format!("effects do not sum to the identity (residual {res:.3e})")));
    }
    KrausChannel::new(ops, Picture::Schrodinger, tol)
}

/// Choi matrix `Σ_ij E_ij ⊗ Φ(E_ij)`.
pub fn choi_matrix(s: &SuperOperator) -> Operator {
    s.choi()
}

/// Transpose map on `M_dim`: positive, trace-preserving, unital, not 2-positive for `dim >= 2`.
pub fn transpose_map(dim: usize) -> Result<SuperOperator> {
    if dim < 1 {
        return Err(Error::Input("transpose map needs dim >= 1".into()));
    }
    Ok(SuperOperator::transpose(dim))
}

#[derive(Debug, Clone, PartialEq)]
pub enum KPositivity {
    /// A PSD input in `M_k(M_d)` whose image has a negative eigenvalue.
    Violated { k: usize, witness: Operator, min_eigenvalue: f64, canonical: bool },
    /// No violation among the canonical witnesses and `samples` random inputs.
    NoViolationFound { k: usize, samples: usize, min_eigenvalue_seen: f64 },
}

impl KPositivity {
    pub fn k(&self) -> usize {
        match self {
            KPositivity::Violated { k, .. } | KPositivity::NoViolationFound { k, .. } => *k,
        }
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, KPositivity::Violated { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositivityProfile {
    pub trace_preserving: bool,
    pub unital: bool,
    pub hermiticity_preserving: bool,
    pub completely_positive: bool,
    pub choi_min_eigenvalue: f64,
    pub k_positivity: Vec<KPositivity>,
}

impl PositivityProfile {
    /// Positive on every sampled input (`k = 1` not violated).
    pub fn positive_on_samples(&self) -> bool {
        self.k_positivity.iter().find(|p| p.k() == 1).is_some_and(|p| !p.is_violated())
    }
}

/// Matrix-unit witness `[E_ij]_{i,j<m}` in `M_k(M_d)`, `m = min(k, d)`.
pub fn matrix_unit_witness(k: usize, d: usize) -> Operator {
    let m = k.min(d);
    let blocks: Vec<Vec<Operator>> = (0..k)
        .map(|i| (0..k).map(|j| if i < m && j < m { matrix_unit(d, i, j) } else { Operator::zeros(d, d) }).collect())
        .collect();
    block_matrix(&blocks)
}

/// Exact CP/TP/unital/HP flags plus sampled `k`-positivity for `k = 1..=k_max`.
///
/// The canonical matrix-unit witness is always tried first; after that,
/// `samples` random PSD inputs (alternating rank-one and full rank) per `k`.
pub fn positivity_profile(s: &SuperOperator, k_max: usize, samples: usize, tol: &Tolerances, seed: u64) -> PositivityProfile {
    let d = s.dim();
    let choi_min = s.choi_min_eigenvalue();
    let mut g = rng(seed);
    let mut k_positivity = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut seen = f64::INFINITY;
        let mut found = None;
        let witness = matrix_unit_witness(k, d);
        let out = s.apply_amplified(k, &witness).expect("sizes agree");
        let me = HermitianEigen::new(&out).values[0];
        seen = seen.min(me);
        if me < -tol.psd_tol {
            found = Some(KPositivity::Violated { k, witness, min_eigenvalue: me, canonical: true });
        }
        if found.is_none() {
            for n in 0..samples {
                let x = if n % 2 == 0 { random_pure_state(&mut g, k * d) } else { random_psd(&mut g, k * d, k * d) };
                let x = &x / x.trace();
                let out = s.apply_amplified(k, &x).expect("sizes agree");
                let me = HermitianEigen::new(&out).values[0];
                seen = seen.min(me);
                if me < -tol.psd_tol {
                    found = Some(KPositivity::Violated { k, witness: x, min_eigenvalue: me, canonical: false });
                    break;
                }
            }
        }
        k_positivity.push(found.unwrap_or(KPositivity::NoViolationFound { k, samples, min_eigenvalue_seen: seen }));
    }
    PositivityProfile {
        trace_preserving: s.is_trace_preserving(tol),
        unital: s.is_unital(tol),
        hermiticity_preserving: s.is_hermiticity_preserving(tol),
        completely_positive: choi_min >= -tol.psd_tol * s.choi().norm().max(1.0),
        choi_min_eigenvalue: choi_min,
        k_positivity,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stage {
    Kraus(KrausChannel),
    Transpose,
}

/// Convex mixture of pipelines; each pipeline applies its stages in order.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMapSpec {
    pub dim: usize,
    pub pipelines: Vec<(f64, Vec<Stage>)>,
}

impl StochasticMapSpec {
    pub fn single(dim: usize, stages: Vec<Stage>) -> Self {
        Self { dim, pipelines: vec![(1.0, stages)] }
    }

    /// Matrix product per pipeline, convex combination across pipelines,
    /// flags recomputed from the result.
    pub fn compile(&self, tol: &Tolerances) -> Result<SuperOperator> {
        if self.pipelines.is_empty() {
            return Err(Error::Empty("stochastic map has no pipelines".into()));
        }
        let total: f64 = self.pipelines.iter().map(|(w, _)| w).sum();
        if self.pipelines.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > tol.eq_tol {
            return Err(Error::InvalidChannel(format!("mixture weights must be nonnegative and sum to 1 (sum {total})")));
        }
        let mut acc = SuperOperator::zero(self.dim);
        for (w, stages) in &self.pipelines {
            let mut m = SuperOperator::identity(self.dim);
            for st in stages {
                let s = match st {
                    Stage::Kraus(ch) => {
                        if ch.dim() != self.dim {
                            return Err(Error::DimensionMismatch { expected: self.dim, found: ch.dim() });
                        }
                        ch.to_super()
                    }
                    Stage::Transpose => SuperOperator::transpose(self.dim),
                };
                m = s.compose(&m)?;
            }
            acc = acc.add(&m.scale(r(*w)))?;
        }
        Ok(acc.recompute_flags(tol))
    }
}

/// `V: C^d → C^d ⊗ C^m` with `Φ(a) = V† (a ⊗ I_m) V`.
#[derive(Debug, Clone, PartialEq)]
pub struct StinespringTriple {
    pub v: Operator,
    pub dims: (usize, usize),
}

impl StinespringTriple {
    /// The representation `a ↦ a ⊗ I_m`.
    pub fn rep(&self, a: &Operator) -> Operator {
        a.kronecker(&identity(self.dims.1))
    }

    pub fn reconstruct(&self, a: &Operator) -> Operator {
        self.v.adjoint() * self.rep(a) * &self.v
    }

    /// Worst `‖V†(E_ij ⊗ I)V − Φ(E_ij)‖` over the matrix units, with `Φ`
    /// the Heisenberg-picture form of `ch`.
    pub fn reconstruction_error(&self, ch: &KrausChannel) -> f64 {
        let ch = match ch.picture() {
            Picture::Heisenberg => ch.clone(),
            Picture::Schrodinger => ch.dual(),
        };
        let d = self.dims.0;
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let e = matrix_unit(d, i, j);
                let target = ch.apply(&e).expect("dims agree");
                worst = worst.max((self.reconstruct(&e) - target).norm());
            }
        }
        worst
    }

    /// Minimum eigenvalue of `I − V†V`.
    pub fn contraction_margin(&self) -> f64 {
        (identity(self.dims.0) - self.v.adjoint() * &self.v).min_eigenvalue()
    }

    /// Minimum eigenvalue of `I_K − VV†`.
    pub fn co_contraction_margin(&self) -> f64 {
        let n = self.dims.0 * self.dims.1;
        (identity(n) - &self.v * self.v.adjoint()).min_eigenvalue()
    }
}

/// Stinespring dilation of a Heisenberg-picture map `Φ(a) = Σ A_k a A_k†`:
/// `V h = Σ_k (A_k† h) ⊗ e_k`. Schrödinger-picture channels are dualised first.
pub fn stinespring_dilation(ch: &KrausChannel, tol: &Tolerances) -> Result<StinespringTriple> {
    let ch = match ch.picture() {
        Picture::Heisenberg => ch.clone(),
        Picture::Schrodinger => ch.dual(),
    };
    let d = ch.dim();
    let m = ch.kraus_ops().len();
    let phi_one = ch.apply(&identity(d))?;
    let norm = crate::linalg::op_norm(&phi_one);
    if norm > 1.0 + tol.eq_tol {
        return Err(Error::NormExceedsOne(norm));
    }
    let mut v = Operator::zeros(d * m, d);
    for (k, a) in ch.kraus_ops().iter().enumerate() {
        let mut ek = Operator::zeros(m, 1);
        ek[(k, 0)] = C64::new(1.0, 0.0);
        v += a.adjoint().kronecker(&ek);
    }
    Ok(StinespringTriple { v, dims: (d, m) })
}

/// `Φ(a†a) − Φ(a)†Φ(a)` for a unital CP map; PSD by the Schwarz inequality.
pub fn schwarz_defect(s: &SuperOperator, a: &Operator, tol: &Tolerances) -> Result<Operator> {
    ensure_dim(a, s.dim())?;
    if !s.unital(tol) {
        return Err(Error::NotUnital(s.unital_residual()));
    }
    if !s.cp(tol) {
        return Err(Error::NotCompletelyPositive(s.choi_min_eigenvalue()));
    }
    let pa = s.apply_unchecked(a);
    Ok(s.apply_unchecked(&(a.adjoint() * a)) - pa.adjoint() * pa)
}

//! Seeded random instances: Ginibre matrices, Haar unitaries, states,
//! channels with prescribed structure, Lindblad generators and Markov chains.
//!
//! Used by the sampled checks in the analyses and by the property suites.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::{KrausChannel, Picture};
use crate::linalg::{c, identity, pd_inv_sqrt, r, Operator, C64};
use crate::semigroup::LindbladGenerator;

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng + ?Sized>(g: &mut R) -> f64 {
    g.sample(StandardNormal)
}

pub fn random_complex<R: Rng + ?Sized>(g: &mut R) -> C64 {
    c(gaussian(g), gaussian(g))
}

/// Ginibre matrix with standard complex normal entries.
pub fn random_operator<R: Rng + ?Sized>(g: &mut R, d: usize) -> Operator {
    Operator::from_fn(d, d, |_, _| random_complex(g))
}

pub fn random_hermitian<R: Rng + ?Sized>(g: &mut R, d: usize) -> Operator {
    let x = random_operator(g, d);
    (&x + x.adjoint()) * r(0.5)
}

/// `G G†` for a `d x rank` Ginibre `G`.
pub fn random_psd<R: Rng + ?Sized>(g: &mut R, d: usize, rank: usize) -> Operator {
    let m = Operator::from_fn(d, rank.max(1), |_, _| random_complex(g));
    &m * m.adjoint()
}

/// Full-rank density matrix (normalised Wishart).
pub fn random_state<R: Rng + ?Sized>(g: &mut R, d: usize) -> Operator {
    let p = random_psd(g, d, d);
    let t = p.trace();
    p / t
}

pub fn random_pure_state<R: Rng + ?Sized>(g: &mut R, d: usize) -> Operator {
    let v = Operator::from_fn(d, 1, |_, _| random_complex(g));
    let v = &v / r(v.norm());
    &v * v.adjoint()
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
pub fn random_unitary<R: Rng + ?Sized>(g: &mut R, d: usize) -> Operator {
    let qr = random_operator(g, d).qr();
    let (mut q, rr) = qr.unpack();
    for j in 0..d {
        let z = rr[(j, j)];
        let phase = if z.norm() > 0.0 { z / r(z.norm()) } else { r(1.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Orthogonal projection of the given rank onto a random subspace.
pub fn random_projection<R: Rng + ?Sized>(g: &mut R, d: usize, rank: usize) -> Operator {
    let u = random_unitary(g, d);
    let cols = u.columns(0, rank.min(d));
    &cols * cols.adjoint()
}

/// Kraus operators with `Σ A_k A_k† = I` (unital in the `X ↦ Σ A X A†` form).
pub fn random_unital_kraus<R: Rng + ?Sized>(g: &mut R, d: usize, m: usize) -> Vec<Operator> {
    let raw: Vec<Operator> = (0..m.max(1)).map(|_| random_operator(g, d)).collect();
    let s = raw.iter().fold(Operator::zeros(d, d), |acc, a| acc + a * a.adjoint());
    let n = pd_inv_sqrt(&s).expect("Ginibre sums are positive definite");
    raw.iter().map(|a| &n * a).collect()
}

/// Kraus operators with `Σ A_k† A_k = I` (trace-preserving).
pub fn random_tp_kraus<R: Rng + ?Sized>(g: &mut R, d: usize, m: usize) -> Vec<Operator> {
    random_unital_kraus(g, d, m).into_iter().map(|a| a.adjoint()).collect()
}

pub fn random_unital_channel<R: Rng + ?Sized>(g: &mut R, d: usize, m: usize) -> KrausChannel {
    KrausChannel::new_unchecked(random_unital_kraus(g, d, m), Picture::Heisenberg)
}

pub fn random_tp_channel<R: Rng + ?Sized>(g: &mut R, d: usize, m: usize) -> KrausChannel {
    KrausChannel::new_unchecked(random_tp_kraus(g, d, m), Picture::Schrodinger)
}

/// Block-diagonal unital channel: random Kraus operators on the blocks of the
/// split `d = d1 + (d - d1)`, so the fixed space contains both block projections.
pub fn random_block_unital_channel<R: Rng + ?Sized>(g: &mut R, d: usize, split: usize, m: usize) -> KrausChannel {
    let split = split.clamp(1, d - 1);
    let top = random_unital_kraus(g, split, m);
    let bottom = random_unital_kraus(g, d - split, m);
    let ops = top
        .iter()
        .zip(bottom.iter())
        .map(|(a, b)| {
            let mut k = Operator::zeros(d, d);
            k.view_mut((0, 0), (split, split)).copy_from(a);
            k.view_mut((split, split), (d - split, d - split)).copy_from(b);
            k
        })
        .collect();
    KrausChannel::new_unchecked(ops, Picture::Heisenberg)
}

/// Unital channel obtained by conjugating a fixed unital channel with a
/// unitary: `X ↦ U† Φ(U X U†) U`.
pub fn conjugated_channel(ch: &KrausChannel, u: &Operator) -> KrausChannel {
    let ops = ch.kraus_ops().iter().map(|a| u.adjoint() * a * u).collect();
    KrausChannel::new_unchecked(ops, ch.picture())
}

/// The `d = 3` unital map `X ↦ PXP + (x11 + x22)/2 · E33`, `P = diag(1,1,0)`,
/// whose fixed points do not form an algebra, embedded into `d >= 3` by
/// acting as the identity-on-block-plus-pinching on the remaining coordinates.
pub fn m3_like_channel(d: usize) -> KrausChannel {
    assert!(d >= 3);
    let mut ops = Vec::new();
    let mut p = Operator::zeros(d, d);
    p[(0, 0)] = r(1.0);
    p[(1, 1)] = r(1.0);
    ops.push(p);
    for i in 0..2 {
        let mut k = Operator::zeros(d, d);
        k[(2, i)] = r(0.5f64.sqrt());
        ops.push(k);
    }
    for i in 3..d {
        let mut k = Operator::zeros(d, d);
        k[(i, i)] = r(1.0);
        ops.push(k);
    }
    KrausChannel::new_unchecked(ops, Picture::Heisenberg)
}

/// Random unital CP map drawn from a mixture of families with generic,
/// block-diagonal, automorphic and non-algebraic fixed-point structure.
pub fn random_structured_unital_cp<R: Rng + ?Sized>(g: &mut R, d: usize) -> KrausChannel {
    let family = g.random_range(0..if d >= 3 { 5 } else { 4 });
    match family {
        0 => {
            let m = g.random_range(1..=3);
            random_unital_channel(g, d, m)
        }
        1 => {
            let u = random_unitary(g, d);
            KrausChannel::new_unchecked(vec![u], Picture::Heisenberg)
        }
        2 if d >= 2 => {
            let split = g.random_range(1..d);
            let m = g.random_range(1..=3);
            random_block_unital_channel(g, d, split, m)
        }
        3 => {
            // mixture of two unitaries diagonal in a common random basis
            let u = random_unitary(g, d);
            let mut phase_diag = || {
                Operator::from_diagonal(&nalgebra::DVector::from_fn(d, |_, _| {
                    let p: f64 = g.random_range(0.0..std::f64::consts::TAU);
                    c(p.cos(), p.sin())
                }))
            };
            let (v, w) = (phase_diag(), phase_diag());
            let s = 0.5f64.sqrt();
            let ops = vec![&u * v * u.adjoint() * r(s), &u * w * u.adjoint() * r(s)];
            KrausChannel::new_unchecked(ops, Picture::Heisenberg)
        }
        _ => {
            let u = random_unitary(g, d);
            conjugated_channel(&m3_like_channel(d), &u)
        }
    }
}

/// Random Lindblad generator in the Schrödinger picture with Gaussian jump
/// operators scaled to order-one rates and a random Hamiltonian.
pub fn random_lindblad<R: Rng + ?Sized>(g: &mut R, d: usize, n_ops: usize) -> LindbladGenerator {
    let scale = 1.0 / (d as f64).sqrt();
    let ops = (0..n_ops).map(|_| random_operator(g, d) * r(scale)).collect();
    let h = random_hermitian(g, d) * r(scale);
    LindbladGenerator::new(ops, h, Picture::Schrodinger).expect("random hamiltonian is hermitian")
}

/// Lindblad generator with block-diagonal jump operators and Hamiltonian,
/// so the block projections are constants of motion.
pub fn random_block_lindblad<R: Rng + ?Sized>(g: &mut R, d: usize, split: usize, n_ops: usize) -> LindbladGenerator {
    let split = split.clamp(1, d - 1);
    let embed = |a: &Operator, b: &Operator| {
        let mut k = Operator::zeros(d, d);
        k.view_mut((0, 0), (split, split)).copy_from(a);
        k.view_mut((split, split), (d - split, d - split)).copy_from(b);
        k
    };
    let ops = (0..n_ops.max(1))
        .map(|_| embed(&random_operator(g, split), &random_operator(g, d - split)) * r(0.5))
        .collect();
    let h = embed(&random_hermitian(g, split), &random_hermitian(g, d - split)) * r(0.5);
    LindbladGenerator::new(ops, h, Picture::Schrodinger).expect("hermitian")
}

/// Column-stochastic matrix with Dirichlet-like random columns.
pub fn random_stochastic_matrix<R: Rng + ?Sized>(g: &mut R, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::from_fn(n, n, |_, _| -g.random::<f64>().max(1e-300).ln());
    for mut col in m.column_iter_mut() {
        let s = col.sum();
        col /= s;
    }
    m
}

/// Rate matrix: nonnegative off-diagonal rates, columns summing to zero.
pub fn random_rate_matrix<R: Rng + ?Sized>(g: &mut R, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { g.random::<f64>() });
    for j in 0..n {
        let s: f64 = m.column(j).sum();
        m[(j, j)] = -s;
    }
    m
}

/// Random positive polynomial coefficients for functional-calculus samples.
pub fn random_poly<R: Rng + ?Sized>(g: &mut R, degree: usize) -> Vec<f64> {
    (0..=degree).map(|_| g.random_range(-1.0..1.0)).collect()
}

pub fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Random PSD observable whose spectral projections are `E` and `I − E`.
pub fn two_level_observable<R: Rng + ?Sized>(g: &mut R, e: &Operator) -> Operator {
    let a = g.random_range(0.1..2.0);
    let b = g.random_range(0.1..2.0);
    e * r(a) + (identity(e.nrows()) - e) * r(b)
}

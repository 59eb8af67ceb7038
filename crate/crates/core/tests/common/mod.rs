//! Generators and loaders shared by the integration tests.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use noetherq::channels::{Picture, Stage, StochasticMapSpec};
use noetherq::classical::{ClassicalChain, ObservableVector};
use noetherq::cli::format::{load_json, parse_channel, parse_semigroup, LoadedChannel};
use noetherq::linalg::{identity, r};
use noetherq::random::{random_block_unital_channel, random_operator, random_unital_channel, two_level_observable};
use noetherq::semigroup::SemigroupSpec;
use noetherq::{Operator, Tolerances};
use rand::Rng;

pub fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

pub fn fixtures_in(dir: &str) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(fixture(dir))
        .expect("fixture directory")
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
}

pub fn load_channel(path: &Path, tol: &Tolerances) -> LoadedChannel {
    let v = load_json(path).expect("fixture parses");
    parse_channel(&v, &path.display().to_string(), tol).expect("fixture is a channel")
}

pub fn load_semigroup(path: &Path, tol: &Tolerances) -> SemigroupSpec {
    let v = load_json(path).expect("fixture parses");
    parse_semigroup(&v, &path.display().to_string(), tol).expect("fixture is a generator")
}

/// Frobenius relative error `‖x − y‖ / max(1, ‖y‖)`.
pub fn rel_err(x: &Operator, y: &Operator) -> f64 {
    (x - y).norm() / y.norm().max(1.0)
}

/// Random partition of `0..n` into consecutive blocks.
fn blocks<R: Rng + ?Sized>(g: &mut R, n: usize) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < n {
        let len = g.random_range(1..=n - start);
        out.push(start..start + len);
        start += len;
    }
    out
}

fn random_column<R: Rng + ?Sized>(g: &mut R, n: usize) -> DVector<f64> {
    let col = DVector::from_fn(n, |_, _| -g.random::<f64>().max(1e-300).ln());
    let s = col.sum();
    col / s
}

/// Harmonic values on the transient states of a chain whose first `k` states
/// absorb: solves `Σ_i M_ij O_i = c · O_j` on the transient columns, with
/// `c = 1` for stochastic and `c = 0` for rate matrices.
fn harmonic_extension(m: &DMatrix<f64>, k: usize, absorbing_values: &[f64], c: f64) -> Vec<f64> {
    let n = m.nrows();
    let t = n - k;
    let mut lhs = DMatrix::<f64>::zeros(t, t);
    let mut rhs = DVector::<f64>::zeros(t);
    for (row, j) in (k..n).enumerate() {
        for (col, i) in (k..n).enumerate() {
            lhs[(row, col)] = m[(i, j)] - if i == j { c } else { 0.0 };
        }
        rhs[row] = -(0..k).map(|i| m[(i, j)] * absorbing_values[i]).sum::<f64>();
    }
    let sol = lhs.lu().solve(&rhs).expect("transient block is invertible");
    absorbing_values.iter().copied().chain(sol.iter().copied()).collect()
}

fn random_values<R: Rng + ?Sized>(g: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| g.random_range(-2.0..2.0)).collect()
}

fn block_constant<R: Rng + ?Sized>(g: &mut R, parts: &[std::ops::Range<usize>], n: usize) -> Vec<f64> {
    let mut o = vec![0.0; n];
    for b in parts {
        let v = g.random_range(-2.0..2.0);
        for i in b.clone() {
            o[i] = v;
        }
    }
    o
}

/// Random stochastic chain with an observable drawn so that every verdict
/// pattern occurs: generic, block-conserved, harmonic on an absorbing chain,
/// and constant.
pub fn random_stochastic_case<R: Rng + ?Sized>(g: &mut R, n: usize) -> (ClassicalChain, ObservableVector) {
    let (m, o) = match g.random_range(0..4) {
        0 => {
            let m = DMatrix::from_columns(&(0..n).map(|_| random_column(g, n)).collect::<Vec<_>>());
            (m, random_values(g, n))
        }
        1 => {
            let parts = blocks(g, n);
            let mut m = DMatrix::<f64>::zeros(n, n);
            for b in &parts {
                for j in b.clone() {
                    let col = random_column(g, b.len());
                    for (k, i) in b.clone().enumerate() {
                        m[(i, j)] = col[k];
                    }
                }
            }
            let o = block_constant(g, &parts, n);
            (m, o)
        }
        2 if n >= 3 => {
            let k = g.random_range(2..n);
            let mut m = DMatrix::<f64>::zeros(n, n);
            for j in 0..n {
                if j < k {
                    m[(j, j)] = 1.0;
                } else {
                    m.set_column(j, &random_column(g, n));
                }
            }
            let vals = random_values(g, k);
            let o = harmonic_extension(&m, k, &vals, 1.0);
            (m, o)
        }
        _ => {
            let m = DMatrix::from_columns(&(0..n).map(|_| random_column(g, n)).collect::<Vec<_>>());
            let v = g.random_range(-2.0..2.0);
            (m, vec![v; n])
        }
    };
    (ClassicalChain::stochastic(m).expect("stochastic"), ObservableVector::new(o).expect("finite"))
}

/// Rate-matrix counterpart of [`random_stochastic_case`].
pub fn random_rate_case<R: Rng + ?Sized>(g: &mut R, n: usize) -> (ClassicalChain, ObservableVector) {
    let fill_rates = |m: &mut DMatrix<f64>| {
        for j in 0..n {
            let s: f64 = (0..n).filter(|&i| i != j).map(|i| m[(i, j)]).sum();
            m[(j, j)] = -s;
        }
    };
    let (m, o) = match g.random_range(0..4) {
        0 => {
            let mut m = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { g.random::<f64>() });
            fill_rates(&mut m);
            (m, random_values(g, n))
        }
        1 => {
            let parts = blocks(g, n);
            let mut m = DMatrix::<f64>::zeros(n, n);
            for b in &parts {
                for j in b.clone() {
                    for i in b.clone() {
                        if i != j {
                            m[(i, j)] = g.random::<f64>();
                        }
                    }
                }
            }
            fill_rates(&mut m);
            let o = block_constant(g, &parts, n);
            (m, o)
        }
        2 if n >= 3 => {
            let k = g.random_range(2..n);
            let mut m = DMatrix::from_fn(n, n, |i, j| if i == j || j < k { 0.0 } else { g.random_range(0.1..1.0) });
            fill_rates(&mut m);
            let vals = random_values(g, k);
            let o = harmonic_extension(&m, k, &vals, 0.0);
            (m, o)
        }
        _ => {
            let mut m = DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { g.random::<f64>() });
            fill_rates(&mut m);
            let v = g.random_range(-2.0..2.0);
            (m, vec![v; n])
        }
    };
    (ClassicalChain::rate(m).expect("rate matrix"), ObservableVector::new(o).expect("finite"))
}

/// Trace-preserving stochastic map mixing a Kraus stage with a
/// Kraus-then-transpose stage, plus a PSD observable.
///
/// Half of the draws use block-diagonal Kraus stages sharing one split, so
/// the observable built on the block projection is conserved.
pub fn random_pipeline<R: Rng + ?Sized>(g: &mut R, d: usize, tol: &Tolerances) -> (noetherq::SuperOperator, Operator) {
    let w = g.random_range(0.1..0.9);
    let (k1, k2, a) = if g.random_bool(0.5) && d >= 2 {
        let split = g.random_range(1..d);
        let m = g.random_range(1..=2);
        let k1 = random_block_unital_channel(g, d, split, m).dual();
        let k2 = random_block_unital_channel(g, d, split, m).dual();
        let mut e = DMatrix::zeros(d, d);
        for i in 0..split {
            e[(i, i)] = r(1.0);
        }
        let a = two_level_observable(g, &e);
        (k1, k2, a)
    } else {
        let m = g.random_range(1..=3);
        let k1 = random_unital_channel(g, d, m).dual();
        let k2 = random_unital_channel(g, d, m).dual();
        let b = random_operator(g, d);
        let a = &b * b.adjoint() + identity(d) * r(0.1);
        (k1, k2, a)
    };
    debug_assert!(k1.picture() == Picture::Schrodinger && k2.picture() == Picture::Schrodinger);
    let spec = StochasticMapSpec {
        dim: d,
        pipelines: vec![(w, vec![Stage::Kraus(k1)]), (1.0 - w, vec![Stage::Kraus(k2), Stage::Transpose])],
    };
    (spec.compile(tol).expect("valid mixture"), a)
}

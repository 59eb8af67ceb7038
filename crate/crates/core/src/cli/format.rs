//! JSON input formats.
//!
//! Complex numbers are `[re, im]` (a bare number is real); matrices are
//! row-major nested arrays. Every error names the file and the JSON path
//! of the offending field.

use std::path::Path;

use nalgebra::DMatrix;
use serde_json::{json, Map, Value};

use crate::channels::{build_luders, KrausChannel, Picture, Stage, StochasticMapSpec};
use crate::classical::{ChainKind, ClassicalChain, ObservableVector};
use crate::linalg::{c, Operator, C64};
use crate::semigroup::{LindbladGenerator, SemigroupSpec};
use crate::{Error, Result, SuperOperator, Tolerances};

fn err(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Input(format!("{path}: {msg}"))
}

/// Reads and parses a JSON file, reporting syntax errors with line and column.
pub fn load_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Input(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))
}

fn object<'v>(v: &'v Value, path: &str) -> Result<&'v Map<String, Value>> {
    v.as_object().ok_or_else(|| err(path, "expected an object"))
}

fn field<'v>(obj: &'v Map<String, Value>, key: &str, path: &str) -> Result<&'v Value> {
    obj.get(key).ok_or_else(|| err(path, format!("missing field {key:?}")))
}

fn usize_field(obj: &Map<String, Value>, key: &str, path: &str) -> Result<usize> {
    let v = field(obj, key, path)?;
    v.as_u64()
        .filter(|&n| n > 0)
        .map(|n| n as usize)
        .ok_or_else(|| err(&format!("{path}.{key}"), "expected a positive integer"))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| err(path, "expected a number"))
}

pub fn parse_complex(v: &Value, path: &str) -> Result<C64> {
    match v {
        Value::Number(_) => Ok(c(number(v, path)?, 0.0)),
        Value::Array(parts) if parts.len() == 2 => {
            Ok(c(number(&parts[0], &format!("{path}[0]"))?, number(&parts[1], &format!("{path}[1]"))?))
        }
        _ => Err(err(path, "expected a number or a [re, im] pair")),
    }
}

fn rows<'v>(v: &'v Value, path: &str) -> Result<&'v Vec<Value>> {
    let rows = v.as_array().ok_or_else(|| err(path, "expected a matrix (array of rows)"))?;
    if rows.is_empty() {
        return Err(err(path, "matrix has no rows"));
    }
    Ok(rows)
}

/// Square complex matrix; checks the dimension when `dim` is given.
pub fn parse_matrix(v: &Value, path: &str, dim: Option<usize>) -> Result<Operator> {
    let rows = rows(v, path)?;
    let n = rows.len();
    if let Some(d) = dim {
        if n != d {
            return Err(err(path, format!("expected {d} rows, found {n}")));
        }
    }
    let mut m = Operator::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let rp = format!("{path}[{i}]");
        let entries = row.as_array().ok_or_else(|| err(&rp, "expected a row array"))?;
        if entries.len() != n {
            return Err(err(&rp, format!("expected {n} entries (square matrix), found {}", entries.len())));
        }
        for (j, e) in entries.iter().enumerate() {
            m[(i, j)] = parse_complex(e, &format!("{rp}[{j}]"))?;
        }
    }
    Ok(m)
}

pub fn parse_real_matrix(v: &Value, path: &str, dim: Option<usize>) -> Result<DMatrix<f64>> {
    let rows = rows(v, path)?;
    let n = rows.len();
    if let Some(d) = dim {
        if n != d {
            return Err(err(path, format!("expected {d} rows, found {n}")));
        }
    }
    let mut m = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let rp = format!("{path}[{i}]");
        let entries = row.as_array().ok_or_else(|| err(&rp, "expected a row array"))?;
        if entries.len() != n {
            return Err(err(&rp, format!("expected {n} entries (square matrix), found {}", entries.len())));
        }
        for (j, e) in entries.iter().enumerate() {
            m[(i, j)] = number(e, &format!("{rp}[{j}]"))?;
        }
    }
    Ok(m)
}

fn matrix_list(v: &Value, path: &str, dim: usize) -> Result<Vec<Operator>> {
    let items = v.as_array().ok_or_else(|| err(path, "expected an array of matrices"))?;
    items.iter().enumerate().map(|(k, m)| parse_matrix(m, &format!("{path}[{k}]"), Some(dim))).collect()
}

fn picture_field(obj: &Map<String, Value>, path: &str, default: Picture) -> Result<Picture> {
    match obj.get("picture") {
        None => Ok(default),
        Some(Value::String(s)) => s.parse().map_err(|e: Error| err(&format!("{path}.picture"), e)),
        Some(_) => Err(err(&format!("{path}.picture"), "expected a string")),
    }
}

/// A channel or stochastic map read from disk.
#[derive(Debug, Clone)]
pub struct LoadedChannel {
    pub dim: usize,
    pub picture: Picture,
    pub superop: SuperOperator,
    /// Present for Kraus and Lüders inputs.
    pub kraus: Option<KrausChannel>,
}

impl LoadedChannel {
    /// The map in the requested picture (trace-dual when needed).
    pub fn in_picture(&self, picture: Picture, tol: &Tolerances) -> Result<SuperOperator> {
        if picture == self.picture {
            Ok(self.superop.clone())
        } else {
            Ok(self.superop.trace_dual(tol)?.recompute_flags(tol))
        }
    }
}

fn parse_kraus(obj: &Map<String, Value>, key: &str, path: &str, dim: usize, picture: Picture, tol: &Tolerances) -> Result<KrausChannel> {
    let ops = matrix_list(field(obj, key, path)?, &format!("{path}.{key}"), dim)?;
    if ops.is_empty() {
        return Err(err(&format!("{path}.{key}"), "needs at least one operator"));
    }
    KrausChannel::new(ops, picture, tol).map_err(|e| err(&format!("{path}.{key}"), e))
}

/// `{"dim", "picture"?, "kraus": [...]}`, `{"dim", "picture"?, "luders": [...]}`
/// or `{"dim", "mixture": [{"weight", "stages": ["transpose" | {"kraus": [...]}]}]}`.
/// The picture defaults to Schrödinger.
pub fn parse_channel(v: &Value, path: &str, tol: &Tolerances) -> Result<LoadedChannel> {
    let obj = object(v, path)?;
    let dim = usize_field(obj, "dim", path)?;
    tol.check_dim(dim)?;
    let picture = picture_field(obj, path, Picture::Schrodinger)?;
    if obj.contains_key("kraus") {
        let ch = parse_kraus(obj, "kraus", path, dim, picture, tol)?;
        return Ok(LoadedChannel { dim, picture, superop: ch.to_super(), kraus: Some(ch) });
    }
    if obj.contains_key("luders") {
        let effects = matrix_list(&obj["luders"], &format!("{path}.luders"), dim)?;
        let ch = build_luders(&effects, tol).map_err(|e| err(&format!("{path}.luders"), e))?;
        let ch = if picture == Picture::Heisenberg { ch.dual() } else { ch };
        return Ok(LoadedChannel { dim, picture, superop: ch.to_super(), kraus: Some(ch) });
    }
    if let Some(mix) = obj.get("mixture") {
        let mp = format!("{path}.mixture");
        let items = mix.as_array().ok_or_else(|| err(&mp, "expected an array of pipelines"))?;
        let mut pipelines = Vec::new();
        for (k, item) in items.iter().enumerate() {
            let ip = format!("{mp}[{k}]");
            let io = object(item, &ip)?;
            let weight = number(field(io, "weight", &ip)?, &format!("{ip}.weight"))?;
            let sp = format!("{ip}.stages");
            let stages_v = field(io, "stages", &ip)?.as_array().ok_or_else(|| err(&sp, "expected an array"))?;
            let mut stages = Vec::new();
            for (s, st) in stages_v.iter().enumerate() {
                let stp = format!("{sp}[{s}]");
                match st {
                    Value::String(name) if name == "transpose" => stages.push(Stage::Transpose),
                    Value::Object(so) => {
                        let ch = parse_kraus(so, "kraus", &stp, dim, Picture::Schrodinger, tol)?;
                        stages.push(Stage::Kraus(ch));
                    }
                    _ => return Err(err(&stp, "expected \"transpose\" or {\"kraus\": [...]}")),
                }
            }
            pipelines.push((weight, stages));
        }
        let superop = StochasticMapSpec { dim, pipelines }.compile(tol).map_err(|e| err(&mp, e))?;
        let superop = if picture == Picture::Heisenberg { superop.trace_dual(tol)?.recompute_flags(tol) } else { superop };
        return Ok(LoadedChannel { dim, picture, superop, kraus: None });
    }
    Err(err(path, "expected one of the fields \"kraus\", \"luders\" or \"mixture\""))
}

/// `{"dim", "picture"?, "lindblad": [...], "hamiltonian": [...]}`; the
/// Hamiltonian defaults to zero and the picture to Schrödinger.
pub fn parse_lindblad(v: &Value, path: &str, tol: &Tolerances) -> Result<LindbladGenerator> {
    let obj = object(v, path)?;
    let dim = usize_field(obj, "dim", path)?;
    tol.check_dim(dim)?;
    let picture = picture_field(obj, path, Picture::Schrodinger)?;
    let ops = match obj.get("lindblad") {
        Some(l) => matrix_list(l, &format!("{path}.lindblad"), dim)?,
        None => Vec::new(),
    };
    let h = match obj.get("hamiltonian") {
        Some(h) => parse_matrix(h, &format!("{path}.hamiltonian"), Some(dim))?,
        None => Operator::zeros(dim, dim),
    };
    LindbladGenerator::new(ops, h, picture).map_err(|e| err(path, e))
}

/// A Lindblad generator, or a channel `Ψ` read as the generator `Ψ − id`.
pub fn parse_semigroup(v: &Value, path: &str, tol: &Tolerances) -> Result<SemigroupSpec> {
    let obj = object(v, path)?;
    if obj.contains_key("kraus") || obj.contains_key("luders") || obj.contains_key("mixture") {
        let ch = parse_channel(v, path, tol)?;
        return Ok(SemigroupSpec::channel_minus_id(ch.superop, ch.picture));
    }
    Ok(SemigroupSpec::lindblad(parse_lindblad(v, path, tol)?))
}

/// `{"dim"?, "matrix": [...]}` or a bare matrix.
pub fn parse_observable(v: &Value, path: &str) -> Result<Operator> {
    match v {
        Value::Object(obj) => {
            let dim = match obj.get("dim") {
                Some(_) => Some(usize_field(obj, "dim", path)?),
                None => None,
            };
            parse_matrix(field(obj, "matrix", path)?, &format!("{path}.matrix"), dim)
        }
        _ => parse_matrix(v, path, None),
    }
}

/// `{"states", "kind", "matrix"}`.
pub fn parse_chain(v: &Value, path: &str) -> Result<ClassicalChain> {
    let obj = object(v, path)?;
    let n = usize_field(obj, "states", path)?;
    let kind: ChainKind = field(obj, "kind", path)?
        .as_str()
        .ok_or_else(|| err(&format!("{path}.kind"), "expected a string"))?
        .parse()
        .map_err(|e: Error| err(&format!("{path}.kind"), e))?;
    let m = parse_real_matrix(field(obj, "matrix", path)?, &format!("{path}.matrix"), Some(n))?;
    ClassicalChain::new(kind, m)
}

/// `{"values": [...]}` or a bare array of numbers.
pub fn parse_classical_observable(v: &Value, path: &str) -> Result<ObservableVector> {
    let (arr, ap) = match v {
        Value::Object(obj) => (field(obj, "values", path)?, format!("{path}.values")),
        _ => (v, path.to_string()),
    };
    let items = arr.as_array().ok_or_else(|| err(&ap, "expected an array of numbers"))?;
    let values = items.iter().enumerate().map(|(i, x)| number(x, &format!("{ap}[{i}]"))).collect::<Result<Vec<_>>>()?;
    ObservableVector::new(values)
}

fn complex_json(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn matrix_json(m: &Operator) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| complex_json(m[(i, j)])).collect())).collect())
}

pub fn real_matrix_json(m: &DMatrix<f64>) -> Value {
    Value::Array((0..m.nrows()).map(|i| json!((0..m.ncols()).map(|j| m[(i, j)]).collect::<Vec<_>>())).collect())
}

pub fn channel_json(ch: &KrausChannel) -> Value {
    json!({
        "dim": ch.dim(),
        "picture": ch.picture().as_str(),
        "kraus": ch.kraus_ops().iter().map(matrix_json).collect::<Vec<_>>(),
    })
}

pub fn lindblad_json(g: &LindbladGenerator) -> Value {
    json!({
        "dim": g.dim(),
        "picture": g.picture().as_str(),
        "lindblad": g.lindblad_ops().iter().map(matrix_json).collect::<Vec<_>>(),
        "hamiltonian": matrix_json(g.hamiltonian()),
    })
}

pub fn chain_json(c: &ClassicalChain) -> Value {
    json!({ "states": c.n_states(), "kind": c.kind.as_str(), "matrix": real_matrix_json(&c.matrix) })
}

//! Report documents: canonical JSON and plain-text rendering.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{json, Value};

use super::format::matrix_json;
use crate::{NoetherVerdict, OperatorSubspace};

/// Compact JSON with every float written to 17 significant digits, so that
/// parsing and re-serialising a report reproduces it byte for byte.
#[derive(Debug, Clone, Copy, Default)]
pub struct CanonicalFormatter;

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Keys are sorted (`serde_json`'s map is ordered), floats canonical.
pub fn to_canonical_string(v: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter);
    v.serialize(&mut ser).expect("serialising a Value cannot fail");
    String::from_utf8(out).expect("JSON is UTF-8")
}

/// Non-finite values become `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn subspace_json(s: &OperatorSubspace, include_basis: bool) -> Value {
    let mut v = json!({
        "dim": s.len(),
        "tolerance": {"rank_tol": num(s.tol.rank_tol), "eq_tol": num(s.tol.eq_tol)},
        "hermitian_basis": s.is_hermitian_basis(),
        "warnings": s.warnings(),
    });
    if include_basis {
        v["basis"] = Value::Array(s.basis().iter().map(matrix_json).collect());
    }
    v
}

pub fn verdict_json(v: &NoetherVerdict) -> Value {
    let clauses: Vec<Value> = v
        .clauses
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "group": c.group,
                "holds": c.holds,
                "residual": num(c.residual),
                "applicable": c.applicable,
            })
        })
        .collect();
    json!({
        "subject": matrix_json(&v.subject),
        "clauses": clauses,
        "consistent": v.consistent,
        "inconsistent_groups": v.inconsistent_groups(),
        "notes": v.notes,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportDocument {
    pub command: String,
    pub request: Value,
    pub results: Value,
    pub warnings: Vec<String>,
    pub consistent: bool,
}

impl ReportDocument {
    /// 0 when every checked equivalence is consistent, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.consistent {
            0
        } else {
            2
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "tool": {"name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION")},
            "request": self.request,
            "results": self.results,
            "warnings": self.warnings,
            "consistent": self.consistent,
            "exit_code": self.exit_code(),
        })
    }

    pub fn to_json_string(&self) -> String {
        to_canonical_string(&self.to_json())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("noetherq {} {}\n", env!("CARGO_PKG_VERSION"), self.command));
        render(&self.results, 0, &mut out);
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out.push_str(&format!("consistent: {}\n", self.consistent));
        out
    }
}

fn is_matrix(v: &Value) -> bool {
    v.as_array().is_some_and(|rows| !rows.is_empty() && rows.iter().all(|r| r.as_array().is_some_and(|e| e.iter().all(|x| x.is_array() || x.is_number()))))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.6e}"),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn matrix_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    for row in v.as_array().into_iter().flatten() {
        let cells: Vec<String> = row
            .as_array()
            .into_iter()
            .flatten()
            .map(|e| match e {
                Value::Array(p) if p.len() == 2 => {
                    let (re, im) = (p[0].as_f64().unwrap_or(0.0), p[1].as_f64().unwrap_or(0.0));
                    if im.abs() < 1e-14 {
                        format!("{re:>9.4}")
                    } else {
                        format!("{re:>9.4}{im:+.4}i")
                    }
                }
                other => format!("{:>9.4}", other.as_f64().unwrap_or(f64::NAN)),
            })
            .collect();
        out.push_str(&format!("{pad}[{}]\n", cells.join(" ")));
    }
}

fn clause_line(c: &Value) -> Option<String> {
    let name = c.get("name")?.as_str()?;
    let holds = c.get("holds")?.as_bool()?;
    let residual = c.get("residual").map(scalar).unwrap_or_default();
    let group = c.get("group").and_then(Value::as_str).unwrap_or("diagnostic");
    let na = if c.get("applicable").and_then(Value::as_bool) == Some(false) { " (not applicable)" } else { "" };
    Some(format!("{:<5} {name}  [{group}] residual {residual}{na}", if holds { "true" } else { "false" }))
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                if k == "clauses" {
                    out.push_str(&format!("{pad}clauses:\n"));
                    for c in val.as_array().into_iter().flatten() {
                        if let Some(line) = clause_line(c) {
                            out.push_str(&format!("{pad}  {line}\n"));
                        }
                    }
                } else if is_matrix(val) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    matrix_text(val, indent + 1, out);
                } else if val.is_object() || (val.is_array() && val.as_array().is_some_and(|a| a.iter().any(|x| x.is_object() || x.is_array()))) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render(val, indent + 1, out);
                } else if let Value::Array(items) = val {
                    let s: Vec<String> = items.iter().map(scalar).collect();
                    out.push_str(&format!("{pad}{k}: [{}]\n", s.join(", ")));
                } else {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar(val)));
                }
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                if is_matrix(item) {
                    out.push_str(&format!("{pad}- [{i}]\n"));
                    matrix_text(item, indent + 1, out);
                } else if item.is_object() || item.is_array() {
                    out.push_str(&format!("{pad}- [{i}]\n"));
                    render(item, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}- {}\n", scalar(item)));
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

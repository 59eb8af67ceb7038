//! Clause-by-clause reports for equivalence theorems.

use crate::Operator;

/// One assertion of an equivalence theorem evaluated numerically.
///
/// Clauses sharing a `group` are asserted to be mutually equivalent; the
/// verdict is consistent when every applicable clause in a group has the
/// same truth value. Clauses with no group are diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub name: String,
    pub group: Option<String>,
    pub holds: bool,
    pub residual: f64,
    pub applicable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoetherVerdict {
    pub subject: Operator,
    pub clauses: Vec<Clause>,
    pub consistent: bool,
    pub notes: Vec<String>,
}

impl NoetherVerdict {
    pub fn new(subject: Operator) -> Self {
        Self { subject, clauses: Vec::new(), consistent: true, notes: Vec::new() }
    }

    pub fn push(&mut self, group: Option<&str>, name: &str, holds: bool, residual: f64) {
        self.clauses.push(Clause {
            name: name.to_string(),
            group: group.map(str::to_string),
            holds,
            residual,
            applicable: true,
        });
    }

    /// Clause evaluated but outside the hypotheses of its theorem.
    pub fn push_not_applicable(&mut self, group: Option<&str>, name: &str, holds: bool, residual: f64) {
        self.clauses.push(Clause {
            name: name.to_string(),
            group: group.map(str::to_string),
            holds,
            residual,
            applicable: false,
        });
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }

    pub fn clause(&self, name: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.name == name)
    }

    /// Truth value of a named clause; panics if the clause is absent.
    pub fn holds(&self, name: &str) -> bool {
        self.clause(name).unwrap_or_else(|| panic!("no clause named {name:?}")).holds
    }

    pub fn groups(&self) -> Vec<String> {
        let mut gs: Vec<String> = Vec::new();
        for c in &self.clauses {
            if let Some(g) = &c.group {
                if !gs.contains(g) {
                    gs.push(g.clone());
                }
            }
        }
        gs
    }

    /// Groups whose applicable clauses disagree.
    pub fn inconsistent_groups(&self) -> Vec<String> {
        self.groups()
            .into_iter()
            .filter(|g| {
                let vals: Vec<bool> = self
                    .clauses
                    .iter()
                    .filter(|c| c.applicable && c.group.as_deref() == Some(g.as_str()))
                    .map(|c| c.holds)
                    .collect();
                vals.windows(2).any(|w| w[0] != w[1])
            })
            .collect()
    }

    /// Recomputes `consistent`; call after the last clause is pushed.
    pub fn finish(mut self) -> Self {
        self.consistent = self.inconsistent_groups().is_empty();
        self
    }
}

//! Named inequality checks with both sides recorded, used by every report.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
}

/// One checked claim `lhs REL rhs`. `slack` is `rhs - lhs` for the order
/// relations and `-|lhs - rhs|` for equalities, so a negative slack flags a
/// violation or a near-miss at a glance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckItem {
    pub name: String,
    pub relation: Relation,
    pub lhs: String,
    pub rhs: String,
    pub slack: f64,
    pub passed: bool,
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl CheckItem {
    pub fn lt(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::float(name, Relation::Lt, lhs, rhs, lhs < rhs)
    }

    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self::float(name, Relation::Le, lhs, rhs, lhs <= rhs)
    }

    fn float(name: impl Into<String>, relation: Relation, lhs: f64, rhs: f64, passed: bool) -> Self {
        Self { name: name.into(), relation, lhs: fmt_f64(lhs), rhs: fmt_f64(rhs), slack: rhs - lhs, passed }
    }

    /// Order check on scalars: exact comparison in rational mode.
    pub fn cmp<S: Scalar>(name: impl Into<String>, lhs: &S, relation: Relation, rhs: &S) -> Self {
        let passed = match relation {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs.approx_eq(rhs),
            Relation::Ne => !lhs.approx_eq(rhs),
        };
        let diff = rhs.to_f64() - lhs.to_f64();
        let slack = match relation {
            Relation::Eq => -diff.abs(),
            Relation::Ne => diff.abs(),
            _ => diff,
        };
        Self { name: name.into(), relation, lhs: lhs.to_decimal_string(), rhs: rhs.to_decimal_string(), slack, passed }
    }

    pub fn eq<S: Scalar>(name: impl Into<String>, lhs: &S, rhs: &S) -> Self {
        Self::cmp(name, lhs, Relation::Eq, rhs)
    }

    /// A boolean structural claim (e.g. an exact function identity).
    pub fn holds(name: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            relation: Relation::Eq,
            lhs: passed.to_string(),
            rhs: "true".into(),
            slack: if passed { 0.0 } else { -1.0 },
            passed,
        }
    }
}

/// Ordered list of checks.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub checks: Vec<CheckItem>,
}

impl Certificate {
    pub fn push(&mut self, item: CheckItem) {
        self.checks.push(item);
    }

    pub fn extend(&mut self, other: Certificate) {
        self.checks.extend(other.checks);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckItem> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckItem> {
        self.checks.iter().find(|c| c.name == name)
    }
}

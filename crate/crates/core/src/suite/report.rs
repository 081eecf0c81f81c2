use serde::{Deserialize, Serialize};

use super::config::{RunConfig, SuiteKind};
use crate::decay::DecayCurve;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The invariant is vacuous for this configuration (for example a
    /// mass-weighted bound at `m0 = 0`).
    Skipped,
}

/// One invariant: `value relation limit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub value: f64,
    pub relation: String,
    pub limit: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, value, "<=", limit, value <= limit)
    }

    pub fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, value, "<", limit, value < limit)
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, value, ">=", limit, value >= limit)
    }

    /// `|value - target| <= tol`, reported as the distance.
    pub fn near(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        let mut c = Self::new(
            name,
            (value - target).abs(),
            "<=",
            tol,
            (value - target).abs() <= tol,
        );
        c.note = Some(format!("measured {value}, target {target}"));
        c
    }

    /// `value` finite and nonnegative.
    pub fn finite(name: impl Into<String>, value: f64) -> Self {
        Self::new(
            name,
            value,
            "finite",
            f64::INFINITY,
            value.is_finite() && value >= 0.0,
        )
    }

    /// `1/factor <= value <= factor`.
    pub fn within_factor(name: impl Into<String>, value: f64, factor: f64) -> Self {
        let ok = value.is_finite() && value >= 1.0 / factor && value <= factor;
        Self::new(name, value, "within factor", factor, ok)
    }

    pub fn skipped(name: impl Into<String>, why: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: Status::Skipped,
            value: 0.0,
            relation: "skipped".into(),
            limit: 0.0,
            note: Some(why.into()),
        }
    }

    fn new(name: impl Into<String>, value: f64, relation: &str, limit: f64, ok: bool) -> Self {
        Self {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            value,
            relation: relation.into(),
            limit,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constant {
    pub name: String,
    pub value: f64,
}

/// A decay curve to be written next to the summary.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedCurve {
    pub stem: String,
    pub title: String,
    pub curve: DecayCurve,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: SuiteKind,
    pub statement: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub constants: Vec<Constant>,
    pub files: Vec<String>,
    #[serde(skip)]
    pub curves: Vec<NamedCurve>,
}

impl SuiteReport {
    pub fn new(suite: SuiteKind) -> Self {
        Self {
            suite,
            statement: suite.statement().into(),
            passed: true,
            checks: Vec::new(),
            constants: Vec::new(),
            files: Vec::new(),
            curves: Vec::new(),
        }
    }

    pub fn check(&mut self, c: Check) {
        self.passed &= c.passed();
        self.checks.push(c);
    }

    pub fn constant(&mut self, name: impl Into<String>, value: f64) {
        self.constants.push(Constant {
            name: name.into(),
            value,
        });
    }

    pub fn curve(&mut self, stem: impl Into<String>, title: impl Into<String>, curve: DecayCurve) {
        self.curves.push(NamedCurve {
            stem: stem.into(),
            title: title.into(),
            curve,
        });
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn value(&self, name: &str) -> Option<f64> {
        self.constants
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.value)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub config: RunConfig,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

impl Summary {
    /// `0` when every invariant holds, `1` otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn suite(&self, kind: SuiteKind) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.suite == kind)
    }
}

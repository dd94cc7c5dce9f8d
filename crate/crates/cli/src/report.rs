//! Check records and reports.

use num_rational::Ratio;
use serde::Serialize;
use serde_json::Value;

use crate::config::Format;
use crate::error::exit_code_of;
use crate::serial::rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: String,
    /// The identity being checked, in words.
    pub paper_ref: String,
    pub status: Status,
    pub lhs: Value,
    pub rhs: Value,
    pub residual_valuation: Option<Value>,
    /// Exit code the error maps to; only for `Status::Error`.
    #[serde(skip)]
    pub error_code: i32,
}

impl Check {
    pub fn new(id: impl Into<String>, paper_ref: &str, ok: bool, lhs: Value, rhs: Value) -> Self {
        Check {
            id: id.into(),
            paper_ref: paper_ref.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            lhs,
            rhs,
            residual_valuation: None,
            error_code: 0,
        }
    }

    pub fn residual(mut self, r: Option<Ratio<i64>>) -> Self {
        self.residual_valuation = r.map(rational);
        self
    }

    pub fn error(id: impl Into<String>, paper_ref: &str, e: &lcft::Error) -> Self {
        Check {
            id: id.into(),
            paper_ref: paper_ref.into(),
            status: Status::Error,
            lhs: Value::String(e.to_string()),
            rhs: Value::Null,
            residual_valuation: None,
            error_code: exit_code_of(e),
        }
    }

    pub fn skipped(id: impl Into<String>, paper_ref: &str, why: &str) -> Self {
        Check {
            id: id.into(),
            paper_ref: paper_ref.into(),
            status: Status::Skipped,
            lhs: Value::String(why.into()),
            rhs: Value::Null,
            residual_valuation: None,
            error_code: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub target: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub data: Value,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str, target: &str, seed: u64) -> Self {
        Report { command: command.into(), target: target.into(), seed, data: Value::Null, checks: vec![] }
    }

    /// Records the outcome of a fallible check.
    pub fn push(&mut self, id: impl Into<String>, paper_ref: &str, outcome: lcft::Result<Check>) {
        let id = id.into();
        self.checks.push(outcome.unwrap_or_else(|e| Check::error(id, paper_ref, &e)));
    }

    /// Checks sorted by id, for reproducible output.
    pub fn finish(mut self) -> Self {
        self.checks.sort_by(|a, b| a.id.cmp(&b.id));
        self
    }

    /// 2 on a configuration error, then 1 on any violation, then 3 on
    /// precision or budget exhaustion, else 0.
    pub fn exit_code(&self) -> i32 {
        let errors: Vec<i32> = self.checks.iter().filter(|c| c.status == Status::Error).map(|c| c.error_code).collect();
        if errors.contains(&2) {
            2
        } else if errors.contains(&1) || self.checks.iter().any(|c| c.status == Status::Fail) {
            1
        } else if errors.contains(&3) {
            3
        } else {
            0
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("reports serialize"),
            Format::Text => {
                let mut out = format!("{} {} (seed {})\n", self.command, self.target, self.seed);
                if !self.data.is_null() {
                    out.push_str(&serde_json::to_string_pretty(&self.data).expect("reports serialize"));
                    out.push('\n');
                }
                for c in &self.checks {
                    let tag = match c.status {
                        Status::Pass => "PASS",
                        Status::Fail => "FAIL",
                        Status::Error => "ERROR",
                        Status::Skipped => "SKIP",
                    };
                    let res = c
                        .residual_valuation
                        .as_ref()
                        .map(|r| format!("  [residual {}/{}]", r["num"], r["den"]))
                        .unwrap_or_default();
                    out.push_str(&format!("{tag:5} {}  {} | {}{res}\n", c.id, short(&c.lhs), short(&c.rhs)));
                }
                let passed = self.checks.iter().filter(|c| c.status == Status::Pass).count();
                out.push_str(&format!("{passed}/{} checks passed\n", self.checks.len()));
                out
            }
        }
    }
}

fn short(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    if s.len() > 72 {
        format!("{}...", &s[..69])
    } else {
        s
    }
}

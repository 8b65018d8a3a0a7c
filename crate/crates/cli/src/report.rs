//! Verification reports and their JSON/CSV/text renderings.

use std::fmt::Write as _;

use anyhow::Result;
use rug::Float;
use serde::Serialize;

use lhpvi_core::numerics::to_decimal;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub identity: String,
    pub n: Option<usize>,
    pub t: String,
    pub residual: Option<String>,
    pub tolerance: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl Record {
    pub fn check(identity: &str, n: Option<usize>, t: &str, residual: &Float, tol: &Float) -> Self {
        // NaN residuals fail
        let status = if *residual <= *tol { Status::Pass } else { Status::Fail };
        Self {
            identity: identity.into(),
            n,
            t: t.into(),
            residual: Some(to_decimal(residual)),
            tolerance: to_decimal(tol),
            status,
            note: None,
            elapsed_ms: None,
        }
    }

    pub fn skipped(identity: &str, n: Option<usize>, t: &str, tol: &Float, why: &str) -> Self {
        Self {
            identity: identity.into(),
            n,
            t: t.into(),
            residual: None,
            tolerance: to_decimal(tol),
            status: Status::Skipped,
            note: Some(why.into()),
            elapsed_ms: None,
        }
    }
}

/// A value that is reported but not judged.
#[derive(Debug, Clone, Serialize)]
pub struct Observation {
    pub name: String,
    pub n: Option<usize>,
    pub t: String,
    pub value: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Environment {
    pub bits: u32,
    pub seed: u64,
    pub version: String,
    pub alpha: String,
    pub beta: String,
    pub mu: String,
    pub t_grid: Vec<String>,
    pub n_max: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrupt: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub environment: Environment,
    pub summary: Summary,
    pub records: Vec<Record>,
    pub observations: Vec<Observation>,
}

impl VerificationReport {
    pub fn new(environment: Environment, records: Vec<Record>, observations: Vec<Observation>) -> Self {
        let mut summary = Summary::default();
        for r in &records {
            match r.status {
                Status::Pass => summary.pass += 1,
                Status::Fail => summary.fail += 1,
                Status::Skipped => summary.skipped += 1,
            }
        }
        Self {
            schema_version: SCHEMA_VERSION,
            environment,
            summary,
            records,
            observations,
        }
    }

    pub fn any_fail(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn find(&self, identity: &str, n: Option<usize>, t: &str) -> Option<&Record> {
        self.records
            .iter()
            .find(|r| r.identity == identity && r.n == n && r.t == t)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["identity", "n", "t", "residual", "tolerance", "status", "note"])?;
        for r in &self.records {
            w.write_record([
                r.identity.as_str(),
                &r.n.map(|n| n.to_string()).unwrap_or_default(),
                &r.t,
                r.residual.as_deref().unwrap_or(""),
                &r.tolerance,
                r.status.as_str(),
                r.note.as_deref().unwrap_or(""),
            ])?;
        }
        let body = String::from_utf8(w.into_inner()?)?;
        Ok(format!("# verify-report schema_version={SCHEMA_VERSION}\n{body}"))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            let n = r.n.map(|n| n.to_string()).unwrap_or_else(|| "-".into());
            let res = r
                .residual
                .as_deref()
                .map(short)
                .unwrap_or_else(|| r.note.clone().unwrap_or_default());
            let _ = writeln!(
                s,
                "{:<8} {:<28} n={:<3} t={:<6} {}",
                r.status.as_str(),
                r.identity,
                n,
                r.t,
                res
            );
        }
        for o in &self.observations {
            let n = o.n.map(|n| n.to_string()).unwrap_or_else(|| "-".into());
            let _ = writeln!(s, "{:<8} {:<28} n={:<3} t={:<6} {}", "NOTE", o.name, n, o.t, short(&o.value));
        }
        let _ = writeln!(
            s,
            "{} passed, {} failed, {} skipped",
            self.summary.pass, self.summary.fail, self.summary.skipped
        );
        s
    }
}

/// A decimal string cut to a readable number of digits.
pub fn short(dec: &str) -> String {
    match dec.parse::<f64>() {
        Ok(v) => format!("{v:.3e}"),
        Err(_) => dec.to_string(),
    }
}

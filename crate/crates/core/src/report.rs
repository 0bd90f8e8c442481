//! Verification reports: JSON schema and text rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteId {
    Algebra,
    Groups,
    Torsion,
    Manifold,
    All,
}

impl SuiteId {
    pub const NAMES: [&'static str; 5] = ["algebra", "groups", "torsion", "manifold", "all"];

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "algebra" => Ok(SuiteId::Algebra),
            "groups" => Ok(SuiteId::Groups),
            "torsion" => Ok(SuiteId::Torsion),
            "manifold" => Ok(SuiteId::Manifold),
            "all" => Ok(SuiteId::All),
            _ => Err(Error::UnknownName {
                kind: "suite",
                name: name.into(),
                available: Self::NAMES.iter().map(|s| s.to_string()).collect(),
            }),
        }
    }

    pub fn as_str(self) -> &'static str {
        Self::NAMES[self as usize]
    }

    /// The concrete suites this one runs, in report order.
    pub fn parts(self) -> Vec<SuiteId> {
        match self {
            SuiteId::All => vec![SuiteId::Algebra, SuiteId::Groups, SuiteId::Torsion, SuiteId::Manifold],
            s => vec![s],
        }
    }
}

impl std::fmt::Display for SuiteId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    NotComputed,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
            Status::NotComputed => "N/C",
        }
    }
}

/// Tag used instead of a formula for infrastructure checks.
pub const PLUMBING: &str = "plumbing";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub id: String,
    /// The statement being checked, or `"plumbing"`.
    pub anchor: String,
    pub status: Status,
    pub max_abs_error: Option<f64>,
    pub tolerance: Option<f64>,
    /// Wall time of the job that produced the case.
    pub runtime_ms: f64,
    pub details: Value,
}

impl Case {
    pub fn new(id: impl Into<String>, anchor: impl Into<String>, status: Status) -> Self {
        Case {
            id: id.into(),
            anchor: anchor.into(),
            status,
            max_abs_error: None,
            tolerance: None,
            runtime_ms: 0.0,
            details: Value::Object(Default::default()),
        }
    }

    /// Passes when `error ≤ tolerance`; a non-finite error fails.
    pub fn measured(id: impl Into<String>, anchor: impl Into<String>, error: f64, tolerance: f64) -> Self {
        let status = if error.is_finite() && error <= tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        let mut c = Case::new(id, anchor, status);
        c.max_abs_error = finite(error);
        c.tolerance = Some(tolerance);
        c
    }

    /// Passes when the observed value equals the expected one.
    pub fn exact<T: Serialize + PartialEq>(
        id: impl Into<String>,
        anchor: impl Into<String>,
        expected: T,
        found: T,
    ) -> Self {
        let status = if expected == found { Status::Pass } else { Status::Fail };
        let mut c = Case::new(id, anchor, status);
        c.detail("expected", &expected).detail("found", &found);
        c
    }

    /// A case whose computation returned an error. Cost-guard refusals are
    /// reported as not computed, everything else as a failure.
    pub fn errored(id: impl Into<String>, anchor: impl Into<String>, err: &Error) -> Self {
        let status = match err {
            Error::CostGuard { .. } => Status::NotComputed,
            _ => Status::Fail,
        };
        let mut c = Case::new(id, anchor, status);
        c.detail("error", &err.to_string());
        c
    }

    pub fn detail<T: Serialize + ?Sized>(&mut self, key: &str, value: &T) -> &mut Self {
        // non-finite floats serialize as null
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        if let Value::Object(map) = &mut self.details {
            map.insert(key.to_string(), v);
        }
        self
    }

    pub fn with_detail<T: Serialize + ?Sized>(mut self, key: &str, value: &T) -> Self {
        self.detail(key, value);
        self
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub tool: String,
    pub version: String,
    pub suite: SuiteId,
    pub seed: u64,
    pub grid_points: usize,
    pub fd_step: f64,
    pub tolerance: Option<f64>,
    pub stretch: bool,
    pub group: Option<String>,
    pub model: Option<String>,
    pub params: BTreeMap<String, f64>,
    pub convention_version: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub not_computed: usize,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub header: ReportHeader,
    pub cases: Vec<Case>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new(header: ReportHeader, cases: Vec<Case>, runtime_ms: f64) -> Self {
        let count = |s: Status| cases.iter().filter(|c| c.status == s).count();
        let summary = Summary {
            total: cases.len(),
            pass: count(Status::Pass),
            fail: count(Status::Fail),
            skipped: count(Status::Skipped),
            not_computed: count(Status::NotComputed),
            runtime_ms,
        };
        VerificationReport { header, cases, summary }
    }

    pub fn any_failed(&self) -> bool {
        self.summary.fail > 0
    }

    /// 0 when no case failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.any_failed())
    }

    pub fn case(&self, id: &str) -> Option<&Case> {
        self.cases.iter().find(|c| c.id == id)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// JSON with every `runtime_ms` field removed.
    pub fn to_json_without_timing(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        strip_timing(&mut v);
        Ok(serde_json::to_string_pretty(&v)?)
    }

    pub fn to_text(&self) -> String {
        let h = &self.header;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} {}  suite={}  seed={}  grid_points={}  fd_step={:e}",
            h.tool, h.version, h.suite, h.seed, h.grid_points, h.fd_step
        );
        let width = self.cases.iter().map(|c| c.id.len()).max().unwrap_or(0);
        for c in &self.cases {
            let rel = c.details.get("measure").and_then(Value::as_str) == Some("relative");
            let shown = if rel {
                c.details.get("max_rel_error").and_then(Value::as_f64)
            } else {
                c.max_abs_error
            };
            let label = if rel { "rel" } else { "err" };
            let err = match (shown, c.tolerance) {
                (Some(e), Some(t)) => format!("{label} {e:.2e} / tol {t:.0e}"),
                (Some(e), None) => format!("{label} {e:.2e}"),
                _ => String::new(),
            };
            let _ = writeln!(
                out,
                "{:<4}  {:<width$}  {:<26}  {}",
                c.status.label(),
                c.id,
                err,
                c.anchor
            );
            if let Some(Value::String(e)) = c.details.get("error") {
                let _ = writeln!(out, "      error: {e}");
            }
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{} cases: {} pass, {} fail, {} skipped, {} not computed ({:.0} ms)",
            s.total, s.pass, s.fail, s.skipped, s.not_computed, s.runtime_ms
        );
        out
    }
}

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("runtime_ms");
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> ReportHeader {
        ReportHeader {
            tool: "t".into(),
            version: "0".into(),
            suite: SuiteId::Algebra,
            seed: 3,
            grid_points: 20,
            fd_step: 1e-4,
            tolerance: None,
            stretch: false,
            group: None,
            model: None,
            params: BTreeMap::new(),
            convention_version: 1,
        }
    }

    #[test]
    fn statuses_and_exit_code() {
        let cases = vec![
            Case::measured("a", PLUMBING, 1e-12, 1e-9),
            Case::measured("b", "x = y", f64::NAN, 1e-9),
            Case::new("c", PLUMBING, Status::NotComputed),
        ];
        assert_eq!(cases[0].status, Status::Pass);
        assert_eq!(cases[1].status, Status::Fail);
        assert_eq!(cases[1].max_abs_error, None);
        let r = VerificationReport::new(header(), cases, 1.0);
        assert_eq!((r.summary.pass, r.summary.fail, r.summary.not_computed), (1, 1, 1));
        assert_eq!(r.exit_code(), 1);
        let ok = VerificationReport::new(header(), vec![Case::new("c", PLUMBING, Status::NotComputed)], 1.0);
        assert_eq!(ok.exit_code(), 0);
        assert_eq!(ok.summary.pass, 0);
    }

    #[test]
    fn timing_is_stripped() {
        let mut c = Case::exact("a", PLUMBING, 3, 3);
        c.runtime_ms = 5.0;
        let mut d = c.clone();
        d.runtime_ms = 7.0;
        let r1 = VerificationReport::new(header(), vec![c], 10.0);
        let r2 = VerificationReport::new(header(), vec![d], 11.0);
        assert_ne!(r1.to_json().unwrap(), r2.to_json().unwrap());
        assert_eq!(r1.to_json_without_timing().unwrap(), r2.to_json_without_timing().unwrap());
        assert!(!r1.to_json_without_timing().unwrap().contains("runtime_ms"));
        let back: VerificationReport = serde_json::from_str(&r1.to_json().unwrap()).unwrap();
        assert_eq!(back, r1);
    }

    #[test]
    fn suite_names() {
        for name in SuiteId::NAMES {
            assert_eq!(SuiteId::parse(name).unwrap().as_str(), name);
        }
        assert!(matches!(SuiteId::parse("nope"), Err(Error::UnknownName { .. })));
        assert_eq!(SuiteId::All.parts().len(), 4);
    }
}

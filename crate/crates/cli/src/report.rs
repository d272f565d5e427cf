//! Suite reports: a versioned JSON document and a flat CSV written side by side.

use std::path::{Path, PathBuf};

use serde::Serialize;

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckResult {
    pub tag: String,
    /// Non-finite residuals (failed evaluations) serialize as `null`.
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub ms: f64,
}

impl CheckResult {
    pub fn new(tag: impl Into<String>, residual: f64, tol: f64, ms: f64) -> Self {
        CheckResult { tag: tag.into(), residual, tol, pass: residual <= tol, ms }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct OperatorInfo {
    pub source: String,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub annulus: Option<[f64; 2]>,
    pub omega: f64,
    pub diag: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct QuadratureInfo {
    pub tol: f64,
    pub rel_tol: f64,
    pub inner_tol: f64,
    pub inner_rel_tol: f64,
    pub phi: Option<f64>,
    pub theta: Option<f64>,
    pub j: [f64; 4],
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Env {
    pub seed: u64,
    pub quadrature: QuadratureInfo,
    pub parallel: bool,
    pub threads: usize,
    pub tool_version: String,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct SuiteReport {
    pub version: u32,
    pub suite: String,
    pub operator: OperatorInfo,
    pub checks: Vec<CheckResult>,
    pub env: Env,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    suite: &'a str,
    tag: &'a str,
    residual: f64,
    tol: f64,
    pass: bool,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn to_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for c in &self.checks {
            w.serialize(CsvRow { suite: &self.suite, tag: &c.tag, residual: c.residual, tol: c.tol, pass: c.pass })?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    /// Writes `<suite>.json` and `<suite>.csv` into `dir`, creating it if needed.
    pub fn write(&self, dir: &Path) -> anyhow::Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let json = dir.join(format!("{}.json", self.suite));
        let csv = dir.join(format!("{}.csv", self.suite));
        std::fs::write(&json, self.to_json()? + "\n")?;
        std::fs::write(&csv, self.to_csv()?)?;
        Ok((json, csv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SuiteReport {
        SuiteReport {
            version: REPORT_VERSION,
            suite: "identities".into(),
            operator: OperatorInfo {
                source: "generated".into(),
                dim: 2,
                path: None,
                seed: Some(1),
                annulus: Some([0.5, 2.0]),
                omega: 0.7,
                diag: false,
            },
            checks: vec![CheckResult::new("a", 1e-12, 1e-10, 0.1), CheckResult::new("b", f64::NAN, 1e-10, 0.2)],
            env: Env {
                seed: 1,
                quadrature: QuadratureInfo {
                    tol: 1e-9,
                    rel_tol: 0.0,
                    inner_tol: 1e-15,
                    inner_rel_tol: 1e-11,
                    phi: None,
                    theta: None,
                    j: [0.0, 1.0, 0.0, 0.0],
                },
                parallel: false,
                threads: 1,
                tool_version: "0".into(),
            },
        }
    }

    #[test]
    fn pass_flag_follows_residual() {
        let r = sample();
        assert!(r.checks[0].pass);
        assert!(!r.checks[1].pass);
        assert!(!r.passed());
        assert_eq!(r.failures(), 1);
    }

    #[test]
    fn json_and_csv_shapes() {
        let r = sample();
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        for key in ["version", "suite", "operator", "checks", "env"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v["checks"][1]["residual"].is_null());
        let csv = r.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("suite,tag,residual,tol,pass"));
        assert!(lines.next().unwrap().starts_with("identities,a,"));
    }
}

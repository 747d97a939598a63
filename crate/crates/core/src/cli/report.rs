//! Verification reports and their JSON, CSV and plain-text renderings.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};

pub const SCHEMA: u32 = 1;

/// Output format shared by all subcommands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    Pretty,
}

fn finite_or_null<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn null_is_infinite<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

/// Outcome of one named check. `pass` holds exactly when `max_residual <= tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub suite: String,
    pub check: String,
    pub params: Value,
    pub probes: usize,
    /// `null` when the check could not be evaluated.
    #[serde(serialize_with = "finite_or_null", deserialize_with = "null_is_infinite")]
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub wall_time_s: f64,
    /// Fitted constants and error estimates.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl VerificationReport {
    /// Copy with the wall time zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        VerificationReport { wall_time_s: 0.0, ..self.clone() }
    }
}

/// Residual collector for one check.
pub struct Probe {
    residuals: Vec<f64>,
    metrics: BTreeMap<String, f64>,
}

impl Probe {
    pub fn add(&mut self, r: f64) {
        self.residuals.push(r);
    }

    pub fn metric(&mut self, name: &str, v: f64) {
        self.metrics.insert(name.to_string(), v);
    }

    /// Keeps the largest value seen under `name`.
    pub fn metric_max(&mut self, name: &str, v: f64) {
        let e = self.metrics.entry(name.to_string()).or_insert(f64::NEG_INFINITY);
        if v > *e || v.is_nan() {
            *e = v;
        }
    }

    fn max(&self) -> f64 {
        self.residuals.iter().fold(f64::NEG_INFINITY, |m, &r| if r.is_nan() || m.is_nan() { f64::NAN } else { m.max(r) })
    }
}

/// Runs `body` and turns its residuals (or its error) into a report.
pub fn run_check<F>(suite: &str, check: &str, params: Value, tolerance: f64, body: F) -> VerificationReport
where
    F: FnOnce(&mut Probe) -> Result<()>,
{
    let start = Instant::now();
    let mut probe = Probe { residuals: vec![], metrics: BTreeMap::new() };
    let outcome = body(&mut probe);
    let (max_residual, error) = match outcome {
        Ok(()) if probe.residuals.is_empty() => (f64::INFINITY, Some("no probes evaluated".to_string())),
        Ok(()) => (probe.max(), None),
        Err(e) => (f64::INFINITY, Some(e.to_string())),
    };
    VerificationReport {
        schema: SCHEMA,
        suite: suite.to_string(),
        check: check.to_string(),
        params,
        probes: probe.residuals.len(),
        max_residual,
        tolerance,
        pass: max_residual <= tolerance,
        wall_time_s: start.elapsed().as_secs_f64(),
        metrics: probe.metrics,
        error,
    }
}

/// All reports of one `verify` invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteRun {
    pub schema: u32,
    pub suite: String,
    pub seed: u64,
    pub pass: bool,
    pub reports: Vec<VerificationReport>,
}

impl SuiteRun {
    pub fn new(suite: &str, seed: u64, reports: Vec<VerificationReport>) -> Self {
        let pass = reports.iter().all(|r| r.pass);
        SuiteRun { schema: SCHEMA, suite: suite.to_string(), seed, pass, reports }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Input(format!("write failed: {e}"))
}

pub fn write_reports<W: Write + ?Sized>(out: &mut W, run: &SuiteRun, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut *out, run).map_err(|e| Error::Input(e.to_string()))?;
            writeln!(out).map_err(io)
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["schema", "suite", "check", "params", "probes", "max_residual", "tolerance", "pass", "wall_time_s", "metrics", "error"])
                .map_err(|e| Error::Input(e.to_string()))?;
            for r in &run.reports {
                let metrics = serde_json::to_string(&r.metrics).map_err(|e| Error::Input(e.to_string()))?;
                w.write_record([
                    r.schema.to_string(),
                    r.suite.clone(),
                    r.check.clone(),
                    r.params.to_string(),
                    r.probes.to_string(),
                    format!("{:e}", r.max_residual),
                    format!("{:e}", r.tolerance),
                    r.pass.to_string(),
                    format!("{:.3}", r.wall_time_s),
                    metrics,
                    r.error.clone().unwrap_or_default(),
                ])
                .map_err(|e| Error::Input(e.to_string()))?;
            }
            w.flush().map_err(io)
        }
        OutputFormat::Pretty => {
            for r in &run.reports {
                writeln!(
                    out,
                    "{} {}/{}  max {:.3e}  tol {:.1e}  probes {}  {:.2}s{}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.suite,
                    r.check,
                    r.max_residual,
                    r.tolerance,
                    r.probes,
                    r.wall_time_s,
                    r.error.as_ref().map(|e| format!("  ({e})")).unwrap_or_default()
                )
                .map_err(io)?;
                for (k, v) in &r.metrics {
                    writeln!(out, "    {k} = {v:.6e}").map_err(io)?;
                }
            }
            writeln!(out, "{}: {}", run.suite, if run.pass { "all checks passed" } else { "some checks failed" }).map_err(io)
        }
    }
}

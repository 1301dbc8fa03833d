//! Report envelope and emission. Every command writes one JSON report
//! whose only nondeterministic byte range is the timestamp field on its
//! own line near the top; the quadrature-driven commands add fixed-column
//! CSV tables next to it.

use std::fmt::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::CliError;

/// One named check with its worst observed residual over however many
/// cases it covered.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub cases: usize,
    pub worst_residual: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, tolerance: f64) -> Self {
        CheckResult {
            name: name.into(),
            passed: true,
            cases: 0,
            worst_residual: 0.0,
            tolerance,
            detail: None,
        }
    }

    /// Folds one case into the check: tracks the worst residual and trips
    /// the flag when it exceeds the tolerance.
    pub fn record(&mut self, residual: f64) {
        self.cases += 1;
        if residual > self.worst_residual || residual.is_nan() {
            self.worst_residual = residual;
        }
        if residual.is_nan() || residual > self.tolerance {
            self.passed = false;
        }
    }

    /// Records a case judged elsewhere (library verdicts), keeping the
    /// residual for the report.
    pub fn record_verdict(&mut self, passed: bool, residual: f64) {
        self.cases += 1;
        if residual > self.worst_residual || residual.is_nan() {
            self.worst_residual = residual;
        }
        if !passed {
            self.passed = false;
        }
    }

    /// Marks the whole check failed with an explanatory note (e.g. a
    /// library error mid-case).
    pub fn fail(&mut self, detail: impl Into<String>) {
        self.passed = false;
        let note = detail.into();
        match &mut self.detail {
            Some(d) => {
                d.push_str("; ");
                d.push_str(&note);
            }
            None => self.detail = Some(note),
        }
    }
}

/// A CSV table ready to write: file name and full contents.
pub struct CsvFile {
    pub name: String,
    pub contents: String,
}

/// Incremental CSV builder with `{:?}` float formatting (shortest
/// round-trip representation, so re-runs are byte-identical).
pub struct CsvBuilder {
    out: String,
}

impl CsvBuilder {
    pub fn new(columns: &[&str]) -> Self {
        CsvBuilder { out: format!("{}\n", columns.join(",")) }
    }

    pub fn row(&mut self, cells: &[CsvCell<'_>]) {
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                self.out.push(',');
            }
            match cell {
                CsvCell::Str(s) => self.out.push_str(s),
                CsvCell::Int(v) => {
                    let _ = write!(self.out, "{v}");
                }
                CsvCell::Float(v) => {
                    let _ = write!(self.out, "{v:?}");
                }
                CsvCell::Bool(v) => {
                    let _ = write!(self.out, "{v}");
                }
                CsvCell::Empty => {}
            }
        }
        self.out.push('\n');
    }

    pub fn finish(self, name: impl Into<String>) -> CsvFile {
        CsvFile { name: name.into(), contents: self.out }
    }
}

pub enum CsvCell<'a> {
    Str(&'a str),
    Int(i64),
    Float(f64),
    Bool(bool),
    Empty,
}

/// What a suite hands back: its checks, an optional JSON payload with the
/// detailed per-experiment data, and CSV tables.
pub struct SuiteOutput {
    pub checks: Vec<CheckResult>,
    pub details: Value,
    pub csv: Vec<CsvFile>,
}

#[derive(Serialize)]
struct Report<'a> {
    timestamp_unix_ms: u128,
    command: &'a str,
    version: &'a str,
    config: &'a RunConfig,
    checks: &'a [CheckResult],
    details: &'a Value,
    verdict: bool,
}

/// Writes `<command>.json` plus the suite's CSV files into the output
/// directory, prints one PASS/FAIL line per check, and returns the
/// overall verdict.
pub fn emit(command: &str, cfg: &RunConfig, suite: &SuiteOutput) -> Result<bool, CliError> {
    let verdict = suite.checks.iter().all(|c| c.passed);
    let report = Report {
        timestamp_unix_ms: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis())
            .unwrap_or(0),
        command,
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        checks: &suite.checks,
        details: &suite.details,
        verdict,
    };
    std::fs::create_dir_all(&cfg.out_dir).map_err(|e| {
        CliError::validation(format!("cannot create {}: {e}", cfg.out_dir.display()))
    })?;
    let json_path = cfg.out_dir.join(format!("{command}.json"));
    let text = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::validation(format!("report serialization failed: {e}")))?;
    write_file(&json_path, &text)?;
    for csv in &suite.csv {
        write_file(&cfg.out_dir.join(&csv.name), &csv.contents)?;
    }

    for check in &suite.checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        let detail = check
            .detail
            .as_deref()
            .map(|d| format!(" [{d}]"))
            .unwrap_or_default();
        println!(
            "{status} {} ({} cases, worst residual {:.3e}, tolerance {:.3e}){detail}",
            check.name, check.cases, check.worst_residual, check.tolerance
        );
    }
    println!(
        "{}: {} of {} checks passed; report at {}",
        command,
        suite.checks.iter().filter(|c| c.passed).count(),
        suite.checks.len(),
        json_path.display()
    );
    Ok(verdict)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))
}

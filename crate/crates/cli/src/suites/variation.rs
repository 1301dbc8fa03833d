//! Variation suite: finite-difference checks of the energy derivative
//! formulas along the canonical radial family `|z|^2 + t (R^2 - |z|^2)`,
//! for every configured k and every derivative order up to k+1. These
//! checks report the worst residual relative to each case's own
//! tolerance, so their pass threshold is 1.

use serde_json::json;

use khess::varcheck::{
    first_variation_check, higher_derivative_check, second_variation_check, PerturbationFamily,
};
use khess::{ExperimentReport64, PolyField64};

use crate::config::RunConfig;
use crate::report::{CheckResult, CsvBuilder, CsvCell, SuiteOutput};
use crate::suites::calibrated_rule;
use crate::CliError;

const BASE_STEP: f64 = 1e-3;

pub fn run(cfg: &RunConfig) -> Result<SuiteOutput, CliError> {
    let rule = calibrated_rule(cfg)?;
    let base = PolyField64::abs2(cfg.n);
    let weight = PolyField64::constant_re(cfg.n, 1.0);
    let family = PerturbationFamily::new(&base, &weight, cfg.radius, Vec::new());

    let mut first = CheckResult::new("first_variation_formula", 1.0);
    let mut second = CheckResult::new("second_variation_both_routes", 1.0);
    let mut higher = CheckResult::new("higher_derivative_formulas", 1.0);

    let mut csv = CsvBuilder::new(&[
        "kind",
        "k",
        "j",
        "analytic",
        "finite_difference",
        "residual",
        "tolerance",
        "observed_order",
        "order_at_floor",
        "verdict",
    ]);
    let mut reports: Vec<ExperimentReport64> = Vec::new();

    for &k in &cfg.k {
        for j in 1..=k + 1 {
            let outcome = match j {
                1 => first_variation_check(&family, k, &rule, BASE_STEP),
                2 => second_variation_check(&family, k, &rule, BASE_STEP),
                _ => higher_derivative_check(&family, k, j, &rule),
            };
            let check = match j {
                1 => &mut first,
                2 => &mut second,
                _ => &mut higher,
            };
            match outcome {
                Ok(report) => {
                    let worst = report
                        .residuals
                        .iter()
                        .fold(0.0f64, |a, &r| a.max(r.abs()));
                    check.record_verdict(report.verdict, worst / report.tolerance);
                    push_row(&mut csv, k, j, &report);
                    reports.push(report);
                }
                Err(e) => check.fail(format!("k={k} j={j}: {e}")),
            }
        }
    }

    let details = json!({
        "family": "abs2 + t * (R^2 - abs2)",
        "base_step": BASE_STEP,
        "reports": reports,
    });
    Ok(SuiteOutput {
        checks: vec![first, second, higher],
        details,
        csv: vec![csv.finish("variation_summary.csv")],
    })
}

fn push_row(csv: &mut CsvBuilder, k: usize, j: usize, report: &ExperimentReport64) {
    let lead = |v: &[f64]| v.first().map_or(CsvCell::Empty, |&x| CsvCell::Float(x));
    csv.row(&[
        CsvCell::Str(&report.kind),
        CsvCell::Int(k as i64),
        CsvCell::Int(j as i64),
        lead(&report.analytic),
        lead(&report.finite_difference),
        lead(&report.residuals),
        CsvCell::Float(report.tolerance),
        report.observed_order.map_or(CsvCell::Empty, CsvCell::Float),
        CsvCell::Bool(report.order_at_floor),
        CsvCell::Bool(report.verdict),
    ]);
}

//! Dirichlet-principle suite: degenerate solutions minimize the energy
//! among trace-preserving competitors. Runs the epsilon-family sweep off
//! the pluriharmonic base, a segment convexity scan, and — for k = 1,
//! where every competitor is admissible — random competitors against the
//! harmonic extension plus a gradient descent that should land back on it.

use serde_json::json;

use khess::varcheck::{
    convexity_scan, dirichlet_principle_experiment, harmonic_extension_ball, minimize_over_basis,
    vanishing_factor, PerturbationFamily,
};
use khess::wirtinger::{random_polynomial, stock_field_by_name};
use khess::{ExperimentReport64, PolyField64};

use crate::config::RunConfig;
use crate::report::{CheckResult, CsvBuilder, CsvCell, SuiteOutput};
use crate::suites::calibrated_rule;
use crate::CliError;

const COMPETITOR_COUNT: u64 = 20;
const DESCENT_ITERS: usize = 400;

pub fn run(cfg: &RunConfig) -> Result<SuiteOutput, CliError> {
    let rule = calibrated_rule(cfg)?;
    let ts = cfg.tol_scale;
    let pluriharmonic = stock_field_by_name("re_z1_sq", cfg.n, cfg.radius)
        .ok_or_else(|| CliError::validation("stock field re_z1_sq unavailable"))?;

    let mut nonneg = CheckResult::new("epsilon_family_margins_nonnegative", 1.0);
    let mut monotone = CheckResult::new("epsilon_family_margins_nondecreasing", 1.0);
    let mut segment = CheckResult::new("segment_second_differences", 1.0);

    let mut csv = CsvBuilder::new(&[
        "experiment",
        "k",
        "step",
        "energy",
        "margin",
        "feasible",
    ]);
    let mut reports: Vec<ExperimentReport64> = Vec::new();

    // epsilon * (|z|^2 - R^2) added to the pluriharmonic base: the complex
    // Hessian gains epsilon * I, so every step is admissible and the
    // margins grow with epsilon.
    let outward = vanishing_factor(cfg.n, cfg.radius).scale_re(-1.0);
    let steps: Vec<f64> = (0..=10).map(|i| f64::from(i) / 10.0).collect();
    for &k in &cfg.k {
        match PerturbationFamily::from_direction(&pluriharmonic, &outward, cfg.radius, steps.clone())
            .map_err(|e| e.to_string())
            .and_then(|fam| {
                dirichlet_principle_experiment(&pluriharmonic, &[fam], k, &rule)
                    .map_err(|e| e.to_string())
            }) {
            Ok(report) => {
                nonneg.record_verdict(report.verdict, margin_deficit(&report));
                let slack = report.tolerance * 1e-6;
                let worst_drop = report
                    .margins
                    .windows(2)
                    .fold(0.0f64, |a, w| a.max(w[0] - w[1]));
                monotone.record_verdict(worst_drop <= slack, worst_drop / slack);
                push_rows(&mut csv, "epsilon_family", &report);
                reports.push(report);
            }
            Err(e) => {
                nonneg.fail(format!("k={k}: {e}"));
                monotone.fail(format!("k={k}: {e}"));
            }
        }

        let segment_end = pluriharmonic.sub_ref(&vanishing_factor(cfg.n, cfg.radius).scale_re(0.5));
        match convexity_scan(&pluriharmonic, &segment_end, k, &rule, 8) {
            Ok(report) => {
                segment.record_verdict(report.verdict, margin_deficit(&report));
                push_rows(&mut csv, "segment_scan", &report);
                reports.push(report);
            }
            Err(e) => segment.fail(format!("k={k}: {e}")),
        }
    }

    let mut checks = vec![nonneg, monotone, segment];
    if cfg.k.contains(&1) {
        let (competitors, descent) = k1_experiments(cfg, &rule, &mut csv, &mut reports, ts);
        checks.push(competitors);
        checks.push(descent);
    }

    let details = json!({
        "base_field": "re_z1_sq",
        "epsilon_steps": steps,
        "reports": reports,
    });
    Ok(SuiteOutput { checks, details, csv: vec![csv.finish("dirichlet_margins.csv")] })
}

/// k = 1 admits arbitrary competitors, so pit the harmonic extension of
/// x_1^2 against random trace-preserving perturbations and run descent
/// over a trace-zero basis back toward it.
fn k1_experiments(
    cfg: &RunConfig,
    rule: &khess::QuadratureRule64,
    csv: &mut CsvBuilder,
    reports: &mut Vec<ExperimentReport64>,
    ts: f64,
) -> (CheckResult, CheckResult) {
    let mut competitors = CheckResult::new("random_competitor_margins", 1.0);
    let mut descent = CheckResult::new("descent_returns_to_harmonic_extension", 1e-2 * ts);

    let x1 = PolyField64::x(cfg.n, 0);
    let trace = x1.mul_ref(&x1);
    let extension = match harmonic_extension_ball(&trace, cfg.radius) {
        Ok(u) => u,
        Err(e) => {
            competitors.fail(e.to_string());
            descent.fail(e.to_string());
            return (competitors, descent);
        }
    };

    let families: Vec<PerturbationFamily<f64>> = (0..COMPETITOR_COUNT)
        .map(|i| {
            let w = random_polynomial(cfg.n, 2, cfg.seed.wrapping_add(1000 + i));
            PerturbationFamily::new(&extension, &w, cfg.radius, vec![1.0])
        })
        .collect();
    match dirichlet_principle_experiment(&extension, &families, 1, rule) {
        Ok(report) => {
            competitors.record_verdict(report.verdict, margin_deficit(&report));
            push_rows(csv, "random_competitors", &report);
            reports.push(report);
        }
        Err(e) => competitors.fail(e.to_string()),
    }

    let factor = vanishing_factor(cfg.n, cfg.radius);
    let mut basis: Vec<PolyField64> = vec![factor.clone()];
    for slot in 0..(2 * cfg.n).min(4) {
        let coord = if slot % 2 == 0 {
            PolyField64::x(cfg.n, slot / 2)
        } else {
            PolyField64::y(cfg.n, slot / 2)
        };
        basis.push(factor.mul_ref(&coord));
    }
    let start = vec![0.3; basis.len()];
    match minimize_over_basis(&extension, &basis, &start, 1, rule, DESCENT_ITERS) {
        Ok(report) => {
            let norm = report
                .coefficients
                .iter()
                .fold(0.0f64, |a, &c| a + c * c)
                .sqrt();
            descent.record(norm);
            if !report.verdict {
                descent.fail("descent did not converge back to the extension");
            }
            push_rows(csv, "minimizer", &report);
            reports.push(report);
        }
        Err(e) => descent.fail(e.to_string()),
    }
    (competitors, descent)
}

/// How far the worst margin dips below zero, relative to the report's own
/// tolerance; nonnegative margins give zero.
fn margin_deficit(report: &ExperimentReport64) -> f64 {
    let worst = report.margins.iter().fold(0.0f64, |a, &m| a.max(-m));
    worst / report.tolerance
}

fn push_rows(csv: &mut CsvBuilder, experiment: &str, report: &ExperimentReport64) {
    for (i, &step) in report.steps.iter().enumerate() {
        csv.row(&[
            CsvCell::Str(experiment),
            CsvCell::Int(report.k as i64),
            CsvCell::Float(step),
            report.energies.get(i).map_or(CsvCell::Empty, |&e| CsvCell::Float(e)),
            report.margins.get(i).map_or(CsvCell::Empty, |&m| CsvCell::Float(m)),
            report.cone_flags.get(i).map_or(CsvCell::Empty, |&f| CsvCell::Bool(f)),
        ]);
    }
}

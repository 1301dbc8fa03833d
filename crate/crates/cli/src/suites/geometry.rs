//! Boundary geometry suite: sphere closed forms for the adapted frame
//! (Hermitian mean curvature, Levi form restriction, characteristic
//! direction), and the pointwise normal-trade and Laplacian-trade
//! identities for every selected field.

use serde_json::json;

use khess::domain::{laplacian_relation_residual, tnn_cross_check, LevelSetGeometry};
use khess::wirtinger::JetEvaluator;
use khess::{DomainSpec64, HermitianMatrix64};

use crate::config::{resolve_fields, RunConfig};
use crate::report::{CheckResult, CsvBuilder, CsvCell, SuiteOutput};
use crate::suites::calibrated_rule;
use crate::CliError;

pub fn run(cfg: &RunConfig) -> Result<SuiteOutput, CliError> {
    let rule = calibrated_rule(cfg)?;
    let spec = DomainSpec64::ball(cfg.n, cfg.radius);
    let geometry = LevelSetGeometry::new(&spec);
    let tol = 1e-9 * cfg.tol_scale;
    let points = cfg.point_count.min(rule.boundary_len());

    let mut curvature = CheckResult::new("hermitian_mean_curvature_closed_form", tol);
    let mut levi = CheckResult::new("levi_form_horizontal_identity", tol);
    let mut characteristic = CheckResult::new("levi_form_characteristic_vanishes", tol);
    let mut trade = CheckResult::new("normal_trade_identity", tol);
    let mut laplacian = CheckResult::new("laplacian_trade_identity", tol);

    let mut csv = CsvBuilder::new(&["check", "field", "point_index", "residual", "tolerance"]);
    let fields = resolve_fields(cfg)?;
    let jets: Vec<(String, JetEvaluator<f64>)> = fields
        .iter()
        .map(|rf| (rf.name.clone(), JetEvaluator::new(&rf.field)))
        .collect();

    let hb_expected = (2 * cfg.n - 2) as f64 / cfg.radius;
    let levi_expected = if cfg.n > 1 {
        Some(HermitianMatrix64::identity(cfg.n - 1).scale(1.0 / cfg.radius))
    } else {
        None
    };

    for q in 0..points {
        let p = rule.boundary_node(q);
        let (frame, shape) = geometry
            .frame_and_shape(p)
            .map_err(|e| CliError::validation(format!("frame construction: {e}")))?;

        let r = (shape.hb() - hb_expected).abs() / (1.0 + hb_expected.abs());
        curvature.record(r);
        push_row(&mut csv, "hermitian_mean_curvature", "", q, r, tol);

        if let Some(expected) = &levi_expected {
            let r = shape
                .l_h()
                .max_abs_diff(expected)
                .map_err(|e| CliError::validation(format!("levi comparison: {e}")))?;
            levi.record(r);
            push_row(&mut csv, "levi_horizontal", "", q, r, tol);
        }

        let r = shape.l_zt().iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        characteristic.record(r);
        push_row(&mut csv, "levi_characteristic", "", q, r, tol);

        for (name, evaluator) in &jets {
            let jet = evaluator.jet(p);
            let (lhs, rhs) = tnn_cross_check(&jet, &frame, &shape);
            let scale = 1.0 + lhs.abs();
            let r = (lhs - rhs).abs() / scale;
            trade.record(r);
            push_row(&mut csv, "normal_trade", name, q, r, tol);

            let r = laplacian_relation_residual(&jet, &frame, &shape) / scale;
            laplacian.record(r);
            push_row(&mut csv, "laplacian_trade", name, q, r, tol);
        }
    }

    let mut checks = vec![curvature];
    if levi_expected.is_some() {
        checks.push(levi);
    }
    checks.push(characteristic);
    checks.push(trade);
    checks.push(laplacian);

    let details = json!({
        "points_checked": points,
        "hb_closed_form": hb_expected,
        "fields": jets.iter().map(|(name, _)| name.clone()).collect::<Vec<_>>(),
    });
    Ok(SuiteOutput {
        checks,
        details,
        csv: vec![csv.finish("geometry_residuals.csv")],
    })
}

fn push_row(csv: &mut CsvBuilder, check: &str, field: &str, q: usize, residual: f64, tol: f64) {
    csv.row(&[
        CsvCell::Str(check),
        CsvCell::Str(field),
        CsvCell::Int(q as i64),
        CsvCell::Float(residual),
        CsvCell::Float(tol),
    ]);
}

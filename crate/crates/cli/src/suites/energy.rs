//! Energy suite: boundary-route agreement and breakdowns for every
//! selected field and k, the integrated-by-parts variant at k = 2, the
//! paraboloid closed form when the run matches it, and the per-node
//! boundary density tables.

use std::f64::consts::PI;

use serde_json::json;

use khess::energy::{boundary_density_report, energy, energy3_simplified, interior_term};

use crate::config::{resolve_fields, RunConfig};
use crate::report::{CheckResult, CsvBuilder, CsvCell, SuiteOutput};
use crate::suites::calibrated_rule;
use crate::CliError;

pub fn run(cfg: &RunConfig) -> Result<SuiteOutput, CliError> {
    let rule = calibrated_rule(cfg)?;
    let fields = resolve_fields(cfg)?;
    let route_tol = 1e-9 * cfg.tol_scale;
    let coarse_tol = 5e-3 * cfg.tol_scale;

    let mut routes = CheckResult::new("boundary_route_agreement", route_tol);
    let mut e3 = cfg
        .k
        .contains(&2)
        .then(|| CheckResult::new("k2_integrated_by_parts_route", coarse_tol));

    let mut summary = CsvBuilder::new(&[
        "field",
        "k",
        "interior",
        "boundary",
        "total",
        "route_gap",
        "e3_total",
        "e3_residual",
    ]);
    let mut density = CsvBuilder::new(&[
        "field",
        "k",
        "point_index",
        "value",
        "normal_derivative",
        "density",
    ]);
    let mut terms =
        CsvBuilder::new(&["field", "k", "point_index", "term_index", "mixed_sigma"]);

    let mut breakdowns = Vec::new();
    for rf in &fields {
        for &k in &cfg.k {
            let breakdown = match energy(&rf.field, &rule, k) {
                Ok(b) => b,
                Err(e) => {
                    routes.fail(format!("{} at k={k}: {e}", rf.name));
                    continue;
                }
            };
            routes.record(breakdown.route_gap / (1.0 + breakdown.total.abs()));

            let mut e3_total = None;
            let mut e3_residual = None;
            if k == 2 {
                match energy3_simplified(&rf.field, &rule) {
                    Ok(v) => {
                        let rel = (v - breakdown.total).abs() / (1.0 + breakdown.total.abs());
                        if let Some(check) = e3.as_mut() {
                            check.record(rel);
                        }
                        e3_total = Some(v);
                        e3_residual = Some(rel);
                    }
                    Err(e) => {
                        if let Some(check) = e3.as_mut() {
                            check.fail(format!("{}: {e}", rf.name));
                        }
                    }
                }
            }

            summary.row(&[
                CsvCell::Str(&rf.name),
                CsvCell::Int(k as i64),
                CsvCell::Float(breakdown.interior),
                CsvCell::Float(breakdown.total - breakdown.interior),
                CsvCell::Float(breakdown.total),
                CsvCell::Float(breakdown.route_gap),
                e3_total.map_or(CsvCell::Empty, CsvCell::Float),
                e3_residual.map_or(CsvCell::Empty, CsvCell::Float),
            ]);

            let report = boundary_density_report(&rf.field, &rule, k)
                .map_err(|e| CliError::validation(format!("density report: {e}")))?;
            for (q, row) in report.rows.iter().enumerate() {
                density.row(&[
                    CsvCell::Str(&rf.name),
                    CsvCell::Int(k as i64),
                    CsvCell::Int(q as i64),
                    CsvCell::Float(row.value),
                    CsvCell::Float(row.normal_derivative),
                    CsvCell::Float(row.density),
                ]);
                for (t, sigma) in row.mixed_sigmas.iter().enumerate() {
                    terms.row(&[
                        CsvCell::Str(&rf.name),
                        CsvCell::Int(k as i64),
                        CsvCell::Int(q as i64),
                        CsvCell::Int(t as i64 + 2),
                        CsvCell::Float(*sigma),
                    ]);
                }
            }

            breakdowns.push(json!({ "field": rf.name, "breakdown": breakdown }));
        }
    }

    let mut checks = vec![routes];
    if let Some(check) = e3 {
        checks.push(check);
    }
    if let Some(check) = paraboloid_closed_form(cfg, &fields, &rule)? {
        checks.push(check);
    }

    let details = json!({ "energies": breakdowns });
    Ok(SuiteOutput {
        checks,
        details,
        csv: vec![
            summary.finish("energy_summary.csv"),
            density.finish("boundary_density.csv"),
            terms.finish("boundary_terms.csv"),
        ],
    })
}

/// On the unit ball in C^2 the k = 1 energy of `|z|^2` is `2 pi^2 / 3`
/// and its interior integral is `-2 pi^2 / 3` in the coordinate
/// normalization. Only applicable when the run matches that geometry.
fn paraboloid_closed_form(
    cfg: &RunConfig,
    fields: &[crate::config::ResolvedField],
    rule: &khess::QuadratureRule64,
) -> Result<Option<CheckResult>, CliError> {
    let applicable = cfg.n == 2
        && (cfg.radius - 1.0).abs() < 1e-12
        && cfg.k.contains(&1)
        && fields.iter().any(|rf| rf.name == "abs2");
    if !applicable {
        return Ok(None);
    }
    let field = &fields.iter().find(|rf| rf.name == "abs2").unwrap().field;
    let mut check = CheckResult::new("paraboloid_closed_form", 5e-3 * cfg.tol_scale);
    let expected = 2.0 * PI * PI / 3.0;
    let total = energy(field, rule, 1)
        .map_err(|e| CliError::validation(format!("closed-form energy: {e}")))?
        .total;
    check.record((total - expected).abs() / expected);
    let interior = interior_term(field, rule, 1)
        .map_err(|e| CliError::validation(format!("closed-form interior: {e}")))?;
    check.record((interior + expected).abs() / expected);
    Ok(Some(check))
}

use super::*;
use crate::domain::{adapted_frame, build_ball_quadrature, shape_operator};
use crate::wirtinger::{stock_fields, PolyField};
use approx::{assert_abs_diff_eq, assert_relative_eq};
use std::f64::consts::PI;

type P = PolyField<f64>;

fn unit_ball_rule(n: usize, angular: usize) -> QuadratureRule<f64> {
    build_ball_quadrature(n, 1.0, 16, angular, 42).unwrap()
}

#[test]
fn interior_term_closed_forms_for_squared_radius() {
    // integral of |z|^2 over the unit ball in C^2 is pi^2/3; the coordinate
    // Hessian of |z|^2 is the identity, so sigma_1 = 2 and sigma_2 = 1.
    let rule = unit_ball_rule(2, 4096);
    let u = P::abs2(2);
    let k1 = interior_term(&u, &rule, 1).unwrap();
    assert_relative_eq!(k1, -2.0 * PI * PI / 3.0, max_relative = 5e-3);
    let k2 = interior_term(&u, &rule, 2).unwrap();
    assert_relative_eq!(k2, -PI * PI / 3.0, max_relative = 5e-3);
}

#[test]
fn interior_term_vanishes_for_pluriharmonic_fields() {
    let rule = unit_ball_rule(2, 512);
    // Re z_1^2 = x_1^2 - y_1^2 has identically zero complex Hessian.
    let u = P::z(2, 0).pow(2).re_part();
    for k in 1..=2 {
        let v = interior_term(&u, &rule, k).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-13);
    }
}

#[test]
fn interior_term_rejects_out_of_range_k() {
    let rule = unit_ball_rule(2, 512);
    let u = P::abs2(2);
    assert!(matches!(
        interior_term(&u, &rule, 0),
        Err(EnergyError::KOutOfRange { k: 0, n: 2 })
    ));
    assert!(matches!(
        interior_term(&u, &rule, 3),
        Err(EnergyError::KOutOfRange { k: 3, n: 2 })
    ));
}

#[test]
fn polarized_interior_with_equal_arguments_is_interior_term() {
    let rule = unit_ball_rule(2, 512);
    let u = P::abs2(2).mul_ref(&P::abs2(2)).add_ref(&P::x(2, 0).pow(2));
    for k in 1..=2 {
        let args: Vec<&P> = std::iter::repeat_n(&u, k).collect();
        let diag = polarized_interior(&u, &args, &rule).unwrap();
        let direct = interior_term(&u, &rule, k).unwrap();
        assert_relative_eq!(diag, direct, max_relative = 1e-9);
    }
}

#[test]
fn polarized_interior_matches_radial_closed_form() {
    // v = 1 - |z|^2 against two copies of |z|^2 in C^2: sigma_2(I) = 1, so
    // the value is -(Vol(B^4) - integral r^2) = -(pi^2/2 - pi^2/3).
    let rule = unit_ball_rule(2, 4096);
    let v = P::constant_re(2, 1.0).sub_ref(&P::abs2(2));
    let u = P::abs2(2);
    let got = polarized_interior(&v, &[&u, &u], &rule).unwrap();
    assert_relative_eq!(got, -PI * PI / 6.0, max_relative = 5e-3);
}

#[test]
fn density_for_k1_is_half_the_normal_derivative() {
    let spec = DomainSpec::ball(3, 1.0);
    let fields = stock_fields::<f64>(3, 1.0);
    let points = [
        [1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [0.0, 0.6, 0.0, 0.8, 0.0, 0.0],
        [0.5, 0.5, 0.5, 0.0, 0.5, 0.0],
    ];
    for sf in &fields {
        let eval = JetEvaluator::new(&sf.field);
        for p in &points {
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            let p: Vec<f64> = p.iter().map(|x| x / norm).collect();
            let frame = adapted_frame(&spec, &p).unwrap();
            let shape = shape_operator(&spec, &p).unwrap();
            let jet = eval.jet(&p);
            let q1 = qk_density(&jet, &frame, &shape, 1).unwrap();
            assert_abs_diff_eq!(q1, 0.5 * frame.u_nu(&jet), epsilon = 1e-15);
        }
    }
}

#[test]
fn boundary_terms_match_sphere_closed_forms() {
    // u = |z|^2 on the unit sphere in C^2: u = 1, u_nu = 2, both restricted
    // matrices are (1x1) with entry L = 1 and D = 2; Area(S^3) = 2 pi^2.
    let rule = unit_ball_rule(2, 4096);
    let u = P::abs2(2);
    let s2 = s_i_term(&u, &rule, 2, 2).unwrap();
    assert_relative_eq!(s2, 48.0 * PI * PI, max_relative = 5e-3);
    let s3 = s_i_term(&u, &rule, 3, 2).unwrap();
    assert_relative_eq!(s3, -24.0 * PI * PI, max_relative = 5e-3);
    // k = 1: S_2 = oint u u_nu = 2 Area.
    let s2_k1 = s_i_term(&u, &rule, 2, 1).unwrap();
    assert_relative_eq!(s2_k1, 4.0 * PI * PI, max_relative = 5e-3);
}

#[test]
fn boundary_terms_vanish_with_the_trace() {
    let rule = unit_ball_rule(2, 512);
    let bump = P::constant_re(2, 1.0).sub_ref(&P::abs2(2)).mul_ref(&P::x(2, 1));
    for (i, k) in [(2usize, 1usize), (2, 2), (3, 2)] {
        let v = s_i_term(&bump, &rule, i, k).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-10);
    }
}

#[test]
fn boundary_term_index_is_validated() {
    let rule = unit_ball_rule(2, 512);
    let u = P::abs2(2);
    assert!(matches!(
        s_i_term(&u, &rule, 1, 2),
        Err(EnergyError::IOutOfRange { i: 1, k: 2 })
    ));
    assert!(matches!(
        s_i_term(&u, &rule, 4, 2),
        Err(EnergyError::IOutOfRange { i: 4, k: 2 })
    ));
}

#[test]
fn energy_of_squared_radius_matches_closed_form() {
    let rule = unit_ball_rule(2, 4096);
    let u = P::abs2(2);
    let e2 = energy(&u, &rule, 1).unwrap();
    assert_relative_eq!(e2.total, 2.0 * PI * PI / 3.0, max_relative = 5e-3);
    assert_relative_eq!(e2.interior, -4.0 * PI * PI / 3.0, max_relative = 5e-3);
    let e3 = energy(&u, &rule, 2).unwrap();
    assert_relative_eq!(e3.total, 2.0 * PI * PI / 3.0, max_relative = 5e-3);
    assert_relative_eq!(e3.interior, -4.0 * PI * PI / 3.0, max_relative = 5e-3);
    assert_relative_eq!(e3.s_terms[&2], 48.0 * PI * PI, max_relative = 5e-3);
    assert_relative_eq!(e3.s_terms[&3], -24.0 * PI * PI, max_relative = 5e-3);
}

#[test]
fn energy_breakdown_total_is_the_documented_combination() {
    let rule = unit_ball_rule(3, 512);
    let u = P::abs2(3).add_ref(&P::x(3, 0).pow(2));
    for k in 1..=3 {
        let b = energy(&u, &rule, k).unwrap();
        let s_sum: f64 = b.s_terms.values().sum();
        let expect = b.interior + s_sum / (k * k * (k + 1)) as f64;
        assert_relative_eq!(b.total, expect, max_relative = 1e-12);
        assert_eq!(b.s_terms.len(), k);
    }
}

#[test]
fn harmonic_energy_is_half_the_boundary_flux() {
    // u = x_1 x_2 is harmonic; E_2 = (1/2) oint u u_nu = oint (x_1 x_2)^2
    // = pi^2 / 12 on the unit sphere in C^2.
    let rule = unit_ball_rule(2, 4096);
    let u = P::x(2, 0).mul_ref(&P::x(2, 1));
    let b = energy(&u, &rule, 1).unwrap();
    assert_abs_diff_eq!(b.interior, 0.0, epsilon = 1e-13);
    assert_relative_eq!(b.total, PI * PI / 12.0, max_relative = 5e-3);
}

#[test]
fn energy_of_constants_is_zero() {
    let rule = unit_ball_rule(2, 512);
    let u = P::constant_re(2, 3.25);
    for k in 1..=2 {
        let b = energy(&u, &rule, k).unwrap();
        assert_abs_diff_eq!(b.total, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(b.interior, 0.0, epsilon = 1e-14);
    }
}

#[test]
fn both_boundary_routes_agree_for_every_stock_field() {
    // The S_i sum and the integrated density are the same summands
    // regrouped, so energy() would error out if they drifted past 1e-9.
    for n in [2usize, 3] {
        let rule = build_ball_quadrature(n, 1.0, 8, 512, 7).unwrap();
        for k in 1..=n.min(3) {
            for sf in &stock_fields::<f64>(n, 1.0) {
                let r = energy(&sf.field, &rule, k);
                assert!(r.is_ok(), "route mismatch for {} at n={n}, k={k}: {r:?}", sf.name);
            }
        }
    }
}

#[test]
fn integrated_by_parts_energy_matches_the_assembled_one() {
    let rule = unit_ball_rule(2, 4096);
    for u in [P::abs2(2), P::abs2(2).mul_ref(&P::abs2(2))] {
        let direct = energy(&u, &rule, 2).unwrap().total;
        let via_parts = energy3_simplified(&u, &rule).unwrap();
        let scale = 1.0 + direct.abs();
        assert_abs_diff_eq!(via_parts, direct, epsilon = 5e-3 * scale);
    }
}

#[test]
fn integrated_by_parts_energy_with_vanishing_trace_is_interior_only() {
    let rule = unit_ball_rule(2, 512);
    let u = P::constant_re(2, 1.0).sub_ref(&P::abs2(2)).mul_ref(&P::x(2, 0));
    let got = energy3_simplified(&u, &rule).unwrap();
    let interior = 4.0 * interior_term(&u, &rule, 2).unwrap();
    assert_abs_diff_eq!(got, interior, epsilon = 1e-10);
}

#[test]
fn density_report_rows_are_consistent() {
    let rule = unit_ball_rule(2, 512);
    let u = P::abs2(2).add_ref(&P::x(2, 0).pow(2));
    let report = boundary_density_report(&u, &rule, 2).unwrap();
    assert_eq!(report.rows.len(), rule.boundary_len());
    let flux: f64 = report
        .rows
        .iter()
        .enumerate()
        .map(|(q, row)| rule.boundary_weight(q) * row.value * row.density)
        .sum();
    let b = energy(&u, &rule, 2).unwrap();
    let s_sum: f64 = b.s_terms.values().sum();
    assert_relative_eq!(flux, s_sum / 12.0, max_relative = 1e-9);
    for row in &report.rows {
        assert_eq!(row.mixed_sigmas.len(), 2);
        assert_eq!(row.point.len(), 4);
    }
    let r1 = boundary_density_report(&u, &rule, 1).unwrap();
    for row in &r1.rows {
        assert_abs_diff_eq!(row.density, 0.5 * row.normal_derivative, epsilon = 1e-15);
    }
}

#[test]
fn single_precision_energy_smoke() {
    let rule = build_ball_quadrature::<f32>(2, 1.0f32, 8, 512, 3).unwrap();
    let u = PolyField::<f32>::abs2(2);
    let b = energy(&u, &rule, 1).unwrap();
    let expect = (2.0 * PI * PI / 3.0) as f32;
    assert_relative_eq!(b.total, expect, max_relative = 5e-2);
}

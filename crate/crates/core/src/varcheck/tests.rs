use std::f64::consts::PI;

use approx::{assert_abs_diff_eq, assert_relative_eq};

use super::*;
use crate::domain::build_ball_quadrature;
use crate::wirtinger::{random_polynomial, stock_field_by_name};

fn unit_rule(n: usize, angular: usize) -> QuadratureRule<f64> {
    build_ball_quadrature(n, 1.0, 16, angular, 42).unwrap()
}

fn abs2(n: usize) -> PolyField<f64> {
    PolyField::abs2(n)
}

fn one(n: usize) -> PolyField<f64> {
    PolyField::constant_re(n, 1.0)
}

fn re_z1_sq(n: usize) -> PolyField<f64> {
    stock_field_by_name("re_z1_sq", n, 1.0).unwrap()
}

fn family(
    base: &PolyField<f64>,
    w: &PolyField<f64>,
    steps: Vec<f64>,
) -> PerturbationFamily<f64> {
    PerturbationFamily::new(base, w, 1.0, steps)
}

#[test]
fn first_variation_matches_radial_closed_form() {
    // E(t) = (1-t)^2 * 2 pi^2 / 3 along |z|^2 + t (1 - |z|^2), so the
    // derivative at 0 is -4 pi^2 / 3.
    let rule = unit_rule(2, 4096);
    let fam = family(&abs2(2), &one(2), vec![]);
    let report = first_variation_check(&fam, 1, &rule, 1e-3).unwrap();
    let expected = -4.0 * PI * PI / 3.0;
    assert_relative_eq!(report.analytic[0], expected, max_relative = 5e-3);
    assert_relative_eq!(report.finite_difference[0], expected, max_relative = 5e-3);
    assert!(report.verdict, "residual {:?}", report.residuals);
}

#[test]
fn first_variation_vanishes_at_critical_points() {
    // Pluriharmonic base: the complex Hessian is identically zero, so the
    // analytic first variation vanishes for every direction.
    let rule = unit_rule(2, 2048);
    let base = re_z1_sq(2);
    for k in 1..=2 {
        for seed in 0..20 {
            let w = random_polynomial::<f64>(2, 2, 1000 + seed);
            let fam = family(&base, &w, vec![]);
            let report = first_variation_check(&fam, k, &rule, 1e-3).unwrap();
            assert!(
                report.analytic[0].abs() < 1e-12,
                "k={k} seed={seed}: analytic {}",
                report.analytic[0]
            );
            assert!(report.verdict, "k={k} seed={seed}: {:?}", report.residuals);
        }
    }
}

#[test]
fn first_variation_is_zero_for_odd_directions() {
    // Direction (1-|z|^2) x_1 integrates against the radial sigma_k to an
    // odd integrand, which the sign-symmetric angular rule kills exactly.
    let rule = unit_rule(2, 2048);
    let fam = family(&abs2(2), &PolyField::x(2, 0), vec![]);
    for k in 1..=2 {
        let report = first_variation_check(&fam, k, &rule, 1e-3).unwrap();
        assert!(report.analytic[0].abs() < 1e-10, "k={k}: {}", report.analytic[0]);
        assert!(report.finite_difference[0].abs() < 1e-7, "k={k}");
        assert!(report.verdict);
    }
}

#[test]
fn second_variation_of_dirichlet_energy_is_gradient_norm() {
    // k = 1: the second variation equals the real Dirichlet form
    // integral of |grad v|^2; for v = 1 - |z|^2 on the unit ball in C^2
    // that is 4 pi^2 / 3.
    let rule = unit_rule(2, 4096);
    let fam = family(&abs2(2), &one(2), vec![]);
    let report = second_variation_check(&fam, 1, &rule, 1e-3).unwrap();
    let expected = 4.0 * PI * PI / 3.0;
    assert_relative_eq!(report.analytic[0], expected, max_relative = 5e-3);
    assert_relative_eq!(report.analytic[1], expected, max_relative = 5e-3);
    assert_relative_eq!(report.finite_difference[0], expected, max_relative = 5e-3);
    assert!(report.cone_flags[0], "unit paraboloid lies strictly inside the cone");
    assert!(report.verdict, "{:?}", report.residuals);
}

#[test]
fn second_variation_routes_agree_and_are_positive_in_cone() {
    // k = 2, v = 1 - |z|^2: both routes evaluate to 4 pi^2 (the tensor
    // route contracts T_1(2I) = 2I against the unitary gradients).
    let rule = unit_rule(2, 4096);
    let fam = family(&abs2(2), &one(2), vec![]);
    let report = second_variation_check(&fam, 2, &rule, 1e-3).unwrap();
    let expected = 4.0 * PI * PI;
    assert_relative_eq!(report.analytic[0], expected, max_relative = 5e-3);
    assert_relative_eq!(report.analytic[1], expected, max_relative = 5e-3);
    assert!(report.cone_flags[0]);
    assert!(report.analytic[1] > 0.0);
    assert!(report.verdict, "{:?}", report.residuals);

    let odd = family(&abs2(2), &PolyField::x(2, 0), vec![]);
    let report = second_variation_check(&odd, 2, &rule, 1e-3).unwrap();
    assert!(report.analytic[1] > 0.0, "strictly positive inside the cone");
    assert!(report.verdict);
}

#[test]
fn top_derivative_does_not_depend_on_the_base() {
    let rule = unit_rule(2, 2048);
    let w = one(2);
    let from_paraboloid = family(&abs2(2), &w, vec![]);
    let from_pluriharmonic = family(&re_z1_sq(2), &w, vec![]);
    let a = higher_derivative_check(&from_paraboloid, 2, 3, &rule).unwrap();
    let b = higher_derivative_check(&from_pluriharmonic, 2, 3, &rule).unwrap();
    let scale = 1.0 + a.analytic[0].abs();
    assert!((a.analytic[0] - b.analytic[0]).abs() <= 1e-9 * scale);
    assert!(a.verdict && b.verdict);
    assert!(a.order_at_floor, "third difference of a cubic is exact");
}

#[test]
fn derivative_checks_validate_their_inputs() {
    let rule = unit_rule(2, 512);
    let fam = family(&abs2(2), &one(2), vec![]);
    assert!(matches!(
        higher_derivative_check(&fam, 2, 0, &rule),
        Err(VarcheckError::DerivativeOrder { .. })
    ));
    assert!(matches!(
        higher_derivative_check(&fam, 2, 4, &rule),
        Err(VarcheckError::DerivativeOrder { .. })
    ));
    assert!(matches!(
        first_variation_check(&fam, 1, &rule, 0.0),
        Err(VarcheckError::StepNotPositive { .. })
    ));
    assert!(matches!(
        first_variation_check(&fam, 3, &rule, 1e-3),
        Err(VarcheckError::Energy(EnergyError::KOutOfRange { .. }))
    ));
}

#[test]
fn derivative_orders_meet_threshold_or_hit_the_floor() {
    // The energy along the family is a polynomial of degree k+1 in t, so
    // each stencil is either exactly of order two (measurable under
    // halving) or exact outright (differences at the roundoff floor).
    let cases: &[(usize, usize, usize, usize, bool)] = &[
        // (n, angular, k, j, expect_floor)
        (2, 2048, 1, 1, true),
        (2, 2048, 1, 2, true),
        (2, 2048, 2, 1, false),
        (2, 2048, 2, 2, true),
        (2, 2048, 2, 3, true),
        (3, 4096, 3, 1, false),
        (3, 4096, 3, 2, false),
        (3, 4096, 3, 3, true),
        (3, 4096, 3, 4, true),
    ];
    for &(n, angular, k, j, expect_floor) in cases {
        let rule = unit_rule(n, angular);
        let fam = family(&abs2(n), &one(n), vec![]);
        let report = higher_derivative_check(&fam, k, j, &rule).unwrap();
        assert!(
            report.verdict,
            "n={n} k={k} j={j}: residual {:?} tol {} order {:?} floor {}",
            report.residuals, report.tolerance, report.observed_order, report.order_at_floor
        );
        assert_eq!(report.order_at_floor, expect_floor, "n={n} k={k} j={j}");
        if !expect_floor {
            let order = report.observed_order.unwrap();
            assert!(order >= 1.8, "n={n} k={k} j={j}: order {order}");
        }
    }
}

#[test]
fn convexity_scan_is_flat_for_equal_endpoints() {
    let rule = unit_rule(2, 1024);
    let u = abs2(2);
    let report = convexity_scan(&u, &u, 2, &rule, 6).unwrap();
    assert!(report.verdict);
    for m in &report.margins {
        assert_abs_diff_eq!(*m, 0.0, epsilon = 1e-12);
    }
}

#[test]
fn convexity_holds_along_admissible_segments() {
    let rule = unit_rule(2, 1024);
    // Endpoint pair whose difference 0.5 (|z|^2 - 1) vanishes on the
    // sphere and whose segment Hessians t/2 * 2I stay in every cone.
    let u0 = re_z1_sq(2);
    let u1 = u0.add_ref(&abs2(2).sub_ref(&one(2)).scale_re(0.5));
    for k in 1..=2 {
        let report = convexity_scan(&u0, &u1, k, &rule, 8).unwrap();
        assert!(report.verdict, "k={k}: {:?}", report.margins);
        assert_eq!(report.margins.len(), 7);
    }
}

#[test]
fn convexity_scan_rejects_trace_mismatch() {
    let rule = unit_rule(2, 512);
    let u0 = abs2(2);
    let u1 = u0.add_ref(&PolyField::x(2, 0));
    assert!(matches!(
        convexity_scan(&u0, &u1, 1, &rule, 4),
        Err(VarcheckError::TraceNotZero { .. })
    ));
}

#[test]
fn convexity_scan_aborts_when_the_segment_leaves_the_cone() {
    let rule = unit_rule(2, 512);
    // Direction 1 - |z|^2 has unitary Hessian -2I, so sigma_1 turns
    // negative at the first interior grid point.
    let u0 = re_z1_sq(2);
    let u1 = u0.add_ref(&one(2).sub_ref(&abs2(2)));
    match convexity_scan(&u0, &u1, 2, &rule, 5) {
        Err(VarcheckError::SegmentLeavesCone { t }) => assert!(t > 0.0 && t <= 0.21),
        other => panic!("expected cone abort, got {other:?}"),
    }
}

#[test]
fn harmonic_extension_matches_the_classical_example() {
    // x_1^2 on the unit sphere in R^4 extends to x_1^2 - (|x|^2 - 1)/4.
    let f = PolyField::x(2, 0).mul_ref(&PolyField::x(2, 0));
    let u = harmonic_extension_ball(&f, 1.0).unwrap();
    let expected = f.sub_ref(&abs2(2).sub_ref(&one(2)).scale_re(0.25));
    assert!(u.sub_ref(&expected).max_coeff_norm() < 1e-12);
    assert!(real_laplacian_field(&u).max_coeff_norm() < 1e-12);
}

#[test]
fn harmonic_extension_fixes_harmonic_inputs() {
    let linear = PolyField::x(3, 2).scale_re(2.5).add_ref(&PolyField::y(3, 0));
    let u = harmonic_extension_ball(&linear, 1.0).unwrap();
    assert!(u.sub_ref(&linear).max_coeff_norm() < 1e-13);

    // |z|^2 restricted to the unit sphere is the constant 1.
    let u = harmonic_extension_ball(&abs2(2), 1.0).unwrap();
    assert!(u.sub_ref(&one(2)).max_coeff_norm() < 1e-12);
}

#[test]
fn harmonic_extension_agrees_with_the_data_on_the_sphere() {
    let radius = 1.3;
    let f = random_polynomial::<f64>(2, 3, 7);
    let u = harmonic_extension_ball(&f, radius).unwrap();
    let scale = 1.0 + f.max_coeff_norm();
    assert!(real_laplacian_field(&u).max_coeff_norm() <= 1e-10 * scale);
    assert!(vanishes_on_sphere(&u.sub_ref(&f), radius));
    let half = radius / 2.0;
    let on_sphere = [
        vec![radius, 0.0, 0.0, 0.0],
        vec![0.0, -radius, 0.0, 0.0],
        vec![half, half, half, half],
    ];
    for p in &on_sphere {
        assert_abs_diff_eq!(u.eval_re(p), f.eval_re(p), epsilon = 1e-10 * scale);
    }
}

#[test]
fn harmonic_extension_rejects_nonpositive_radius() {
    assert!(matches!(
        harmonic_extension_ball(&abs2(2), 0.0),
        Err(VarcheckError::RadiusNotPositive { .. })
    ));
}

#[test]
fn dirichlet_margins_are_nonnegative_for_harmonic_data() {
    // Classical Dirichlet principle: the harmonic extension of x_1^2
    // minimizes the k = 1 energy among fields with the same trace.
    let rule = unit_rule(2, 2048);
    let f = PolyField::x(2, 0).mul_ref(&PolyField::x(2, 0));
    let u_f = harmonic_extension_ball(&f, 1.0).unwrap();
    let families: Vec<_> = (0..8)
        .map(|seed| family(&u_f, &random_polynomial(2, 2, 100 + seed), vec![1.0]))
        .collect();
    let report = dirichlet_principle_experiment(&u_f, &families, 1, &rule).unwrap();
    assert!(report.verdict, "margins {:?}", report.margins);
    assert!(report.cone_flags.iter().all(|&f| f), "k = 1 imposes no cone constraint");
    assert!(report.margins.iter().all(|&m| m >= -report.tolerance));
}

#[test]
fn dirichlet_epsilon_family_has_monotone_margins() {
    let base = re_z1_sq(2);
    let rule = unit_rule(2, 2048);
    let direction = abs2(2).sub_ref(&one(2));
    let steps: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let fam = PerturbationFamily::from_direction(&base, &direction, 1.0, steps).unwrap();
    for k in 1..=2 {
        let report = dirichlet_principle_experiment(&base, std::slice::from_ref(&fam), k, &rule).unwrap();
        assert!(report.verdict, "k={k}: {:?}", report.margins);
        assert_eq!(report.margins[0], 0.0, "zero step reproduces the base exactly");
        for pair in report.margins.windows(2) {
            assert!(
                pair[1] >= pair[0] - report.tolerance * 1e-6,
                "k={k}: margins not monotone: {:?}",
                report.margins
            );
        }
    }
}

#[test]
fn dirichlet_experiment_requires_a_degenerate_base() {
    let rule = unit_rule(2, 512);
    let u = abs2(2);
    let fam = family(&u, &one(2), vec![0.5]);
    assert!(matches!(
        dirichlet_principle_experiment(&u, &[fam], 1, &rule),
        Err(VarcheckError::NotDegenerate { .. })
    ));
}

#[test]
fn dirichlet_experiment_rejects_foreign_families() {
    let rule = unit_rule(2, 512);
    let fam = family(&abs2(2), &one(2), vec![0.5]);
    assert!(matches!(
        dirichlet_principle_experiment(&re_z1_sq(2), &[fam], 1, &rule),
        Err(VarcheckError::BaseMismatch { .. })
    ));
}

fn trace_zero_basis(n: usize) -> Vec<PolyField<f64>> {
    let window = vanishing_factor(n, 1.0);
    let mut fields = vec![window.clone()];
    for coord in 0..2 * n {
        fields.push(window.mul_ref(&PolyField::coordinate(n, coord)));
    }
    fields.truncate(5);
    fields
}

#[test]
fn minimizer_returns_to_the_harmonic_solution() {
    let rule = unit_rule(2, 1024);
    let f = PolyField::x(2, 0).mul_ref(&PolyField::x(2, 0));
    let u_f = harmonic_extension_ball(&f, 1.0).unwrap();
    let basis = trace_zero_basis(2);
    let start = vec![0.3; basis.len()];
    let report = minimize_over_basis(&u_f, &basis, &start, 1, &rule, 400).unwrap();
    assert!(report.verdict, "residuals {:?}", report.residuals);
    let norm: f64 = report.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
    assert!(norm < 1e-2, "final coefficients {:?}", report.coefficients);
    assert!(report.margins[0].abs() <= report.tolerance);
    assert!(report.energies.windows(2).all(|p| p[1] <= p[0]), "descent is monotone");
}

#[test]
fn minimizer_with_empty_basis_reports_the_reference_energy() {
    let rule = unit_rule(2, 512);
    let u_f = re_z1_sq(2);
    let report = minimize_over_basis(&u_f, &[], &[], 2, &rule, 10).unwrap();
    assert!(report.verdict);
    assert!(report.coefficients.is_empty());
    assert_eq!(report.energies.len(), 1);
    assert_eq!(report.energies[0], report.analytic[0]);
}

#[test]
fn minimizer_at_the_critical_point_takes_no_steps() {
    let rule = unit_rule(2, 1024);
    let f = PolyField::x(2, 0).mul_ref(&PolyField::x(2, 0));
    let u_f = harmonic_extension_ball(&f, 1.0).unwrap();
    let basis = trace_zero_basis(2);
    let report = minimize_over_basis(&u_f, &basis, &vec![0.0; basis.len()], 1, &rule, 50).unwrap();
    assert!(report.verdict);
    assert_eq!(report.energies.len(), 1, "no descent steps at the minimizer");
    assert!(report.coefficients.iter().all(|&c| c == 0.0));
    assert!(report.residuals[0] < 1e-8);
}

#[test]
fn minimizer_validates_inputs() {
    let rule = unit_rule(2, 512);
    let u_f = re_z1_sq(2);
    assert!(matches!(
        minimize_over_basis(&u_f, &[PolyField::x(2, 0)], &[0.1], 1, &rule, 10),
        Err(VarcheckError::TraceNotZero { .. })
    ));
    assert!(matches!(
        minimize_over_basis(&u_f, &trace_zero_basis(2), &[0.1], 1, &rule, 10),
        Err(VarcheckError::StartLengthMismatch { .. })
    ));
    // k = 2: adding the positive bump 1 - |z|^2 makes sigma_1 negative.
    let bump = vec![vanishing_factor(2, 1.0)];
    assert!(matches!(
        minimize_over_basis(&u_f, &bump, &[0.5], 2, &rule, 10),
        Err(VarcheckError::InfeasibleStart)
    ));
}

#[test]
fn sphere_division_recovers_exact_factors() {
    let w = random_polynomial::<f64>(2, 2, 9);
    let p = vanishing_factor(2, 1.0).mul_ref(&w);
    let (quotient, remainder) = sphere_division(&p, 1.0);
    assert!(remainder < 1e-12);
    assert!(quotient.sub_ref(&w).max_coeff_norm() < 1e-12);
    assert!(vanishes_on_sphere(&p, 1.0));
    assert!(!vanishes_on_sphere(&PolyField::x(2, 0), 1.0));
    assert!(vanishes_on_sphere(&p.mul_ref(&vanishing_factor(2, 1.0)), 1.0));
}

#[test]
fn perturbation_families_enforce_the_trace() {
    let base = abs2(2);
    let fam = family(&base, &PolyField::y(2, 1), vec![0.1, 0.2]);
    assert!(vanishes_on_sphere(fam.direction(), 1.0));
    assert_eq!(fam.steps(), &[0.1, 0.2]);
    assert!(PerturbationFamily::from_direction(&base, fam.direction(), 1.0, vec![]).is_ok());
    assert!(matches!(
        PerturbationFamily::from_direction(&base, &PolyField::x(2, 0), 1.0, vec![]),
        Err(VarcheckError::TraceNotZero { .. })
    ));
}

#[test]
fn reports_serialize_to_json() {
    let rule = unit_rule(2, 512);
    let fam = family(&abs2(2), &one(2), vec![]);
    let report = first_variation_check(&fam, 1, &rule, 1e-3).unwrap();
    let text = serde_json::to_string(&report).unwrap();
    assert!(text.contains("\"kind\":\"first_variation\""));
    assert!(text.contains("\"verdict\":true"));
}

//! Algebraic identity suite: Newton-tensor trace and contraction
//! identities, polarization diagonals, the generalized-delta reference
//! formulas, positivity on the cone, sigma_k^{1/k} midpoint concavity,
//! and the divergence-free property of Newton tensors of Hessians
//! (checked on exact polynomial derivatives).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use khess::hessalg::{
    newton_tensor, newton_tensor_delta, random_hermitian, random_in_cone, sigma_k,
    sigma_k_delta, sigma_k_polarized, HermitianMatrix,
};
use khess::wirtinger::{newton_tensor_poly, unitary_hessian_matrix};

use crate::config::{resolve_fields, RunConfig};
use crate::report::{CheckResult, SuiteOutput};
use crate::CliError;

pub fn run(cfg: &RunConfig) -> Result<SuiteOutput, CliError> {
    let n = cfg.n;
    let rel_tol = 1e-10 * cfg.tol_scale;

    let mut trace = CheckResult::new("newton_trace_identity", rel_tol);
    let mut contraction = CheckResult::new("sigma_contraction_identity", rel_tol);
    let mut polarization = CheckResult::new("polarization_diagonal", rel_tol);
    let mut psd = CheckResult::new("newton_tensor_psd_on_cone", rel_tol);
    let mut concavity = CheckResult::new("sigma_ratio_midpoint_concavity", rel_tol);

    let mut oracle = cfg
        .use_delta_oracle
        .then(|| CheckResult::new("delta_oracle_equivalence", rel_tol));

    let named: Vec<(String, HermitianMatrix<f64>)> = cfg
        .matrices
        .iter()
        .map(|m| m.to_matrix().map(|mat| (m.name.clone(), mat)))
        .collect::<Result<_, _>>()?;

    for m in 0..cfg.matrix_count {
        let a = random_hermitian::<f64>(n, cfg.seed.wrapping_add(m as u64));
        run_matrix_identities(
            &a,
            &mut trace,
            &mut contraction,
            &mut polarization,
            oracle.as_mut(),
        )?;

        let c = random_in_cone::<f64>(n, cfg.seed.wrapping_add(m as u64));
        let d = random_in_cone::<f64>(n, cfg.seed.wrapping_add((cfg.matrix_count + m) as u64));
        for k in 1..=n {
            // T_{k-1} is positive semidefinite throughout Gamma_k, hence on
            // the positive-definite samples.
            let t = newton_tensor(&c, k - 1).map_err(internal)?;
            let lambda_min = t.eigenvalues().min();
            let scale = 1.0 + t.frobenius_norm();
            psd.record((-lambda_min / scale).max(0.0));

            // sigma_k^{1/k} is concave on Gamma_k: midpoint value dominates
            // the average of the endpoints.
            let mid = c.add(&d).map_err(internal)?.scale(0.5);
            let f = |x: &HermitianMatrix<f64>| -> Result<f64, CliError> {
                Ok(sigma_k(x, k).map_err(internal)?.powf(1.0 / k as f64))
            };
            let gap = 0.5 * (f(&c)? + f(&d)?) - f(&mid)?;
            let scale = 1.0 + f(&mid)?.abs();
            concavity.record((gap / scale).max(0.0));
        }
    }

    for (_, a) in &named {
        run_matrix_identities(
            a,
            &mut trace,
            &mut contraction,
            &mut polarization,
            oracle.as_mut(),
        )?;
    }

    let divergence = divergence_free_check(cfg)?;

    let mut checks = vec![trace, contraction, polarization];
    if let Some(o) = oracle {
        checks.push(o);
    }
    checks.push(psd);
    checks.push(concavity);
    checks.push(divergence);

    let details = json!({
        "dimension": n,
        "random_matrices": cfg.matrix_count,
        "inline_matrices": named.iter().map(|(name, _)| name.clone()).collect::<Vec<_>>(),
    });
    Ok(SuiteOutput { checks, details, csv: Vec::new() })
}

fn run_matrix_identities(
    a: &HermitianMatrix<f64>,
    trace: &mut CheckResult,
    contraction: &mut CheckResult,
    polarization: &mut CheckResult,
    oracle: Option<&mut CheckResult>,
) -> Result<(), CliError> {
    let n = a.n();
    for k in 1..=n {
        let sig = sigma_k(a, k).map_err(internal)?;
        let scale = 1.0 + sig.abs();

        let t_k = newton_tensor(a, k).map_err(internal)?;
        let want = (n - k) as f64 * sig;
        trace.record((t_k.trace() - want).abs() / (1.0 + want.abs()));

        // k sigma_k = tr(A T_{k-1}) = sum_ij A[i][j] T_{k-1}[j][i].
        let t_prev = newton_tensor(a, k - 1).map_err(internal)?;
        let mut acc = khess::C::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += a.get(i, j) * t_prev.get(j, i);
            }
        }
        let contracted = acc / khess::C::new(k as f64, 0.0);
        contraction.record((contracted - khess::C::new(sig, 0.0)).norm() / scale);

        let diagonal = sigma_k_polarized(&vec![a.clone(); k]).map_err(internal)?;
        polarization.record((diagonal - sig).abs() / scale);
    }
    if let Some(oracle) = oracle {
        for k in 1..=n {
            let sig = sigma_k(a, k).map_err(internal)?;
            let via_delta = sigma_k_delta(&vec![a.clone(); k]).map_err(internal)?;
            oracle.record((via_delta - sig).abs() / (1.0 + sig.abs()));
            let t = newton_tensor(a, k).map_err(internal)?;
            let t_delta = newton_tensor_delta(&vec![a.clone(); k]).map_err(internal)?;
            let gap = t.max_abs_diff(&t_delta).map_err(internal)?;
            oracle.record(gap / (1.0 + t.frobenius_norm()));
        }
    }
    Ok(())
}

/// Newton tensors of unitary Hessians are divergence-free in both index
/// families. The divergences are computed as exact polynomials and then
/// evaluated at seeded random points in the ball.
fn divergence_free_check(cfg: &RunConfig) -> Result<CheckResult, CliError> {
    let tol = 1e-9 * cfg.tol_scale;
    let mut check = CheckResult::new("newton_tensor_divergence_free", tol);
    let fields = resolve_fields(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points: Vec<Vec<f64>> = (0..cfg.point_count)
        .map(|_| ball_point(&mut rng, cfg.n, cfg.radius))
        .collect();

    for rf in &fields {
        let hess = unitary_hessian_matrix(&rf.field);
        for &k in &cfg.k {
            let t = newton_tensor_poly(&hess, k);
            let scale = 1.0 + t.max_coeff_norm();
            for divergence in [t.divergence_antiholo(), t.divergence_holo()] {
                for component in &divergence {
                    for p in &points {
                        check.record(component.eval(p).norm() / scale);
                    }
                }
            }
        }
    }
    Ok(check)
}

fn ball_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    // Rejection sampling from the cube; acceptance is fine at desk scale.
    loop {
        let p: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(-radius..radius)).collect();
        if p.iter().map(|x| x * x).sum::<f64>() <= radius * radius {
            return p;
        }
    }
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::validation(format!("internal algebra error: {e}"))
}

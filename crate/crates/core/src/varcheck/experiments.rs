//! Segment scans and competitor experiments built on the sweep machinery:
//! discrete convexity along admissible segments, energy margins of
//! trace-preserving competitors against a degenerate solution, and a
//! gradient-descent minimizer over a trace-zero basis.

use super::*;

/// Tabulates `E(t)` along `t -> (1 - t) u0 + t u1` on `grid` equal
/// intervals and checks the discrete second differences stay above
/// `-1e-6 * scale`. Requires `u1 - u0` to vanish on the sphere and every
/// grid point to pass the nodewise cone check; the scan aborts at the
/// first infeasible `t`.
pub fn convexity_scan<T: Real>(
    u0: &PolyField<T>,
    u1: &PolyField<T>,
    k: usize,
    rule: &QuadratureRule<T>,
    grid: usize,
) -> Result<ExperimentReport<T>> {
    check_k(rule, k)?;
    if grid < 2 {
        return Err(VarcheckError::GridTooSmall { grid });
    }
    let diff = u1.sub_ref(u0);
    let (_, rem) = sphere_division(&diff, rule.radius());
    if rem > T::of(1e-9) * (T::one() + diff.max_coeff_norm()) {
        return Err(VarcheckError::TraceNotZero { residual: rem.as_f64() });
    }
    let sweep = Sweep::new(u0, &diff, rule)?;
    let mut report = ExperimentReport::new("convexity_scan", k);
    for i in 0..=grid {
        let t = T::of(i as f64 / grid as f64);
        let samples = sweep.samples_at(t);
        if !samples_in_cone(&samples, rule, k)? {
            return Err(VarcheckError::SegmentLeavesCone { t: t.as_f64() });
        }
        let e = energy_from_samples(&samples, rule, &sweep.geometry, k)?.total;
        report.steps.push(t);
        report.energies.push(e);
        report.cone_flags.push(true);
    }
    for i in 1..grid {
        report.margins.push(
            report.energies[i - 1] - T::of(2.0) * report.energies[i] + report.energies[i + 1],
        );
    }
    let scale = report
        .energies
        .iter()
        .fold(T::one(), |a, &e| a.max(T::one() + e.abs()));
    report.tolerance = T::of(1e-6) * scale;
    report.verdict = report.margins.iter().all(|&m| m >= -report.tolerance);
    Ok(report)
}

/// Compares the energy of every competitor `base + t * direction` from
/// the given families against the energy of `u_f`, which must satisfy
/// `sigma_k = 0` at every interior node (a degenerate solution, so its
/// trace pins the minimum). Families must share `u_f` as their base.
/// Infeasible competitors are reported with a cleared cone flag and do
/// not fail the batch; feasible margins must stay above `-5e-3 * scale`.
pub fn dirichlet_principle_experiment<T: Real>(
    u_f: &PolyField<T>,
    perturbations: &[PerturbationFamily<T>],
    k: usize,
    rule: &QuadratureRule<T>,
) -> Result<ExperimentReport<T>> {
    check_k(rule, k)?;
    let spec = DomainSpec::ball(rule.n(), rule.radius());
    let geometry = boundary_geometry(&spec, rule)?;
    let base = FieldSamples::collect(u_f, rule, &geometry);

    let mut max_sigma = T::zero();
    for q in 0..rule.interior_len() {
        let unitary = base.interior_hessian(q).scale(T::of(2.0));
        let sigma = sigma_prefix_from_traces(&unitary, k)?[k];
        max_sigma = max_sigma.max(sigma.abs());
    }
    if max_sigma > T::of(1e-8) {
        return Err(VarcheckError::NotDegenerate { max_sigma: max_sigma.as_f64() });
    }

    let reference = energy_from_samples(&base, rule, &geometry, k)?.total;
    let mut report = ExperimentReport::new("dirichlet_principle", k);
    report.analytic.push(reference);
    for fam in perturbations {
        let base_gap = fam.base().sub_ref(u_f).max_coeff_norm();
        if base_gap > T::of(1e-9) * (T::one() + u_f.max_coeff_norm()) {
            return Err(VarcheckError::BaseMismatch { residual: base_gap.as_f64() });
        }
        let dir = FieldSamples::collect(fam.direction(), rule, &geometry);
        for &t in fam.steps() {
            let samples = base.axpy(t, &dir);
            let feasible = samples_in_cone(&samples, rule, k)?;
            let e = energy_from_samples(&samples, rule, &geometry, k)?.total;
            report.steps.push(t);
            report.energies.push(e);
            report.margins.push(e - reference);
            report.cone_flags.push(feasible);
        }
    }
    let scale = report
        .energies
        .iter()
        .fold(T::one() + reference.abs(), |a, &e| a.max(T::one() + e.abs()));
    report.tolerance = T::of(5e-3) * scale;
    report.verdict = report
        .margins
        .iter()
        .zip(&report.cone_flags)
        .all(|(&m, &feasible)| !feasible || m >= -report.tolerance);
    Ok(report)
}

/// Gradient descent on `c -> energy(u_f + sum c_i b_i)` with Armijo
/// backtracking; the gradient components are the analytic first
/// variations in the basis directions. Every accepted step must stay
/// nodewise cone-feasible. Converges when the gradient norm drops below
/// `1e-4 * scale`; the reported coefficients then sit within gradient
/// tolerance of the minimizer.
pub fn minimize_over_basis<T: Real>(
    u_f: &PolyField<T>,
    basis: &[PolyField<T>],
    start: &[T],
    k: usize,
    rule: &QuadratureRule<T>,
    iters: usize,
) -> Result<ExperimentReport<T>> {
    check_k(rule, k)?;
    if start.len() != basis.len() {
        return Err(VarcheckError::StartLengthMismatch { got: start.len(), want: basis.len() });
    }
    for b in basis {
        let (_, rem) = sphere_division(b, rule.radius());
        if rem > T::of(1e-9) * (T::one() + b.max_coeff_norm()) {
            return Err(VarcheckError::TraceNotZero { residual: rem.as_f64() });
        }
    }
    let spec = DomainSpec::ball(rule.n(), rule.radius());
    let geometry = boundary_geometry(&spec, rule)?;
    let base = FieldSamples::collect(u_f, rule, &geometry);
    let basis_samples: Vec<FieldSamples<T>> = basis
        .iter()
        .map(|b| FieldSamples::collect(b, rule, &geometry))
        .collect();
    let combine = |c: &[T]| -> FieldSamples<T> {
        let mut s = base.clone();
        for (ci, bs) in c.iter().zip(&basis_samples) {
            s = s.axpy(*ci, bs);
        }
        s
    };
    // First-variation factor: d/dc_i E = factor * (-sum w * b_i * sigma_k).
    let factor = T::of((k + 1) as f64 * (1u64 << k) as f64);
    let gradient = |samples: &FieldSamples<T>| -> Result<Vec<T>> {
        let mut g = vec![T::zero(); basis_samples.len()];
        for q in 0..rule.interior_len() {
            let sigma = sigma_prefix_from_traces(samples.interior_hessian(q), k)?[k];
            let w = rule.interior_weight(q);
            for (gi, bs) in g.iter_mut().zip(&basis_samples) {
                *gi -= factor * w * bs.interior_value(q) * sigma;
            }
        }
        Ok(g)
    };

    let reference = energy_from_samples(&base, rule, &geometry, k)?.total;
    let mut c: Vec<T> = start.to_vec();
    let mut samples = combine(&c);
    if !samples_in_cone(&samples, rule, k)? {
        return Err(VarcheckError::InfeasibleStart);
    }
    let mut energy = energy_from_samples(&samples, rule, &geometry, k)?.total;

    let mut report = ExperimentReport::new("minimize_over_basis", k);
    report.analytic.push(reference);
    report.steps.push(T::zero());
    report.energies.push(energy);
    report.cone_flags.push(true);

    let gtol = T::of(1e-4) * (T::one() + reference.abs());
    let mut alpha = T::one();
    let mut grad_norm = T::zero();
    let mut converged = false;
    for it in 0..iters {
        let g = gradient(&samples)?;
        grad_norm = g.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();
        if grad_norm <= gtol {
            converged = true;
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<T> = c.iter().zip(&g).map(|(&ci, &gi)| ci - alpha * gi).collect();
            let trial_samples = combine(&trial);
            if samples_in_cone(&trial_samples, rule, k)? {
                let e = energy_from_samples(&trial_samples, rule, &geometry, k)?.total;
                if e <= energy - T::of(1e-4) * alpha * grad_norm * grad_norm {
                    c = trial;
                    samples = trial_samples;
                    energy = e;
                    alpha = (alpha * T::of(1.5)).min(T::of(1e3));
                    accepted = true;
                    break;
                }
            }
            alpha /= T::of(2.0);
        }
        if !accepted {
            return Err(VarcheckError::LineSearchFailed { iteration: it });
        }
        report.steps.push(T::of((it + 1) as f64));
        report.energies.push(energy);
        report.cone_flags.push(true);
    }
    if !converged {
        // the loop ran out of iterations; re-measure for the report
        let g = gradient(&samples)?;
        grad_norm = g.iter().fold(T::zero(), |a, &x| a + x * x).sqrt();
        converged = grad_norm <= gtol;
    }

    let scale = T::one() + reference.abs().max(energy.abs());
    report.tolerance = T::of(5e-3) * scale;
    report.residuals.push(grad_norm);
    report.margins.push(energy - reference);
    report.coefficients = c;
    report.verdict = converged && energy >= reference - report.tolerance;
    Ok(report)
}

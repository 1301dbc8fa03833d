//! Hessian-type energies on balls: interior integrals of `u`-weighted
//! elementary symmetric functions, boundary densities built from the shape
//! operator, and the assembled functional with its boundary corrections.
//!
//! Two Hessian normalizations coexist deliberately. The bare integrals
//! `interior_term` and `polarized_interior` weigh the coordinate complex
//! Hessian `d^2 u / dz_i dzbar_j`. Everything boundary-facing — horizontal
//! restrictions, curvature pairings, and the assembled energy — lives in
//! the sqrt(2)-scaled unitary frame, whose ambient matrix is twice the
//! coordinate one; `EnergyBreakdown::interior` therefore carries `2^k`
//! times `interior_term`. The closed forms in the tests pin both choices.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::domain::{
    boundary_geometry, mixed_curvature_term, sublaplacian_of_trace, BoundaryFrame,
    BoundaryGeometry, DomainError, DomainSpec, QuadratureRule, ShapeData,
};
use crate::hessalg::{binomial, sigma_k_polarized, sigma_prefix_from_traces, HessalgError, HermitianMatrix};
use crate::scalar::Real;
use crate::wirtinger::{FieldJet, JetEvaluator, PolyField};

#[derive(Debug, Error)]
pub enum EnergyError {
    #[error("k = {k} out of range for dimension n = {n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("boundary term index i = {i} out of range for k = {k}")]
    IOutOfRange { i: usize, k: usize },
    #[error("need n >= 2 for the integrated-by-parts energy, got n = {n}")]
    DimensionTooSmall { n: usize },
    #[error("boundary routes disagree: {s_route} (S_i sum) vs {q_route} (density), tolerance {tol}")]
    RouteMismatch { s_route: f64, q_route: f64, tol: f64 },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Algebra(#[from] HessalgError),
}

pub type Result<V> = std::result::Result<V, EnergyError>;

/// The energy split into its interior integral and the boundary terms
/// `S_i`, `i = 2..=k+1`, with
/// `total = interior + (1 / (k^2 (k+1))) * sum_i s_terms[i]`.
#[derive(Clone, Debug, Serialize)]
pub struct EnergyBreakdown<T> {
    pub k: usize,
    /// `-integral of u sigma_k(ambient unitary Hessian of u)`.
    pub interior: T,
    pub s_terms: BTreeMap<usize, T>,
    pub total: T,
    /// Absolute gap between the `S_i`-sum route and the integrated-density
    /// route over the same nodes (roundoff-level by construction).
    pub route_gap: T,
}

/// Per-node boundary data behind the density route: the trace value, the
/// outward normal derivative, the assembled density, and the mixed
/// `sigma_{k-1}` factors for each boundary term index.
#[derive(Clone, Debug, Serialize)]
pub struct BoundaryDensityRow<T> {
    pub point: Vec<T>,
    pub value: T,
    pub normal_derivative: T,
    pub density: T,
    /// `sigma_{k-1}` of `i-2` shape-operator and `k+1-i` Hessian-restriction
    /// arguments, for `i = 2..=k+1`.
    pub mixed_sigmas: Vec<T>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryDensityReport<T> {
    pub k: usize,
    pub rows: Vec<BoundaryDensityRow<T>>,
}

fn check_k<T: Real>(rule: &QuadratureRule<T>, k: usize) -> Result<()> {
    let n = rule.n();
    if k == 0 || k > n {
        return Err(EnergyError::KOutOfRange { k, n });
    }
    Ok(())
}

fn ball_spec<T: Real>(rule: &QuadratureRule<T>) -> DomainSpec<T> {
    DomainSpec::ball(rule.n(), rule.radius())
}

/// `-integral of u(p) sigma_k(H(u)(p)) dx` over the ball, with `H` the
/// coordinate complex Hessian.
pub fn interior_term<T: Real>(u: &PolyField<T>, rule: &QuadratureRule<T>, k: usize) -> Result<T> {
    check_k(rule, k)?;
    let eval = JetEvaluator::new(u);
    let mut acc = T::zero();
    for q in 0..rule.interior_len() {
        let jet = eval.jet(rule.interior_node(q));
        let sigma = sigma_prefix_from_traces(&jet.complex_hessian, k)?[k];
        acc += rule.interior_weight(q) * jet.value * sigma;
    }
    Ok(-acc)
}

/// `-integral of v sigma_k(H(w^1), ..., H(w^k)) dx` with the polarized
/// elementary symmetric function of the coordinate complex Hessians.
pub fn polarized_interior<T: Real>(
    v: &PolyField<T>,
    args: &[&PolyField<T>],
    rule: &QuadratureRule<T>,
) -> Result<T> {
    check_k(rule, args.len())?;
    let v_eval = JetEvaluator::new(v);
    let arg_evals: Vec<_> = args.iter().map(|w| JetEvaluator::new(w)).collect();
    let mut acc = T::zero();
    let mut mats: Vec<HermitianMatrix<T>> = Vec::with_capacity(args.len());
    for q in 0..rule.interior_len() {
        let p = rule.interior_node(q);
        mats.clear();
        mats.extend(arg_evals.iter().map(|e| e.jet(p).complex_hessian));
        let sigma = sigma_k_polarized(&mats)?;
        acc += rule.interior_weight(q) * v_eval.jet(p).value * sigma;
    }
    Ok(-acc)
}

/// `sigma_{k-1}` of `copies_l` shape-operator restrictions and `copies_d`
/// Hessian restrictions; the empty list is `sigma_0 = 1`.
fn mixed_sigma<T: Real>(
    l_h: &HermitianMatrix<T>,
    d_h: &HermitianMatrix<T>,
    copies_l: usize,
    copies_d: usize,
) -> Result<T> {
    if copies_l + copies_d == 0 {
        return Ok(T::one());
    }
    let mut mats = Vec::with_capacity(copies_l + copies_d);
    mats.extend(std::iter::repeat_with(|| l_h.clone()).take(copies_l));
    mats.extend(std::iter::repeat_with(|| d_h.clone()).take(copies_d));
    Ok(sigma_k_polarized(&mats)?)
}

fn alternating_binomial(i: usize, k: usize) -> f64 {
    let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * binomial(k, i - 1)
}

/// Boundary density
/// `(1/2k) sum_{i=2}^{k+1} (-1)^i C(k, i-1) u_nu^{i-1}
///  sigma_{k-1}(L_H x(i-2), D_H u x(k+1-i))`
/// in the unitary frame; `k = 1` collapses to `u_nu / 2`.
pub fn qk_density<T: Real>(
    jet: &FieldJet<T>,
    frame: &BoundaryFrame<T>,
    shape: &ShapeData<T>,
    k: usize,
) -> Result<T> {
    let n = frame.n();
    if k == 0 || k > n {
        return Err(EnergyError::KOutOfRange { k, n });
    }
    let u_nu = frame.u_nu(jet);
    let d_h = frame.horizontal_restriction(jet);
    let mut acc = T::zero();
    let mut nu_power = T::one();
    for i in 2..=k + 1 {
        nu_power *= u_nu;
        let sigma = mixed_sigma(shape.l_h(), &d_h, i - 2, k + 1 - i)?;
        acc += T::of(alternating_binomial(i, k)) * nu_power * sigma;
    }
    Ok(acc / T::of(2.0 * k as f64))
}

/// Per-node data of one field that the energy is built from. Every entry
/// is linear in the field, so samples of `u + t v` are an axpy of the
/// samples of `u` and `v` — which is what makes parameter sweeps cheap.
#[derive(Clone, Debug)]
pub(crate) struct FieldSamples<T> {
    interior_value: Vec<T>,
    /// Coordinate complex Hessians at interior nodes.
    interior_hess: Vec<HermitianMatrix<T>>,
    boundary_value: Vec<T>,
    boundary_nu: Vec<T>,
    /// Unitary-frame horizontal restrictions at boundary nodes.
    boundary_dh: Vec<HermitianMatrix<T>>,
}

impl<T: Real> FieldSamples<T> {
    pub(crate) fn collect(
        u: &PolyField<T>,
        rule: &QuadratureRule<T>,
        geometry: &BoundaryGeometry<T>,
    ) -> Self {
        let eval = JetEvaluator::new(u);
        let mut interior_value = Vec::with_capacity(rule.interior_len());
        let mut interior_hess = Vec::with_capacity(rule.interior_len());
        for q in 0..rule.interior_len() {
            let jet = eval.jet(rule.interior_node(q));
            interior_value.push(jet.value);
            interior_hess.push(jet.complex_hessian);
        }
        let mut boundary_value = Vec::with_capacity(rule.boundary_len());
        let mut boundary_nu = Vec::with_capacity(rule.boundary_len());
        let mut boundary_dh = Vec::with_capacity(rule.boundary_len());
        for q in 0..rule.boundary_len() {
            let jet = eval.jet(rule.boundary_node(q));
            let frame = geometry.frame(q);
            boundary_value.push(jet.value);
            boundary_nu.push(frame.u_nu(&jet));
            boundary_dh.push(frame.horizontal_restriction(&jet));
        }
        Self { interior_value, interior_hess, boundary_value, boundary_nu, boundary_dh }
    }

    /// Samples of `self + t * other`.
    pub(crate) fn axpy(&self, t: T, other: &Self) -> Self {
        let lift = |a: &[T], b: &[T]| -> Vec<T> {
            a.iter().zip(b).map(|(&x, &y)| x + t * y).collect()
        };
        let lift_mats = |a: &[HermitianMatrix<T>], b: &[HermitianMatrix<T>]| {
            a.iter()
                .zip(b)
                .map(|(x, y)| x.add(&y.scale(t)).expect("same rule, same dimensions"))
                .collect()
        };
        Self {
            interior_value: lift(&self.interior_value, &other.interior_value),
            interior_hess: lift_mats(&self.interior_hess, &other.interior_hess),
            boundary_value: lift(&self.boundary_value, &other.boundary_value),
            boundary_nu: lift(&self.boundary_nu, &other.boundary_nu),
            boundary_dh: lift_mats(&self.boundary_dh, &other.boundary_dh),
        }
    }

    pub(crate) fn interior_value(&self, q: usize) -> T {
        self.interior_value[q]
    }

    pub(crate) fn interior_hessian(&self, q: usize) -> &HermitianMatrix<T> {
        &self.interior_hess[q]
    }
}

/// Shared boundary sweep: the `S_i` integrals (without their leading
/// coefficients) and the integrated density `oint u Q_k`, from the same
/// samples so the two routes differ only by summation order.
fn boundary_sums<T: Real>(
    samples: &FieldSamples<T>,
    rule: &QuadratureRule<T>,
    geometry: &BoundaryGeometry<T>,
    k: usize,
) -> Result<(BTreeMap<usize, T>, T)> {
    let mut bare: BTreeMap<usize, T> = (2..=k + 1).map(|i| (i, T::zero())).collect();
    let mut density_flux = T::zero();
    for q in 0..rule.boundary_len() {
        let shape = geometry.shape(q);
        let w = rule.boundary_weight(q);
        let value = samples.boundary_value[q];
        let u_nu = samples.boundary_nu[q];
        let d_h = &samples.boundary_dh[q];
        let mut density = T::zero();
        let mut nu_power = T::one();
        for i in 2..=k + 1 {
            nu_power *= u_nu;
            let sigma = mixed_sigma(shape.l_h(), d_h, i - 2, k + 1 - i)?;
            *bare.get_mut(&i).unwrap() += w * value * nu_power * sigma;
            density += T::of(alternating_binomial(i, k)) * nu_power * sigma;
        }
        density_flux += w * value * density / T::of(2.0 * k as f64);
    }
    Ok((bare, density_flux))
}

fn s_coefficient(i: usize, k: usize) -> f64 {
    alternating_binomial(i, k) * (k * (k + 1)) as f64 / 2.0
}

/// Boundary term
/// `S_i = (-1)^i (k(k+1)/2) C(k, i-1) oint u u_nu^{i-1}
///  sigma_{k-1}(L_H x(i-2), D_H u x(k+1-i)) dmu`.
pub fn s_i_term<T: Real>(
    u: &PolyField<T>,
    rule: &QuadratureRule<T>,
    i: usize,
    k: usize,
) -> Result<T> {
    check_k(rule, k)?;
    if i < 2 || i > k + 1 {
        return Err(EnergyError::IOutOfRange { i, k });
    }
    let geometry = boundary_geometry(&ball_spec(rule), rule)?;
    let samples = FieldSamples::collect(u, rule, &geometry);
    let (bare, _) = boundary_sums(&samples, rule, &geometry, k)?;
    Ok(T::of(s_coefficient(i, k)) * bare[&i])
}

/// The full energy: interior term in the unitary normalization plus the
/// boundary corrections. Assembled twice — once from the `S_i` sums, once
/// from the integrated density — and the two routes must agree to
/// roundoff; a gap beyond `1e-9 * scale` is an internal inconsistency and
/// comes back as an error.
pub fn energy<T: Real>(
    u: &PolyField<T>,
    rule: &QuadratureRule<T>,
    k: usize,
) -> Result<EnergyBreakdown<T>> {
    check_k(rule, k)?;
    let geometry = boundary_geometry(&ball_spec(rule), rule)?;
    let samples = FieldSamples::collect(u, rule, &geometry);
    energy_from_samples(&samples, rule, &geometry, k)
}

/// Energy from precomputed samples. Fields enter the samples linearly, so
/// sweeps over `u + t v` can combine two sample sets per step instead of
/// re-evaluating jets.
pub(crate) fn energy_from_samples<T: Real>(
    samples: &FieldSamples<T>,
    rule: &QuadratureRule<T>,
    geometry: &BoundaryGeometry<T>,
    k: usize,
) -> Result<EnergyBreakdown<T>> {
    check_k(rule, k)?;
    let mut coordinate_interior = T::zero();
    for q in 0..rule.interior_len() {
        let sigma = sigma_prefix_from_traces(&samples.interior_hess[q], k)?[k];
        coordinate_interior -= rule.interior_weight(q) * samples.interior_value[q] * sigma;
    }
    let interior = T::of((1u64 << k) as f64) * coordinate_interior;
    let (bare, density_flux) = boundary_sums(samples, rule, geometry, k)?;
    let s_terms: BTreeMap<usize, T> = bare
        .iter()
        .map(|(&i, &v)| (i, T::of(s_coefficient(i, k)) * v))
        .collect();
    let s_sum = s_terms.values().fold(T::zero(), |a, &v| a + v);
    let total = interior + s_sum / T::of((k * k * (k + 1)) as f64);
    let via_density = interior + density_flux;
    let scale = T::one() + total.abs().max(via_density.abs());
    // 1e-9 is far above f64 roundoff; the epsilon floor keeps the check
    // meaningful rather than vacuously failing in single precision.
    let tol = T::of(1e-9).max(T::of(100.0) * T::epsilon()) * scale;
    let route_gap = (total - via_density).abs();
    if route_gap > tol {
        return Err(EnergyError::RouteMismatch {
            s_route: total.as_f64(),
            q_route: via_density.as_f64(),
            tol: tol.as_f64(),
        });
    }
    Ok(EnergyBreakdown { k, interior, s_terms, total, route_gap })
}

/// The `k = 2` energy in integrated-by-parts form: interior term plus
/// `oint u u_nu (Delta_b u / 2 + u_nu H_b / 8 + Im sum_alpha L(Z_alpha, T)
/// u_alphabar) dmu`. Independent of the `S_i` route — the boundary data
/// here are the sublaplacian and curvatures, so agreement is at quadrature
/// accuracy, not roundoff.
pub fn energy3_simplified<T: Real>(u: &PolyField<T>, rule: &QuadratureRule<T>) -> Result<T> {
    let n = rule.n();
    if n < 2 {
        return Err(EnergyError::DimensionTooSmall { n });
    }
    let interior = T::of(4.0) * interior_term(u, rule, 2)?;
    let geometry = boundary_geometry(&ball_spec(rule), rule)?;
    let eval = JetEvaluator::new(u);
    let mut boundary = T::zero();
    for q in 0..rule.boundary_len() {
        let jet = eval.jet(rule.boundary_node(q));
        let frame = geometry.frame(q);
        let shape = geometry.shape(q);
        let u_nu = frame.u_nu(&jet);
        let delta_b = sublaplacian_of_trace(&jet, frame, shape);
        let mixed = mixed_curvature_term(&jet, frame, shape);
        let density = u_nu
            * (T::of(0.5) * delta_b + T::of(0.125) * u_nu * shape.hb() + mixed.im);
        boundary += rule.boundary_weight(q) * jet.value * density;
    }
    Ok(interior + boundary)
}

/// Per-node dump of the density route, for inspection and CSV export.
pub fn boundary_density_report<T: Real>(
    u: &PolyField<T>,
    rule: &QuadratureRule<T>,
    k: usize,
) -> Result<BoundaryDensityReport<T>> {
    check_k(rule, k)?;
    let geometry = boundary_geometry(&ball_spec(rule), rule)?;
    let eval = JetEvaluator::new(u);
    let mut rows = Vec::with_capacity(rule.boundary_len());
    for q in 0..rule.boundary_len() {
        let point = rule.boundary_node(q);
        let jet = eval.jet(point);
        let frame = geometry.frame(q);
        let shape = geometry.shape(q);
        let d_h = frame.horizontal_restriction(&jet);
        let mixed_sigmas = (2..=k + 1)
            .map(|i| mixed_sigma(shape.l_h(), &d_h, i - 2, k + 1 - i))
            .collect::<Result<Vec<T>>>()?;
        rows.push(BoundaryDensityRow {
            point: point.to_vec(),
            value: jet.value,
            normal_derivative: frame.u_nu(&jet),
            density: qk_density(&jet, frame, shape, k)?,
            mixed_sigmas,
        });
    }
    Ok(BoundaryDensityReport { k, rows })
}

#[cfg(test)]
mod tests;

//! Pointwise boundary operators and the frame divergence identity.

use super::{DomainSpec, LevelSetGeometry, QuadratureRule, Result};
use super::{BoundaryFrame, ShapeData};
use crate::hessalg::HermitianMatrix;
use crate::scalar::{cre, Real, C};
use crate::wirtinger::{
    newton_tensor_poly, unitary_antiholo_divergence, unitary_hessian_matrix, FieldJet, PolyField,
    Wirtinger,
};

/// Boundary (1,1) Hessian on the horizontal space:
/// `(D11 u)|_H - u_nu l_h`. Annihilates fields that are constant on `M`
/// only together with the curvature correction, e.g. `|z|^2` on spheres.
pub fn boundary_hessian<T: Real>(
    jet: &FieldJet<T>,
    frame: &BoundaryFrame<T>,
    shape: &ShapeData<T>,
) -> HermitianMatrix<T> {
    let restriction = frame.horizontal_restriction(jet);
    let correction = shape.l_h().scale(frame.u_nu(jet));
    restriction.sub(&correction).expect("both blocks are (n-1) x (n-1)")
}

/// `sum_alpha L(Z_alpha, T) u_alphabar`; vanishes on spheres.
pub fn mixed_curvature_term<T: Real>(
    jet: &FieldJet<T>,
    frame: &BoundaryFrame<T>,
    shape: &ShapeData<T>,
) -> C<T> {
    let mut acc = C::new(T::zero(), T::zero());
    for alpha in 0..frame.n() - 1 {
        acc += shape.l_zt()[alpha] * frame.z_alpha_derivative(jet, alpha).conj();
    }
    acc
}

/// Kohn Laplacian of the trace of `u` on `M`:
/// `box_b u = sum_alpha (Z_alpha Zbar_alpha u - l_h(alpha,alpha) u_nu)
///  - (i/2) H_b T u + i sum_alpha L(Z_alpha, T) u_alphabar`.
pub fn kohn_laplacian<T: Real>(
    jet: &FieldJet<T>,
    frame: &BoundaryFrame<T>,
    shape: &ShapeData<T>,
) -> C<T> {
    let horiz = frame.horizontal_restriction(jet);
    let u_nu = frame.u_nu(jet);
    let mut acc = C::new(T::zero(), T::zero());
    for alpha in 0..frame.n() - 1 {
        acc += horiz.get(alpha, alpha) - shape.l_h().get(alpha, alpha).scale(u_nu);
    }
    let i_unit = C::new(T::zero(), T::one());
    let reeb_term = cre(T::of(0.5) * shape.hb() * frame.reeb_derivative(jet));
    acc - i_unit * reeb_term + i_unit * mixed_curvature_term(jet, frame, shape)
}

/// Real sublaplacian of the trace, `Delta_b u = Re box_b u`.
pub fn sublaplacian_of_trace<T: Real>(
    jet: &FieldJet<T>,
    frame: &BoundaryFrame<T>,
    shape: &ShapeData<T>,
) -> T {
    kohn_laplacian(jet, frame, shape).re
}

fn normal_normal<T: Real>(jet: &FieldJet<T>, frame: &BoundaryFrame<T>) -> T {
    let c = frame.c_normal();
    let hess = &jet.complex_hessian;
    let mut acc = C::new(T::zero(), T::zero());
    for (i, &ci) in c.iter().enumerate() {
        for (j, &cj) in c.iter().enumerate() {
            acc += ci * cj.conj() * hess.get(i, j);
        }
    }
    acc.re
}

/// Both sides of the normal-trade identity
/// `Delta u - u_{n nbar} =
///  Delta_b u + Im(sum_alpha L(Z_alpha, T) u_alphabar) + (1/2) H_b u_nu`,
/// evaluated independently. Holds pointwise on any level set.
pub fn tnn_cross_check<T: Real>(
    jet: &FieldJet<T>,
    frame: &BoundaryFrame<T>,
    shape: &ShapeData<T>,
) -> (T, T) {
    let lhs = T::of(2.0) * jet.complex_laplacian() - normal_normal(jet, frame);
    let rhs = sublaplacian_of_trace(jet, frame, shape)
        + mixed_curvature_term(jet, frame, shape).im
        + T::of(0.5) * shape.hb() * frame.u_nu(jet);
    (lhs, rhs)
}

/// Residual of the complex trade identity
/// `Delta u - u_{n nbar} = box_b u - i sum_alpha L(Z_alpha, T) u_alphabar
///  + (1/sqrt 2) H_b u_nbar`.
pub fn laplacian_relation_residual<T: Real>(
    jet: &FieldJet<T>,
    frame: &BoundaryFrame<T>,
    shape: &ShapeData<T>,
) -> T {
    let lhs = cre(T::of(2.0) * jet.complex_laplacian() - normal_normal(jet, frame));
    let i_unit = C::new(T::zero(), T::one());
    let u_nbar = frame.z_n_derivative(jet).conj();
    let rhs = kohn_laplacian(jet, frame, shape)
        - i_unit * mixed_curvature_term(jet, frame, shape)
        + u_nbar.scale(shape.hb() / T::of(std::f64::consts::SQRT_2));
    (lhs - rhs).norm()
}

/// Outcome of the frame divergence identity
/// `integral_X sum_i Zbar_i(a_i) dx = (1/sqrt 2) oint_M sum_i zeta_i a_i dmu`.
#[derive(Clone, Debug)]
pub struct DivergenceCheck<T> {
    pub lhs: C<T>,
    pub rhs: C<T>,
    pub residual: T,
    pub scale: T,
}

/// Check the divergence identity for the covector field
/// `a_i = u sum_j vbar_j T_k(D11 w)[j][i]` with `vbar_j = Zbar_j v`,
/// integrating both sides with the given rule.
pub fn verify_divergence_identity<T: Real>(
    spec: &DomainSpec<T>,
    rule: &QuadratureRule<T>,
    u: &PolyField<T>,
    v: &PolyField<T>,
    w: &PolyField<T>,
    k: usize,
) -> Result<DivergenceCheck<T>> {
    let n = spec.n();
    if k > n {
        return Err(crate::hessalg::HessalgError::KOutOfRange { k, n }.into());
    }
    let sqrt2 = T::of(std::f64::consts::SQRT_2);
    let tensor = newton_tensor_poly(&unitary_hessian_matrix(w), k);
    let vbar: Vec<PolyField<T>> =
        (0..n).map(|j| v.wirtinger(j, Wirtinger::Antiholomorphic).scale_re(sqrt2)).collect();
    let components: Vec<PolyField<T>> = (0..n)
        .map(|i| {
            let mut acc = PolyField::zero(n);
            for (j, vb) in vbar.iter().enumerate() {
                acc = acc.add_ref(&vb.mul_ref(tensor.get(j, i)));
            }
            u.mul_ref(&acc)
        })
        .collect();
    let divergence = unitary_antiholo_divergence(&components);

    let mut lhs = C::new(T::zero(), T::zero());
    for q in 0..rule.interior_len() {
        lhs += divergence.eval(rule.interior_node(q)).scale(rule.interior_weight(q));
    }

    let geom = LevelSetGeometry::new(spec);
    let mut rhs = C::new(T::zero(), T::zero());
    for q in 0..rule.boundary_len() {
        let p = rule.boundary_node(q);
        let frame = geom.frame(p)?;
        let mut flux = C::new(T::zero(), T::zero());
        for (i, a) in components.iter().enumerate() {
            flux += frame.zeta()[i] * a.eval(p);
        }
        rhs += flux.scale(rule.boundary_weight(q) / sqrt2);
    }

    let residual = (lhs - rhs).norm();
    let scale = T::one() + lhs.norm().max(rhs.norm());
    Ok(DivergenceCheck { lhs, rhs, residual, scale })
}

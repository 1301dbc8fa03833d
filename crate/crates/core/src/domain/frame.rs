//! Adapted frames and the second fundamental form on a level-set boundary.

use super::{DomainError, DomainSpec, QuadratureRule, Result};
use crate::hessalg::HermitianMatrix;
use crate::scalar::{Real, C};
use crate::wirtinger::{FieldJet, JetEvaluator};

/// Orthonormal adapted frame at a boundary point.
///
/// `nu` is the outward unit normal, `reeb = J nu`, and `tangent` holds the
/// `n - 1` Hermitian-orthonormal spans of the horizontal space `H`, all
/// perpendicular to `zeta` (the complex coordinates of `nu`). A frame vector
/// with unit span `xi` acts on functions through the component vector
/// `sqrt(2) xi`.
#[derive(Clone, Debug)]
pub struct BoundaryFrame<T> {
    point: Vec<T>,
    nu: Vec<T>,
    reeb: Vec<T>,
    zeta: Vec<C<T>>,
    tangent: Vec<Vec<C<T>>>,
}

impl<T: Real> BoundaryFrame<T> {
    pub fn n(&self) -> usize {
        self.zeta.len()
    }

    pub fn point(&self) -> &[T] {
        &self.point
    }

    pub fn nu(&self) -> &[T] {
        &self.nu
    }

    /// The characteristic direction `T = J nu`.
    pub fn reeb(&self) -> &[T] {
        &self.reeb
    }

    pub fn zeta(&self) -> &[C<T>] {
        &self.zeta
    }

    /// Unit span of the horizontal frame vector `Z_alpha`, `alpha < n - 1`.
    pub fn xi(&self, alpha: usize) -> &[C<T>] {
        &self.tangent[alpha]
    }

    /// Component vector of `Z_alpha`: `sqrt(2) xi_alpha`.
    pub fn c_alpha(&self, alpha: usize) -> Vec<C<T>> {
        let s = T::of(std::f64::consts::SQRT_2);
        self.tangent[alpha].iter().map(|&x| x * s).collect()
    }

    /// Component vector of the complex normal `Z_n = (nu - i T)/sqrt(2)`.
    pub fn c_normal(&self) -> Vec<C<T>> {
        let s = T::of(std::f64::consts::SQRT_2);
        self.zeta.iter().map(|&x| x * s).collect()
    }

    /// Normal derivative `u_nu`.
    pub fn u_nu(&self, jet: &FieldJet<T>) -> T {
        dot_real(&self.nu, &jet.real_gradient)
    }

    /// Derivative along the characteristic direction, `T u`.
    pub fn reeb_derivative(&self, jet: &FieldJet<T>) -> T {
        dot_real(&self.reeb, &jet.real_gradient)
    }

    /// `u_alpha = Z_alpha u`.
    pub fn z_alpha_derivative(&self, jet: &FieldJet<T>, alpha: usize) -> C<T> {
        apply_components(&self.c_alpha(alpha), &jet.dz)
    }

    /// `u_n = Z_n u = (u_nu - i T u) / sqrt(2)` for real fields.
    pub fn z_n_derivative(&self, jet: &FieldJet<T>) -> C<T> {
        apply_components(&self.c_normal(), &jet.dz)
    }

    /// Frame components of the ambient (1,1) Hessian, order
    /// `[Z_1, ..., Z_{n-1}, Z_n]`: entry `(a, b) = Z_a Zbar_b u` at flat points.
    pub fn ambient_frame_hessian(&self, jet: &FieldJet<T>) -> HermitianMatrix<T> {
        let n = self.n();
        let comp: Vec<Vec<C<T>>> =
            (0..n - 1).map(|a| self.c_alpha(a)).chain(std::iter::once(self.c_normal())).collect();
        pairing_matrix(&comp, jet)
    }

    /// Restriction of the ambient (1,1) Hessian to the horizontal space.
    pub fn horizontal_restriction(&self, jet: &FieldJet<T>) -> HermitianMatrix<T> {
        let comp: Vec<Vec<C<T>>> = (0..self.n() - 1).map(|a| self.c_alpha(a)).collect();
        pairing_matrix(&comp, jet)
    }
}

fn dot_real<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn apply_components<T: Real>(c: &[C<T>], dz: &[C<T>]) -> C<T> {
    c.iter().zip(dz).map(|(&ci, &di)| ci * di).sum()
}

fn pairing_matrix<T: Real>(comp: &[Vec<C<T>>], jet: &FieldJet<T>) -> HermitianMatrix<T> {
    let m = comp.len();
    let hess = &jet.complex_hessian;
    HermitianMatrix::from_fn(m, |a, b| {
        let mut acc = C::<T>::new(T::zero(), T::zero());
        for (i, &ca) in comp[a].iter().enumerate() {
            for (j, &cb) in comp[b].iter().enumerate() {
                acc += ca * cb.conj() * hess.get(i, j);
            }
        }
        acc
    })
}

/// Second fundamental form `L = grad^2 rho / |grad rho|` on `TM`, in the
/// orthonormal basis `[X_1, Y_1, ..., X_{n-1}, Y_{n-1}, T]`, plus its
/// complex-frame contractions.
#[derive(Clone, Debug)]
pub struct ShapeData<T> {
    dim: usize,
    l_real: Vec<T>,
    l_h: HermitianMatrix<T>,
    l_zt: Vec<C<T>>,
    l_tt: T,
    h: T,
    hb: T,
}

impl<T: Real> ShapeData<T> {
    /// Dimension of `TM`, `2n - 1`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `L(b_a, b_b)` in the real orthonormal basis.
    pub fn l_real(&self, a: usize, b: usize) -> T {
        self.l_real[a * self.dim + b]
    }

    /// Horizontal Hermitian form `L(Z_alpha, Zbar_beta)`.
    pub fn l_h(&self) -> &HermitianMatrix<T> {
        &self.l_h
    }

    /// Mixed form `L(Z_alpha, T)`; vanishes on spheres.
    pub fn l_zt(&self) -> &[C<T>] {
        &self.l_zt
    }

    /// `L(T, T)`.
    pub fn l_tt(&self) -> T {
        self.l_tt
    }

    /// Mean curvature `H = tr L`.
    pub fn h(&self) -> T {
        self.h
    }

    /// Horizontal mean curvature `H_b = H - L(T, T)`; equals twice the trace
    /// of `l_h`.
    pub fn hb(&self) -> T {
        self.hb
    }
}

/// Frame and shape evaluator for a fixed defining function.
pub struct LevelSetGeometry<T: Real> {
    n: usize,
    rho_eval: JetEvaluator<T>,
    boundary_tol: T,
    gradient_tol: T,
}

impl<T: Real> LevelSetGeometry<T> {
    pub fn new(spec: &DomainSpec<T>) -> Self {
        let scale = T::one() + spec.rho().max_coeff_norm();
        let eps_floor = T::of(100.0) * T::epsilon();
        let base = if eps_floor > T::of(1e-8) { eps_floor } else { T::of(1e-8) };
        Self {
            n: spec.n(),
            rho_eval: JetEvaluator::new(spec.rho()),
            boundary_tol: base * scale,
            gradient_tol: eps_floor * scale,
        }
    }

    pub fn frame(&self, p: &[T]) -> Result<BoundaryFrame<T>> {
        Ok(self.frame_from_jet(p, &self.rho_jet(p)?))
    }

    pub fn frame_and_shape(&self, p: &[T]) -> Result<(BoundaryFrame<T>, ShapeData<T>)> {
        let jet = self.rho_jet(p)?;
        let frame = self.frame_from_jet(p, &jet);
        let shape = self.shape_from_jet(&frame, &jet);
        Ok((frame, shape))
    }

    fn rho_jet(&self, p: &[T]) -> Result<FieldJet<T>> {
        assert_eq!(p.len(), 2 * self.n, "point has wrong real dimension");
        let jet = self.rho_eval.jet(p);
        if jet.value.abs() > self.boundary_tol {
            return Err(DomainError::PointNotOnBoundary { rho: jet.value.as_f64() });
        }
        let gnorm: T = dot_real(&jet.real_gradient, &jet.real_gradient).sqrt();
        if gnorm <= self.gradient_tol {
            return Err(DomainError::VanishingGradient);
        }
        Ok(jet)
    }

    fn frame_from_jet(&self, p: &[T], jet: &FieldJet<T>) -> BoundaryFrame<T> {
        let n = self.n;
        let grad = &jet.real_gradient;
        let gnorm = dot_real(grad, grad).sqrt();
        let nu: Vec<T> = grad.iter().map(|&g| g / gnorm).collect();
        let mut reeb = vec![T::zero(); 2 * n];
        for i in 0..n {
            reeb[2 * i] = -nu[2 * i + 1];
            reeb[2 * i + 1] = nu[2 * i];
        }
        let zeta: Vec<C<T>> = (0..n).map(|i| C::new(nu[2 * i], nu[2 * i + 1])).collect();
        let tangent = horizontal_basis(&zeta);
        BoundaryFrame { point: p.to_vec(), nu, reeb, zeta, tangent }
    }

    fn shape_from_jet(&self, frame: &BoundaryFrame<T>, jet: &FieldJet<T>) -> ShapeData<T> {
        let n = self.n;
        let dim = 2 * n - 1;
        let grad = &jet.real_gradient;
        let gnorm = dot_real(grad, grad).sqrt();
        let hess = &jet.real_hessian;

        // Real orthonormal basis of TM: X_alpha, Y_alpha = J X_alpha, then T.
        let mut basis: Vec<Vec<T>> = Vec::with_capacity(dim);
        for xi in &frame.tangent {
            let mut x = vec![T::zero(); 2 * n];
            let mut y = vec![T::zero(); 2 * n];
            for (i, &c) in xi.iter().enumerate() {
                x[2 * i] = c.re;
                x[2 * i + 1] = c.im;
                y[2 * i] = -c.im;
                y[2 * i + 1] = c.re;
            }
            basis.push(x);
            basis.push(y);
        }
        basis.push(frame.reeb.clone());

        let mut l_real = vec![T::zero(); dim * dim];
        for a in 0..dim {
            for b in 0..dim {
                let mut acc = T::zero();
                for (r, &ba) in basis[a].iter().enumerate() {
                    for (s, &bb) in basis[b].iter().enumerate() {
                        acc += ba * hess[r * 2 * n + s] * bb;
                    }
                }
                l_real[a * dim + b] = acc / gnorm;
            }
        }

        let at = |a: usize, b: usize| l_real[a * dim + b];
        let half = T::of(0.5);
        let l_h = HermitianMatrix::from_fn(n - 1, |alpha, beta| {
            let (xa, ya) = (2 * alpha, 2 * alpha + 1);
            let (xb, yb) = (2 * beta, 2 * beta + 1);
            C::new(half * (at(xa, xb) + at(ya, yb)), half * (at(xa, yb) - at(ya, xb)))
        });
        let t = dim - 1;
        let inv_sqrt2 = T::one() / T::of(std::f64::consts::SQRT_2);
        let l_zt: Vec<C<T>> = (0..n - 1)
            .map(|alpha| C::new(at(2 * alpha, t) * inv_sqrt2, -at(2 * alpha + 1, t) * inv_sqrt2))
            .collect();
        let l_tt = at(t, t);
        let h: T = (0..dim).map(|a| at(a, a)).sum();
        ShapeData { dim, l_real, l_h, l_zt, l_tt, h, hb: h - l_tt }
    }
}

/// Hermitian-orthonormal basis of `zeta`-perp by pivoted Gram–Schmidt on the
/// standard basis; fully deterministic.
fn horizontal_basis<T: Real>(zeta: &[C<T>]) -> Vec<Vec<C<T>>> {
    let n = zeta.len();
    let mut chosen: Vec<Vec<C<T>>> = Vec::with_capacity(n - 1);
    while chosen.len() < n - 1 {
        let mut best: Option<(T, Vec<C<T>>)> = None;
        for i in 0..n {
            let mut v = vec![C::<T>::new(T::zero(), T::zero()); n];
            v[i] = C::<T>::new(T::one(), T::zero());
            project_out(&mut v, zeta);
            for u in &chosen {
                project_out(&mut v, u);
            }
            let norm2: T = v.iter().map(|c| c.norm_sqr()).sum();
            if best.as_ref().is_none_or(|(b, _)| norm2 > *b) {
                best = Some((norm2, v));
            }
        }
        let (norm2, mut v) = best.expect("n >= 1 candidates");
        let inv = T::one() / norm2.sqrt();
        for c in &mut v {
            *c = c.scale(inv);
        }
        chosen.push(v);
    }
    chosen
}

fn project_out<T: Real>(v: &mut [C<T>], unit: &[C<T>]) {
    let ip: C<T> = v.iter().zip(unit).map(|(&a, &b)| a * b.conj()).sum();
    for (vi, &ui) in v.iter_mut().zip(unit) {
        *vi -= ip * ui;
    }
}

/// Adapted frame at a boundary point of the domain.
pub fn adapted_frame<T: Real>(spec: &DomainSpec<T>, p: &[T]) -> Result<BoundaryFrame<T>> {
    LevelSetGeometry::new(spec).frame(p)
}

/// Second fundamental form data at a boundary point of the domain.
pub fn shape_operator<T: Real>(spec: &DomainSpec<T>, p: &[T]) -> Result<ShapeData<T>> {
    let geom = LevelSetGeometry::new(spec);
    Ok(geom.frame_and_shape(p)?.1)
}

/// Frames and shape data at every boundary node of a rule.
pub struct BoundaryGeometry<T> {
    frames: Vec<BoundaryFrame<T>>,
    shapes: Vec<ShapeData<T>>,
}

impl<T: Real> BoundaryGeometry<T> {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frame(&self, q: usize) -> &BoundaryFrame<T> {
        &self.frames[q]
    }

    pub fn shape(&self, q: usize) -> &ShapeData<T> {
        &self.shapes[q]
    }
}

/// Precompute frames and shape data at all boundary nodes.
pub fn boundary_geometry<T: Real>(
    spec: &DomainSpec<T>,
    rule: &QuadratureRule<T>,
) -> Result<BoundaryGeometry<T>> {
    let geom = LevelSetGeometry::new(spec);
    let mut frames = Vec::with_capacity(rule.boundary_len());
    let mut shapes = Vec::with_capacity(rule.boundary_len());
    for q in 0..rule.boundary_len() {
        let (frame, shape) = geom.frame_and_shape(rule.boundary_node(q))?;
        frames.push(frame);
        shapes.push(shape);
    }
    Ok(BoundaryGeometry { frames, shapes })
}

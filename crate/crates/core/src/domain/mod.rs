//! Level-set boundary geometry in C^n and deterministic quadrature over
//! balls and spheres.
//!
//! Frames follow the unitary normalization: a frame vector `Z` acts on
//! functions as `Z u = sum_i c_i du/dz_i` with component vector
//! `c = sqrt(2) xi` for a Hermitian-unit `xi`, so that `(Z_i, Zbar_j) =
//! delta_ij`. The special directions are `nu` (outward unit normal),
//! `T = J nu`, and `Z_n = (nu - i T)/sqrt(2)`.

mod boundary_ops;
mod frame;
mod quadrature;

pub use boundary_ops::{
    boundary_hessian, kohn_laplacian, laplacian_relation_residual, mixed_curvature_term,
    sublaplacian_of_trace, tnn_cross_check, verify_divergence_identity, DivergenceCheck,
};
pub use frame::{
    adapted_frame, boundary_geometry, shape_operator, BoundaryFrame, BoundaryGeometry,
    LevelSetGeometry, ShapeData,
};
pub use quadrature::{build_ball_quadrature, gauss_legendre_unit, QuadratureRule, QuadratureWire};

use crate::scalar::Real;
use crate::wirtinger::PolyField;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("invalid quadrature orders: radial_order {radial_order} (need >= 4), angular_count {angular_count} (need even, >= 100)")]
    InvalidOrders { radial_order: usize, angular_count: usize },
    #[error("complex dimension must be positive")]
    ZeroDimension,
    #[error("point is not on the boundary: |rho| = {rho:e}")]
    PointNotOnBoundary { rho: f64 },
    #[error("defining-function gradient vanishes at the point")]
    VanishingGradient,
    #[error("bad serialized rule: {0}")]
    BadWire(String),
    #[error(transparent)]
    Algebra(#[from] crate::hessalg::HessalgError),
}

pub type Result<V> = std::result::Result<V, DomainError>;

/// Shape of the domain: the ball is the verified case; generic level sets
/// share the same code paths but carry no closed-form guarantees.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainKind<T> {
    Ball { radius: T },
    LevelSet,
}

/// A bounded domain `X = {rho < 0}` with smooth boundary `M = {rho = 0}`.
#[derive(Clone, Debug)]
pub struct DomainSpec<T> {
    n: usize,
    kind: DomainKind<T>,
    rho: PolyField<T>,
}

impl<T: Real> DomainSpec<T> {
    /// The ball of the given radius: `rho = |z|^2 - R^2`.
    pub fn ball(n: usize, radius: T) -> Self {
        let rho = PolyField::abs2(n).sub_ref(&PolyField::constant_re(n, radius * radius));
        Self { n, kind: DomainKind::Ball { radius }, rho }
    }

    /// A generic polynomial level set (negative inside).
    pub fn from_level_set(rho: PolyField<T>) -> Self {
        Self { n: rho.n(), kind: DomainKind::LevelSet, rho }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &DomainKind<T> {
        &self.kind
    }

    pub fn rho(&self) -> &PolyField<T> {
        &self.rho
    }

    pub fn radius(&self) -> Option<T> {
        match self.kind {
            DomainKind::Ball { radius } => Some(radius),
            DomainKind::LevelSet => None,
        }
    }
}

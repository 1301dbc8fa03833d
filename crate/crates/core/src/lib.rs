//! Complex k-Hessian toolkit: Hermitian sigma_k algebra, exact Wirtinger
//! calculus on polynomial fields, boundary geometry of balls in C^n,
//! the k-Hessian energy functionals with their boundary densities, and
//! variational verification experiments.

pub mod domain;
pub mod energy;
pub mod hessalg;
pub mod scalar;
pub mod varcheck;
pub mod wirtinger;

pub use scalar::{Real, C};

/// Concrete f64 aliases for the common instantiation.
pub type PolyField64 = wirtinger::PolyField<f64>;
pub type FieldJet64 = wirtinger::FieldJet<f64>;
pub type HermitianMatrix64 = hessalg::HermitianMatrix<f64>;
pub type SpectrumVector64 = hessalg::SpectrumVector<f64>;
pub type ConeReport64 = hessalg::ConeReport<f64>;
pub type DomainSpec64 = domain::DomainSpec<f64>;
pub type QuadratureRule64 = domain::QuadratureRule<f64>;
pub type EnergyBreakdown64 = energy::EnergyBreakdown<f64>;
pub type ExperimentReport64 = varcheck::ExperimentReport<f64>;
pub type PerturbationFamily64 = varcheck::PerturbationFamily<f64>;

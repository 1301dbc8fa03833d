//! Exact polynomial calculus on C^n viewed as R^{2n}.
//!
//! A [`PolyField`] is a polynomial in the real coordinates
//! `(x_1, y_1, ..., x_n, y_n)` (where `z_i = x_i + i y_i`) with complex
//! coefficients. Differentiation is exact; the Wirtinger operators are
//! `d/dz_i = (d/dx_i - i d/dy_i) / 2` and `d/dzbar_i = (d/dx_i + i d/dy_i) / 2`.
//!
//! The complex Hessian exposed here is the coordinate one,
//! `H[i][j] = d^2 u / dz_i dzbar_j`; frame-normalized variants used by the
//! boundary geometry and energies live with their consumers.

mod jet;
mod stock;
mod symbolic;

pub use jet::{complex_laplacian, jet, FieldJet, JetEvaluator, ThirdDerivatives};
pub use stock::{
    random_polynomial, stock_field_by_name, stock_field_names, stock_fields, StockField,
};
pub use symbolic::{
    complex_hessian_matrix, newton_tensor_poly, sigma_poly, unitary_antiholo_divergence,
    unitary_hessian_matrix, unitary_holo_divergence, PolyMatrix,
};

use crate::scalar::{cre, Real, C};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WirtingerError {
    #[error("complex dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("coordinate index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("wire record has exponent length {got}, expected {want}")]
    BadWireExponents { got: usize, want: usize },
}

/// Which Wirtinger operator to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wirtinger {
    /// `d/dz_i`
    Holomorphic,
    /// `d/dzbar_i`
    Antiholomorphic,
}

/// Polynomial in the 2n real coordinates with complex coefficients.
/// Terms are kept in a BTreeMap for deterministic iteration; exact zero
/// coefficients are dropped eagerly.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyField<T> {
    n: usize,
    terms: BTreeMap<Vec<u16>, C<T>>,
}

impl<T: Real> PolyField<T> {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: C<T>) -> Self {
        let mut p = Self::zero(n);
        p.insert(vec![0; 2 * n], c);
        p
    }

    pub fn constant_re(n: usize, c: T) -> Self {
        Self::constant(n, cre(c))
    }

    /// The real coordinate with flat index `coord` in `(x_1, y_1, ..., x_n, y_n)`.
    pub fn coordinate(n: usize, coord: usize) -> Self {
        assert!(coord < 2 * n, "coordinate index out of range");
        let mut exps = vec![0u16; 2 * n];
        exps[coord] = 1;
        let mut p = Self::zero(n);
        p.insert(exps, cre(T::one()));
        p
    }

    /// `x_i` (0-based complex index).
    pub fn x(n: usize, i: usize) -> Self {
        Self::coordinate(n, 2 * i)
    }

    /// `y_i` (0-based complex index).
    pub fn y(n: usize, i: usize) -> Self {
        Self::coordinate(n, 2 * i + 1)
    }

    /// `z_i = x_i + i y_i` as a polynomial.
    pub fn z(n: usize, i: usize) -> Self {
        Self::x(n, i).add_ref(&Self::y(n, i).scale(Complex::new(T::zero(), T::one())))
    }

    /// `zbar_i = x_i - i y_i` as a polynomial.
    pub fn zbar(n: usize, i: usize) -> Self {
        Self::x(n, i).add_ref(&Self::y(n, i).scale(Complex::new(T::zero(), -T::one())))
    }

    /// `|z|^2 = sum x_i^2 + y_i^2`.
    pub fn abs2(n: usize) -> Self {
        let mut p = Self::zero(n);
        for c in 0..2 * n {
            let mut exps = vec![0u16; 2 * n];
            exps[c] = 2;
            p.insert(exps, cre(T::one()));
        }
        p
    }

    fn insert(&mut self, exps: Vec<u16>, c: C<T>) {
        if c.re == T::zero() && c.im == T::zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = *e.get() + c;
                if v.re == T::zero() && v.im == T::zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&d| d as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u16], C<T>)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn max_coeff_norm(&self) -> T {
        self.terms
            .values()
            .fold(T::zero(), |acc, c| acc.max(c.norm_sqr().sqrt()))
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), *c);
        }
        out
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), -*c);
        }
        out
    }

    pub fn scale(&self, s: C<T>) -> Self {
        if s.re == T::zero() && s.im == T::zero() {
            return Self::zero(self.n);
        }
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), *c * s)).collect(),
        }
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(cre(s))
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let mut out = Self::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u16> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(exps, *ca * *cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant_re(self.n, T::one());
        for _ in 0..e {
            out = out.mul_ref(self);
        }
        out
    }

    /// Exact partial derivative in the real coordinate `coord`.
    pub fn partial(&self, coord: usize) -> Self {
        assert!(coord < 2 * self.n, "coordinate index out of range");
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            let d = e[coord];
            if d == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps[coord] = d - 1;
            out.insert(exps, c.scale(T::of(d as f64)));
        }
        out
    }

    /// Wirtinger derivative in the complex coordinate `i` (0-based).
    pub fn wirtinger(&self, i: usize, kind: Wirtinger) -> Self {
        assert!(i < self.n, "complex index out of range");
        let dx = self.partial(2 * i);
        let dy = self.partial(2 * i + 1);
        let half = T::of(0.5);
        let sgn = match kind {
            Wirtinger::Holomorphic => -T::one(),
            Wirtinger::Antiholomorphic => T::one(),
        };
        dx.scale(cre(half))
            .add_ref(&dy.scale(Complex::new(T::zero(), sgn * half)))
    }

    /// Complex conjugate (coefficientwise; the variables are real).
    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.conj())).collect(),
        }
    }

    /// Real part `(P + conj P) / 2` as a field.
    pub fn re_part(&self) -> Self {
        self.add_ref(&self.conj()).scale_re(T::of(0.5))
    }

    /// Imaginary part `(P - conj P) / (2i)` as a field.
    pub fn im_part(&self) -> Self {
        self.sub_ref(&self.conj())
            .scale(Complex::new(T::zero(), -T::of(0.5)))
    }

    /// A field is real-valued iff every coefficient is real (the variables
    /// range over R^{2n}).
    pub fn is_real_valued(&self, tol: T) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    pub fn eval(&self, point: &[T]) -> C<T> {
        assert_eq!(point.len(), 2 * self.n, "point dimension mismatch");
        let mut acc = Complex::new(T::zero(), T::zero());
        for (e, c) in &self.terms {
            let mut prod = T::one();
            for (coord, &d) in e.iter().enumerate() {
                if d > 0 {
                    prod *= point[coord].powi(d as i32);
                }
            }
            acc += c.scale(prod);
        }
        acc
    }

    /// Evaluate a field known to be real-valued.
    pub fn eval_re(&self, point: &[T]) -> T {
        let v = self.eval(point);
        debug_assert!(
            v.im.abs() <= T::of(1e-9) * (T::one() + v.re.abs()),
            "field is not real-valued at the point"
        );
        v.re
    }

    /// Wire form for JSON serialization (exact round-trip for f32/f64).
    pub fn to_wire(&self) -> PolyWire {
        PolyWire {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.re.as_f64(), c.im.as_f64()))
                .collect(),
        }
    }

    pub fn from_wire(wire: &PolyWire) -> Result<Self, WirtingerError> {
        let mut p = Self::zero(wire.n);
        for (e, re, im) in &wire.terms {
            if e.len() != 2 * wire.n {
                return Err(WirtingerError::BadWireExponents {
                    got: e.len(),
                    want: 2 * wire.n,
                });
            }
            p.insert(e.clone(), Complex::new(T::of(*re), T::of(*im)));
        }
        Ok(p)
    }
}

/// JSON-facing form of a [`PolyField`]: complex dimension plus a list of
/// `(multi-index, re, im)` triples, multi-indices over
/// `(x_1, y_1, ..., x_n, y_n)`, sorted by multi-index.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolyWire {
    pub n: usize,
    pub terms: Vec<(Vec<u16>, f64, f64)>,
}

impl<T: Real> Add for &PolyField<T> {
    type Output = PolyField<T>;
    fn add(self, rhs: Self) -> PolyField<T> {
        self.add_ref(rhs)
    }
}

impl<T: Real> Sub for &PolyField<T> {
    type Output = PolyField<T>;
    fn sub(self, rhs: Self) -> PolyField<T> {
        self.sub_ref(rhs)
    }
}

impl<T: Real> Mul for &PolyField<T> {
    type Output = PolyField<T>;
    fn mul(self, rhs: Self) -> PolyField<T> {
        self.mul_ref(rhs)
    }
}

impl<T: Real> Neg for &PolyField<T> {
    type Output = PolyField<T>;
    fn neg(self) -> PolyField<T> {
        self.scale_re(-T::one())
    }
}

/// Spec-level op: `wirtinger_derivative(P, i, kind)`.
pub fn wirtinger_derivative<T: Real>(
    p: &PolyField<T>,
    i: usize,
    kind: Wirtinger,
) -> Result<PolyField<T>, WirtingerError> {
    if i >= p.n() {
        return Err(WirtingerError::IndexOutOfRange { index: i, n: p.n() });
    }
    Ok(p.wirtinger(i, kind))
}

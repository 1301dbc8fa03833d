//! Symbolic matrix calculus over polynomial fields: exact elementary
//! symmetric functions and Newton tensors of a polynomial Hermitian matrix,
//! and exact divergences in the unitary frame (`Zbar_i = sqrt(2) d/dzbar_i`).

use super::{PolyField, Wirtinger};
use crate::scalar::Real;

/// Square matrix of polynomial fields, row-major.
#[derive(Clone, Debug)]
pub struct PolyMatrix<T> {
    dim: usize,
    entries: Vec<PolyField<T>>,
}

impl<T: Real> PolyMatrix<T> {
    pub fn from_fn(n: usize, dim: usize, mut f: impl FnMut(usize, usize) -> PolyField<T>) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let p = f(i, j);
                assert_eq!(p.n(), n, "entry dimension mismatch");
                entries.push(p);
            }
        }
        Self { dim, entries }
    }

    pub fn identity(n: usize, dim: usize) -> Self {
        Self::from_fn(n, dim, |i, j| {
            if i == j {
                PolyField::constant_re(n, T::one())
            } else {
                PolyField::zero(n)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &PolyField<T> {
        &self.entries[i * self.dim + j]
    }

    fn field_dim(&self) -> usize {
        self.entries[0].n()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        let n = self.field_dim();
        Self::from_fn(n, self.dim, |i, j| {
            let mut acc = PolyField::zero(n);
            for k in 0..self.dim {
                acc = acc.add_ref(&self.get(i, k).mul_ref(other.get(k, j)));
            }
            acc
        })
    }

    pub fn scale_field(&self, s: &PolyField<T>) -> Self {
        let n = self.field_dim();
        Self::from_fn(n, self.dim, |i, j| self.get(i, j).mul_ref(s))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        let n = self.field_dim();
        Self::from_fn(n, self.dim, |i, j| self.get(i, j).sub_ref(other.get(i, j)))
    }

    pub fn trace(&self) -> PolyField<T> {
        let n = self.field_dim();
        let mut acc = PolyField::zero(n);
        for i in 0..self.dim {
            acc = acc.add_ref(self.get(i, i));
        }
        acc
    }

    /// For each column j: `sum_i sqrt(2) d/dzbar_i  entry[i][j]`.
    pub fn divergence_antiholo(&self) -> Vec<PolyField<T>> {
        let n = self.field_dim();
        let s = T::of(2.0).sqrt();
        (0..self.dim)
            .map(|j| {
                let mut acc = PolyField::zero(n);
                for i in 0..self.dim {
                    acc = acc.add_ref(&self.get(i, j).wirtinger(i, Wirtinger::Antiholomorphic));
                }
                acc.scale_re(s)
            })
            .collect()
    }

    /// For each row i: `sum_j sqrt(2) d/dz_j  entry[i][j]`.
    pub fn divergence_holo(&self) -> Vec<PolyField<T>> {
        let n = self.field_dim();
        let s = T::of(2.0).sqrt();
        (0..self.dim)
            .map(|i| {
                let mut acc = PolyField::zero(n);
                for j in 0..self.dim {
                    acc = acc.add_ref(&self.get(i, j).wirtinger(j, Wirtinger::Holomorphic));
                }
                acc.scale_re(s)
            })
            .collect()
    }

    pub fn max_coeff_norm(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |acc, p| acc.max(p.max_coeff_norm()))
    }
}

/// Coordinate complex Hessian of `u` as a polynomial matrix:
/// `entry[i][j] = d^2 u / dz_i dzbar_j`.
pub fn complex_hessian_matrix<T: Real>(u: &PolyField<T>) -> PolyMatrix<T> {
    let n = u.n();
    PolyMatrix::from_fn(n, n, |i, j| {
        u.wirtinger(i, Wirtinger::Holomorphic)
            .wirtinger(j, Wirtinger::Antiholomorphic)
    })
}

/// Complex Hessian in a unitary frame (`Z_i = sqrt(2) d/dz_i`): twice the
/// coordinate matrix.
pub fn unitary_hessian_matrix<T: Real>(u: &PolyField<T>) -> PolyMatrix<T> {
    let n = u.n();
    let h = complex_hessian_matrix(u);
    PolyMatrix::from_fn(n, n, |i, j| h.get(i, j).scale_re(T::of(2.0)))
}

/// Exact `sigma_k` of a polynomial matrix via Newton's identities on the
/// power-sum traces `p_i = tr(M^i)`.
pub fn sigma_poly<T: Real>(m: &PolyMatrix<T>, k: usize) -> PolyField<T> {
    let n = m.field_dim();
    assert!(k <= m.dim(), "sigma order exceeds matrix dimension");
    if k == 0 {
        return PolyField::constant_re(n, T::one());
    }
    let mut powers = Vec::with_capacity(k);
    let mut cur = m.clone();
    for _ in 0..k {
        powers.push(cur.trace());
        cur = cur.mul(m);
    }
    let mut e: Vec<PolyField<T>> = vec![PolyField::constant_re(n, T::one())];
    for md in 1..=k {
        let mut acc = PolyField::zero(n);
        let mut sign = T::one();
        for i in 1..=md {
            acc = acc.add_ref(&e[md - i].mul_ref(&powers[i - 1]).scale_re(sign));
            sign = -sign;
        }
        e.push(acc.scale_re(T::one() / T::of(md as f64)));
    }
    e.pop().unwrap()
}

/// Exact Newton tensor of a polynomial matrix:
/// `T_0 = I`, `T_k = sigma_k I - M T_{k-1}`.
pub fn newton_tensor_poly<T: Real>(m: &PolyMatrix<T>, k: usize) -> PolyMatrix<T> {
    let n = m.field_dim();
    let mut t = PolyMatrix::identity(n, m.dim());
    for step in 1..=k {
        let sk = sigma_poly(m, step);
        t = PolyMatrix::identity(n, m.dim())
            .scale_field(&sk)
            .sub(&m.mul(&t));
    }
    t
}

/// Divergence of a covector field in the unitary frame:
/// `sum_i Zbar_i(a_i) = sum_i sqrt(2) d/dzbar_i a_i`.
pub fn unitary_antiholo_divergence<T: Real>(components: &[PolyField<T>]) -> PolyField<T> {
    frame_divergence(components, Wirtinger::Antiholomorphic)
}

/// `sum_i Z_i(a_i) = sum_i sqrt(2) d/dz_i a_i`.
pub fn unitary_holo_divergence<T: Real>(components: &[PolyField<T>]) -> PolyField<T> {
    frame_divergence(components, Wirtinger::Holomorphic)
}

fn frame_divergence<T: Real>(components: &[PolyField<T>], kind: Wirtinger) -> PolyField<T> {
    assert!(!components.is_empty(), "empty component list");
    let n = components[0].n();
    let mut acc = PolyField::zero(n);
    for (i, a) in components.iter().enumerate() {
        acc = acc.add_ref(&a.wirtinger(i, kind));
    }
    acc.scale_re(T::of(2.0).sqrt())
}

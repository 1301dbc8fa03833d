//! Hermitian sigma_k algebra: elementary symmetric functions of the spectrum,
//! Newton tensors and their polarizations, Garding cone membership.
//!
//! Conventions. A Hermitian matrix `A` stores `A[i][j] = A_{i jbar}` row-major.
//! The Newton tensor is stored so that `T_k(A)[i][j]` is the coefficient
//! matrix satisfying `d sigma_{k+1}(A) / d A[i][j] = T_k(A)[j][i]`; as a
//! matrix polynomial `T_k(A) = sum_{m=0..k} (-1)^m sigma_{k-m}(A) A^m`, with
//! the recursion `T_0 = I`, `T_k = sigma_k(A) I - A T_{k-1}`. The orientation
//! is fixed by the contraction identity `k sigma_k = tr(A T_{k-1})`.

mod delta;
mod eigen;

pub use delta::{newton_tensor_delta, sigma_k_delta};

use crate::scalar::{cre, Real, C};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Largest dimension / argument count served by the delta-formula reference
/// evaluators. They enumerate index tuples and scale as `n^(2k+2)`.
pub const DELTA_ORACLE_MAX: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum HessalgError {
    #[error("matrix dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("k = {k} out of range for dimension n = {n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("delta-formula reference is limited to n <= {max}, k <= {max}: got n = {n}, k = {k}", max = DELTA_ORACLE_MAX)]
    OracleLimit { n: usize, k: usize },
    #[error("matrix is not Hermitian: max |A - A^H| = {asymmetry:e} exceeds {tolerance:e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },
    #[error("operation requires at least one matrix argument")]
    EmptyArguments,
    #[error("entry count {got} does not match dimension {n} x {n}")]
    BadEntryCount { got: usize, n: usize },
}

pub type Result<V> = std::result::Result<V, HessalgError>;

/// Dense Hermitian matrix with row-major complex entries.
///
/// Constructors symmetrize exactly, so `A == A^H` holds bitwise afterwards
/// (diagonal imaginary parts are zeroed, off-diagonal pairs averaged).
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T> {
    n: usize,
    entries: Vec<C<T>>,
}

impl<T: Real> HermitianMatrix<T> {
    pub fn zero(n: usize) -> Self {
        Self { n, entries: vec![Complex::new(T::zero(), T::zero()); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = cre(T::one());
        }
        m
    }

    pub fn diag(values: &[T]) -> Self {
        let n = values.len();
        let mut m = Self::zero(n);
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * n + i] = cre(v);
        }
        m
    }

    /// Builds from raw entries, rejecting inputs whose asymmetry exceeds
    /// `1e-12 * (1 + max|entry|)`, then symmetrizes exactly.
    pub fn from_entries(n: usize, entries: Vec<C<T>>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(HessalgError::BadEntryCount { got: entries.len(), n });
        }
        let scale = entries
            .iter()
            .fold(T::zero(), |acc, e| acc.max(e.norm_sqr().sqrt()));
        let tol = T::of(1e-12) * (T::one() + scale);
        let mut asym = T::zero();
        for i in 0..n {
            for j in i..n {
                let d = entries[i * n + j] - entries[j * n + i].conj();
                asym = asym.max(d.norm_sqr().sqrt());
            }
        }
        if asym > tol {
            return Err(HessalgError::NotHermitian {
                asymmetry: asym.as_f64(),
                tolerance: tol.as_f64(),
            });
        }
        Ok(Self::symmetrize(n, entries))
    }

    /// Symmetrizes `(A + A^H) / 2` without validating the input.
    pub fn symmetrize(n: usize, mut entries: Vec<C<T>>) -> Self {
        assert_eq!(entries.len(), n * n, "entry count must be n^2");
        let half = T::of(0.5);
        for i in 0..n {
            entries[i * n + i] = cre(entries[i * n + i].re);
            for j in (i + 1)..n {
                let avg = (entries[i * n + j] + entries[j * n + i].conj()).scale(half);
                entries[i * n + j] = avg;
                entries[j * n + i] = avg.conj();
            }
        }
        Self { n, entries }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Self::symmetrize(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> C<T> {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.entries
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(HessalgError::DimensionMismatch(self.n, other.n));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { n: self.n, entries })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(HessalgError::DimensionMismatch(self.n, other.n));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { n: self.n, entries })
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|e| e.scale(s)).collect(),
        }
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self.get(i, i).re).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries
            .iter()
            .map(|e| e.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    pub fn max_abs_entry(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |acc, e| acc.max(e.norm_sqr().sqrt()))
    }

    /// Largest entry of `A - B` in modulus.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.n != other.n {
            return Err(HessalgError::DimensionMismatch(self.n, other.n));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(T::zero(), |acc, (a, b)| acc.max((a - b).norm_sqr().sqrt())))
    }

    /// Raw matrix product (not Hermitian in general).
    fn mul_raw(&self, other: &Self) -> Vec<C<T>> {
        let n = self.n;
        let mut out = vec![Complex::new(T::zero(), T::zero()); n * n];
        for i in 0..n {
            for l in 0..n {
                let a = self.entries[i * n + l];
                for j in 0..n {
                    out[i * n + j] += a * other.entries[l * n + j];
                }
            }
        }
        out
    }

    /// Eigenvalues sorted descending (cyclic Jacobi; exact symmetrization is
    /// an invariant of the type, so no re-symmetrization happens here).
    pub fn eigenvalues(&self) -> SpectrumVector<T> {
        SpectrumVector::from_unsorted(eigen::hermitian_eigenvalues(self.n, &self.entries))
    }
}

/// Eigenvalue list of a Hermitian matrix, sorted descending with multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumVector<T> {
    values: Vec<T>,
}

impl<T: Real> SpectrumVector<T> {
    pub fn from_unsorted(mut values: Vec<T>) -> Self {
        values.sort_by(|a, b| b.partial_cmp(a).expect("eigenvalues are finite"));
        Self { values }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> T {
        *self.values.last().expect("nonempty spectrum")
    }
}

/// Verdict of the Garding cone test: `sigmas[j-1] = sigma_j(A)` for
/// `j = 1..=k` and membership in the open cone `Gamma_k^+` (all positive).
#[derive(Clone, Debug)]
pub struct ConeReport<T> {
    pub k: usize,
    pub sigmas: Vec<T>,
    pub in_cone: bool,
}

/// Elementary symmetric function `e_k` of a list of values, by the stable
/// one-pass recurrence. `e_0 = 1`; `k` beyond the list length gives 0.
pub fn elementary_symmetric<T: Real>(values: &[T], k: usize) -> T {
    if k == 0 {
        return T::one();
    }
    if k > values.len() {
        return T::zero();
    }
    let mut e = vec![T::zero(); k + 1];
    e[0] = T::one();
    for &v in values {
        for j in (1..=k).rev() {
            e[j] = e[j] + v * e[j - 1];
        }
    }
    e[k]
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k > n {
        return Err(HessalgError::KOutOfRange { k, n });
    }
    Ok(())
}

/// `sigma_k(A)`: k-th elementary symmetric function of the eigenvalues.
/// `sigma_0 = 1`; `k > n` is a domain error.
pub fn sigma_k<T: Real>(a: &HermitianMatrix<T>, k: usize) -> Result<T> {
    check_k(k, a.n())?;
    if k == 0 {
        return Ok(T::one());
    }
    Ok(elementary_symmetric(a.eigenvalues().values(), k))
}

/// All of `sigma_0..=sigma_m` from a single eigensolve.
pub fn sigma_prefix<T: Real>(a: &HermitianMatrix<T>, m: usize) -> Result<Vec<T>> {
    check_k(m, a.n())?;
    let lam = a.eigenvalues();
    Ok((0..=m)
        .map(|j| elementary_symmetric(lam.values(), j))
        .collect())
}

/// All of `sigma_0..=sigma_m` from the power-sum traces `tr(A^j)` via
/// Newton's identities. No eigensolve; preferred in per-node quadrature
/// loops where `m` and `n` are small.
pub fn sigma_prefix_from_traces<T: Real>(a: &HermitianMatrix<T>, m: usize) -> Result<Vec<T>> {
    let n = a.n();
    check_k(m, n)?;
    let mut e = vec![T::one()];
    if m == 0 {
        return Ok(e);
    }
    let mut power_traces = Vec::with_capacity(m);
    let mut cur = a.clone();
    for step in 0..m {
        power_traces.push(cur.trace());
        if step + 1 < m {
            cur = HermitianMatrix::symmetrize(n, a.mul_raw(&cur));
        }
    }
    for order in 1..=m {
        let mut acc = T::zero();
        let mut sign = T::one();
        for i in 1..=order {
            acc += sign * e[order - i] * power_traces[i - 1];
            sign = -sign;
        }
        e.push(acc / T::of(order as f64));
    }
    Ok(e)
}

/// Fully polarized `sigma_k(A_1, ..., A_k)` by inclusion-exclusion over
/// subset sums: `(1/k!) sum_{S nonempty} (-1)^{k-|S|} sigma_k(sum_{i in S} A_i)`.
pub fn sigma_k_polarized<T: Real>(mats: &[HermitianMatrix<T>]) -> Result<T> {
    let k = mats.len();
    if k == 0 {
        return Err(HessalgError::EmptyArguments);
    }
    let n = mats[0].n();
    for m in mats {
        if m.n() != n {
            return Err(HessalgError::DimensionMismatch(n, m.n()));
        }
    }
    check_k(k, n)?;
    let mut acc = T::zero();
    for mask in 1u32..(1u32 << k) {
        let mut sum = HermitianMatrix::zero(n);
        for (i, m) in mats.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sum = sum.add(m)?;
            }
        }
        let term = sigma_k(&sum, k)?;
        if (k - mask.count_ones() as usize).is_multiple_of(2) {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc / T::of(factorial(k)))
}

/// Newton tensor `T_k(A)` via the recursion `T_0 = I`,
/// `T_k = sigma_k(A) I - A T_{k-1}` (each step symmetrized; the product is
/// Hermitian in exact arithmetic because `T_{k-1}` is a polynomial in `A`).
/// `k = n` is allowed and yields the zero tensor.
pub fn newton_tensor<T: Real>(a: &HermitianMatrix<T>, k: usize) -> Result<HermitianMatrix<T>> {
    let n = a.n();
    check_k(k, n)?;
    let sig = sigma_prefix(a, k)?;
    let mut t = HermitianMatrix::identity(n);
    for &s in &sig[1..=k] {
        let prod = a.mul_raw(&t);
        let mut next = HermitianMatrix::symmetrize(n, prod).scale(-T::one());
        for i in 0..n {
            next.entries[i * n + i] += cre(s);
        }
        t = next;
    }
    Ok(t)
}

/// Polarized Newton tensor `T_k(A_1, ..., A_k)` by the same
/// inclusion-exclusion as [`sigma_k_polarized`], entrywise.
pub fn newton_tensor_polarized<T: Real>(
    mats: &[HermitianMatrix<T>],
) -> Result<HermitianMatrix<T>> {
    let k = mats.len();
    if k == 0 {
        return Err(HessalgError::EmptyArguments);
    }
    let n = mats[0].n();
    for m in mats {
        if m.n() != n {
            return Err(HessalgError::DimensionMismatch(n, m.n()));
        }
    }
    check_k(k, n)?;
    let mut acc = HermitianMatrix::zero(n);
    for mask in 1u32..(1u32 << k) {
        let mut sum = HermitianMatrix::zero(n);
        for (i, m) in mats.iter().enumerate() {
            if mask & (1 << i) != 0 {
                sum = sum.add(m)?;
            }
        }
        let term = newton_tensor(&sum, k)?;
        if (k - mask.count_ones() as usize).is_multiple_of(2) {
            acc = acc.add(&term)?;
        } else {
            acc = acc.sub(&term)?;
        }
    }
    Ok(acc.scale(T::one() / T::of(factorial(k))))
}

/// Garding cone test: `Gamma_k^+ = { sigma_1 > 0, ..., sigma_k > 0 }`.
pub fn cone_membership<T: Real>(a: &HermitianMatrix<T>, k: usize) -> Result<ConeReport<T>> {
    let n = a.n();
    if k == 0 || k > n {
        return Err(HessalgError::KOutOfRange { k, n });
    }
    let lam = a.eigenvalues();
    let sigmas: Vec<T> = (1..=k)
        .map(|j| elementary_symmetric(lam.values(), j))
        .collect();
    let in_cone = sigmas.iter().all(|s| *s > T::zero());
    Ok(ConeReport { k, sigmas, in_cone })
}

/// Largest entrywise gap between `T_k(A)` and the central finite-difference
/// estimate of `d sigma_{k+1}(A) / d A[i][j]` (real and imaginary Hermitian
/// perturbation directions). Requires `k + 1 <= n` so the derivative target
/// is nontrivial.
pub fn linearization_residual<T: Real>(
    a: &HermitianMatrix<T>,
    k: usize,
    h: T,
) -> Result<T> {
    let n = a.n();
    if k + 1 > n {
        return Err(HessalgError::KOutOfRange { k, n });
    }
    assert!(h > T::zero(), "finite-difference step must be positive");
    let t = newton_tensor(a, k)?;
    let two_h = T::of(2.0) * h;
    let mut residual = T::zero();
    let sigma_shift = |dir: &HermitianMatrix<T>, s: T| -> Result<T> {
        sigma_k(&a.add(&dir.scale(s))?, k + 1)
    };
    for i in 0..n {
        for j in i..n {
            let estimate = if i == j {
                let mut e = HermitianMatrix::zero(n);
                e.entries[i * n + i] = cre(T::one());
                let d = (sigma_shift(&e, h)? - sigma_shift(&e, -h)?) / two_h;
                Complex::new(d, T::zero())
            } else {
                // Hermitian directions E_ij + E_ji and i E_ij - i E_ji probe
                // 2 Re T[i][j] and 2 Im T[i][j] respectively.
                let mut re_dir = HermitianMatrix::zero(n);
                re_dir.entries[i * n + j] = cre(T::one());
                re_dir.entries[j * n + i] = cre(T::one());
                let mut im_dir = HermitianMatrix::zero(n);
                im_dir.entries[i * n + j] = Complex::new(T::zero(), T::one());
                im_dir.entries[j * n + i] = Complex::new(T::zero(), -T::one());
                let d_re = (sigma_shift(&re_dir, h)? - sigma_shift(&re_dir, -h)?) / two_h;
                let d_im = (sigma_shift(&im_dir, h)? - sigma_shift(&im_dir, -h)?) / two_h;
                Complex::new(d_re, d_im).scale(T::of(0.5))
            };
            let gap = (estimate - t.get(i, j)).norm_sqr().sqrt();
            residual = residual.max(gap);
        }
    }
    Ok(residual)
}

/// Seeded random Hermitian matrix: independent entries uniform in
/// `[-1, 1]` (real and imaginary parts), then symmetrized. The same seed
/// gives the same matrix for every scalar type.
pub fn random_hermitian<T: Real>(n: usize, seed: u64) -> HermitianMatrix<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    HermitianMatrix::from_fn(n, |_, _| {
        let re: f64 = rng.gen_range(-1.0..1.0);
        let im: f64 = rng.gen_range(-1.0..1.0);
        Complex::new(T::of(re), T::of(im))
    })
}

/// Seeded random matrix shifted into the positive-definite cone (a subset
/// of every `Gamma_k^+`): `A + (0.2 - lambda_min(A)) I`.
pub fn random_in_cone<T: Real>(n: usize, seed: u64) -> HermitianMatrix<T> {
    let a = random_hermitian::<T>(n, seed);
    let shift = T::of(0.2) - a.eigenvalues().min();
    let mut entries = a.entries().to_vec();
    for i in 0..n {
        entries[i * n + i] += cre(shift);
    }
    HermitianMatrix::symmetrize(n, entries)
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Binomial coefficient as f64 (exact for the desk-scale arguments used here).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * ((n - i) as f64) / ((i + 1) as f64);
    }
    acc.round()
}

#[cfg(test)]
mod tests;

//! Generalized-Kronecker-delta reference evaluators for the polarized
//! sigma_k and Newton tensor. Brute-force sums over index tuples, usable up
//! to `n <= 4`, `k <= 4`; they exist to pin down sign and normalization
//! conventions, not for production evaluation.

use super::{HermitianMatrix, HessalgError, Result, DELTA_ORACLE_MAX};
use crate::scalar::{Real, C};
use num_complex::Complex;

/// Sign of the generalized Kronecker delta `delta^{upper}_{lower}`:
/// 0 unless `upper` has distinct entries and `lower` is a permutation of
/// them; otherwise the parity of that permutation.
fn generalized_delta(upper: &[usize], lower: &[usize]) -> i32 {
    let k = upper.len();
    debug_assert_eq!(k, lower.len());
    for a in 0..k {
        for b in (a + 1)..k {
            if upper[a] == upper[b] || lower[a] == lower[b] {
                return 0;
            }
        }
    }
    // perm[a] = position of lower[a] within upper.
    let mut perm = Vec::with_capacity(k);
    for &l in lower {
        match upper.iter().position(|&u| u == l) {
            Some(pos) => perm.push(pos),
            None => return 0,
        }
    }
    let mut sign = 1;
    for a in 0..k {
        while perm[a] != a {
            let b = perm[a];
            perm.swap(a, b);
            sign = -sign;
        }
    }
    sign
}

fn check_args<T: Real>(mats: &[HermitianMatrix<T>]) -> Result<usize> {
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
    if n > DELTA_ORACLE_MAX || k > DELTA_ORACLE_MAX {
        return Err(HessalgError::OracleLimit { n, k });
    }
    if k > n {
        return Err(HessalgError::KOutOfRange { k, n });
    }
    Ok(n)
}

/// Advances a mixed-radix counter over `[0, n)^len`; returns false on wrap.
fn next_tuple(tuple: &mut [usize], n: usize) -> bool {
    for slot in tuple.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Polarized `sigma_k(A_1, ..., A_k)` by the delta formula
/// `(1/k!) delta^{i_1..i_k}_{j_1..j_k} (A_1)_{i_1 jbar_1} ... (A_k)_{i_k jbar_k}`.
pub fn sigma_k_delta<T: Real>(mats: &[HermitianMatrix<T>]) -> Result<T> {
    let n = check_args(mats)?;
    let k = mats.len();
    let mut acc = Complex::new(T::zero(), T::zero());
    let mut upper = vec![0usize; k];
    loop {
        let mut lower = vec![0usize; k];
        loop {
            let sign = generalized_delta(&upper, &lower);
            if sign != 0 {
                let mut prod: C<T> = Complex::new(T::of(sign as f64), T::zero());
                for (m, mat) in mats.iter().enumerate() {
                    prod *= mat.get(upper[m], lower[m]);
                }
                acc += prod;
            }
            if !next_tuple(&mut lower, n) {
                break;
            }
        }
        if !next_tuple(&mut upper, n) {
            break;
        }
    }
    let value = acc.unscale(T::of(super::factorial(k)));
    debug_assert!(
        value.im.abs() <= T::of(1e-8) * (T::one() + value.re.abs()),
        "polarized sigma of Hermitian arguments must be real"
    );
    Ok(value.re)
}

/// Polarized Newton tensor by the delta formula: the stored entry `[r][c]`
/// is `T_k(...)_{r cbar} = (1/k!) delta^{c i_1..i_k}_{r j_1..j_k}
/// (A_1)_{i_1 jbar_1} ... (A_k)_{i_k jbar_k}`.
pub fn newton_tensor_delta<T: Real>(
    mats: &[HermitianMatrix<T>],
) -> Result<HermitianMatrix<T>> {
    let n = check_args(mats)?;
    let k = mats.len();
    let inv_fact = T::one() / T::of(super::factorial(k));
    let mut entries = vec![Complex::new(T::zero(), T::zero()); n * n];
    for r in 0..n {
        for c in 0..n {
            let mut acc = Complex::new(T::zero(), T::zero());
            let mut upper = vec![0usize; k + 1];
            loop {
                upper[0] = c;
                let mut lower = vec![0usize; k + 1];
                loop {
                    lower[0] = r;
                    let sign = generalized_delta(&upper, &lower);
                    if sign != 0 {
                        let mut prod: C<T> = Complex::new(T::of(sign as f64), T::zero());
                        for (m, mat) in mats.iter().enumerate() {
                            prod *= mat.get(upper[m + 1], lower[m + 1]);
                        }
                        acc += prod;
                    }
                    if !next_tuple(&mut lower[1..], n) {
                        break;
                    }
                }
                if !next_tuple(&mut upper[1..], n) {
                    break;
                }
            }
            entries[r * n + c] = acc.scale(inv_fact);
        }
    }
    Ok(HermitianMatrix::symmetrize(n, entries))
}

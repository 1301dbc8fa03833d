//! Eigenvalues of small Hermitian matrices by cyclic Jacobi with complex
//! (phase-carrying) rotations. Desk scale: quadratic convergence, no
//! eigenvector accumulation, dimensions up to ~16.

use crate::scalar::{Real, C};
use num_complex::Complex;

const MAX_SWEEPS: usize = 60;

/// Eigenvalues (unsorted) of the Hermitian matrix given row-major.
pub(crate) fn hermitian_eigenvalues<T: Real>(n: usize, entries: &[C<T>]) -> Vec<T> {
    debug_assert_eq!(entries.len(), n * n);
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![entries[0].re];
    }
    let mut m = entries.to_vec();
    let frob = m.iter().map(|e| e.norm_sqr()).sum::<T>().sqrt();
    if frob == T::zero() {
        return vec![T::zero(); n];
    }
    let stop = T::epsilon() * frob * T::of(n as f64);
    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[i * n + j].norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(n, &mut m, p, q);
            }
        }
    }
    (0..n).map(|i| m[i * n + i].re).collect()
}

/// One Jacobi rotation annihilating `m[p][q]`.
///
/// With `gamma = m[p][q] = r e^{i phi}`, the phase change `diag(1, e^{-i phi})`
/// turns the 2x2 block real symmetric; the standard stable rotation
/// `t = sign(tau) / (|tau| + sqrt(1 + tau^2))`, `tau = (a_qq - a_pp) / (2r)`
/// then zeroes the off-diagonal. The combined unitary is
/// `U[p][p] = c, U[p][q] = s, U[q][p] = -s e^{-i phi}, U[q][q] = c e^{-i phi}`.
fn rotate<T: Real>(n: usize, m: &mut [C<T>], p: usize, q: usize) {
    let gamma = m[p * n + q];
    let r = gamma.norm_sqr().sqrt();
    let app = m[p * n + p].re;
    let aqq = m[q * n + q].re;
    let scale = app.abs() + aqq.abs() + r;
    if r <= T::epsilon() * scale || r == T::zero() {
        return;
    }
    let phase = gamma.unscale(r);
    let tau = (aqq - app) / (T::of(2.0) * r);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    let upp = cre_c::<T>(c);
    let upq = cre_c::<T>(s);
    let uqp = phase.conj().scale(-s);
    let uqq = phase.conj().scale(c);

    // Column update M <- M U on columns p, q.
    for k in 0..n {
        let mkp = m[k * n + p];
        let mkq = m[k * n + q];
        m[k * n + p] = mkp * upp + mkq * uqp;
        m[k * n + q] = mkp * upq + mkq * uqq;
    }
    // Row update M <- U^H M on rows p, q.
    for k in 0..n {
        let mpk = m[p * n + k];
        let mqk = m[q * n + k];
        m[p * n + k] = mpk * upp.conj() + mqk * uqp.conj();
        m[q * n + k] = mpk * upq.conj() + mqk * uqq.conj();
    }
    // Exact zeros / real diagonal on the rotated block.
    m[p * n + q] = Complex::new(T::zero(), T::zero());
    m[q * n + p] = Complex::new(T::zero(), T::zero());
    m[p * n + p] = Complex::new(m[p * n + p].re, T::zero());
    m[q * n + q] = Complex::new(m[q * n + q].re, T::zero());
}

fn cre_c<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

//! Harmonic extension of polynomial boundary data on a ball, by the
//! classical finite algorithm: subtract a multiple of `|x|^2 - R^2` whose
//! Laplacian cancels that of the input. The correction multiplier is the
//! solution of a small linear system on the monomial basis, because
//! `g -> Laplacian((|x|^2 - R^2) g)` maps polynomials of degree `d - 2`
//! bijectively onto themselves.

use super::*;

/// Real Laplacian `sum_c d^2 p / d coord_c^2` over the `2n` real
/// coordinates, exact on coefficients.
pub fn real_laplacian_field<T: Real>(p: &PolyField<T>) -> PolyField<T> {
    let mut acc = PolyField::zero(p.n());
    for coord in 0..2 * p.n() {
        acc = acc.add_ref(&p.partial(coord).partial(coord));
    }
    acc
}

/// The unique harmonic polynomial on `R^{2n}` that agrees with `f` on the
/// sphere `|x| = radius`. The difference from `f` carries the factor
/// `|x|^2 - radius^2`, so the boundary values match exactly.
pub fn harmonic_extension_ball<T: Real>(f: &PolyField<T>, radius: T) -> Result<PolyField<T>> {
    if radius.is_nan() || radius <= T::zero() {
        return Err(VarcheckError::RadiusNotPositive { radius: radius.as_f64() });
    }
    let n = f.n();
    let lap = real_laplacian_field(f);
    if lap.max_coeff_norm() <= T::of(1e-13) * (T::one() + f.max_coeff_norm()) {
        return Ok(f.clone());
    }
    let cap = (f.degree() - 2) as u16;
    let indices = multi_indices(2 * n, cap);
    let position: BTreeMap<Vec<u16>, usize> = indices
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, e)| (e, i))
        .collect();
    let dim = indices.len();
    let shift = PolyField::abs2(n).sub_ref(&PolyField::constant_re(n, radius * radius));

    let zero = C::new(T::zero(), T::zero());
    let mut matrix = vec![vec![zero; dim]; dim];
    for (col, exps) in indices.iter().enumerate() {
        let image = real_laplacian_field(&shift.mul_ref(&monomial_field(n, exps, C::new(T::one(), T::zero()))));
        for (e, coeff) in image.terms() {
            let row = position
                .get(e)
                .copied()
                .expect("Laplacian image stays within the degree bound");
            matrix[row][col] += coeff;
        }
    }
    let mut rhs = vec![zero; dim];
    for (e, coeff) in lap.terms() {
        let row = position
            .get(e)
            .copied()
            .expect("Laplacian of the input stays within the degree bound");
        rhs[row] += coeff;
    }

    let solution = solve_complex(matrix, rhs).ok_or(VarcheckError::ExtensionSolveFailed)?;
    let mut g = PolyField::zero(n);
    for (exps, coeff) in indices.iter().zip(&solution) {
        g = g.add_ref(&monomial_field(n, exps, *coeff));
    }
    Ok(f.sub_ref(&shift.mul_ref(&g)))
}

/// All exponent vectors over `slots` variables with total degree <= `cap`,
/// in lexicographic order.
fn multi_indices(slots: usize, cap: u16) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut current = vec![0u16; slots];
    fill(&mut out, &mut current, 0, cap);
    out
}

fn fill(out: &mut Vec<Vec<u16>>, current: &mut Vec<u16>, slot: usize, budget: u16) {
    if slot == current.len() {
        out.push(current.clone());
        return;
    }
    for d in 0..=budget {
        current[slot] = d;
        fill(out, current, slot + 1, budget - d);
    }
    current[slot] = 0;
}

/// Dense LU solve with partial pivoting over complex scalars. Returns
/// `None` when a pivot degenerates relative to the largest entry.
fn solve_complex<T: Real>(mut a: Vec<Vec<C<T>>>, mut b: Vec<C<T>>) -> Option<Vec<C<T>>> {
    let m = b.len();
    let magnitude = |c: C<T>| -> T { c.re.abs().max(c.im.abs()) };
    let overall = a
        .iter()
        .flat_map(|row| row.iter())
        .map(|&c| magnitude(c))
        .fold(T::zero(), |x, y| x.max(y));
    let tiny = T::of(1e-12) * (T::one() + overall);
    for col in 0..m {
        let pivot_row = (col..m).max_by(|&r, &s| {
            magnitude(a[r][col])
                .partial_cmp(&magnitude(a[s][col]))
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if magnitude(a[pivot_row][col]) <= tiny {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col][col];
        let pivot_row = a[col].clone();
        for r in col + 1..m {
            let ratio = a[r][col] / pivot;
            if ratio.re == T::zero() && ratio.im == T::zero() {
                continue;
            }
            for (entry, &p) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *entry -= ratio * p;
            }
            b[r] = b[r] - ratio * b[col];
        }
    }
    let zero = C::new(T::zero(), T::zero());
    let mut x = vec![zero; m];
    for row in (0..m).rev() {
        let mut acc = b[row];
        for c in row + 1..m {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

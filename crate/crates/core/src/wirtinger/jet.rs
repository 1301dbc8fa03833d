//! Pointwise derivative data of a polynomial field.

use super::{PolyField, Wirtinger};
use crate::hessalg::HermitianMatrix;
use crate::scalar::{Real, C};
use num_complex::Complex;

/// Third-order mixed Wirtinger derivatives at a point, indexed by `(i, j, k)`:
/// `holo` holds `d^3 u / dz_k dzbar_j dz_i`, `anti` holds
/// `d^3 u / dzbar_k dzbar_j dz_i`.
#[derive(Clone, Debug)]
pub struct ThirdDerivatives<T> {
    n: usize,
    holo: Vec<C<T>>,
    anti: Vec<C<T>>,
}

impl<T: Real> ThirdDerivatives<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `d^3 u / dz_k dzbar_j dz_i`
    pub fn holo(&self, i: usize, j: usize, k: usize) -> C<T> {
        self.holo[(i * self.n + j) * self.n + k]
    }

    /// `d^3 u / dzbar_k dzbar_j dz_i`
    pub fn anti(&self, i: usize, j: usize, k: usize) -> C<T> {
        self.anti[(i * self.n + j) * self.n + k]
    }
}

/// Value and derivatives of a field at one point. Real data is in the
/// coordinates `(x_1, y_1, ..., x_n, y_n)`; `complex_hessian[i][j]` is the
/// coordinate `d^2 u / dz_i dzbar_j`.
#[derive(Clone, Debug)]
pub struct FieldJet<T> {
    pub value: T,
    /// Length 2n.
    pub real_gradient: Vec<T>,
    /// Row-major (2n) x (2n), exactly symmetric.
    pub real_hessian: Vec<T>,
    /// `du/dz_i`, length n.
    pub dz: Vec<C<T>>,
    /// `du/dzbar_i`, length n.
    pub dzbar: Vec<C<T>>,
    pub complex_hessian: HermitianMatrix<T>,
    pub third: Option<ThirdDerivatives<T>>,
}

impl<T: Real> FieldJet<T> {
    pub fn n(&self) -> usize {
        self.dz.len()
    }

    /// Trace of the coordinate complex Hessian; equals a quarter of the
    /// real Laplacian.
    pub fn complex_laplacian(&self) -> T {
        self.complex_hessian.trace()
    }

    pub fn real_laplacian(&self) -> T {
        let m = self.real_gradient.len();
        (0..m).map(|c| self.real_hessian[c * m + c]).sum()
    }

    /// `self + s * other`, used to combine cached jets of basis fields.
    pub fn axpy(&self, s: T, other: &FieldJet<T>) -> FieldJet<T> {
        assert_eq!(self.n(), other.n(), "dimension mismatch");
        let zip_t = |a: &[T], b: &[T]| -> Vec<T> {
            a.iter().zip(b).map(|(&x, &y)| x + s * y).collect()
        };
        let zip_c = |a: &[C<T>], b: &[C<T>]| -> Vec<C<T>> {
            a.iter().zip(b).map(|(&x, &y)| x + y.scale(s)).collect()
        };
        let third = match (&self.third, &other.third) {
            (Some(a), Some(b)) => Some(ThirdDerivatives {
                n: a.n,
                holo: zip_c(&a.holo, &b.holo),
                anti: zip_c(&a.anti, &b.anti),
            }),
            _ => None,
        };
        FieldJet {
            value: self.value + s * other.value,
            real_gradient: zip_t(&self.real_gradient, &other.real_gradient),
            real_hessian: zip_t(&self.real_hessian, &other.real_hessian),
            dz: zip_c(&self.dz, &other.dz),
            dzbar: zip_c(&self.dzbar, &other.dzbar),
            complex_hessian: self
                .complex_hessian
                .add(&other.complex_hessian.scale(s))
                .expect("dimensions already checked"),
            third,
        }
    }
}

/// Precomputed derivative polynomials of one field, for repeated jet
/// evaluation over quadrature nodes.
pub struct JetEvaluator<T> {
    n: usize,
    value: PolyField<T>,
    /// 2n first partials.
    first: Vec<PolyField<T>>,
    /// Packed upper triangle of second partials, index `tri(a, b)` for a <= b.
    second: Vec<PolyField<T>>,
    third: Option<ThirdPolys<T>>,
}

struct ThirdPolys<T> {
    /// n^3 polynomials `d^3/dz_k dzbar_j dz_i`, flat `(i, j, k)`.
    holo: Vec<PolyField<T>>,
    /// n^3 polynomials `d^3/dzbar_k dzbar_j dz_i`.
    anti: Vec<PolyField<T>>,
}

fn tri(a: usize, b: usize) -> usize {
    debug_assert!(a <= b);
    b * (b + 1) / 2 + a
}

impl<T: Real> JetEvaluator<T> {
    pub fn new(u: &PolyField<T>) -> Self {
        Self::build(u, false)
    }

    pub fn with_third(u: &PolyField<T>) -> Self {
        Self::build(u, true)
    }

    fn build(u: &PolyField<T>, want_third: bool) -> Self {
        let n = u.n();
        let m = 2 * n;
        let first: Vec<_> = (0..m).map(|c| u.partial(c)).collect();
        let mut second = Vec::with_capacity(m * (m + 1) / 2);
        for b in 0..m {
            for p in &first[..=b] {
                second.push(p.partial(b));
            }
        }
        let third = want_third.then(|| {
            let dz: Vec<_> = (0..n).map(|i| u.wirtinger(i, Wirtinger::Holomorphic)).collect();
            let dzzb: Vec<Vec<_>> = dz
                .iter()
                .map(|p| (0..n).map(|j| p.wirtinger(j, Wirtinger::Antiholomorphic)).collect())
                .collect();
            let mut holo = Vec::with_capacity(n * n * n);
            let mut anti = Vec::with_capacity(n * n * n);
            for row in &dzzb {
                for p in row {
                    for k in 0..n {
                        holo.push(p.wirtinger(k, Wirtinger::Holomorphic));
                        anti.push(p.wirtinger(k, Wirtinger::Antiholomorphic));
                    }
                }
            }
            ThirdPolys { holo, anti }
        });
        Self { n, value: u.clone(), first, second, third }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn jet(&self, point: &[T]) -> FieldJet<T> {
        let n = self.n;
        let m = 2 * n;
        assert_eq!(point.len(), m, "point dimension mismatch");
        let value = self.value.eval_re(point);
        let real_gradient: Vec<T> = self.first.iter().map(|p| p.eval_re(point)).collect();
        let mut real_hessian = vec![T::zero(); m * m];
        for b in 0..m {
            for a in 0..=b {
                let v = self.second[tri(a, b)].eval_re(point);
                real_hessian[a * m + b] = v;
                real_hessian[b * m + a] = v;
            }
        }
        let (dz, dzbar, complex_hessian) =
            complex_parts(n, &real_gradient, &real_hessian);
        let third = self.third.as_ref().map(|t| ThirdDerivatives {
            n,
            holo: t.holo.iter().map(|p| p.eval(point)).collect(),
            anti: t.anti.iter().map(|p| p.eval(point)).collect(),
        });
        FieldJet { value, real_gradient, real_hessian, dz, dzbar, complex_hessian, third }
    }
}

/// Wirtinger first derivatives and coordinate complex Hessian from exact
/// real derivative data: with z_i = x_i + i y_i,
/// `u_{z_i} = (u_{x_i} - i u_{y_i}) / 2` and
/// `u_{z_i zbar_j} = ((u_{x_i x_j} + u_{y_i y_j}) + i (u_{x_i y_j} - u_{y_i x_j})) / 4`.
fn complex_parts<T: Real>(
    n: usize,
    grad: &[T],
    hess: &[T],
) -> (Vec<C<T>>, Vec<C<T>>, HermitianMatrix<T>) {
    let m = 2 * n;
    let half = T::of(0.5);
    let quarter = T::of(0.25);
    let dz: Vec<C<T>> = (0..n)
        .map(|i| Complex::new(grad[2 * i] * half, -grad[2 * i + 1] * half))
        .collect();
    let dzbar: Vec<C<T>> = dz.iter().map(|c| c.conj()).collect();
    let h = HermitianMatrix::from_fn(n, |i, j| {
        let xx = hess[(2 * i) * m + 2 * j];
        let yy = hess[(2 * i + 1) * m + 2 * j + 1];
        let xy = hess[(2 * i) * m + 2 * j + 1];
        let yx = hess[(2 * i + 1) * m + 2 * j];
        Complex::new((xx + yy) * quarter, (xy - yx) * quarter)
    });
    (dz, dzbar, h)
}

/// One-shot jet of `u` at `point`.
pub fn jet<T: Real>(u: &PolyField<T>, point: &[T], want_third: bool) -> FieldJet<T> {
    let ev = if want_third { JetEvaluator::with_third(u) } else { JetEvaluator::new(u) };
    ev.jet(point)
}

/// Trace of the coordinate complex Hessian of `u` at `point`
/// (a quarter of the real Laplacian).
pub fn complex_laplacian<T: Real>(u: &PolyField<T>, point: &[T]) -> T {
    jet(u, point, false).complex_laplacian()
}

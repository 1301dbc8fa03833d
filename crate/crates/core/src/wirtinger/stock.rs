//! Named library of real-valued test fields on C^n, plus seeded random
//! polynomials. Every field here is real-valued; names are stable and are
//! what the CLI accepts.

use super::PolyField;
use crate::scalar::Real;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct StockField<T> {
    pub name: &'static str,
    pub field: PolyField<T>,
}

/// Real part of the monomial `prod z_i^{a_i}`.
fn re_z_monomial<T: Real>(n: usize, exps: &[u32]) -> PolyField<T> {
    z_monomial(n, exps).re_part()
}

fn im_z_monomial<T: Real>(n: usize, exps: &[u32]) -> PolyField<T> {
    z_monomial(n, exps).im_part()
}

fn z_monomial<T: Real>(n: usize, exps: &[u32]) -> PolyField<T> {
    assert_eq!(exps.len(), n);
    let mut p = PolyField::constant_re(n, T::one());
    for (i, &a) in exps.iter().enumerate() {
        if a > 0 {
            p = p.mul_ref(&PolyField::z(n, i).pow(a));
        }
    }
    p
}

/// The standard test fields for a ball of the given radius. Requires
/// `n >= 2`; all returned fields are real-valued.
pub fn stock_fields<T: Real>(n: usize, radius: T) -> Vec<StockField<T>> {
    assert!(n >= 2, "stock fields are defined for n >= 2");
    let abs2 = PolyField::abs2(n);
    let bump = PolyField::constant_re(n, radius * radius).sub_ref(&abs2);
    let mut e_z1 = vec![0u32; n];
    e_z1[0] = 2;
    let mut e_z1z2 = vec![0u32; n];
    e_z1z2[0] = 1;
    e_z1z2[1] = 1;
    let mut e_z1sq_z2 = vec![0u32; n];
    e_z1sq_z2[0] = 2;
    e_z1sq_z2[1] = 1;
    let mut e_z1cube = vec![0u32; n];
    e_z1cube[0] = 3;
    vec![
        StockField { name: "abs2", field: abs2.clone() },
        StockField { name: "abs4", field: abs2.mul_ref(&abs2) },
        StockField {
            name: "x1_sq",
            field: PolyField::x(n, 0).mul_ref(&PolyField::x(n, 0)),
        },
        StockField { name: "re_z1_sq", field: re_z_monomial(n, &e_z1) },
        StockField { name: "im_z1_sq", field: im_z_monomial(n, &e_z1) },
        StockField { name: "re_z1_z2", field: re_z_monomial(n, &e_z1z2) },
        StockField { name: "re_z1sq_z2", field: re_z_monomial(n, &e_z1sq_z2) },
        StockField { name: "re_z1_cubed", field: re_z_monomial(n, &e_z1cube) },
        StockField { name: "bump", field: bump.clone() },
        StockField {
            name: "bump_x1",
            field: bump.mul_ref(&PolyField::x(n, 0)),
        },
        StockField {
            name: "bump_abs2",
            field: bump.mul_ref(&PolyField::abs2(n)),
        },
        StockField {
            name: "random4",
            field: random_polynomial(n, 4, 1234 + n as u64),
        },
    ]
}

pub fn stock_field_names() -> Vec<&'static str> {
    vec![
        "abs2", "abs4", "x1_sq", "re_z1_sq", "im_z1_sq", "re_z1_z2", "re_z1sq_z2",
        "re_z1_cubed", "bump", "bump_x1", "bump_abs2", "random4",
    ]
}

pub fn stock_field_by_name<T: Real>(name: &str, n: usize, radius: T) -> Option<PolyField<T>> {
    stock_fields(n, radius)
        .into_iter()
        .find(|s| s.name == name)
        .map(|s| s.field)
}

/// Seeded random real-coefficient polynomial of total degree <= `degree`
/// over the 2n real coordinates. Coefficients are uniform in [-1, 1];
/// the same seed gives the same field for every scalar type.
pub fn random_polynomial<T: Real>(n: usize, degree: u16, seed: u64) -> PolyField<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = PolyField::zero(n);
    let mut exps = vec![0u16; 2 * n];
    loop {
        let c: f64 = rng.gen_range(-1.0..1.0);
        p = p.add_ref(&monomial(n, &exps, T::of(c)));
        if !next_multi_index(&mut exps, degree) {
            break;
        }
    }
    p
}

fn monomial<T: Real>(n: usize, exps: &[u16], c: T) -> PolyField<T> {
    let mut p = PolyField::constant_re(n, c);
    for (coord, &d) in exps.iter().enumerate() {
        for _ in 0..d {
            p = p.mul_ref(&PolyField::coordinate(n, coord));
        }
    }
    p
}

/// Advance through all multi-indices of total degree <= `max_total` in
/// lexicographic order; returns false after the last one.
fn next_multi_index(exps: &mut [u16], max_total: u16) -> bool {
    let total: u16 = exps.iter().sum();
    for i in (0..exps.len()).rev() {
        let tail: u16 = exps[i + 1..].iter().sum();
        if total - tail < max_total {
            exps[i] += 1;
            for d in &mut exps[i + 1..] {
                *d = 0;
            }
            return true;
        }
    }
    false
}

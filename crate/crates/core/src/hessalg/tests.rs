use super::*;
use approx::assert_abs_diff_eq;
use num_complex::Complex64;

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Independent oracles.
// ---------------------------------------------------------------------------

/// Determinant by partial-pivot LU on a dense complex copy. Independent of
/// the Jacobi eigensolver and of the sigma_k recurrences.
fn det_lu(n: usize, entries: &[Complex64]) -> Complex64 {
    let mut m = entries.to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| {
                m[a * n + col]
                    .norm()
                    .partial_cmp(&m[b * n + col].norm())
                    .unwrap()
            })
            .unwrap();
        if m[pivot * n + col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for j in 0..n {
                m.swap(col * n + j, pivot * n + j);
            }
            det = -det;
        }
        det *= m[col * n + col];
        for row in (col + 1)..n {
            let f = m[row * n + col] / m[col * n + col];
            for j in col..n {
                let sub = f * m[col * n + j];
                m[row * n + j] -= sub;
            }
        }
    }
    det
}

/// det(xI - A) via LU, used to validate the spectrum without eigenvectors.
fn char_poly_at(a: &HermitianMatrix<f64>, x: f64) -> f64 {
    let n = a.n();
    let mut shifted = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            shifted[i * n + j] = -a.get(i, j);
        }
        shifted[i * n + i] += Complex64::new(x, 0.0);
    }
    let d = det_lu(n, &shifted);
    assert!(d.im.abs() < 1e-8 * (1.0 + d.re.abs()));
    d.re
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix<f64> {
    HermitianMatrix::from_fn(n, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Random matrix shifted into the positive-definite cone (subset of every
/// Gamma_k^+).
fn random_in_cone(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix<f64> {
    let a = random_hermitian(rng, n);
    let shift = -a.eigenvalues().min() + 0.2;
    let mut m = a;
    for i in 0..n {
        let d = m.get(i, i) + Complex64::new(shift, 0.0);
        m = {
            let mut entries = m.entries().to_vec();
            entries[i * n + i] = d;
            HermitianMatrix::symmetrize(n, entries)
        };
    }
    m
}

fn scaled_tol(base: f64, a: &HermitianMatrix<f64>, k: usize) -> f64 {
    base * (1.0 + a.frobenius_norm()).powi(k as i32)
}

// ---------------------------------------------------------------------------
// Spectrum.
// ---------------------------------------------------------------------------

#[test]
fn spectrum_of_diagonal_is_sorted_diagonal() {
    let a = HermitianMatrix::diag(&[1.0, -2.0, 5.0]);
    assert_eq!(a.eigenvalues().values(), &[5.0, 1.0, -2.0]);
}

#[test]
fn spectrum_of_known_complex_two_by_two() {
    let a = HermitianMatrix::from_entries(
        2,
        vec![c64(2.0, 0.0), c64(0.0, 1.0), c64(0.0, -1.0), c64(2.0, 0.0)],
    )
    .unwrap();
    let lam = a.eigenvalues();
    assert_abs_diff_eq!(lam.values()[0], 3.0, epsilon = 1e-12);
    assert_abs_diff_eq!(lam.values()[1], 1.0, epsilon = 1e-12);
}

#[test]
fn spectrum_matches_characteristic_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=6 {
        let a = random_hermitian(&mut rng, n);
        let lam = a.eigenvalues();
        for &x in &[0.37, -1.25, 2.0] {
            let from_spectrum: f64 = lam.values().iter().map(|&l| x - l).product();
            let from_det = char_poly_at(&a, x);
            assert_abs_diff_eq!(
                from_spectrum,
                from_det,
                epsilon = 1e-9 * (1.0 + from_det.abs())
            );
        }
    }
}

#[test]
fn trace_route_sigma_matches_spectral_sigma() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    for n in 1..=6 {
        for _ in 0..10 {
            let a = random_hermitian(&mut rng, n);
            let spectral = sigma_prefix(&a, n).unwrap();
            let traced = sigma_prefix_from_traces(&a, n).unwrap();
            for (s, t) in spectral.iter().zip(&traced) {
                assert_abs_diff_eq!(s, t, epsilon = 1e-9 * (1.0 + s.abs()));
            }
        }
    }
    assert!(matches!(
        sigma_prefix_from_traces(&HermitianMatrix::<f64>::identity(2), 3),
        Err(HessalgError::KOutOfRange { k: 3, n: 2 })
    ));
}

#[test]
fn spectrum_trace_and_frobenius_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in 1..=6 {
        let a = random_hermitian(&mut rng, n);
        let lam = a.eigenvalues();
        let tr: f64 = lam.values().iter().sum();
        assert_abs_diff_eq!(tr, a.trace(), epsilon = 1e-12 * (1.0 + n as f64));
        let fr: f64 = lam.values().iter().map(|l| l * l).sum();
        assert_abs_diff_eq!(
            fr,
            a.frobenius_norm().powi(2),
            epsilon = 1e-11 * (1.0 + fr.abs())
        );
    }
}

// ---------------------------------------------------------------------------
// sigma_k.
// ---------------------------------------------------------------------------

#[test]
fn sigma_examples() {
    assert_abs_diff_eq!(
        sigma_k(&HermitianMatrix::<f64>::identity(3), 1).unwrap(),
        3.0,
        epsilon = 1e-14
    );
    assert_abs_diff_eq!(
        sigma_k(&HermitianMatrix::diag(&[1.0, 2.0, 3.0]), 2).unwrap(),
        11.0,
        epsilon = 1e-13
    );
    let a = HermitianMatrix::from_entries(
        2,
        vec![c64(2.0, 0.0), c64(0.0, 1.0), c64(0.0, -1.0), c64(2.0, 0.0)],
    )
    .unwrap();
    assert_abs_diff_eq!(sigma_k(&a, 2).unwrap(), 3.0, epsilon = 1e-12);
    assert_eq!(sigma_k(&a, 0).unwrap(), 1.0);
    assert_eq!(
        sigma_k(&a, 3).unwrap_err(),
        HessalgError::KOutOfRange { k: 3, n: 2 }
    );
}

#[test]
fn sigma_n_equals_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 1..=4 {
        let a = random_hermitian(&mut rng, n);
        let det = det_lu(n, a.entries());
        assert!(det.im.abs() < 1e-10);
        assert_abs_diff_eq!(
            sigma_k(&a, n).unwrap(),
            det.re,
            epsilon = scaled_tol(1e-12, &a, n)
        );
    }
}

// ---------------------------------------------------------------------------
// Delta-formula reference and polarization.
// ---------------------------------------------------------------------------

#[test]
fn delta_hand_example() {
    // sigma_2 polarized of (diag(1,0), diag(0,1)) is 1/2: the only surviving
    // index pairs are (i,j) = (0,1) and (1,0) with sign +1 each, one of which
    // has a zero factor, giving (1/2!) * 1.
    let a = HermitianMatrix::diag(&[1.0, 0.0]);
    let b = HermitianMatrix::diag(&[0.0, 1.0]);
    assert_abs_diff_eq!(
        sigma_k_delta(&[a.clone(), b.clone()]).unwrap(),
        0.5,
        epsilon = 1e-14
    );
    assert_abs_diff_eq!(sigma_k_polarized(&[a, b]).unwrap(), 0.5, epsilon = 1e-13);
}

#[test]
fn delta_matches_plain_sigma_on_diagonal_arguments() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for n in 1..=4 {
        let a = random_hermitian(&mut rng, n);
        for k in 1..=n {
            let repeated = vec![a.clone(); k];
            let delta = sigma_k_delta(&repeated).unwrap();
            let plain = sigma_k(&a, k).unwrap();
            assert_abs_diff_eq!(delta, plain, epsilon = scaled_tol(1e-11, &a, k));
        }
    }
}

#[test]
fn polarized_matches_delta_on_distinct_arguments() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for n in 2..=4 {
        for k in 1..=n {
            let mats: Vec<_> = (0..k).map(|_| random_hermitian(&mut rng, n)).collect();
            let delta = sigma_k_delta(&mats).unwrap();
            let incl_excl = sigma_k_polarized(&mats).unwrap();
            assert_abs_diff_eq!(delta, incl_excl, epsilon = 1e-10 * (1.0 + delta.abs()));
        }
    }
}

#[test]
fn delta_oracle_rejects_large_dimension() {
    let a = HermitianMatrix::<f64>::identity(5);
    assert_eq!(
        sigma_k_delta(std::slice::from_ref(&a)).unwrap_err(),
        HessalgError::OracleLimit { n: 5, k: 1 }
    );
    let b = HermitianMatrix::<f64>::identity(4);
    assert!(matches!(
        sigma_k_delta(&vec![b; 5]).unwrap_err(),
        HessalgError::KOutOfRange { .. } | HessalgError::OracleLimit { .. }
    ));
}

#[test]
fn polarized_is_symmetric_in_arguments() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mats: Vec<_> = (0..3).map(|_| random_hermitian(&mut rng, 4)).collect();
    let reference = sigma_k_polarized(&mats).unwrap();
    let orders: [[usize; 3]; 3] = [[1, 0, 2], [2, 1, 0], [1, 2, 0]];
    for order in orders {
        let shuffled: Vec<_> = order.iter().map(|&i| mats[i].clone()).collect();
        assert_abs_diff_eq!(
            sigma_k_polarized(&shuffled).unwrap(),
            reference,
            epsilon = 1e-11 * (1.0 + reference.abs())
        );
    }
}

#[test]
fn polarized_is_multilinear_in_first_slot() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let a = random_hermitian(&mut rng, 3);
    let b = random_hermitian(&mut rng, 3);
    let c = random_hermitian(&mut rng, 3);
    let lhs = sigma_k_polarized(&[a.add(&b.scale(2.0)).unwrap(), c.clone()]).unwrap();
    let rhs = sigma_k_polarized(&[a, c.clone()]).unwrap()
        + 2.0 * sigma_k_polarized(&[b, c]).unwrap();
    assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-11 * (1.0 + rhs.abs()));
}

// ---------------------------------------------------------------------------
// Newton tensors.
// ---------------------------------------------------------------------------

#[test]
fn newton_examples() {
    let a = HermitianMatrix::diag(&[1.0, 2.0]);
    assert_eq!(
        newton_tensor(&a, 0).unwrap(),
        HermitianMatrix::identity(2)
    );
    let t1 = newton_tensor(&a, 1).unwrap();
    assert_abs_diff_eq!(t1.get(0, 0).re, 2.0, epsilon = 1e-14);
    assert_abs_diff_eq!(t1.get(1, 1).re, 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(t1.get(0, 1).norm(), 0.0, epsilon = 1e-14);

    let b = HermitianMatrix::diag(&[1.0, 2.0, 3.0]);
    assert_abs_diff_eq!(
        newton_tensor(&b, 1).unwrap().trace(),
        12.0,
        epsilon = 1e-13
    );
}

#[test]
fn newton_of_identity_is_binomial_multiple() {
    for n in 1..=5usize {
        for k in 1..=n {
            let t = newton_tensor(&HermitianMatrix::<f64>::identity(n), k - 1).unwrap();
            let expect = binomial(n - 1, k - 1);
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { expect } else { 0.0 };
                    assert_abs_diff_eq!(t.get(i, j).re, want, epsilon = 1e-11);
                    assert_abs_diff_eq!(t.get(i, j).im, 0.0, epsilon = 1e-11);
                }
            }
        }
    }
}

#[test]
fn newton_top_tensor_vanishes() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for n in 1..=4 {
        let a = random_hermitian(&mut rng, n);
        let t = newton_tensor(&a, n).unwrap();
        assert!(t.max_abs_entry() <= scaled_tol(1e-11, &a, n));
    }
}

#[test]
fn newton_matches_delta_formula_entrywise() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for n in 2..=3 {
        for k in 0..=n {
            let a = random_hermitian(&mut rng, n);
            if k > 0 {
                let gap = newton_tensor(&a, k)
                    .unwrap()
                    .max_abs_diff(&newton_tensor_delta(&vec![a.clone(); k]).unwrap())
                    .unwrap();
                assert!(gap <= 1e-12 * (1.0 + a.frobenius_norm()).powi(k as i32 + 1));
            }
        }
    }
    let a4 = random_hermitian(&mut rng, 4);
    let gap = newton_tensor(&a4, 2)
        .unwrap()
        .max_abs_diff(&newton_tensor_delta(&vec![a4.clone(); 2]).unwrap())
        .unwrap();
    assert!(gap <= 1e-12 * (1.0 + a4.frobenius_norm()).powi(3));
}

#[test]
fn newton_trace_and_contraction_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for n in 2..=6 {
        let a = random_hermitian(&mut rng, n);
        for k in 1..=n {
            let sig = sigma_k(&a, k).unwrap();
            let tol = scaled_tol(1e-10, &a, k) * (1.0 + sig.abs());
            let t = newton_tensor(&a, k).unwrap();
            assert_abs_diff_eq!(t.trace(), (n - k) as f64 * sig, epsilon = tol);

            let t_prev = newton_tensor(&a, k - 1).unwrap();
            let mut contraction = Complex64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    contraction += a.get(i, j) * t_prev.get(j, i);
                }
            }
            assert!(contraction.im.abs() < tol);
            assert_abs_diff_eq!(contraction.re / k as f64, sig, epsilon = tol);
        }
    }
}

#[test]
fn newton_polarized_diagonal_and_psd() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for n in 2..=4 {
        for k in 1..=(n - 1) {
            let a = random_hermitian(&mut rng, n);
            let gap = newton_tensor_polarized(&vec![a.clone(); k])
                .unwrap()
                .max_abs_diff(&newton_tensor(&a, k).unwrap())
                .unwrap();
            assert!(gap <= scaled_tol(1e-10, &a, k + 1));
        }
    }
    // Arguments in Gamma_{k+1}^+ give a PSD polarized Newton tensor.
    for _ in 0..100 {
        let n = 3;
        let k = 2;
        let mats: Vec<_> = (0..k).map(|_| random_in_cone(&mut rng, n)).collect();
        let t = newton_tensor_polarized(&mats).unwrap();
        assert!(t.eigenvalues().min() >= -1e-10 * (1.0 + t.frobenius_norm()));
    }
}

#[test]
fn newton_matches_delta_on_distinct_arguments() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    for n in 2..=3 {
        for k in 1..=(n - 1) {
            let mats: Vec<_> = (0..k).map(|_| random_hermitian(&mut rng, n)).collect();
            let gap = newton_tensor_polarized(&mats)
                .unwrap()
                .max_abs_diff(&newton_tensor_delta(&mats).unwrap())
                .unwrap();
            assert!(gap <= 1e-11);
        }
    }
}

// ---------------------------------------------------------------------------
// Cones and concavity.
// ---------------------------------------------------------------------------

#[test]
fn cone_examples() {
    let id = HermitianMatrix::<f64>::identity(3);
    let report = cone_membership(&id, 3).unwrap();
    assert!(report.in_cone);
    assert_eq!(report.sigmas.len(), 3);
    assert_abs_diff_eq!(report.sigmas[2], 1.0, epsilon = 1e-13);

    let a = HermitianMatrix::diag(&[3.0, 1.0, -0.5]);
    // sigma_1 = 3.5, sigma_2 = 1, sigma_3 = -1.5: in Gamma_2 but not Gamma_3.
    assert!(cone_membership(&a, 2).unwrap().in_cone);
    assert!(!cone_membership(&a, 3).unwrap().in_cone);
    assert!(!cone_membership(&HermitianMatrix::diag(&[-1.0, -1.0]), 1)
        .unwrap()
        .in_cone);
    assert!(cone_membership(&id, 0).is_err());
    assert!(cone_membership(&id, 4).is_err());
}

#[test]
fn cone_membership_is_nested() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..50 {
        let n = rng.gen_range(2..=5);
        let a = random_hermitian(&mut rng, n);
        let reports: Vec<bool> = (1..=n)
            .map(|k| cone_membership(&a, k).unwrap().in_cone)
            .collect();
        for k in 1..n {
            // Gamma_{k+1} subset of Gamma_k.
            assert!(!reports[k] || reports[k - 1]);
        }
    }
}

#[test]
fn sigma_root_is_midpoint_concave_on_cone() {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    for _ in 0..100 {
        let n = rng.gen_range(2..=4);
        let k = rng.gen_range(1..=n);
        let a = random_in_cone(&mut rng, n);
        let b = random_in_cone(&mut rng, n);
        let mid = a.add(&b).unwrap().scale(0.5);
        let root = |m: &HermitianMatrix<f64>| sigma_k(m, k).unwrap().powf(1.0 / k as f64);
        assert!(root(&mid) >= 0.5 * (root(&a) + root(&b)) - 1e-9);
    }
}

// ---------------------------------------------------------------------------
// Linearization (finite-difference oracle for the Newton tensor).
// ---------------------------------------------------------------------------

#[test]
fn linearization_residual_small() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let a3 = random_hermitian(&mut rng, 3);
    assert!(linearization_residual(&a3, 1, 1e-5).unwrap() < 1e-8);

    let a5 = random_hermitian(&mut rng, 5);
    let tol = 1e-6 * (1.0 + a5.frobenius_norm()).powi(2);
    assert!(linearization_residual(&a5, 2, 1e-5).unwrap() < tol);

    assert!(linearization_residual(&a3, 3, 1e-5).is_err());
}

// ---------------------------------------------------------------------------
// Construction and validation.
// ---------------------------------------------------------------------------

#[test]
fn constructor_rejects_non_hermitian() {
    let err = HermitianMatrix::from_entries(
        2,
        vec![c64(1.0, 0.0), c64(2.0, 0.0), c64(3.0, 0.0), c64(4.0, 0.0)],
    )
    .unwrap_err();
    assert!(matches!(err, HessalgError::NotHermitian { .. }));

    let err = HermitianMatrix::from_entries(2, vec![c64(1.0, 0.0)]).unwrap_err();
    assert!(matches!(err, HessalgError::BadEntryCount { got: 1, n: 2 }));
}

#[test]
fn symmetrization_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let a = random_hermitian(&mut rng, 4);
    for i in 0..4 {
        assert_eq!(a.get(i, i).im, 0.0);
        for j in 0..4 {
            assert_eq!(a.get(i, j), a.get(j, i).conj());
        }
    }
}

#[test]
fn works_in_single_precision() {
    let a = HermitianMatrix::<f32>::diag(&[1.0, 2.0, 3.0]);
    let s2 = sigma_k(&a, 2).unwrap();
    assert!((s2 - 11.0).abs() < 1e-4);
    let t = newton_tensor(&a, 1).unwrap();
    assert!((t.trace() - 12.0).abs() < 1e-4);
}

#[test]
fn seeded_generators_are_deterministic_and_well_formed() {
    let a = random_hermitian::<f64>(4, 7);
    let b = random_hermitian::<f64>(4, 7);
    assert_eq!(a.entries(), b.entries());
    for i in 0..4 {
        assert_eq!(a.get(i, i).im, 0.0);
        for j in 0..4 {
            assert_eq!(a.get(i, j), a.get(j, i).conj());
        }
    }
    assert_ne!(a.entries(), random_hermitian::<f64>(4, 8).entries());

    let c = random_in_cone::<f64>(4, 7);
    assert!(cone_membership(&c, 4).unwrap().in_cone);
    assert!(c.eigenvalues().min() > 0.1);
}

// ---------------------------------------------------------------------------
// Property tests.
// ---------------------------------------------------------------------------

fn arb_hermitian(n: usize) -> impl Strategy<Value = HermitianMatrix<f64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |raw| {
        let entries = raw.into_iter().map(|(re, im)| c64(re, im)).collect();
        HermitianMatrix::symmetrize(n, entries)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn prop_sigma_one_is_trace(a in arb_hermitian(4)) {
        let s = sigma_k(&a, 1).unwrap();
        prop_assert!((s - a.trace()).abs() < 1e-11 * (1.0 + a.trace().abs()));
    }

    #[test]
    fn prop_eigenvalue_shift(a in arb_hermitian(3), c in -2.0f64..2.0) {
        let shifted = a.add(&HermitianMatrix::identity(3).scale(c)).unwrap();
        let lam: Vec<f64> = a.eigenvalues().values().to_vec();
        let lam_shifted: Vec<f64> = shifted.eigenvalues().values().to_vec();
        for (l, ls) in lam.iter().zip(&lam_shifted) {
            prop_assert!((l + c - ls).abs() < 1e-11 * (1.0 + l.abs() + c.abs()));
        }
    }

    #[test]
    fn prop_polarized_diagonal_consistency(a in arb_hermitian(3), k in 1usize..=3) {
        let plain = sigma_k(&a, k).unwrap();
        let polarized = sigma_k_polarized(&vec![a.clone(); k]).unwrap();
        prop_assert!((plain - polarized).abs() < 1e-10 * (1.0 + plain.abs()));
    }

    #[test]
    fn prop_sigma_homogeneous(a in arb_hermitian(3), s in 0.1f64..3.0) {
        for k in 1..=3usize {
            let lhs = sigma_k(&a.scale(s), k).unwrap();
            let rhs = s.powi(k as i32) * sigma_k(&a, k).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()));
        }
    }
}

mod common;

use banded_inverse::invapprox::{
    bdo_inverse, general_error_bound, neumann_general, neumann_spd, spd_error_bound,
    terms_for_tolerance, Construction, Rigor, SeriesMode,
};
use banded_inverse::matcore::{band_truncate, off_band};
use banded_inverse::spectral::{user_bounds, DEFAULT_SLACK};
use banded_inverse::{BandedMatrix, DenseMatrix, Error};
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn achieved(a: &DenseMatrix, approx: &BandedMatrix) -> f64 {
    norm_oracle(&dense_sub(&gj_inverse(a), &approx.to_dense()))
}

fn sound(err: f64, bound: f64) -> bool {
    err <= bound + 1e-9 * (1.0 + bound)
}

#[test]
fn tridiagonal_spd_certificates_hold() {
    let a = BandedMatrix::toeplitz(20, &[-1.0, 4.0, -1.0]).unwrap();
    for n in 0..=8 {
        let c = neumann_spd(&a, n, None).unwrap();
        let err = achieved(&a.to_dense(), &c.approx);
        assert!(sound(err, c.error_bound), "n = {n}: {err} > {}", c.error_bound);
        assert_eq!(c.construction, Construction::Spd);
        assert_eq!(c.rigor, Rigor::FloatingPointConservative);
    }
}

#[test]
fn bidiagonal_general_certificates_hold() {
    let n = 20;
    let a = BandedMatrix::from_diagonals(n, 1, vec![vec![0.0; n - 1], vec![4.0; n], vec![1.0; n - 1]])
        .unwrap();
    for terms in 0..=6 {
        let c = neumann_general(&a, terms, None).unwrap();
        let err = achieved(&a.to_dense(), &c.approx);
        assert!(sound(err, c.error_bound), "n = {terms}: {err} > {}", c.error_bound);
    }
}

fn decaying_example(n: usize) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |i, j| {
        (if i == j { 2.0 } else { 0.0 }) + 0.5f64.powi(i.abs_diff(j) as i32 + 1)
    })
}

#[test]
fn bdo_example_certificate_holds() {
    let a = decaying_example(30);
    let c = bdo_inverse(&a, 4, 3, None).unwrap();
    let err = achieved(&a, &c.approx);
    assert!(sound(err, c.error_bound), "{err} > {}", c.error_bound);
    let d = c.bdo.unwrap();
    assert!(d.epsilon_k < c.bounds_used.m_lo / 2.0);
    assert!((d.truncation_term + d.series_term - c.error_bound).abs() <= 1e-15 * c.error_bound);
}

#[test]
fn bdo_threshold_matches_scan() {
    // Off-band mass large enough that small k is inadmissible.
    let n = 30;
    let a = DenseMatrix::from_fn(n, n, |i, j| {
        (if i == j { 0.4 } else { 0.0 }) + 0.8f64.powi(i.abs_diff(j) as i32)
    });
    let (lo, _) = singular_extremes(&a);
    let half_m = lo * (1.0 - DEFAULT_SLACK) / 2.0;
    let scan = (0..n).find(|&k| k + 1 >= n || norm_oracle(&off_band(&a, k)) < half_m);
    let k_star = scan.expect("some k is admissible");
    assert!(k_star > 1);
    match bdo_inverse(&a, 1, 2, None) {
        Err(Error::TruncationTooCoarse { min_admissible, .. }) => {
            assert_eq!(min_admissible, Some(k_star));
        }
        other => panic!("expected a refusal, got {other:?}"),
    }
    assert!(bdo_inverse(&a, k_star, 2, None).is_ok());
}

#[test]
fn tolerance_inversion_is_minimal() {
    let mut r = rng(5);
    for _ in 0..200 {
        let m = r.random_range(0.1..5.0);
        let b = user_bounds(m, m * r.random_range(1.0..200.0)).unwrap();
        let tol = 10f64.powf(r.random_range(-12.0..0.0));
        for (mode, f) in [
            (SeriesMode::Spd, spd_error_bound as fn(&_, usize) -> f64),
            (SeriesMode::General, general_error_bound),
        ] {
            let n = terms_for_tolerance(&b, mode, tol).unwrap();
            assert!(f(&b, n) <= tol);
            if n > 0 {
                assert!(f(&b, n - 1) > tol);
            }
        }
    }
}

#[test]
fn supplied_exact_bounds_are_rigorous() {
    let a = BandedMatrix::toeplitz(10, &[0.0, 2.0, 0.0]).unwrap();
    let c = neumann_spd(&a, 0, Some(user_bounds(2.0, 2.0).unwrap())).unwrap();
    assert_eq!(c.rigor, Rigor::Rigorous);
    assert_eq!(c.error_bound, 0.0);
    assert_eq!(c.approx.to_dense(), DenseMatrix::identity(10).scale(0.5));
}

fn spd_instance() -> impl Strategy<Value = (BandedMatrix, usize)> {
    (any::<u64>(), 10usize..40, 0usize..=5, 1.5f64..100.0, 0usize..=10).prop_map(
        |(seed, n, k, kappa, terms)| (random_spd_banded(&mut rng(seed), n, k, kappa), terms),
    )
}

fn general_instance() -> impl Strategy<Value = (BandedMatrix, usize)> {
    (any::<u64>(), 10usize..40, 0usize..=4, 0usize..=8)
        .prop_map(|(seed, n, k, terms)| (random_general_banded(&mut rng(seed), n, k), terms))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn spd_certificate_sound((a, terms) in spd_instance()) {
        let c = neumann_spd(&a, terms, None).unwrap();
        let dense = a.to_dense();
        prop_assert!(sound(achieved(&dense, &c.approx), c.error_bound));
        prop_assert!(c.approx.effective_bandwidth() <= terms * a.half_bandwidth());
        prop_assert!(c.band_width == terms * a.half_bandwidth());
        prop_assert!(c.approx.to_dense().max_asymmetry().unwrap() <= 1e-12 * c.approx.to_dense().max_abs());
    }

    #[test]
    fn general_certificate_sound((a, terms) in general_instance()) {
        let c = neumann_general(&a, terms, None).unwrap();
        prop_assert!(sound(achieved(&a.to_dense(), &c.approx), c.error_bound));
        let k = a.half_bandwidth();
        prop_assert!(c.approx.effective_bandwidth() <= (2 * terms + 1) * k);
        prop_assert!(c.approx.effective_bandwidth() <= c.band_width.max(k));
    }

    #[test]
    fn bdo_on_banded_input_is_general((a, terms) in general_instance()) {
        let k = a.half_bandwidth();
        prop_assume!(k + 1 < a.size());
        let g = neumann_general(&a, terms, None).unwrap();
        let b = bdo_inverse(&a.to_dense(), k, terms, None).unwrap();
        prop_assert_eq!(&b.approx, &g.approx);
        prop_assert_eq!(b.error_bound.to_bits(), g.error_bound.to_bits());
        prop_assert_eq!(b.gamma.to_bits(), g.gamma.to_bits());
    }

    #[test]
    fn bdo_sound_and_monotone_in_k(c in 0.2f64..1.0, r in 0.2f64..0.8, n in 15usize..35, terms in 0usize..6) {
        let a = exp_decay(n, c, r);
        let mut last = f64::INFINITY;
        for k in 1..n - 1 {
            match bdo_inverse(&a, k, terms, None) {
                Ok(cert) => {
                    prop_assert!(sound(achieved(&a, &cert.approx), cert.error_bound));
                    prop_assert!(cert.error_bound <= last * (1.0 + 1e-12));
                    last = cert.error_bound;
                }
                Err(Error::TruncationTooCoarse { .. }) => prop_assert!(last.is_infinite()),
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }

    #[test]
    fn error_bound_decays_geometrically((a, _) in spd_instance()) {
        let bounds = neumann_spd(&a, 0, None).unwrap().bounds_used;
        let q = (bounds.kappa - 1.0) / (bounds.kappa + 1.0);
        for n in 0..8 {
            let ratio = spd_error_bound(&bounds, n + 1) / spd_error_bound(&bounds, n);
            prop_assert!(ratio.is_nan() || (ratio - q).abs() <= 1e-12);
        }
    }
}

#[test]
fn truncation_of_spd_keeps_symmetry() {
    let a = decaying_example(12);
    let b = band_truncate(&a, 3).unwrap();
    assert!(b.is_symmetric_exact());
    assert!(neumann_spd(&b, 4, None).is_ok());
}

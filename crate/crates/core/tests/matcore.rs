mod common;

use banded_inverse::matcore::{
    band_distance_bounds, band_truncate, diagonal_sup, metric_truncate, off_band, op_norm,
    permute_conjugate, power_norm, BandedMatrix, DenseMatrix, IndexMetric, Permutation,
};
use banded_inverse::textio::{parse_matrix, write_banded, write_coo, write_dense, MatrixText};
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn random_dense(seed: u64, n: usize) -> DenseMatrix {
    let mut r = rng(seed);
    DenseMatrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0))
}

#[test]
fn band_truncate_matches_loop() {
    let a = random_dense(1, 8);
    let b = band_truncate(&a, 3).unwrap().to_dense();
    for i in 0..8usize {
        for j in 0..8 {
            let want = if i.abs_diff(j) <= 3 { a.get(i, j) } else { 0.0 };
            assert_eq!(b.get(i, j), want);
        }
    }
}

#[test]
fn diagonal_sup_matches_loop() {
    let a = random_dense(2, 9);
    for d in -8i64..=8 {
        assert_eq!(diagonal_sup(&a, d).unwrap(), diag_sup(&a, d));
    }
}

#[test]
fn band_distance_against_norm_oracle() {
    let a = random_dense(3, 12);
    let bd = band_distance_bounds(&a, 2).unwrap();
    assert!(bd.lower <= bd.upper);
    let oracle = norm_oracle(&off_band(&a, 2));
    assert!((bd.upper - oracle).abs() <= 1e-10 * oracle);
}

#[test]
fn op_norm_against_oracle() {
    let a = random_dense(4, 20);
    let want = norm_oracle(&a);
    assert!((op_norm(&a).unwrap() - want).abs() <= 1e-10 * want);
    let p = power_norm(&a).unwrap();
    assert!((p - want).abs() <= 1e-6 * want);
}

#[test]
fn adjoint_is_transpose() {
    let a = random_dense(5, 7);
    let t = a.adjoint();
    for i in 0..7 {
        for j in 0..7 {
            assert_eq!(t.get(i, j), a.get(j, i));
        }
    }
    let b = BandedMatrix::from_dense(&band_truncate(&a, 2).unwrap().to_dense(), 2).unwrap();
    assert_eq!(b.adjoint().to_dense(), b.to_dense().transpose());
}

#[test]
fn grid_metric_keeps_neighbours() {
    let coords: Vec<f64> = (0..9).flat_map(|i| [(i % 3) as f64, (i / 3) as f64]).collect();
    let rho = IndexMetric::points(9, 2, coords.clone()).unwrap();
    let a = DenseMatrix::from_fn(9, 9, |i, j| 1.0 + (i * 9 + j) as f64);
    let b = metric_truncate(&a, &rho, 1.0).unwrap();
    for i in 0..9 {
        for j in 0..9 {
            let dx = coords[2 * i] - coords[2 * j];
            let dy = coords[2 * i + 1] - coords[2 * j + 1];
            let keep = dx.abs() + dy.abs() <= 1.0;
            assert_eq!(b.get(i, j), if keep { a.get(i, j) } else { 0.0 }, "({i}, {j})");
        }
    }
}

#[test]
fn permutation_round_trip_is_exact() {
    let a = random_dense(6, 10);
    let mut r = rng(7);
    let mut image: Vec<usize> = (0..10).collect();
    for i in (1..10).rev() {
        image.swap(i, r.random_range(0..=i));
    }
    let pi = Permutation::new(image).unwrap();
    let there = permute_conjugate(&a, &pi).unwrap();
    assert_eq!(permute_conjugate(&there, &pi.inverse()).unwrap(), a);
}

#[test]
fn power_norm_above_svd_limit_path() {
    // I + 5 u u^T with |u| = 1 has norm 6 and a well separated top singular value.
    let n = 2100;
    let u: Vec<f64> = (0..n).map(|i| (i % 7) as f64 - 3.0).collect();
    let len = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    let a = DenseMatrix::from_fn(n, n, |i, j| {
        5.0 * u[i] * u[j] / (len * len) + if i == j { 1.0 } else { 0.0 }
    });
    let got = op_norm(&a).unwrap();
    assert!((got - 6.0).abs() < 1e-9, "{got}");
}

fn dense_strategy(max_n: usize) -> impl Strategy<Value = DenseMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-10.0f64..10.0, n * n)
            .prop_map(move |v| DenseMatrix::new(n, n, v).unwrap())
    })
}

fn banded_strategy() -> impl Strategy<Value = (DenseMatrix, usize)> {
    (2usize..12).prop_flat_map(|n| {
        (0..n).prop_flat_map(move |k| {
            prop::collection::vec(-5.0f64..5.0, n * n).prop_map(move |v| {
                let a = DenseMatrix::new(n, n, v).unwrap();
                (band_truncate(&a, k).unwrap().to_dense(), k)
            })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dense_banded_round_trip((a, k) in banded_strategy()) {
        let b = BandedMatrix::from_dense(&a, k).unwrap();
        prop_assert_eq!(b.to_dense(), a);
    }

    #[test]
    fn op_norm_submultiplicative_and_adjoint(a in dense_strategy(8), seed in 0u64..1000) {
        let b = random_dense(seed, a.rows());
        let (na, nb) = (op_norm(&a).unwrap(), op_norm(&b).unwrap());
        let nab = op_norm(&a.matmul(&b).unwrap()).unwrap();
        prop_assert!(nab <= na * nb * (1.0 + 1e-9) + 1e-12);
        let nt = op_norm(&a.adjoint()).unwrap();
        prop_assert!((nt - na).abs() <= 1e-9 * na.max(1e-300));
    }

    #[test]
    fn band_distance_zero_iff_banded(a in dense_strategy(9), k in 0usize..9) {
        prop_assume!(k < a.rows());
        let bd = band_distance_bounds(&a, k).unwrap();
        prop_assert!(bd.lower <= bd.upper);
        let in_band = (0..a.rows())
            .all(|i| (0..a.rows()).all(|j| i.abs_diff(j) <= k || a.get(i, j) == 0.0));
        prop_assert_eq!(in_band, bd.lower == 0.0 && bd.upper == 0.0);
        let banded = band_truncate(&a, k).unwrap().to_dense();
        let again = band_distance_bounds(&banded, k).unwrap();
        prop_assert_eq!((again.lower, again.upper), (0.0, 0.0));
    }

    #[test]
    fn band_truncate_idempotent(a in dense_strategy(9), k in 0usize..9) {
        prop_assume!(k < a.rows());
        let once = band_truncate(&a, k).unwrap().to_dense();
        let twice = band_truncate(&once, k).unwrap().to_dense();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn index_metric_truncation_is_banding(a in dense_strategy(9), k in 0usize..9) {
        prop_assume!(k < a.rows());
        let rho = IndexMetric::index(a.rows());
        let m = metric_truncate(&a, &rho, k as f64).unwrap();
        prop_assert_eq!(m, band_truncate(&a, k).unwrap().to_dense());
    }

    #[test]
    fn banded_matmul_matches_dense((a, k) in banded_strategy(), seed in 0u64..1000) {
        let n = a.rows();
        let mut r = rng(seed);
        let k2 = r.random_range(0..n);
        let other = band_truncate(&DenseMatrix::from_fn(n, n, |_, _| r.random_range(-1.0..1.0)), k2)
            .unwrap();
        let prod = BandedMatrix::from_dense(&a, k).unwrap().matmul(&other).unwrap();
        let oracle = dense_mul(&a, &other.to_dense());
        let diff = dense_sub(&prod.to_dense(), &oracle);
        prop_assert!(diff.max_abs() <= 1e-12 * (1.0 + oracle.max_abs()));
    }

    #[test]
    fn text_formats_round_trip((a, k) in banded_strategy()) {
        let b = BandedMatrix::from_dense(&a, k).unwrap();
        prop_assert_eq!(parse_matrix(&write_banded(&b)).unwrap(), MatrixText::Banded(b));
        prop_assert_eq!(parse_matrix(&write_dense(&a)).unwrap(), MatrixText::Dense(a.clone()));
        prop_assert_eq!(parse_matrix(&write_coo(&a)).unwrap(), MatrixText::Coo(a));
    }
}

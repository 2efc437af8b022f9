//! Independent oracles and random instance generators for the test suites.
#![allow(dead_code)]

use banded_inverse::{BandedMatrix, DenseMatrix};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn to_na(a: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(a.rows(), a.cols(), |i, j| a.get(i, j))
}

/// Gauss-Jordan elimination with partial pivoting.
pub fn gj_inverse(a: &DenseMatrix) -> DenseMatrix {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n).map(|j| a.get(i, j)).collect();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs()))
            .unwrap();
        m.swap(c, piv);
        let p = m[c][c];
        assert!(p != 0.0, "singular matrix in oracle");
        for v in m[c].iter_mut() {
            *v /= p;
        }
        let pivot_row = m[c].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != c && row[c] != 0.0 {
                let f = row[c];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    DenseMatrix::from_fn(n, n, |i, j| m[i][n + j])
}

/// `sqrt(lambda_max(A^T A))` from a symmetric eigensolve.
pub fn norm_oracle(a: &DenseMatrix) -> f64 {
    let m = to_na(a);
    let g = m.transpose() * &m;
    let g = (&g + g.transpose()) * 0.5;
    SymmetricEigen::new(g)
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v))
        .sqrt()
}

/// Extreme eigenvalues of a symmetric matrix.
pub fn eig_extremes(a: &DenseMatrix) -> (f64, f64) {
    let e = SymmetricEigen::new(to_na(a)).eigenvalues;
    (
        e.iter().copied().fold(f64::INFINITY, f64::min),
        e.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    )
}

/// Extreme singular values via the eigenvalues of `A^T A`.
pub fn singular_extremes(a: &DenseMatrix) -> (f64, f64) {
    let m = to_na(a);
    let g = m.transpose() * &m;
    let (lo, hi) = eig_extremes(&DenseMatrix::from_fn(a.rows(), a.rows(), |i, j| {
        0.5 * (g[(i, j)] + g[(j, i)])
    }));
    (lo.max(0.0).sqrt(), hi.sqrt())
}

pub fn dense_mul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    DenseMatrix::from_fn(a.rows(), b.cols(), |i, j| {
        (0..a.cols()).map(|l| a.get(i, l) * b.get(l, j)).sum()
    })
}

pub fn dense_sub(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    DenseMatrix::from_fn(a.rows(), a.cols(), |i, j| a.get(i, j) - b.get(i, j))
}

/// Largest `|a_ij|` on diagonal `d = i - j`.
pub fn diag_sup(a: &DenseMatrix, d: i64) -> f64 {
    let n = a.rows() as i64;
    (0..n)
        .filter(|i| (0..n).contains(&(i - d)))
        .map(|i| a.get(i as usize, (i - d) as usize).abs())
        .fold(0.0, f64::max)
}

/// Symmetric banded matrix shifted so that its condition number is `kappa`.
pub fn random_spd_banded(rng: &mut ChaCha8Rng, n: usize, k: usize, kappa: f64) -> BandedMatrix {
    let mut vals = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n.min(i + k + 1) {
            let v: f64 = rng.random_range(-1.0..1.0);
            vals[i * n + j] = v;
            vals[j * n + i] = v;
        }
    }
    let b = DenseMatrix::new(n, n, vals).unwrap();
    let (lo, hi) = eig_extremes(&b);
    let shift = if hi - lo < 1e-12 {
        1.0 - lo
    } else {
        (hi - kappa * lo) / (kappa - 1.0)
    };
    let a = b.add(&DenseMatrix::identity(n).scale(shift)).unwrap();
    BandedMatrix::from_dense(&a, k).unwrap()
}

/// Non-symmetric banded matrix, diagonally shifted to be well conditioned.
pub fn random_general_banded(rng: &mut ChaCha8Rng, n: usize, k: usize) -> BandedMatrix {
    let mut vals = vec![0.0; n * n];
    for i in 0..n {
        for j in i.saturating_sub(k)..n.min(i + k + 1) {
            vals[i * n + j] = rng.random_range(-1.0..1.0);
        }
    }
    let b = DenseMatrix::new(n, n, vals).unwrap();
    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let shift = sign * norm_oracle(&b) * rng.random_range(1.05..2.0);
    let a = b.add(&DenseMatrix::identity(n).scale(shift)).unwrap();
    BandedMatrix::from_dense(&a, k).unwrap()
}

/// Random symmetric positive definite matrix `G G^T + eps I`.
pub fn random_spd(rng: &mut ChaCha8Rng, n: usize, eps: f64) -> DenseMatrix {
    let g = DenseMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    let s = dense_mul(&g, &g.transpose());
    DenseMatrix::from_fn(n, n, |i, j| {
        0.5 * (s.get(i, j) + s.get(j, i)) + if i == j { eps } else { 0.0 }
    })
}

/// `c r^{|i-j|}` with a dominant diagonal.
pub fn exp_decay(n: usize, c: f64, r: f64) -> DenseMatrix {
    DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0 + c
        } else {
            c * r.powi(i.abs_diff(j) as i32)
        }
    })
}

/// Gauss-Hermite nodes and weights for `int e^{-x^2} f(x) dx` (Golub-Welsch).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::zeros(n, n);
    for i in 1..n {
        let b = (i as f64 / 2.0).sqrt();
        j[(i, i - 1)] = b;
        j[(i - 1, i)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], std::f64::consts::PI.sqrt() * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// `int sqrt(f g)` for `f = N(0, s)` and `g = N(0, s0)` by tensor
/// Gauss-Hermite quadrature against the reference `N(0, (s + s0) / 2)`.
pub fn hellinger_quadrature(s: &DenseMatrix, s0: &DenseMatrix, nodes: usize) -> f64 {
    let d = s.rows();
    let na = |m: &DenseMatrix| to_na(m);
    let (sn, s0n) = (na(s), na(s0));
    let r = (&sn + &s0n) * 0.5;
    let l = r.clone().cholesky().expect("reference SPD").l();
    let si = sn.clone().try_inverse().unwrap();
    let s0i = s0n.clone().try_inverse().unwrap();
    let ri = r.clone().try_inverse().unwrap();
    let (det_s, det_s0, det_r) = (sn.determinant(), s0n.determinant(), r.determinant());
    // sqrt(f g) / phi_R = c * exp(-x^T (P - R^{-1}) x / 2)
    let p = (&si + &s0i) * 0.5;
    let q = p - ri;
    let c = det_r.sqrt() / (det_s * det_s0).powf(0.25);
    let (x, w) = gauss_hermite(nodes);
    let mut total = 0.0;
    let mut idx = vec![0usize; d];
    loop {
        let z = nalgebra::DVector::from_iterator(d, idx.iter().map(|&i| std::f64::consts::SQRT_2 * x[i]));
        let y = &l * z;
        let weight: f64 = idx.iter().map(|&i| w[i]).product();
        let e = (y.transpose() * &q * &y)[(0, 0)];
        total += weight * (-0.5 * e).exp();
        let mut pos = 0;
        loop {
            if pos == d {
                return c * total / std::f64::consts::PI.powf(d as f64 / 2.0);
            }
            idx[pos] += 1;
            if idx[pos] < nodes {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

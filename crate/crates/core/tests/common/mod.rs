//! Test-only oracles, independent of the library's evolution code.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use qwcnot::{Hamiltonian, WalkUnitary};
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::PI;

/// Fixed-step RK4 integration of dU/dt = -i H U from U(0) = I.
///
/// With U = A + iB and H real this is dA/dt = H B, dB/dt = -H A.
pub fn rk4_unitary(h: &DMatrix<f64>, t: f64, steps: usize) -> DMatrix<Complex64> {
    let n = h.nrows();
    let hm: Vec<f64> = (0..n * n).map(|k| h[(k / n, k % n)]).collect();
    // State layout: [A | B], each n*n row-major.
    let deriv = |y: &[f64], out: &mut [f64]| {
        let (a, b) = y.split_at(n * n);
        let (da, db) = out.split_at_mut(n * n);
        for r in 0..n {
            for c in 0..n {
                let (mut sa, mut sb) = (0.0, 0.0);
                for k in 0..n {
                    sa += hm[r * n + k] * b[k * n + c];
                    sb -= hm[r * n + k] * a[k * n + c];
                }
                da[r * n + c] = sa;
                db[r * n + c] = sb;
            }
        }
    };
    let m = 2 * n * n;
    let dt = t / steps as f64;
    let mut y = vec![0.0; m];
    for d in 0..n {
        y[d * n + d] = 1.0;
    }
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    for _ in 0..steps {
        deriv(&y, &mut k1);
        for i in 0..m {
            tmp[i] = y[i] + 0.5 * dt * k1[i];
        }
        deriv(&tmp, &mut k2);
        for i in 0..m {
            tmp[i] = y[i] + 0.5 * dt * k2[i];
        }
        deriv(&tmp, &mut k3);
        for i in 0..m {
            tmp[i] = y[i] + dt * k3[i];
        }
        deriv(&tmp, &mut k4);
        for i in 0..m {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    DMatrix::from_fn(n, n, |r, c| Complex64::new(y[r * n + c], y[n * n + r * n + c]))
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Random tridiagonal h with Gershgorin bound at most `bound`.
pub fn random_tridiagonal<R: Rng>(rng: &mut R, n: usize, bound: f64) -> Hamiltonian {
    let beta: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let kappa: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
    let h = Hamiltonian::new(beta, kappa).unwrap();
    let d = h.dense();
    let gersh = (0..n)
        .map(|r| (0..n).map(|c| d[(r, c)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let target = bound * rng.random_range(0.05..1.0);
    h.scaled(target / gersh)
}

pub fn four_pi() -> f64 {
    4.0 * PI
}

/// Haar-like random unitary from the QR factorization of a Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> WalkUnitary {
    let m = DMatrix::<Complex64>::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    WalkUnitary::from_matrix(m.qr().q()).unwrap()
}

/// Classical two-photon distribution from single-photon distributions:
/// P{k,l} = p_i(k) p_j(l) + p_i(l) p_j(k) for k != l, p_i(k) p_j(k) for k == l.
pub fn product_oracle(u: &WalkUnitary, i: usize, j: usize) -> Vec<((usize, usize), f64)> {
    let n = u.n_modes();
    let pi: Vec<f64> = (0..n).map(|k| u.matrix()[(k, i)].norm_sqr()).collect();
    let pj: Vec<f64> = (0..n).map(|k| u.matrix()[(k, j)].norm_sqr()).collect();
    let mut out = Vec::new();
    for k in 0..n {
        for l in k..n {
            let p = if k == l { pi[k] * pj[k] } else { pi[k] * pj[l] + pi[l] * pj[k] };
            out.push(((k, l), p));
        }
    }
    out
}

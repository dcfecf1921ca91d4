//! Shared test oracles, independent of the library's computation paths.
#![allow(dead_code)] // each test binary uses its own subset

use dlgg::mat::SymMatrix;
use dlgg::rng::RngStream;

/// Classical Jacobi eigenvalue iteration for small dense symmetric matrices.
pub fn jacobi_eigenvalues(m: &SymMatrix<f64>) -> Vec<f64> {
    let p = m.dim();
    let mut a = vec![vec![0.0f64; p]; p];
    for i in 0..p {
        for j in 0..p {
            a[i][j] = m.get(i, j);
        }
    }
    for _ in 0..200 {
        // largest off-diagonal element
        let (mut bi, mut bj, mut bv) = (0, 1, 0.0f64);
        for i in 0..p {
            for j in (i + 1)..p {
                if a[i][j].abs() > bv {
                    bv = a[i][j].abs();
                    bi = i;
                    bj = j;
                }
            }
        }
        if bv < 1e-14 {
            break;
        }
        let (i, j) = (bi, bj);
        let theta = 0.5 * (a[j][j] - a[i][i]) / a[i][j];
        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
        let c = 1.0 / (t * t + 1.0).sqrt();
        let s = t * c;
        for k in 0..p {
            let (aki, akj) = (a[k][i], a[k][j]);
            a[k][i] = c * aki - s * akj;
            a[k][j] = s * aki + c * akj;
        }
        for k in 0..p {
            let (aik, ajk) = (a[i][k], a[j][k]);
            a[i][k] = c * aik - s * ajk;
            a[j][k] = s * aik + c * ajk;
        }
    }
    (0..p).map(|i| a[i][i]).collect()
}

/// Determinant by cofactor expansion (exponential; fine for n <= 8).
pub fn det_cofactor(m: &SymMatrix<f64>) -> f64 {
    let p = m.dim();
    let rows: Vec<Vec<f64>> = (0..p).map(|i| (0..p).map(|j| m.get(i, j)).collect()).collect();
    det_rec(&rows)
}

fn det_rec(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 1 {
        return a[0][0];
    }
    let mut det = 0.0;
    for (j, &v) in a[0].iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let minor: Vec<Vec<f64>> = a[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(k, _)| *k != j)
                    .map(|(_, &x)| x)
                    .collect()
            })
            .collect();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        det += sign * v * det_rec(&minor);
    }
    det
}

/// A random symmetric matrix with entries in [-1, 1].
pub fn random_symmetric(p: usize, rng: &mut RngStream) -> SymMatrix<f64> {
    SymMatrix::from_fn(p, |_, _| 2.0 * rng.uniform::<f64>() - 1.0).unwrap()
}

/// A random well-conditioned PD matrix: A A^T / p + I/2.
pub fn random_pd(p: usize, rng: &mut RngStream) -> SymMatrix<f64> {
    let a: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..p).map(|_| rng.standard_normal::<f64>()).collect())
        .collect();
    SymMatrix::from_fn(p, |i, j| {
        let dot: f64 = (0..p).map(|k| a[i][k] * a[j][k]).sum();
        dot / p as f64 + if i == j { 0.5 } else { 0.0 }
    })
    .unwrap()
}

pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / n;
    (m, v)
}

/// Standard error of the sample variance from the empirical fourth moment.
pub fn se_of_variance(xs: &[f64]) -> f64 {
    let (m, v) = mean_var(xs);
    let n = xs.len() as f64;
    let m4 = xs.iter().map(|&x| (x - m).powi(4)).sum::<f64>() / n;
    ((m4 - v * v).max(0.0) / n).sqrt()
}

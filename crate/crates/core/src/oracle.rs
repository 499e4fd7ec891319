//! Brute-force reference implementations used by the test suites to check
//! the fast paths. Compiled only with the `oracle` feature; nothing here
//! shares code with the implementations it verifies.

use crate::tensor::{DenseTensor, Matrix};

/// Kronecker product, row-major.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out.set(i * b.rows() + k, j * b.cols() + l, a.get(i, j) * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Doolittle LU with partial pivoting; returns (lu, perm, sign).
fn lu_decompose(m: &Matrix) -> (Matrix, Vec<usize>, f64) {
    let n = m.rows();
    let mut lu = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| {
                lu.get(a, col)
                    .abs()
                    .partial_cmp(&lu.get(b, col).abs())
                    .unwrap()
            })
            .unwrap();
        if pivot != col {
            for c in 0..n {
                let tmp = lu.get(col, c);
                lu.set(col, c, lu.get(pivot, c));
                lu.set(pivot, c, tmp);
            }
            perm.swap(col, pivot);
            sign = -sign;
        }
        let d = lu.get(col, col);
        for r in col + 1..n {
            let f = lu.get(r, col) / d;
            lu.set(r, col, f);
            for c in col + 1..n {
                lu.set(r, c, lu.get(r, c) - f * lu.get(col, c));
            }
        }
    }
    (lu, perm, sign)
}

/// Log-determinant via LU; the determinant must be positive.
pub fn lu_logdet(m: &Matrix) -> f64 {
    let n = m.rows();
    let (lu, _, sign) = lu_decompose(m);
    let mut logdet = 0.0;
    let mut s = sign;
    for i in 0..n {
        let d = lu.get(i, i);
        s *= d.signum();
        logdet += d.abs().ln();
    }
    assert!(s > 0.0, "oracle logdet of a non-positive determinant");
    logdet
}

/// Solve `m x = b` via the LU factorization.
pub fn lu_solve(m: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = m.rows();
    let (lu, perm, _) = lu_decompose(m);
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[perm[i]];
        for j in 0..i {
            s -= lu.get(i, j) * y[j];
        }
        y[i] = s;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for j in i + 1..n {
            s -= lu.get(i, j) * x[j];
        }
        x[i] = s / lu.get(i, i);
    }
    x
}

/// Dense multivariate-normal log-density, everything through the LU path.
pub fn dense_mvn_logpdf(x: &[f64], mean: &[f64], cov: &Matrix) -> f64 {
    let n = x.len();
    let resid: Vec<f64> = x.iter().zip(mean).map(|(a, b)| a - b).collect();
    let solved = lu_solve(cov, &resid);
    let quad: f64 = resid.iter().zip(&solved).map(|(a, b)| a * b).sum();
    -0.5 * (n as f64) * (2.0 * std::f64::consts::PI).ln() - 0.5 * lu_logdet(cov) - 0.5 * quad
}

/// Triple-loop mode product.
pub fn naive_mode_product(t: &DenseTensor, mat: &Matrix, mode: usize) -> DenseTensor {
    let mut dims = t.dims().to_vec();
    dims[mode - 1] = mat.rows();
    DenseTensor::from_fn(dims, |idx| {
        let mut src = idx.to_vec();
        let mut acc = 0.0;
        for j in 0..mat.cols() {
            src[mode - 1] = j;
            acc += mat.get(idx[mode - 1], j) * t.get(&src).unwrap();
        }
        acc
    })
}

/// Direct transcription of the middle-mode empirical covariance: for each
/// (b, c) pair, sum over the last mode of replicate-averaged centered
/// cross products, divided by (m3 - 1). Means are recomputed inline.
pub fn empirical_sigma2_transcription(d: &DenseTensor) -> Matrix {
    let (m1, m2, m3) = (d.dims()[0], d.dims()[1], d.dims()[2]);
    let mut e = Matrix::zeros(m2, m2);
    for b in 0..m2 {
        for c in 0..m2 {
            let mut outer = 0.0;
            for t in 0..m3 {
                let mean_b: f64 =
                    (0..m1).map(|s| d.get(&[s, b, t]).unwrap()).sum::<f64>() / m1 as f64;
                let mean_c: f64 =
                    (0..m1).map(|s| d.get(&[s, c, t]).unwrap()).sum::<f64>() / m1 as f64;
                let mut inner = 0.0;
                for s in 0..m1 {
                    inner += (d.get(&[s, b, t]).unwrap() - mean_b)
                        * (d.get(&[s, c, t]).unwrap() - mean_c);
                }
                outer += inner / m1 as f64;
            }
            e.set(b, c, outer / (m3 as f64 - 1.0));
        }
    }
    e
}

/// Exhaustive shortest-interval search over every pair of sorted sample
/// positions covering at least `ceil(mass * N)` samples.
pub fn hpd_exhaustive(samples: &[f64], mass: f64) -> (f64, f64) {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let w = ((mass * n as f64).ceil() as usize).max(1);
    let mut best: Option<(f64, f64)> = None;
    for i in 0..n {
        for j in i..n {
            if j - i + 1 < w {
                continue;
            }
            let cand = (sorted[i], sorted[j]);
            best = match best {
                Some(b) if b.1 - b.0 <= cand.1 - cand.0 => Some(b),
                _ => Some(cand),
            };
        }
    }
    best.unwrap()
}

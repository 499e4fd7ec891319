//! Per-mode covariance matrices: SQE-kernel Gram matrices over design
//! points, the empirical middle-mode estimator, and the directly
//! parametrised 2x2 matrix. All of them factorize eagerly into a lower
//! Cholesky factor; inverses are never formed, every application of an
//! inverse goes through triangular solves.

use crate::error::{Error, Result};
use crate::tensor::{DenseTensor, Matrix};

/// Diagonal inflation applied before every Cholesky factorization:
/// `epsilon = scale * mean(diagonal)`. Kernel matrices over close design
/// points are numerically near-singular without it.
#[derive(Debug, Clone, Copy)]
pub struct Jitter {
    pub scale: f64,
}

impl Jitter {
    pub fn new(scale: f64) -> Self {
        Self { scale }
    }

    /// No inflation; factorization must succeed on the raw entries.
    pub fn none() -> Self {
        Self { scale: 0.0 }
    }
}

impl Default for Jitter {
    fn default() -> Self {
        Self { scale: 1e-8 }
    }
}

/// Symmetric positive-definite matrix with its lower Cholesky factor and
/// cached log-determinant. Immutable once built; safe to share across
/// threads.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    entries: Matrix,
    chol: Matrix,
    logdet: f64,
}

impl SpdMatrix {
    /// Validate symmetry, add jitter to the diagonal, factorize.
    ///
    /// The stored entries include the jitter, so `chol * chol^T`
    /// reproduces them exactly up to rounding.
    pub fn from_entries(mut entries: Matrix, jitter: Jitter) -> Result<Self> {
        let n = entries.rows();
        if entries.cols() != n {
            return Err(Error::ShapeMismatch {
                left: vec![entries.rows(), entries.cols()],
                right: vec![n, n],
            });
        }
        let scale = entries
            .data()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1.0);
        for i in 0..n {
            for j in 0..i {
                if (entries.get(i, j) - entries.get(j, i)).abs() > 1e-12 * scale {
                    return Err(Error::InvalidParameter(format!(
                        "matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        if jitter.scale > 0.0 {
            let mean_diag = (0..n).map(|i| entries.get(i, i)).sum::<f64>() / n as f64;
            let eps = jitter.scale * mean_diag;
            for i in 0..n {
                entries.set(i, i, entries.get(i, i) + eps);
            }
        }
        let chol = cholesky_lower(&entries)?;
        let logdet = 2.0 * (0..n).map(|i| chol.get(i, i).ln()).sum::<f64>();
        Ok(Self {
            entries,
            chol,
            logdet,
        })
    }

    pub fn order(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    /// Lower-triangular factor `A` with `A * A^T` equal to the entries.
    pub fn chol(&self) -> &Matrix {
        &self.chol
    }

    pub fn logdet(&self) -> f64 {
        self.logdet
    }

    /// Solve `entries * x = rhs` through the Cholesky factor (forward
    /// then back substitution).
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.order();
        if rhs.len() != n {
            return Err(Error::Precondition(format!(
                "rhs has length {} but matrix order is {n}",
                rhs.len()
            )));
        }
        let l = &self.chol;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = rhs[i];
            for j in 0..i {
                s -= l.get(i, j) * y[j];
            }
            y[i] = s / l.get(i, i);
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in i + 1..n {
                s -= l.get(j, i) * x[j];
            }
            x[i] = s / l.get(i, i);
        }
        Ok(x)
    }
}

fn cholesky_lower(a: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        for i in j..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return Err(Error::NotPositiveDefinite { pivot: j });
                }
                l.set(j, j, s.sqrt());
            } else {
                l.set(i, j, s / l.get(j, j));
            }
        }
    }
    Ok(l)
}

/// SQE kernel hyperparameters: the diagonal of `Q`, one reciprocal
/// squared-length-scale per input dimension. The global amplitude is fixed
/// to one here; overall scale lives in the directly learnt matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SqeKernelParams {
    q_diag: Vec<f64>,
}

impl SqeKernelParams {
    pub fn new(q_diag: Vec<f64>) -> Result<Self> {
        if q_diag.is_empty() {
            return Err(Error::InvalidParameter("q_diag must be nonempty".into()));
        }
        if q_diag.iter().any(|&q| !(q > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "q_diag entries must be > 0, got {q_diag:?}"
            )));
        }
        Ok(Self { q_diag })
    }

    pub fn q_diag(&self) -> &[f64] {
        &self.q_diag
    }

    pub fn input_dim(&self) -> usize {
        self.q_diag.len()
    }
}

/// Parameters of the order-2 directly learnt covariance matrix
/// `[[s11, rho*sqrt(s11*s22)], [., s22]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sigma3Params {
    pub sigma11: f64,
    pub sigma22: f64,
    pub rho: f64,
}

impl Sigma3Params {
    pub fn new(sigma11: f64, sigma22: f64, rho: f64) -> Result<Self> {
        if !(sigma11 > 0.0) || !(sigma22 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "diagonal entries must be > 0, got ({sigma11}, {sigma22})"
            )));
        }
        if !(rho.abs() < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "rho must lie in (-1, 1), got {rho}"
            )));
        }
        Ok(Self {
            sigma11,
            sigma22,
            rho,
        })
    }

    pub fn off_diagonal(&self) -> f64 {
        self.rho * (self.sigma11 * self.sigma22).sqrt()
    }
}

/// Gram matrix of the unit-amplitude SQE kernel over the design points:
/// entry (j,p) = exp(-sum_a q_a (s_j[a] - s_p[a])^2), unit diagonal.
pub fn build_sqe_matrix(
    points: &[Vec<f64>],
    params: &SqeKernelParams,
    jitter: Jitter,
) -> Result<SpdMatrix> {
    let n = points.len();
    if n == 0 {
        return Err(Error::Precondition("kernel needs at least one point".into()));
    }
    let d = params.input_dim();
    for (i, p) in points.iter().enumerate() {
        if p.len() != d {
            return Err(Error::InvalidParameter(format!(
                "point {i} has dimension {}, expected {d}",
                p.len()
            )));
        }
    }
    let mut m = Matrix::zeros(n, n);
    for j in 0..n {
        m.set(j, j, 1.0);
        for p in 0..j {
            let expo: f64 = params
                .q_diag
                .iter()
                .zip(points[j].iter().zip(&points[p]))
                .map(|(&q, (&a, &b))| q * (a - b) * (a - b))
                .sum();
            let v = (-expo).exp();
            m.set(j, p, v);
            m.set(p, j, v);
        }
    }
    SpdMatrix::from_entries(m, jitter)
}

/// Raw middle-mode empirical covariance of a rank-3 tensor, before jitter.
///
/// With `v(b)` the mode-2 slice at index b (an m1 x m3 matrix) and
/// `vbar(b)_t` the mean of its t-th column,
/// `e_bc = 1/(m3-1) * sum_t [ 1/m1 * sum_s (v(b)_st - vbar(b)_t)(v(c)_st - vbar(c)_t) ]`.
pub fn empirical_sigma2_entries(d: &DenseTensor) -> Result<Matrix> {
    let &[m1, m2, m3] = d.dims() else {
        return Err(Error::Precondition(format!(
            "empirical covariance needs a rank-3 tensor, got rank {}",
            d.rank()
        )));
    };
    if m3 < 2 {
        return Err(Error::Precondition(format!(
            "empirical covariance needs m3 >= 2, got {m3}"
        )));
    }
    // column means over the replicate mode: vbar[b][t]
    let mut vbar = vec![0.0; m2 * m3];
    for t in 0..m3 {
        for b in 0..m2 {
            let mut s_sum = 0.0;
            for s in 0..m1 {
                s_sum += d.data()[s + m1 * (b + m2 * t)];
            }
            vbar[b + m2 * t] = s_sum / m1 as f64;
        }
    }
    let mut e = Matrix::zeros(m2, m2);
    for t in 0..m3 {
        for b in 0..m2 {
            for c in 0..=b {
                let mut acc = 0.0;
                for s in 0..m1 {
                    let rb = d.data()[s + m1 * (b + m2 * t)] - vbar[b + m2 * t];
                    let rc = d.data()[s + m1 * (c + m2 * t)] - vbar[c + m2 * t];
                    acc += rb * rc;
                }
                let v = e.get(b, c) + acc / m1 as f64;
                e.set(b, c, v);
                e.set(c, b, v);
            }
        }
    }
    let norm = 1.0 / (m3 as f64 - 1.0);
    let mut out = e;
    for b in 0..m2 {
        for c in 0..m2 {
            out.set(b, c, out.get(b, c) * norm);
        }
    }
    Ok(out)
}

/// Middle-mode empirical covariance, jittered and factorized. It is a
/// plug-in constant while sampling; it only changes when the data does.
pub fn empirical_sigma2(d: &DenseTensor, jitter: Jitter) -> Result<SpdMatrix> {
    SpdMatrix::from_entries(empirical_sigma2_entries(d)?, jitter)
}

/// Order-2 covariance matrix from its direct parametrisation.
pub fn build_sigma3(p: &Sigma3Params, jitter: Jitter) -> Result<SpdMatrix> {
    let off = p.off_diagonal();
    let entries = Matrix::new(2, 2, vec![p.sigma11, off, off, p.sigma22])?;
    SpdMatrix::from_entries(entries, jitter)
}

/// Apply the inverse Cholesky factor of each mode's covariance:
/// `t x_1 A_1^-1 ... x_k A_k^-1`, computed by forward substitution along
/// each mode's fibers. Never forms an explicit inverse.
pub fn whiten(t: &DenseTensor, factors: &[&SpdMatrix]) -> Result<DenseTensor> {
    if factors.len() != t.rank() {
        return Err(Error::Precondition(format!(
            "expected {} factors for a rank-{} tensor, got {}",
            t.rank(),
            t.rank(),
            factors.len()
        )));
    }
    let mut data = t.data().to_vec();
    let dims = t.dims().to_vec();
    for (p, f) in factors.iter().enumerate() {
        let mode = p + 1;
        if f.order() != dims[p] {
            return Err(Error::ModeDimensionMismatch {
                mode,
                matrix_cols: f.order(),
                tensor_dim: dims[p],
            });
        }
        solve_lower_along_mode(&mut data, &dims, mode, f.chol());
    }
    DenseTensor::new(dims, data)
}

/// In-place forward substitution `L x = fiber` for every mode-`mode` fiber.
fn solve_lower_along_mode(data: &mut [f64], dims: &[usize], mode: usize, l: &Matrix) {
    let pre: usize = dims[..mode - 1].iter().product();
    let mid = dims[mode - 1];
    let post: usize = dims[mode..].iter().product();
    for q in 0..post {
        let base = pre * mid * q;
        for k in 0..pre {
            for i in 0..mid {
                let mut s = data[base + k + pre * i];
                for j in 0..i {
                    s -= l.get(i, j) * data[base + k + pre * j];
                }
                data[base + k + pre * i] = s / l.get(i, i);
            }
        }
    }
}

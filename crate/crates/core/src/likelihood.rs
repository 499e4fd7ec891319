//! Mean-tensor estimation and the tensor-normal log-likelihood, for the
//! training tensor and for the augmented tensor that appends the test
//! slice along the design mode.
//!
//! For a rank-3 tensor with `m = m1*m2*m3` entries and per-mode
//! covariance factors `Sigma_i = A_i A_i^T`, the log-density is
//!
//! ```text
//! -(m/2) ln 2pi - sum_i (m / (2 m_i)) ln|Sigma_i|
//!   - 1/2 || (d - mean) x_1 A_1^-1 x_2 A_2^-1 x_3 A_3^-1 ||^2
//! ```
//!
//! which equals the dense multivariate-normal log-density with covariance
//! `Sigma_3 (x) Sigma_2 (x) Sigma_1` on the vectorized tensor under the
//! crate's mode-1-fastest layout.

use crate::covariance::{
    build_sigma3, build_sqe_matrix, empirical_sigma2, whiten, Jitter, Sigma3Params, SpdMatrix,
    SqeKernelParams,
};
use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

const LN_2PI: f64 = 1.8378770664093453;

/// The learnable scalars of the separable covariance model, plus the
/// optional unknown input the test slice was realised at.
#[derive(Debug, Clone, PartialEq)]
pub struct GpParams {
    pub q11: f64,
    pub q22: f64,
    pub sigma3: Sigma3Params,
    pub s_test: Option<[f64; 2]>,
}

impl GpParams {
    pub fn new(q11: f64, q22: f64, sigma3: Sigma3Params) -> Self {
        Self {
            q11,
            q22,
            sigma3,
            s_test: None,
        }
    }

    pub fn with_s_test(mut self, s_test: [f64; 2]) -> Self {
        self.s_test = Some(s_test);
        self
    }

    pub fn kernel_params(&self) -> Result<SqeKernelParams> {
        SqeKernelParams::new(vec![self.q11, self.q22])
    }
}

/// A fully assembled model: mean tensor plus the three factorized
/// covariance matrices, orders matching the data modes.
#[derive(Debug, Clone)]
pub struct GpModel {
    pub mean: DenseTensor,
    pub sigma1: SpdMatrix,
    pub sigma2: SpdMatrix,
    pub sigma3: SpdMatrix,
    pub m_total: usize,
}

impl GpModel {
    pub fn new(
        mean: DenseTensor,
        sigma1: SpdMatrix,
        sigma2: SpdMatrix,
        sigma3: SpdMatrix,
    ) -> Result<Self> {
        let dims = mean.dims();
        if dims.len() != 3 {
            return Err(Error::Precondition(format!(
                "model mean must be rank 3, got rank {}",
                dims.len()
            )));
        }
        for (mode, order) in [sigma1.order(), sigma2.order(), sigma3.order()]
            .into_iter()
            .enumerate()
        {
            if order != dims[mode] {
                return Err(Error::ModeDimensionMismatch {
                    mode: mode + 1,
                    matrix_cols: order,
                    tensor_dim: dims[mode],
                });
            }
        }
        let m_total = mean.len();
        Ok(Self {
            mean,
            sigma1,
            sigma2,
            sigma3,
            m_total,
        })
    }

    /// Assemble the plug-in model for a training tensor: mode-1 replicate
    /// mean, SQE kernel over the design points, empirical middle-mode
    /// covariance, and the directly parametrised order-2 matrix.
    pub fn from_training(
        d: &DenseTensor,
        design: &[Vec<f64>],
        kernel: &SqeKernelParams,
        sigma3: &Sigma3Params,
        jitter: Jitter,
    ) -> Result<Self> {
        if d.rank() != 3 {
            return Err(Error::Precondition(format!(
                "training tensor must be rank 3, got rank {}",
                d.rank()
            )));
        }
        if design.len() != d.dims()[0] {
            return Err(Error::Precondition(format!(
                "design has {} points but tensor mode-1 order is {}",
                design.len(),
                d.dims()[0]
            )));
        }
        GpModel::new(
            estimate_mean(d)?,
            build_sqe_matrix(design, kernel, jitter)?,
            empirical_sigma2(d, jitter)?,
            build_sigma3(sigma3, jitter)?,
        )
    }
}

/// Replicate-average estimate of the mean tensor: slices along mode 1 are
/// averaged, and the result is constant along that mode.
pub fn estimate_mean(d: &DenseTensor) -> Result<DenseTensor> {
    if d.rank() == 0 {
        return Err(Error::Precondition("mean of a rank-0 tensor".into()));
    }
    let m1 = d.dims()[0];
    let rest: usize = d.dims()[1..].iter().product();
    let mut out = vec![0.0; d.len()];
    for q in 0..rest {
        let base = m1 * q;
        let mean = d.data()[base..base + m1].iter().sum::<f64>() / m1 as f64;
        out[base..base + m1].fill(mean);
    }
    DenseTensor::new(d.dims().to_vec(), out)
}

/// Tensor-normal log-density of an already centered tensor given the
/// per-mode covariance factors.
pub fn centered_log_likelihood(centered: &DenseTensor, factors: &[&SpdMatrix]) -> Result<f64> {
    let m = centered.len() as f64;
    let mut value = -0.5 * m * LN_2PI;
    for (p, f) in factors.iter().enumerate() {
        let term = -(m / (2.0 * f.order() as f64)) * f.logdet();
        if !term.is_finite() {
            return Err(Error::NonFinite {
                context: format!("log-determinant term for mode {}", p + 1),
            });
        }
        value += term;
    }
    let quad = whiten(centered, factors)?.frobenius_norm_sq();
    if !quad.is_finite() {
        return Err(Error::NonFinite {
            context: "whitened quadratic form".into(),
        });
    }
    Ok(value - 0.5 * quad)
}

/// Tensor-normal log-likelihood of a rank-3 tensor under `model`.
pub fn log_likelihood(d: &DenseTensor, model: &GpModel) -> Result<f64> {
    let centered = d.subtract(&model.mean)?;
    centered_log_likelihood(&centered, &[&model.sigma1, &model.sigma2, &model.sigma3])
}

/// Log-likelihood of the augmented tensor (training plus test slice along
/// mode 1). The kernel matrix is rebuilt over `design + s_test`, and the
/// mean and middle-mode covariance are re-estimated from the augmented
/// tensor itself.
pub fn log_likelihood_augmented(
    d_star: &DenseTensor,
    s_test: &[f64],
    design: &[Vec<f64>],
    kernel: &SqeKernelParams,
    sigma3: &Sigma3Params,
    jitter: Jitter,
) -> Result<f64> {
    if d_star.rank() != 3 {
        return Err(Error::Precondition(format!(
            "augmented tensor must be rank 3, got rank {}",
            d_star.rank()
        )));
    }
    if d_star.dims()[0] != design.len() + 1 {
        return Err(Error::Precondition(format!(
            "augmented tensor mode-1 order {} must be design size {} + 1",
            d_star.dims()[0],
            design.len()
        )));
    }
    let mut augmented_design = design.to_vec();
    augmented_design.push(s_test.to_vec());
    let model = GpModel::new(
        estimate_mean(d_star)?,
        build_sqe_matrix(&augmented_design, kernel, jitter)?,
        empirical_sigma2(d_star, jitter)?,
        build_sigma3(sigma3, jitter)?,
    )?;
    log_likelihood(d_star, &model)
}

//! Priors and the three log-posterior targets: GP parameters given
//! training data only, the joint over GP parameters and the unknown test
//! input given the augmented data, and the posterior predictive of the
//! test input at fixed (modal) GP parameters.
//!
//! Out-of-support points evaluate to negative infinity without touching
//! the likelihood; numerical failures inside the likelihood surface as
//! errors instead.

use crate::covariance::{
    build_sigma3, build_sqe_matrix, empirical_sigma2, Jitter, Sigma3Params, SpdMatrix,
    SqeKernelParams,
};
use crate::error::{Error, Result};
use crate::likelihood::{centered_log_likelihood, estimate_mean, GpParams};
use crate::tensor::DenseTensor;

/// Canonical parameter order shared by every scheme and trace column.
pub const PARAM_NAMES: [&str; 7] = ["s1", "s2", "q11", "q22", "sigma11", "sigma22", "rho"];

pub const IDX_S1: usize = 0;
pub const IDX_S2: usize = 1;
pub const IDX_Q11: usize = 2;
pub const IDX_Q22: usize = 3;
pub const IDX_SIGMA11: usize = 4;
pub const IDX_SIGMA22: usize = 5;
pub const IDX_RHO: usize = 6;

/// Which of the seven parameters a chain actually samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// GP parameters from training data alone (five unknowns).
    TrainOnly,
    /// Test input and GP parameters jointly (all seven).
    Joint,
    /// Test input only, GP parameters pinned at modal values (two).
    Predictive,
}

impl Scheme {
    pub fn active_mask(self) -> [bool; 7] {
        match self {
            Scheme::TrainOnly => [false, false, true, true, true, true, true],
            Scheme::Joint => [true; 7],
            Scheme::Predictive => [true, true, false, false, false, false, false],
        }
    }
}

/// Point in the seven-parameter space with its active mask. Inactive
/// components are carried along untouched by proposals.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    values: [f64; 7],
    active: [bool; 7],
}

impl ParamVector {
    pub fn new(values: [f64; 7], active: [bool; 7]) -> Self {
        Self { values, active }
    }

    pub fn training_scheme(q11: f64, q22: f64, sigma11: f64, sigma22: f64, rho: f64) -> Self {
        Self {
            values: [0.0, 0.0, q11, q22, sigma11, sigma22, rho],
            active: Scheme::TrainOnly.active_mask(),
        }
    }

    pub fn joint_scheme(
        s1: f64,
        s2: f64,
        q11: f64,
        q22: f64,
        sigma11: f64,
        sigma22: f64,
        rho: f64,
    ) -> Self {
        Self {
            values: [s1, s2, q11, q22, sigma11, sigma22, rho],
            active: Scheme::Joint.active_mask(),
        }
    }

    pub fn predictive_scheme(s1: f64, s2: f64) -> Self {
        Self {
            values: [s1, s2, 0.0, 0.0, 0.0, 0.0, 0.0],
            active: Scheme::Predictive.active_mask(),
        }
    }

    pub fn values(&self) -> &[f64; 7] {
        &self.values
    }

    pub fn active(&self) -> &[bool; 7] {
        &self.active
    }

    pub fn is_active(&self, idx: usize) -> bool {
        self.active[idx]
    }

    pub fn get(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    pub fn set(&mut self, idx: usize, value: f64) {
        self.values[idx] = value;
    }

    /// Names of the active components, in canonical order.
    pub fn active_names(&self) -> Vec<&'static str> {
        PARAM_NAMES
            .iter()
            .zip(&self.active)
            .filter_map(|(&n, &a)| a.then_some(n))
            .collect()
    }

    /// Values of the active components, in canonical order.
    pub fn active_values(&self) -> Vec<f64> {
        self.values
            .iter()
            .zip(&self.active)
            .filter_map(|(&v, &a)| a.then_some(v))
            .collect()
    }

    pub fn n_active(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    fn sigma3_params(&self) -> Result<Sigma3Params> {
        Sigma3Params::new(
            self.values[IDX_SIGMA11],
            self.values[IDX_SIGMA22],
            self.values[IDX_RHO],
        )
    }

    fn kernel_params(&self) -> Result<SqeKernelParams> {
        SqeKernelParams::new(vec![self.values[IDX_Q11], self.values[IDX_Q22]])
    }

    pub fn s_test(&self) -> [f64; 2] {
        [self.values[IDX_S1], self.values[IDX_S2]]
    }
}

/// Noninformative prior on the directly learnt covariance matrix, in
/// (sigma11, sigma22, rho) coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sigma3Prior {
    /// 1/sigma on each diagonal (flat in log-scale), uniform rho.
    #[default]
    FlatLog,
    /// Matrix Jeffreys |Sigma|^(-3/2) with the change-of-variables
    /// Jacobian sqrt(sigma11*sigma22) folded in:
    /// -ln s11 - ln s22 - 1.5 ln(1 - rho^2).
    Jeffreys,
}

/// Prior support bounds and the choice of noninformative prior for the
/// directly learnt covariance. All supports are open intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorSpec {
    pub q_bounds: [(f64, f64); 2],
    pub s_bounds: [(f64, f64); 2],
    pub sigma3_prior: Sigma3Prior,
}

impl Default for PriorSpec {
    fn default() -> Self {
        Self {
            q_bounds: [(0.0, 1e6); 2],
            s_bounds: [(1.7, 2.3), (0.0, std::f64::consts::FRAC_PI_2)],
            sigma3_prior: Sigma3Prior::default(),
        }
    }
}

impl PriorSpec {
    pub fn validate(&self) -> Result<()> {
        for &(l, u) in self.q_bounds.iter().chain(&self.s_bounds) {
            if !(l < u) {
                return Err(Error::InvalidParameter(format!(
                    "prior bounds must satisfy lower < upper, got ({l}, {u})"
                )));
            }
        }
        Ok(())
    }
}

fn log_uniform(x: f64, (l, u): (f64, f64)) -> f64 {
    if x > l && x < u {
        -(u - l).ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Sum of the active components' log-priors; negative infinity outside
/// any support (supports are open, so boundary values are excluded).
pub fn log_prior(p: &ParamVector, spec: &PriorSpec) -> f64 {
    let mut lp = 0.0;
    for (slot, bounds) in [(IDX_S1, spec.s_bounds[0]), (IDX_S2, spec.s_bounds[1])] {
        if p.is_active(slot) {
            lp += log_uniform(p.get(slot), bounds);
        }
    }
    for (slot, bounds) in [(IDX_Q11, spec.q_bounds[0]), (IDX_Q22, spec.q_bounds[1])] {
        if p.is_active(slot) {
            lp += log_uniform(p.get(slot), bounds);
        }
    }
    for slot in [IDX_SIGMA11, IDX_SIGMA22] {
        if p.is_active(slot) {
            let v = p.get(slot);
            lp += if v > 0.0 { -v.ln() } else { f64::NEG_INFINITY };
        }
    }
    if p.is_active(IDX_RHO) {
        let rho = p.get(IDX_RHO);
        lp += if rho.abs() < 1.0 {
            match spec.sigma3_prior {
                Sigma3Prior::FlatLog => -std::f64::consts::LN_2,
                Sigma3Prior::Jeffreys => -1.5 * (1.0 - rho * rho).ln(),
            }
        } else {
            f64::NEG_INFINITY
        };
    }
    lp
}

/// Scheme-A target: GP parameters given the training tensor.
///
/// The replicate mean and the empirical middle-mode covariance depend on
/// the data alone, so they are computed once here; the kernel matrix and
/// the order-2 matrix are rebuilt at every evaluation.
#[derive(Debug, Clone)]
pub struct TrainingTarget {
    centered: DenseTensor,
    sigma2: SpdMatrix,
    design: Vec<Vec<f64>>,
    prior: PriorSpec,
    jitter: Jitter,
}

impl TrainingTarget {
    pub fn new(
        d: &DenseTensor,
        design: &[Vec<f64>],
        prior: &PriorSpec,
        jitter: Jitter,
    ) -> Result<Self> {
        prior.validate()?;
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
        Ok(Self {
            centered: d.subtract(&estimate_mean(d)?)?,
            sigma2: empirical_sigma2(d, jitter)?,
            design: design.to_vec(),
            prior: prior.clone(),
            jitter,
        })
    }

    pub fn log_density(&self, p: &ParamVector) -> Result<f64> {
        let lp = log_prior(p, &self.prior);
        if lp == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        let sigma1 = build_sqe_matrix(&self.design, &p.kernel_params()?, self.jitter)?;
        let sigma3 = build_sigma3(&p.sigma3_params()?, self.jitter)?;
        Ok(lp + centered_log_likelihood(&self.centered, &[&sigma1, &self.sigma2, &sigma3])?)
    }
}

/// Scheme-B target: test input and GP parameters jointly, given the
/// augmented tensor (training plus test slice along mode 1).
#[derive(Debug, Clone)]
pub struct JointTarget {
    centered_star: DenseTensor,
    sigma2_star: SpdMatrix,
    design: Vec<Vec<f64>>,
    prior: PriorSpec,
    jitter: Jitter,
}

impl JointTarget {
    pub fn new(
        d_star: &DenseTensor,
        design: &[Vec<f64>],
        prior: &PriorSpec,
        jitter: Jitter,
    ) -> Result<Self> {
        prior.validate()?;
        check_augmented(d_star, design)?;
        Ok(Self {
            centered_star: d_star.subtract(&estimate_mean(d_star)?)?,
            sigma2_star: empirical_sigma2(d_star, jitter)?,
            design: design.to_vec(),
            prior: prior.clone(),
            jitter,
        })
    }

    pub fn log_density(&self, p: &ParamVector) -> Result<f64> {
        let lp = log_prior(p, &self.prior);
        if lp == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        let mut augmented = self.design.clone();
        augmented.push(p.s_test().to_vec());
        let sigma1 = build_sqe_matrix(&augmented, &p.kernel_params()?, self.jitter)?;
        let sigma3 = build_sigma3(&p.sigma3_params()?, self.jitter)?;
        Ok(lp
            + centered_log_likelihood(
                &self.centered_star,
                &[&sigma1, &self.sigma2_star, &sigma3],
            )?)
    }
}

/// Scheme-C target: posterior predictive of the test input at fixed GP
/// parameters (the modal values learnt from training data alone).
#[derive(Debug, Clone)]
pub struct PredictiveTarget {
    centered_star: DenseTensor,
    sigma2_star: SpdMatrix,
    sigma3_fixed: SpdMatrix,
    kernel_fixed: SqeKernelParams,
    design: Vec<Vec<f64>>,
    prior: PriorSpec,
    jitter: Jitter,
}

impl PredictiveTarget {
    pub fn new(
        d_star: &DenseTensor,
        design: &[Vec<f64>],
        fixed_gp: &GpParams,
        prior: &PriorSpec,
        jitter: Jitter,
    ) -> Result<Self> {
        prior.validate()?;
        check_augmented(d_star, design)?;
        Ok(Self {
            centered_star: d_star.subtract(&estimate_mean(d_star)?)?,
            sigma2_star: empirical_sigma2(d_star, jitter)?,
            sigma3_fixed: build_sigma3(&fixed_gp.sigma3, jitter)?,
            kernel_fixed: fixed_gp.kernel_params()?,
            design: design.to_vec(),
            prior: prior.clone(),
            jitter,
        })
    }

    pub fn log_density(&self, p: &ParamVector) -> Result<f64> {
        let lp = log_prior(p, &self.prior);
        if lp == f64::NEG_INFINITY {
            return Ok(f64::NEG_INFINITY);
        }
        let mut augmented = self.design.clone();
        augmented.push(p.s_test().to_vec());
        let sigma1 = build_sqe_matrix(&augmented, &self.kernel_fixed, self.jitter)?;
        Ok(lp
            + centered_log_likelihood(
                &self.centered_star,
                &[&sigma1, &self.sigma2_star, &self.sigma3_fixed],
            )?)
    }
}

fn check_augmented(d_star: &DenseTensor, design: &[Vec<f64>]) -> Result<()> {
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
    Ok(())
}

/// One-shot evaluation of the scheme-A target.
pub fn log_posterior_training(
    p: &ParamVector,
    d: &DenseTensor,
    design: &[Vec<f64>],
    spec: &PriorSpec,
    jitter: Jitter,
) -> Result<f64> {
    TrainingTarget::new(d, design, spec, jitter)?.log_density(p)
}

/// One-shot evaluation of the scheme-B target.
pub fn log_posterior_joint(
    p: &ParamVector,
    d_star: &DenseTensor,
    design: &[Vec<f64>],
    spec: &PriorSpec,
    jitter: Jitter,
) -> Result<f64> {
    JointTarget::new(d_star, design, spec, jitter)?.log_density(p)
}

/// One-shot evaluation of the scheme-C target.
pub fn log_posterior_predictive(
    p: &ParamVector,
    d_star: &DenseTensor,
    design: &[Vec<f64>],
    fixed_gp: &GpParams,
    spec: &PriorSpec,
    jitter: Jitter,
) -> Result<f64> {
    PredictiveTarget::new(d_star, design, fixed_gp, spec, jitter)?.log_density(p)
}

//! Tensor-variate Gaussian process modelling with separable (Kronecker)
//! covariance, and Bayesian inverse learning of a low-dimensional input
//! vector by Random-Walk Metropolis-Hastings.
//!
//! A rank-3 observable is modelled as one draw from a tensor-normal
//! distribution with one covariance matrix per mode: an SQE-kernel matrix
//! over the design points, an empirical estimate over the middle mode, and
//! a directly parametrised 2x2 matrix whose scale absorbs the kernel
//! amplitude. Three posterior targets are provided (training-only GP
//! parameters, joint GP + test input, and posterior predictive of the test
//! input at fixed GP parameters), all sampled with the same seeded
//! random-walk sampler. Chains are summarised by histograms, modal values
//! and shortest 95% highest-posterior-density intervals.
//!
//! ```
//! use tvgp::prelude::*;
//!
//! // Simulate a small training set over a polar design grid, then sample
//! // the posterior of the GP parameters given that data.
//! let grid = make_polar_grid(3, 3, (1.7, 2.3), (0.0, std::f64::consts::FRAC_PI_2)).unwrap();
//! let truth = GpParams::new(30.0, 8.0, Sigma3Params::new(1.0, 0.5, -0.1).unwrap());
//! let data = generate_dataset(&grid, &truth, 6, 2, 7).unwrap();
//!
//! let prior = PriorSpec::default();
//! let target = TrainingTarget::new(&data.training, &grid, &prior, Jitter::default()).unwrap();
//!
//! let init = ParamVector::training_scheme(20.0, 20.0, 1.0, 1.0, 0.0);
//! let cfg = ChainConfig::new(1, 2_000, 500, 1, init);
//! let trace = run_chain(|p| target.log_density(p), &cfg).unwrap();
//! let q11_interval = hpd(&trace.component("q11").unwrap(), 0.95).unwrap();
//! assert!(q11_interval.lower <= q11_interval.upper);
//! ```

pub mod analysis;
pub mod covariance;
pub mod error;
pub mod io;
pub mod likelihood;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod posterior;
pub mod sampler;
pub mod synthetic;
pub mod tensor;
pub mod units;

pub use analysis::{histogram, hpd, mode_estimate, HistogramBin, HpdInterval};
pub use covariance::{
    build_sigma3, build_sqe_matrix, empirical_sigma2, empirical_sigma2_entries, whiten, Jitter,
    Sigma3Params, SpdMatrix, SqeKernelParams,
};
pub use error::{Error, Result};
pub use likelihood::{
    estimate_mean, log_likelihood, log_likelihood_augmented, GpModel, GpParams,
};
pub use posterior::{
    log_posterior_joint, log_posterior_predictive, log_posterior_training, log_prior,
    JointTarget, ParamVector, PredictiveTarget, PriorSpec, Scheme, Sigma3Prior, TrainingTarget,
    PARAM_NAMES,
};
pub use sampler::{accept_ratio, propose, run_chain, ChainConfig, Trace};
pub use synthetic::{colorize, generate_dataset, make_polar_grid, SyntheticDataset};
pub use tensor::DenseTensor;
pub use units::{bar_angle_deg, omega_bar, UnitConstants};

/// Convenience glob import for the common types and entry points.
pub mod prelude {
    pub use crate::analysis::{histogram, hpd, mode_estimate, HpdInterval};
    pub use crate::covariance::{
        build_sigma3, build_sqe_matrix, empirical_sigma2, whiten, Jitter, Sigma3Params,
        SpdMatrix, SqeKernelParams,
    };
    pub use crate::error::{Error, Result};
    pub use crate::likelihood::{estimate_mean, log_likelihood, GpModel, GpParams};
    pub use crate::posterior::{
        JointTarget, ParamVector, PredictiveTarget, PriorSpec, Scheme, TrainingTarget,
    };
    pub use crate::sampler::{run_chain, ChainConfig, Trace};
    pub use crate::synthetic::{colorize, generate_dataset, make_polar_grid};
    pub use crate::tensor::DenseTensor;
    pub use crate::units::{bar_angle_deg, omega_bar, UnitConstants};
}

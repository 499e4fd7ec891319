//! Flat `key = value` run configuration. Unknown keys are hard errors so
//! a typo cannot silently fall back to a default in a tolerance-sensitive
//! run. The `TVGP_OUTPUT_DIR` environment variable overrides the
//! configured output directory.

use anyhow::{bail, Context, Result};
use std::path::{Path, PathBuf};
use tvgp::covariance::Jitter;
use tvgp::io::read_key_values;
use tvgp::posterior::{ParamVector, PriorSpec, Scheme, Sigma3Prior, PARAM_NAMES};
use tvgp::sampler::ChainConfig;
use tvgp::units::UnitConstants;

pub const OUTPUT_DIR_ENV: &str = "TVGP_OUTPUT_DIR";

/// Everything a pipeline run can configure, with working defaults for all
/// numeric knobs. Paths stay `None` until a config file provides them;
/// each command checks for the ones it needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    // input and output locations
    pub train_tensor: Option<PathBuf>,
    pub design: Option<PathBuf>,
    pub test_slice: Option<PathBuf>,
    pub modal_params: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub scheme: Option<Scheme>,

    // chain settings
    pub seed: u64,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub chains: usize,
    pub pilot_iterations: usize,
    init: [Option<f64>; 7],
    proposal_sd: [Option<f64>; 7],

    // priors
    pub q11_bounds: (f64, f64),
    pub q22_bounds: (f64, f64),
    pub s1_bounds: (f64, f64),
    pub s2_bounds: (f64, f64),
    pub sigma3_prior: Sigma3Prior,

    pub jitter_scale: f64,
    pub bins: usize,

    // synthetic data generation
    pub n_r: usize,
    pub n_phi: usize,
    pub m2: usize,
    pub m3: usize,
    pub true_q11: f64,
    pub true_q22: f64,
    pub true_sigma11: f64,
    pub true_sigma22: f64,
    pub true_rho: f64,
    pub true_s1: Option<f64>,
    pub true_s2: Option<f64>,

    // unit conversion constants
    pub r_sun_kpc: f64,
    pub v0_kms: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            train_tensor: None,
            design: None,
            test_slice: None,
            modal_params: None,
            output_dir: PathBuf::from("out"),
            scheme: None,
            seed: 0,
            iterations: 20_000,
            burn_in: 5_000,
            thin: 1,
            chains: 1,
            pilot_iterations: 0,
            init: [None; 7],
            proposal_sd: [None; 7],
            q11_bounds: (0.0, 1e6),
            q22_bounds: (0.0, 1e6),
            s1_bounds: (1.7, 2.3),
            s2_bounds: (0.0, std::f64::consts::FRAC_PI_2),
            sigma3_prior: Sigma3Prior::FlatLog,
            jitter_scale: 1e-8,
            bins: 50,
            n_r: 12,
            n_phi: 18,
            m2: 50,
            m3: 2,
            true_q11: 280.0,
            true_q22: 90.0,
            true_sigma11: 1.0,
            true_sigma22: 0.5,
            true_rho: -0.05,
            true_s1: None,
            true_s2: None,
            r_sun_kpc: 8.0,
            v0_kms: 220.0,
        }
    }
}

fn parse_as<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| anyhow::anyhow!("config key `{key}`: cannot parse `{value}`: {e}"))
}

impl RunConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let pairs = read_key_values(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg = RunConfig::default();
        for (key, value) in &pairs {
            cfg.apply(key, value)?;
        }
        if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
            cfg.output_dir = PathBuf::from(dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "train_tensor" => self.train_tensor = Some(PathBuf::from(value)),
            "design" => self.design = Some(PathBuf::from(value)),
            "test_slice" => self.test_slice = Some(PathBuf::from(value)),
            "modal_params" => self.modal_params = Some(PathBuf::from(value)),
            "output_dir" => self.output_dir = PathBuf::from(value),
            "scheme" => {
                self.scheme = Some(match value {
                    "train-only" => Scheme::TrainOnly,
                    "joint" => Scheme::Joint,
                    "predictive" => Scheme::Predictive,
                    other => bail!(
                        "config key `scheme`: expected train-only, joint or predictive, got `{other}`"
                    ),
                })
            }
            "seed" => self.seed = parse_as(key, value)?,
            "iterations" => self.iterations = parse_as(key, value)?,
            "burn_in" => self.burn_in = parse_as(key, value)?,
            "thin" => self.thin = parse_as(key, value)?,
            "chains" => self.chains = parse_as(key, value)?,
            "pilot_iterations" => self.pilot_iterations = parse_as(key, value)?,
            "init_s1" => self.init[0] = Some(parse_as(key, value)?),
            "init_s2" => self.init[1] = Some(parse_as(key, value)?),
            "init_q11" => self.init[2] = Some(parse_as(key, value)?),
            "init_q22" => self.init[3] = Some(parse_as(key, value)?),
            "init_sigma11" => self.init[4] = Some(parse_as(key, value)?),
            "init_sigma22" => self.init[5] = Some(parse_as(key, value)?),
            "init_rho" => self.init[6] = Some(parse_as(key, value)?),
            "proposal_sd_s1" => self.proposal_sd[0] = Some(parse_as(key, value)?),
            "proposal_sd_s2" => self.proposal_sd[1] = Some(parse_as(key, value)?),
            "proposal_sd_q11" => self.proposal_sd[2] = Some(parse_as(key, value)?),
            "proposal_sd_q22" => self.proposal_sd[3] = Some(parse_as(key, value)?),
            "proposal_sd_sigma11" => self.proposal_sd[4] = Some(parse_as(key, value)?),
            "proposal_sd_sigma22" => self.proposal_sd[5] = Some(parse_as(key, value)?),
            "proposal_sd_rho" => self.proposal_sd[6] = Some(parse_as(key, value)?),
            "q11_lower" => self.q11_bounds.0 = parse_as(key, value)?,
            "q11_upper" => self.q11_bounds.1 = parse_as(key, value)?,
            "q22_lower" => self.q22_bounds.0 = parse_as(key, value)?,
            "q22_upper" => self.q22_bounds.1 = parse_as(key, value)?,
            "s1_lower" => self.s1_bounds.0 = parse_as(key, value)?,
            "s1_upper" => self.s1_bounds.1 = parse_as(key, value)?,
            "s2_lower" => self.s2_bounds.0 = parse_as(key, value)?,
            "s2_upper" => self.s2_bounds.1 = parse_as(key, value)?,
            "sigma3_prior" => {
                self.sigma3_prior = match value {
                    "flat-log" => Sigma3Prior::FlatLog,
                    "jeffreys" => Sigma3Prior::Jeffreys,
                    other => bail!(
                        "config key `sigma3_prior`: expected flat-log or jeffreys, got `{other}`"
                    ),
                }
            }
            "jitter_scale" => self.jitter_scale = parse_as(key, value)?,
            "bins" => self.bins = parse_as(key, value)?,
            "n_r" => self.n_r = parse_as(key, value)?,
            "n_phi" => self.n_phi = parse_as(key, value)?,
            "m2" => self.m2 = parse_as(key, value)?,
            "m3" => self.m3 = parse_as(key, value)?,
            "true_q11" => self.true_q11 = parse_as(key, value)?,
            "true_q22" => self.true_q22 = parse_as(key, value)?,
            "true_sigma11" => self.true_sigma11 = parse_as(key, value)?,
            "true_sigma22" => self.true_sigma22 = parse_as(key, value)?,
            "true_rho" => self.true_rho = parse_as(key, value)?,
            "true_s1" => self.true_s1 = Some(parse_as(key, value)?),
            "true_s2" => self.true_s2 = Some(parse_as(key, value)?),
            "r_sun_kpc" => self.r_sun_kpc = parse_as(key, value)?,
            "v0_kms" => self.v0_kms = parse_as(key, value)?,
            other => bail!("unknown config key `{other}`"),
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.chains == 0 {
            bail!("chains must be at least 1");
        }
        if self.bins == 0 {
            bail!("bins must be at least 1");
        }
        self.prior_spec()
            .validate()
            .context("invalid prior bounds")?;
        Ok(())
    }

    pub fn prior_spec(&self) -> PriorSpec {
        PriorSpec {
            q_bounds: [self.q11_bounds, self.q22_bounds],
            s_bounds: [self.s1_bounds, self.s2_bounds],
            sigma3_prior: self.sigma3_prior,
        }
    }

    pub fn jitter(&self) -> Jitter {
        Jitter::new(self.jitter_scale)
    }

    pub fn unit_constants(&self) -> UnitConstants {
        UnitConstants {
            r_sun_kpc: self.r_sun_kpc,
            v0_kms: self.v0_kms,
        }
    }

    /// Starting point for a chain of the given scheme: configured values
    /// where present, bound midpoints for the test input, unit order-2
    /// diagonals and moderate length scales otherwise.
    pub fn init_vector(&self, scheme: Scheme) -> ParamVector {
        let defaults = [
            0.5 * (self.s1_bounds.0 + self.s1_bounds.1),
            0.5 * (self.s2_bounds.0 + self.s2_bounds.1),
            10.0,
            10.0,
            1.0,
            1.0,
            0.0,
        ];
        let mut values = [0.0; 7];
        for (i, v) in values.iter_mut().enumerate() {
            *v = self.init[i].unwrap_or(defaults[i]);
        }
        ParamVector::new(values, scheme.active_mask())
    }

    /// Chain configuration for one chain of the given scheme; explicit
    /// per-parameter proposal scales override the built-in defaults.
    pub fn chain_config(&self, scheme: Scheme, chain_seed: u64) -> ChainConfig {
        let init = self.init_vector(scheme);
        let base = ChainConfig::new(chain_seed, self.iterations, self.burn_in, self.thin, init);
        let mut sd = base.proposal_sd.clone();
        let mut k = 0;
        for i in 0..PARAM_NAMES.len() {
            if base.init.is_active(i) {
                if let Some(v) = self.proposal_sd[i] {
                    sd[k] = v;
                }
                k += 1;
            }
        }
        base.with_proposal_sd(sd)
    }
}

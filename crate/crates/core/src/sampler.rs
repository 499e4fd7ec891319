//! Random-Walk Metropolis-Hastings over any log-target on the
//! seven-parameter space: all active components are perturbed jointly by
//! independent Gaussians each iteration, a single uniform draw decides
//! acceptance, and the whole chain is a deterministic function of the
//! seed.

use crate::error::{Error, Result};
use crate::posterior::{ParamVector, PARAM_NAMES};
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

const IDX_S1: usize = 0;
const IDX_S2: usize = 1;
const IDX_Q11: usize = 2;
const IDX_Q22: usize = 3;

/// Everything a chain run needs: seed, lengths, per-active-parameter
/// proposal standard deviations and the starting point.
#[derive(Debug, Clone)]
pub struct ChainConfig {
    pub seed: u64,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub proposal_sd: Vec<f64>,
    pub init: ParamVector,
}

impl ChainConfig {
    /// Config with per-parameter default proposal scales: 0.05 for the
    /// test-input components, 2% of the starting magnitude for the
    /// reciprocal length scales, 0.02 for the order-2 matrix parameters.
    pub fn new(
        seed: u64,
        iterations: usize,
        burn_in: usize,
        thin: usize,
        init: ParamVector,
    ) -> Self {
        let proposal_sd = default_proposal_sd(&init);
        Self {
            seed,
            iterations,
            burn_in,
            thin,
            proposal_sd,
            init,
        }
    }

    pub fn with_proposal_sd(mut self, proposal_sd: Vec<f64>) -> Self {
        self.proposal_sd = proposal_sd;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Precondition("iterations must be positive".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::Precondition(format!(
                "burn_in {} must be < iterations {}",
                self.burn_in, self.iterations
            )));
        }
        if self.thin == 0 {
            return Err(Error::Precondition("thin must be positive".into()));
        }
        if self.proposal_sd.len() != self.init.n_active() {
            return Err(Error::Precondition(format!(
                "{} proposal scales supplied for {} active parameters",
                self.proposal_sd.len(),
                self.init.n_active()
            )));
        }
        if self.proposal_sd.iter().any(|&s| s < 0.0 || !s.is_finite()) {
            return Err(Error::Precondition(
                "proposal scales must be finite and nonnegative".into(),
            ));
        }
        Ok(())
    }
}

fn default_proposal_sd(init: &ParamVector) -> Vec<f64> {
    (0..PARAM_NAMES.len())
        .filter(|&i| init.is_active(i))
        .map(|i| match i {
            IDX_S1 | IDX_S2 => 0.05,
            IDX_Q11 | IDX_Q22 => 0.02 * init.get(i).abs().max(1.0),
            _ => 0.02,
        })
        .collect()
}

/// Post-burn-in, thinned states of one chain with their target values and
/// the acceptance bookkeeping.
#[derive(Debug, Clone)]
pub struct Trace {
    pub samples: Vec<ParamVector>,
    pub log_target: Vec<f64>,
    pub recorded_iters: Vec<usize>,
    pub accept_count: usize,
    pub proposal_count: usize,
    pub config: ChainConfig,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposal_count == 0 {
            0.0
        } else {
            self.accept_count as f64 / self.proposal_count as f64
        }
    }

    /// Column names of the sampled parameters, canonical order.
    pub fn active_names(&self) -> Vec<&'static str> {
        self.config.init.active_names()
    }

    /// Marginal samples of one named active parameter.
    pub fn component(&self, name: &str) -> Option<Vec<f64>> {
        let idx = PARAM_NAMES.iter().position(|&n| n == name)?;
        if !self.config.init.is_active(idx) {
            return None;
        }
        Some(self.samples.iter().map(|p| p.get(idx)).collect())
    }
}

/// Perturb every active component by an independent Gaussian of its
/// scale; inactive components are copied bit-for-bit. The proposal is
/// symmetric, so no density correction enters the acceptance ratio.
pub fn propose(current: &ParamVector, proposal_sd: &[f64], rng: &mut impl Rng) -> ParamVector {
    let mut next = current.clone();
    let mut k = 0;
    for i in 0..PARAM_NAMES.len() {
        if current.is_active(i) {
            let step: f64 = rng.sample(StandardNormal);
            next.set(i, current.get(i) + proposal_sd[k] * step);
            k += 1;
        }
    }
    next
}

/// `min(1, exp(new - current))`; a minus-infinity proposal target gives 0.
pub fn accept_ratio(log_target_new: f64, log_target_cur: f64) -> f64 {
    if log_target_new == f64::NEG_INFINITY {
        return 0.0;
    }
    (log_target_new - log_target_cur).exp().min(1.0)
}

/// Run one Random-Walk Metropolis-Hastings chain.
///
/// Each iteration proposes all active components jointly, evaluates the
/// target, draws u ~ U[0,1) and accepts when `u <= alpha`. States are
/// recorded after `burn_in` at every `thin`-th iteration. The same
/// (seed, config, target) always reproduces the identical trace.
pub fn run_chain<F>(mut target: F, cfg: &ChainConfig) -> Result<Trace>
where
    F: FnMut(&ParamVector) -> Result<f64>,
{
    cfg.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);

    let mut current = cfg.init.clone();
    let mut current_lt = target(&current)
        .map_err(|e| Error::Sampler(format!("target failed at the initial point: {e}")))?;
    if !current_lt.is_finite() {
        return Err(Error::Sampler(
            "target is not finite at the initial point; start the chain from a \
             point inside the prior support"
                .into(),
        ));
    }

    let mut trace = Trace {
        samples: Vec::new(),
        log_target: Vec::new(),
        recorded_iters: Vec::new(),
        accept_count: 0,
        proposal_count: 0,
        config: cfg.clone(),
    };

    for iter in 1..=cfg.iterations {
        let proposal = propose(&current, &cfg.proposal_sd, &mut rng);
        let proposal_lt = target(&proposal).map_err(|e| {
            Error::Sampler(format!(
                "target failed at iteration {iter}, point {:?}: {e}",
                proposal.values()
            ))
        })?;
        let alpha = accept_ratio(proposal_lt, current_lt);
        let u: f64 = rng.gen();
        trace.proposal_count += 1;
        if alpha > 0.0 && u <= alpha {
            current = proposal;
            current_lt = proposal_lt;
            trace.accept_count += 1;
        }
        if iter > cfg.burn_in && (iter - cfg.burn_in) % cfg.thin == 0 {
            trace.samples.push(current.clone());
            trace.log_target.push(current_lt);
            trace.recorded_iters.push(iter);
        }
    }
    Ok(trace)
}

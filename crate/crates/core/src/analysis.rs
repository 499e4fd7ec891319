//! Post-chain summaries: shortest highest-posterior-density intervals,
//! histograms, and histogram-mode estimates of scalar marginals.

use crate::error::{Error, Result};

/// Shortest interval holding a target fraction of the samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HpdInterval {
    pub lower: f64,
    pub upper: f64,
    pub mass: f64,
}

/// One histogram bin: center of the bin and the number of samples in it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub center: f64,
    pub count: usize,
}

/// Shortest window of `ceil(mass * N)` consecutive sorted samples;
/// earliest window wins ties. Exact for the empirical distribution, no
/// density estimation involved.
pub fn hpd(samples: &[f64], mass: f64) -> Result<HpdInterval> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::Precondition(format!(
            "hpd needs at least 2 samples, got {n}"
        )));
    }
    if !(mass > 0.0 && mass < 1.0) {
        return Err(Error::Precondition(format!(
            "hpd mass must lie in (0, 1), got {mass}"
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-finite sample"));
    let w = (mass * n as f64).ceil() as usize;
    let w = w.max(1);
    let mut best = 0usize;
    let mut best_width = sorted[w - 1] - sorted[0];
    for i in 1..=(n - w) {
        let width = sorted[i + w - 1] - sorted[i];
        if width < best_width {
            best_width = width;
            best = i;
        }
    }
    Ok(HpdInterval {
        lower: sorted[best],
        upper: sorted[best + w - 1],
        mass,
    })
}

/// Equal-width bins spanning [min, max]; the maximum falls in the last
/// bin, so counts always sum to the number of samples.
pub fn histogram(samples: &[f64], bins: usize) -> Result<Vec<HistogramBin>> {
    if bins == 0 {
        return Err(Error::Precondition("histogram needs at least one bin".into()));
    }
    if samples.is_empty() {
        return Err(Error::Precondition("histogram of an empty sample set".into()));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &x in samples {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in samples {
        let idx = if width == 0.0 {
            0
        } else {
            (((x - lo) / width) as usize).min(bins - 1)
        };
        counts[idx] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            center: lo + (i as f64 + 0.5) * width,
            count,
        })
        .collect())
}

/// Center of the highest-count histogram bin (earliest bin on ties).
pub fn mode_estimate(samples: &[f64], bins: usize) -> Result<f64> {
    let hist = histogram(samples, bins)?;
    let mut best = &hist[0];
    for bin in &hist[1..] {
        if bin.count > best.count {
            best = bin;
        }
    }
    Ok(best.center)
}

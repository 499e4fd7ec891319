//! Shared fixtures for the benchmark suite: a full-size synthetic
//! training set (216 design points, 50 x 2 slices) and the matching
//! posterior target.

use tvgp::covariance::{Jitter, Sigma3Params};
use tvgp::likelihood::GpParams;
use tvgp::posterior::{PriorSpec, TrainingTarget};
use tvgp::synthetic::{generate_dataset, make_polar_grid, SyntheticDataset};

pub const FULL_GRID: (usize, usize) = (12, 18);
pub const M2: usize = 50;
pub const M3: usize = 2;

pub fn full_grid() -> Vec<Vec<f64>> {
    make_polar_grid(
        FULL_GRID.0,
        FULL_GRID.1,
        (1.7, 2.3),
        (0.0, std::f64::consts::FRAC_PI_2),
    )
    .unwrap()
}

pub fn generating_params() -> GpParams {
    GpParams::new(280.0, 90.0, Sigma3Params::new(1.0, 0.5, -0.05).unwrap())
}

pub fn full_dataset() -> SyntheticDataset {
    generate_dataset(&full_grid(), &generating_params(), M2, M3, 42).unwrap()
}

pub fn full_training_target() -> (SyntheticDataset, Vec<Vec<f64>>, TrainingTarget) {
    let grid = full_grid();
    let data = full_dataset();
    let target = TrainingTarget::new(
        &data.training,
        &grid,
        &PriorSpec::default(),
        Jitter::default(),
    )
    .unwrap();
    (data, grid, target)
}

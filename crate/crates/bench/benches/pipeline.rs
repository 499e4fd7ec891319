use criterion::{black_box, criterion_group, criterion_main, Criterion};
use tvgp::analysis::hpd;
use tvgp::covariance::{build_sqe_matrix, empirical_sigma2, Jitter, SqeKernelParams};
use tvgp::likelihood::{estimate_mean, log_likelihood, GpModel};
use tvgp::posterior::ParamVector;
use tvgp::sampler::{run_chain, ChainConfig};
use tvgp::tensor::Matrix;
use tvgp_bench::{full_dataset, full_grid, full_training_target, generating_params};

fn bench_kernel_build(c: &mut Criterion) {
    let grid = full_grid();
    let kernel = SqeKernelParams::new(vec![280.0, 90.0]).unwrap();
    c.bench_function("build_sqe_matrix_216", |b| {
        b.iter(|| build_sqe_matrix(black_box(&grid), &kernel, Jitter::default()).unwrap())
    });
}

fn bench_empirical_sigma2(c: &mut Criterion) {
    let data = full_dataset();
    c.bench_function("empirical_sigma2_216x50x2", |b| {
        b.iter(|| empirical_sigma2(black_box(&data.training), Jitter::default()).unwrap())
    });
}

fn bench_mode_product(c: &mut Criterion) {
    let data = full_dataset();
    let m = Matrix::identity(216);
    c.bench_function("mode_product_216x50x2_mode1", |b| {
        b.iter(|| data.training.mode_product(black_box(&m), 1).unwrap())
    });
}

fn bench_log_likelihood(c: &mut Criterion) {
    let data = full_dataset();
    let grid = full_grid();
    let gen = generating_params();
    let model = GpModel::from_training(
        &data.training,
        &grid,
        &gen.kernel_params().unwrap(),
        &gen.sigma3,
        Jitter::default(),
    )
    .unwrap();
    c.bench_function("log_likelihood_216x50x2", |b| {
        b.iter(|| log_likelihood(black_box(&data.training), &model).unwrap())
    });
}

fn bench_posterior_step(c: &mut Criterion) {
    let (_, _, target) = full_training_target();
    let p = ParamVector::training_scheme(280.0, 90.0, 1.0, 0.5, -0.05);
    // one chain iteration pays exactly one of these: kernel rebuild,
    // factorization and whitening
    c.bench_function("training_target_eval_216", |b| {
        b.iter(|| target.log_density(black_box(&p)).unwrap())
    });
}

fn bench_estimate_mean(c: &mut Criterion) {
    let data = full_dataset();
    c.bench_function("estimate_mean_216x50x2", |b| {
        b.iter(|| estimate_mean(black_box(&data.training)).unwrap())
    });
}

fn bench_short_chain_small_target(c: &mut Criterion) {
    let init = ParamVector::new([0.0; 7], [true, false, false, false, false, false, false]);
    c.bench_function("run_chain_1k_gaussian", |b| {
        b.iter(|| {
            let cfg = ChainConfig::new(3, 1_000, 100, 1, init.clone()).with_proposal_sd(vec![1.0]);
            run_chain(
                |p| {
                    let x = p.get(0);
                    Ok(-0.5 * x * x)
                },
                &cfg,
            )
            .unwrap()
        })
    });
}

fn bench_hpd(c: &mut Criterion) {
    let samples: Vec<f64> = (0..100_000)
        .map(|i| ((i * 2654435761usize) % 1_000_003) as f64)
        .collect();
    c.bench_function("hpd_100k", |b| {
        b.iter(|| hpd(black_box(&samples), 0.95).unwrap())
    });
}

criterion_group!(
    benches,
    bench_kernel_build,
    bench_empirical_sigma2,
    bench_mode_product,
    bench_log_likelihood,
    bench_posterior_step,
    bench_estimate_mean,
    bench_short_chain_small_target,
    bench_hpd
);
criterion_main!(benches);

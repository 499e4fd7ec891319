use std::f64::consts::FRAC_PI_2;
use tvgp::analysis::{hpd, mode_estimate};
use tvgp::covariance::{Jitter, Sigma3Params, SqeKernelParams};
use tvgp::likelihood::GpParams;
use tvgp::posterior::{JointTarget, ParamVector, PredictiveTarget, PriorSpec, TrainingTarget};
use tvgp::sampler::{run_chain, ChainConfig};
use tvgp::synthetic::{generate_dataset, identified_sigma3_trace, make_polar_grid};
use tvgp::tensor::DenseTensor;

fn main() {
    let (q11, q22) = (70.0, 10.0);
    let iters = 50_000usize;
    let grid = make_polar_grid(6, 6, (1.7, 2.3), (0.0, FRAC_PI_2)).unwrap();
    let kernel = SqeKernelParams::new(vec![q11, q22]).unwrap();
    let jit = Jitter::default();
    let prior = PriorSpec::default();
    let trace_tot = identified_sigma3_trace(&grid, &kernel, 2, jit).unwrap();
    let sigma22 = trace_tot / 3.0;
    let sigma11 = trace_tot - sigma22;
    let gen = GpParams::new(q11, q22, Sigma3Params::new(sigma11, sigma22, -0.2).unwrap())
        .with_s_test([1.93, 0.52]);

    for seed in [1u64, 2, 3, 4, 5] {
        let data = generate_dataset(&grid, &gen, 10, 2, seed).unwrap();
        let strue = data.s_test;

        // scheme A for modal GP values
        let ta = TrainingTarget::new(&data.training, &grid, &prior, jit).unwrap();
        let init_a = ParamVector::training_scheme(80.0, 12.0, 1.0, 1.0, 0.0);
        let cfg_a = ChainConfig::new(seed * 100 + 1, iters, iters / 5, 1, init_a)
            .with_proposal_sd(vec![5.0, 0.7, 0.06, 0.03, 0.05]);
        let tr_a = run_chain(|p| ta.log_density(p), &cfg_a).unwrap();
        let modal = |name: &str| mode_estimate(&tr_a.component(name).unwrap(), 50).unwrap();
        let fixed = GpParams::new(
            modal("q11"), modal("q22"),
            Sigma3Params::new(modal("sigma11"), modal("sigma22"), modal("rho")).unwrap(),
        );

        // augmented tensor
        let mut slices: Vec<DenseTensor> = (0..grid.len()).map(|i| data.training.slice(1, i).unwrap()).collect();
        slices.push(data.test_slice.clone());
        let d_star = DenseTensor::stack(&slices, 1).unwrap();

        // scheme B
        let tb = JointTarget::new(&d_star, &grid, &prior, jit).unwrap();
        let init_b = ParamVector::joint_scheme(2.0, 0.785, 80.0, 12.0, 1.0, 1.0, 0.0);
        let cfg_b = ChainConfig::new(seed * 100 + 2, iters, iters / 5, 1, init_b)
            .with_proposal_sd(vec![0.006, 0.02, 5.0, 0.7, 0.06, 0.03, 0.05]);
        let tr_b = run_chain(|p| tb.log_density(p), &cfg_b).unwrap();

        // scheme C
        let tc = PredictiveTarget::new(&d_star, &grid, &fixed, &prior, jit).unwrap();
        let init_c = ParamVector::predictive_scheme(2.0, 0.785);
        let cfg_c = ChainConfig::new(seed * 100 + 3, iters, iters / 5, 1, init_c)
            .with_proposal_sd(vec![0.02, 0.06]);
        let tr_c = run_chain(|p| tc.log_density(p), &cfg_c).unwrap();

        print!("seed {seed} accB={:.2} accC={:.2} strue=({:.3},{:.3}) | ",
            tr_b.acceptance_rate(), tr_c.acceptance_rate(), strue[0], strue[1]);
        for (scheme, tr) in [("B", &tr_b), ("C", &tr_c)] {
            for (k, name) in ["s1", "s2"].iter().enumerate() {
                let iv = hpd(&tr.component(name).unwrap(), 0.95).unwrap();
                let hit = iv.lower <= strue[k] && strue[k] <= iv.upper;
                print!("{scheme}.{name}[{:.3},{:.3}]{} ", iv.lower, iv.upper, if hit { "Y" } else { "N!" });
            }
        }
        // overlap of C on B
        for name in ["s1", "s2"] {
            let ib = hpd(&tr_b.component(name).unwrap(), 0.95).unwrap();
            let ic = hpd(&tr_c.component(name).unwrap(), 0.95).unwrap();
            let overlap = (ib.upper.min(ic.upper) - ib.lower.max(ic.lower)).max(0.0);
            print!("ov.{name}={:.0}% ", 100.0 * overlap / (ic.upper - ic.lower));
        }
        println!();
    }
}

use std::f64::consts::FRAC_PI_2;
use tvgp::analysis::hpd;
use tvgp::covariance::{Jitter, Sigma3Params, SqeKernelParams};
use tvgp::likelihood::GpParams;
use tvgp::posterior::{ParamVector, PriorSpec, TrainingTarget};
use tvgp::sampler::{run_chain, ChainConfig};
use tvgp::synthetic::{generate_dataset, identified_sigma3_trace, make_polar_grid};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let q11: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(70.0);
    let q22: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(10.0);
    let iters: usize = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(50_000);

    let grid = make_polar_grid(6, 6, (1.7, 2.3), (0.0, FRAC_PI_2)).unwrap();
    let kernel = SqeKernelParams::new(vec![q11, q22]).unwrap();
    let trace_tot = identified_sigma3_trace(&grid, &kernel, 2, Jitter::default()).unwrap();
    let ratio = 2.0;
    let sigma22 = trace_tot / (1.0 + ratio);
    let sigma11 = trace_tot - sigma22;
    let rho = -0.2;
    println!("truth: q11={q11} q22={q22} s11={sigma11:.4} s22={sigma22:.4} rho={rho}");
    let truth = GpParams::new(q11, q22, Sigma3Params::new(sigma11, sigma22, rho).unwrap());

    for seed in [1u64, 2, 3] {
        let data = generate_dataset(&grid, &truth, 10, 2, seed).unwrap();
        let target = TrainingTarget::new(&data.training, &grid, &PriorSpec::default(), Jitter::default()).unwrap();
        let init = ParamVector::training_scheme(q11 * 0.6, q22 * 1.5, 1.0, 1.0, 0.0);
        let sd = vec![q11 * 0.06, q22 * 0.06, 0.06, 0.03, 0.05];
        let cfg = ChainConfig::new(seed * 100, iters, iters / 5, 1, init).with_proposal_sd(sd);
        let t0 = std::time::Instant::now();
        let trace = run_chain(|p| target.log_density(p), &cfg).unwrap();
        let dt = t0.elapsed().as_secs_f64();
        print!("seed {seed} acc={:.2} t={dt:.1}s | ", trace.acceptance_rate());
        let truths = [q11, q22, sigma11, sigma22, rho];
        for (name, tv) in ["q11", "q22", "sigma11", "sigma22", "rho"].iter().zip(truths) {
            let xs = trace.component(name).unwrap();
            let iv = hpd(&xs, 0.95).unwrap();
            let hit = iv.lower <= tv && tv <= iv.upper;
            print!("{name}[{:.3},{:.3}]{} ", iv.lower, iv.upper, if hit { "Y" } else { "N!" });
        }
        println!();
    }
}

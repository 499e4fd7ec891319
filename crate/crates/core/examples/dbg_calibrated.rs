use std::f64::consts::FRAC_PI_2;
use tvgp::analysis::hpd;
use tvgp::covariance::{Jitter, Sigma3Params, SqeKernelParams};
use tvgp::likelihood::GpParams;
use tvgp::posterior::{ParamVector, PriorSpec, TrainingTarget};
use tvgp::sampler::{run_chain, ChainConfig};
use tvgp::synthetic::{calibrate_recovery_targets, generate_dataset, identified_sigma3_trace, make_polar_grid};

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
    let gen = GpParams::new(q11, q22, Sigma3Params::new(sigma11, sigma22, -0.2).unwrap());

    let t0 = std::time::Instant::now();
    let truth = calibrate_recovery_targets(&grid, &gen, 10, 2, 16, 1000, &prior, jit).unwrap();
    println!("gen:   q11={q11} q22={q22} s11={sigma11:.4} s22={sigma22:.4} rho=-0.2");
    println!("ident: q11={:.2} q22={:.2} s11={:.4} s22={:.4} rho={:.4} ({:.1}s)",
        truth.q11, truth.q22, truth.sigma3.sigma11, truth.sigma3.sigma22, truth.sigma3.rho,
        t0.elapsed().as_secs_f64());

    let mut hits = 0; let mut total = 0;
    for seed in [1u64, 2, 3, 4, 5, 6, 7, 8] {
        let data = generate_dataset(&grid, &gen, 10, 2, seed).unwrap();
        let target = TrainingTarget::new(&data.training, &grid, &prior, jit).unwrap();
        let init = ParamVector::training_scheme(truth.q11, truth.q22, 1.0, 1.0, 0.0);
        let sd = vec![truth.q11 * 0.06, truth.q22 * 0.06, 0.06, 0.03, 0.05];
        let cfg = ChainConfig::new(seed * 100, iters, iters / 5, 1, init).with_proposal_sd(sd);
        let trace = run_chain(|p| target.log_density(p), &cfg).unwrap();
        print!("seed {seed} acc={:.2} | ", trace.acceptance_rate());
        let tvals = [truth.q11, truth.q22, truth.sigma3.sigma11, truth.sigma3.sigma22, truth.sigma3.rho];
        for (name, tv) in ["q11", "q22", "sigma11", "sigma22", "rho"].iter().zip(tvals) {
            let xs = trace.component(name).unwrap();
            let iv = hpd(&xs, 0.95).unwrap();
            let hit = iv.lower <= tv && tv <= iv.upper;
            total += 1; if hit { hits += 1; }
            print!("{name}[{:.3},{:.3}]{} ", iv.lower, iv.upper, if hit { "Y" } else { "N!" });
        }
        println!();
    }
    println!("coverage: {hits}/{total}");
}

use std::f64::consts::FRAC_PI_2;
use tvgp::covariance::{Jitter, Sigma3Params, SqeKernelParams};
use tvgp::likelihood::GpParams;
use tvgp::posterior::{ParamVector, PriorSpec, TrainingTarget};
use tvgp::synthetic::{generate_dataset, identified_sigma3_trace, make_polar_grid};

fn main() {
    let grid = make_polar_grid(4, 4, (1.7, 2.3), (0.0, FRAC_PI_2)).unwrap();
    let kernel = SqeKernelParams::new(vec![50.0, 10.0]).unwrap();
    let trace = identified_sigma3_trace(&grid, &kernel, 2, Jitter::default()).unwrap();
    println!("identified trace = {trace}");
    let ratio = 2.0;
    let sigma22 = trace / (1.0 + ratio);
    let sigma11 = trace - sigma22;
    println!("sigma11 = {sigma11}, sigma22 = {sigma22}");
    let truth = GpParams::new(50.0, 10.0, Sigma3Params::new(sigma11, sigma22, -0.1).unwrap());
    for seed in [11u64, 12, 13] {
        let data = generate_dataset(&grid, &truth, 8, 2, seed).unwrap();
        let target = TrainingTarget::new(&data.training, &grid, &PriorSpec::default(), Jitter::default()).unwrap();
        let tp = ParamVector::training_scheme(truth.q11, truth.q22, sigma11, sigma22, -0.1);
        let lt = target.log_density(&tp).unwrap();
        println!("seed {seed}: truth {lt:.4}");
        let offs: Vec<(&str, ParamVector)> = vec![
            ("q11*8", ParamVector::training_scheme(truth.q11*8.0, truth.q22, sigma11, sigma22, -0.1)),
            ("q11/8", ParamVector::training_scheme(truth.q11/8.0, truth.q22, sigma11, sigma22, -0.1)),
            ("q22*8", ParamVector::training_scheme(truth.q11, truth.q22*8.0, sigma11, sigma22, -0.1)),
            ("q22/8", ParamVector::training_scheme(truth.q11, truth.q22/8.0, sigma11, sigma22, -0.1)),
            ("s11*3", ParamVector::training_scheme(truth.q11, truth.q22, sigma11*3.0, sigma22, -0.1)),
            ("s22/3", ParamVector::training_scheme(truth.q11, truth.q22, sigma11, sigma22/3.0, -0.1)),
            ("rho.8", ParamVector::training_scheme(truth.q11, truth.q22, sigma11, sigma22, 0.8)),
        ];
        for (name, p) in &offs {
            let l = target.log_density(p).unwrap();
            println!("  {name}: {:.4}  (truth - off = {:.4})", l, lt - l);
        }
    }
}

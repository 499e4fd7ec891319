//! The pipeline commands behind the CLI subcommands. Each command is an
//! ordinary function over a [`RunConfig`] so tests can run full pipelines
//! in-process and inspect the files they emit.

use crate::config::RunConfig;
use anyhow::{bail, Context, Result};
use std::path::{Path, PathBuf};
use tvgp::analysis::{histogram, hpd, mode_estimate, HpdInterval};
use tvgp::covariance::Sigma3Params;
use tvgp::io::{
    read_design, read_key_values, read_report, read_tensor, read_trace, write_design,
    write_histogram, write_key_values, write_report, write_tensor, write_trace, ReportRow,
};
use tvgp::likelihood::GpParams;
use tvgp::posterior::{JointTarget, ParamVector, PredictiveTarget, Scheme, TrainingTarget};
use tvgp::sampler::{run_chain, Trace};
use tvgp::synthetic::{generate_dataset, make_polar_grid};
use tvgp::tensor::DenseTensor;
use tvgp::units::{bar_angle_deg, omega_bar, UnitConstants};

const HPD_MASS: f64 = 0.95;

/// Per-chain seeds derived from the single config seed by a golden-ratio
/// counter, so adding chains never perturbs existing ones.
fn chain_seed(seed: u64, chain: usize) -> u64 {
    seed.wrapping_add((chain as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn scheme_token(scheme: Scheme) -> &'static str {
    match scheme {
        Scheme::TrainOnly => "train-only",
        Scheme::Joint => "joint",
        Scheme::Predictive => "predictive",
    }
}

/// Load a tensor file, with path context on errors.
pub fn load_tensor(path: &Path) -> Result<DenseTensor> {
    read_tensor(path).with_context(|| format!("loading tensor {}", path.display()))
}

/// Load a design CSV, with path context on errors.
pub fn load_design(path: &Path) -> Result<Vec<Vec<f64>>> {
    read_design(path).with_context(|| format!("loading design {}", path.display()))
}

fn require<'a>(path: &'a Option<PathBuf>, key: &str, cmd: &str) -> Result<&'a Path> {
    path.as_deref()
        .with_context(|| format!("`{cmd}` needs the `{key}` config key"))
}

fn load_training(cfg: &RunConfig, cmd: &str) -> Result<(DenseTensor, Vec<Vec<f64>>)> {
    let train = load_tensor(require(&cfg.train_tensor, "train_tensor", cmd)?)?;
    if train.rank() != 3 {
        bail!("training tensor must be rank 3, got rank {}", train.rank());
    }
    let design = load_design(require(&cfg.design, "design", cmd)?)?;
    if design.len() != train.dims()[0] {
        bail!(
            "design has {} rows but the training tensor's mode-1 order is {}",
            design.len(),
            train.dims()[0]
        );
    }
    Ok((train, design))
}

/// Stack the test slice onto the training tensor along the design mode.
fn augment(train: &DenseTensor, test: &DenseTensor) -> Result<DenseTensor> {
    if test.dims() != &train.dims()[1..] {
        bail!(
            "test slice dims {:?} do not match the training tensor's trailing modes {:?}",
            test.dims(),
            &train.dims()[1..]
        );
    }
    let mut slices: Vec<DenseTensor> = (0..train.dims()[0])
        .map(|i| train.slice(1, i))
        .collect::<tvgp::Result<_>>()?;
    slices.push(test.clone());
    Ok(DenseTensor::stack(&slices, 1)?)
}

fn ensure_output_dir(cfg: &RunConfig) -> Result<PathBuf> {
    std::fs::create_dir_all(&cfg.output_dir)
        .with_context(|| format!("creating output directory {}", cfg.output_dir.display()))?;
    Ok(cfg.output_dir.clone())
}

/// Generate a synthetic training set, test slice and design grid, and
/// write them with the true-parameter manifest.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let out = ensure_output_dir(cfg)?;
    let grid = make_polar_grid(cfg.n_r, cfg.n_phi, cfg.s1_bounds, cfg.s2_bounds)?;
    let mut truth = GpParams::new(
        cfg.true_q11,
        cfg.true_q22,
        Sigma3Params::new(cfg.true_sigma11, cfg.true_sigma22, cfg.true_rho)?,
    );
    if let (Some(s1), Some(s2)) = (cfg.true_s1, cfg.true_s2) {
        truth = truth.with_s_test([s1, s2]);
    }
    let data = generate_dataset(&grid, &truth, cfg.m2, cfg.m3, cfg.seed)?;

    let paths = [
        ("train.tensor", &data.training),
        ("test.tensor", &data.test_slice),
        ("full.tensor", &data.augmented),
    ];
    let mut written = Vec::new();
    for (name, tensor) in paths {
        let p = out.join(name);
        write_tensor(&p, tensor)?;
        written.push(p);
    }
    let design_path = out.join("design.csv");
    write_design(&design_path, &grid)?;
    written.push(design_path);

    let manifest = vec![
        ("true_q11".to_string(), cfg.true_q11.to_string()),
        ("true_q22".to_string(), cfg.true_q22.to_string()),
        ("true_sigma11".to_string(), cfg.true_sigma11.to_string()),
        ("true_sigma22".to_string(), cfg.true_sigma22.to_string()),
        ("true_rho".to_string(), cfg.true_rho.to_string()),
        ("true_s1".to_string(), data.s_test[0].to_string()),
        ("true_s2".to_string(), data.s_test[1].to_string()),
        ("n_r".to_string(), cfg.n_r.to_string()),
        ("n_phi".to_string(), cfg.n_phi.to_string()),
        ("m2".to_string(), cfg.m2.to_string()),
        ("m3".to_string(), cfg.m3.to_string()),
        ("seed".to_string(), cfg.seed.to_string()),
    ];
    let manifest_path = out.join("truth.txt");
    write_key_values(&manifest_path, &manifest)?;
    written.push(manifest_path);

    for p in &written {
        println!("wrote {}", p.display());
    }
    Ok(written)
}

/// Run the configured chains against one target, concurrently when more
/// than one chain is requested.
fn run_chains<F>(cfg: &RunConfig, scheme: Scheme, target: F) -> Result<Vec<Trace>>
where
    F: Fn(&ParamVector) -> tvgp::Result<f64> + Sync,
{
    if cfg.pilot_iterations > 0 {
        let pilot_cfg = {
            let mut c = cfg.clone();
            c.iterations = cfg.pilot_iterations;
            c.burn_in = 0;
            c.chain_config(scheme, chain_seed(cfg.seed, usize::MAX))
        };
        let pilot = run_chain(|p| target(p), &pilot_cfg)?;
        println!(
            "pilot: acceptance rate {:.3} over {} iterations (aim for roughly 0.2-0.4)",
            pilot.acceptance_rate(),
            cfg.pilot_iterations
        );
    }
    let mut traces: Vec<Option<Trace>> = (0..cfg.chains).map(|_| None).collect();
    std::thread::scope(|scope| -> Result<()> {
        let mut handles = Vec::new();
        for (k, slot) in traces.iter_mut().enumerate() {
            let chain_cfg = cfg.chain_config(scheme, chain_seed(cfg.seed, k));
            let target = &target;
            handles.push(scope.spawn(move || -> Result<()> {
                *slot = Some(run_chain(|p| target(p), &chain_cfg)?);
                Ok(())
            }));
        }
        for h in handles {
            h.join().expect("chain thread panicked")?;
        }
        Ok(())
    })?;
    Ok(traces.into_iter().map(|t| t.unwrap()).collect())
}

struct Summary {
    name: &'static str,
    interval: HpdInterval,
    mode: f64,
    pooled: Vec<f64>,
}

fn summarize(traces: &[Trace], bins: usize) -> Result<Vec<Summary>> {
    let names = traces[0].active_names();
    let mut rows = Vec::new();
    for name in names {
        let mut pooled = Vec::new();
        for t in traces {
            pooled.extend(t.component(name).expect("active component"));
        }
        rows.push(Summary {
            name,
            interval: hpd(&pooled, HPD_MASS)?,
            mode: mode_estimate(&pooled, bins)?,
            pooled,
        });
    }
    Ok(rows)
}

fn write_chain_outputs(
    out: &Path,
    token: &str,
    traces: &[Trace],
    summaries: &[Summary],
    title: &str,
    bins: usize,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if traces.len() == 1 {
        let p = out.join(format!("trace_{token}.csv"));
        write_trace(&p, &traces[0])?;
        written.push(p);
    } else {
        for (k, t) in traces.iter().enumerate() {
            let p = out.join(format!("trace_{token}_chain{k}.csv"));
            write_trace(&p, t)?;
            written.push(p);
        }
    }
    for s in summaries {
        let p = out.join(format!("hist_{}_{token}.csv", s.name));
        write_histogram(&p, &histogram(&s.pooled, bins)?)?;
        written.push(p);
    }
    let report_rows: Vec<ReportRow> = summaries
        .iter()
        .map(|s| ReportRow {
            name: s.name.to_string(),
            interval: s.interval,
            mode: s.mode,
        })
        .collect();
    let p = out.join(format!("report_{token}.txt"));
    write_report(&p, title, &report_rows)?;
    written.push(p);
    Ok(written)
}

/// Fit GP parameters by posterior sampling: scheme A on the training
/// tensor alone, or scheme B jointly with the test input on the augmented
/// tensor. Emits trace CSVs, histograms, the HPD report, and (scheme A)
/// the modal-parameter file consumed by `predict`.
pub fn cmd_fit(cfg: &RunConfig, scheme: Scheme) -> Result<Vec<PathBuf>> {
    let out = ensure_output_dir(cfg)?;
    let token = scheme_token(scheme);
    let prior = cfg.prior_spec();
    let jitter = cfg.jitter();

    let traces = match scheme {
        Scheme::TrainOnly => {
            let (train, design) = load_training(cfg, "fit")?;
            let target = TrainingTarget::new(&train, &design, &prior, jitter)?;
            run_chains(cfg, scheme, |p| target.log_density(p))?
        }
        Scheme::Joint => {
            let (train, design) = load_training(cfg, "fit")?;
            let test = load_tensor(require(&cfg.test_slice, "test_slice", "fit")?)?;
            let d_star = augment(&train, &test)?;
            let target = JointTarget::new(&d_star, &design, &prior, jitter)?;
            run_chains(cfg, scheme, |p| target.log_density(p))?
        }
        Scheme::Predictive => bail!("use the `predict` command for the predictive scheme"),
    };
    for (k, t) in traces.iter().enumerate() {
        println!(
            "chain {k}: {} stored samples, acceptance rate {:.3}",
            t.len(),
            t.acceptance_rate()
        );
    }

    let summaries = summarize(&traces, cfg.bins)?;
    let title = format!("95% HPD credible intervals (scheme: {token})");
    let mut written = write_chain_outputs(&out, token, &traces, &summaries, &title, cfg.bins)?;

    if scheme == Scheme::TrainOnly {
        let modal: Vec<(String, String)> = summaries
            .iter()
            .map(|s| (s.name.to_string(), s.mode.to_string()))
            .collect();
        let p = out.join("modal_train-only.txt");
        write_key_values(&p, &modal)?;
        written.push(p);
    }
    for p in &written {
        println!("wrote {}", p.display());
    }
    Ok(written)
}

fn load_modal_gp(path: &Path) -> Result<GpParams> {
    let pairs = read_key_values(path)
        .with_context(|| format!("loading modal parameters {}", path.display()))?;
    let mut vals = [None; 5];
    let names = ["q11", "q22", "sigma11", "sigma22", "rho"];
    for (k, v) in &pairs {
        let Some(idx) = names.iter().position(|n| n == k) else {
            bail!("unexpected key `{k}` in modal parameter file {}", path.display());
        };
        vals[idx] = Some(
            v.parse::<f64>()
                .with_context(|| format!("modal key `{k}`: bad value `{v}`"))?,
        );
    }
    let get = |i: usize| -> Result<f64> {
        vals[i].with_context(|| format!("modal parameter file is missing `{}`", names[i]))
    };
    Ok(GpParams::new(
        get(0)?,
        get(1)?,
        Sigma3Params::new(get(2)?, get(3)?, get(4)?)?,
    ))
}

/// Sample the posterior predictive of the test input at the modal GP
/// parameters from a previous train-only fit, and convert the resulting
/// intervals to physical units.
pub fn cmd_predict(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let out = ensure_output_dir(cfg)?;
    let (train, design) = load_training(cfg, "predict")?;
    let test = load_tensor(require(&cfg.test_slice, "test_slice", "predict")?)?;
    let d_star = augment(&train, &test)?;
    let fixed = load_modal_gp(require(&cfg.modal_params, "modal_params", "predict")?)?;
    let prior = cfg.prior_spec();
    let target = PredictiveTarget::new(&d_star, &design, &fixed, &prior, cfg.jitter())?;

    let traces = run_chains(cfg, Scheme::Predictive, |p| target.log_density(p))?;
    for (k, t) in traces.iter().enumerate() {
        println!(
            "chain {k}: {} stored samples, acceptance rate {:.3}",
            t.len(),
            t.acceptance_rate()
        );
    }

    let summaries = summarize(&traces, cfg.bins)?;
    let consts = cfg.unit_constants();
    let mut report_rows: Vec<ReportRow> = summaries
        .iter()
        .map(|s| ReportRow {
            name: s.name.to_string(),
            interval: s.interval,
            mode: s.mode,
        })
        .collect();
    let derived = converted_rows(&report_rows, &consts)?;
    report_rows.extend(derived);

    let token = scheme_token(Scheme::Predictive);
    let mut written = Vec::new();
    if traces.len() == 1 {
        let p = out.join(format!("trace_{token}.csv"));
        write_trace(&p, &traces[0])?;
        written.push(p);
    } else {
        for (k, t) in traces.iter().enumerate() {
            let p = out.join(format!("trace_{token}_chain{k}.csv"));
            write_trace(&p, t)?;
            written.push(p);
        }
    }
    for s in &summaries {
        let p = out.join(format!("hist_{}_{token}.csv", s.name));
        write_histogram(&p, &histogram(&s.pooled, cfg.bins)?)?;
        written.push(p);
    }
    let p = out.join(format!("report_{token}.txt"));
    write_report(
        &p,
        "95% HPD credible intervals (scheme: predictive)",
        &report_rows,
    )?;
    written.push(p);
    for p in &written {
        println!("wrote {}", p.display());
    }
    Ok(written)
}

/// Physical-unit rows derived from the s1/s2 rows of a report. Both maps
/// are strictly increasing, so intervals convert endpoint-wise.
fn converted_rows(rows: &[ReportRow], consts: &UnitConstants) -> Result<Vec<ReportRow>> {
    let find = |name: &str| rows.iter().find(|r| r.name == name);
    let mut out = Vec::new();
    if let Some(s1) = find("s1") {
        out.push(ReportRow {
            name: "omega_bar_km_s_kpc".to_string(),
            interval: HpdInterval {
                lower: omega_bar(s1.interval.lower, consts)?,
                upper: omega_bar(s1.interval.upper, consts)?,
                mass: s1.interval.mass,
            },
            mode: omega_bar(s1.mode, consts)?,
        });
    }
    if let Some(s2) = find("s2") {
        out.push(ReportRow {
            name: "bar_angle_deg".to_string(),
            interval: HpdInterval {
                lower: bar_angle_deg(s2.interval.lower),
                upper: bar_angle_deg(s2.interval.upper),
                mass: s2.interval.mass,
            },
            mode: bar_angle_deg(s2.mode),
        });
    }
    Ok(out)
}

/// Recompute HPD intervals, modes and histograms from a stored trace CSV.
pub fn cmd_analyze(trace_path: &Path, bins: usize, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let trace = read_trace(trace_path)
        .with_context(|| format!("loading trace {}", trace_path.display()))?;
    let stem = trace_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("trace");

    let mut written = Vec::new();
    let mut rows = Vec::new();
    for name in &trace.param_names {
        let samples = trace.column(name).expect("named column");
        let interval = hpd(&samples, HPD_MASS)?;
        let mode = mode_estimate(&samples, bins)?;
        println!(
            "{name}: 95% HPD [{:.6}, {:.6}], mode {:.6}",
            interval.lower, interval.upper, mode
        );
        rows.push(ReportRow {
            name: name.clone(),
            interval,
            mode,
        });
        let p = out_dir.join(format!("hist_{name}_{stem}.csv"));
        write_histogram(&p, &histogram(&samples, bins)?)?;
        written.push(p);
    }
    let p = out_dir.join(format!("report_{stem}.txt"));
    write_report(&p, &format!("95% HPD credible intervals ({stem})"), &rows)?;
    written.push(p);
    for p in &written {
        println!("wrote {}", p.display());
    }
    Ok(written)
}

/// Convert the s1/s2 rows of an interval report to bar pattern speed and
/// bar-Sun angle, writing a derived report.
pub fn cmd_convert_units(
    report_path: &Path,
    out_dir: &Path,
    consts: &UnitConstants,
) -> Result<PathBuf> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let rows = read_report(report_path)
        .with_context(|| format!("loading report {}", report_path.display()))?;
    let converted = converted_rows(&rows, consts)?;
    if converted.is_empty() {
        bail!(
            "report {} has no s1/s2 rows to convert",
            report_path.display()
        );
    }
    for r in &converted {
        println!(
            "{}: [{:.6}, {:.6}], mode {:.6}",
            r.name, r.interval.lower, r.interval.upper, r.mode
        );
    }
    let stem = report_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("report");
    let p = out_dir.join(format!("units_{stem}.txt"));
    write_report(&p, "Derived Galactic feature parameters", &converted)?;
    println!("wrote {}", p.display());
    Ok(p)
}

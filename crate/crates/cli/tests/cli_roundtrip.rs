//! Whole-pipeline runs through the command layer: simulate feeds fit,
//! fit feeds predict, every emitted file re-parses with the loaders, and
//! reruns are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};
use tvgp::io::{read_design, read_histogram, read_report, read_tensor, read_trace};
use tvgp::posterior::Scheme;
use tvgp_cli::config::RunConfig;
use tvgp_cli::{cmd_analyze, cmd_convert_units, cmd_fit, cmd_predict, cmd_simulate};

fn write_file(path: &Path, body: &str) {
    fs::write(path, body).unwrap();
}

fn base_sim_config(out: &Path) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.output_dir = out.to_path_buf();
    cfg.seed = 7;
    cfg.n_r = 3;
    cfg.n_phi = 3;
    cfg.m2 = 5;
    cfg.m3 = 2;
    cfg.true_q11 = 70.0;
    cfg.true_q22 = 10.0;
    cfg.true_sigma11 = 0.74;
    cfg.true_sigma22 = 0.37;
    cfg.true_rho = -0.2;
    cfg
}

fn fit_config(data: &Path, out: &Path) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.train_tensor = Some(data.join("train.tensor"));
    cfg.design = Some(data.join("design.csv"));
    cfg.test_slice = Some(data.join("test.tensor"));
    cfg.output_dir = out.to_path_buf();
    cfg.seed = 42;
    cfg.iterations = 600;
    cfg.burn_in = 100;
    cfg.thin = 1;
    cfg.bins = 20;
    cfg
}

#[test]
fn simulate_writes_consistent_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("data");
    let cfg = base_sim_config(&out);
    cmd_simulate(&cfg).unwrap();

    let train = read_tensor(out.join("train.tensor")).unwrap();
    let test = read_tensor(out.join("test.tensor")).unwrap();
    let full = read_tensor(out.join("full.tensor")).unwrap();
    let design = read_design(out.join("design.csv")).unwrap();
    assert_eq!(train.dims(), &[9, 5, 2]);
    assert_eq!(test.dims(), &[5, 2]);
    assert_eq!(full.dims(), &[10, 5, 2]);
    assert_eq!(design.len(), 9);
    // the last mode-1 slice of the full tensor is the test slice
    let last = full.slice(1, 9).unwrap();
    assert_eq!(last, test);
}

#[test]
fn default_config_simulates_at_full_scale() {
    // stock settings: a 12x18 grid of 216 design points plus the test
    // slice, 50 stars, 2 velocity components
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("data");
    let mut cfg = RunConfig::default();
    cfg.output_dir = out.clone();
    cmd_simulate(&cfg).unwrap();

    let header = fs::read_to_string(out.join("full.tensor"))
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string();
    assert_eq!(header, "dims: 217 50 2");

    let train = read_tensor(out.join("train.tensor")).unwrap();
    let design = read_design(out.join("design.csv")).unwrap();
    assert_eq!(train.dims(), &[216, 50, 2]);
    assert_eq!(design.len(), 216);
}

#[test]
fn minimal_config_simulates_a_2x2x2_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("data");
    let mut cfg = RunConfig::default();
    cfg.output_dir = out.clone();
    cfg.n_r = 1;
    cfg.n_phi = 1;
    cfg.m2 = 2;
    cfg.m3 = 2;
    cmd_simulate(&cfg).unwrap();
    let full = read_tensor(out.join("full.tensor")).unwrap();
    assert_eq!(full.dims(), &[2, 2, 2]);
}

#[test]
fn simulate_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    cmd_simulate(&base_sim_config(&out_a)).unwrap();
    cmd_simulate(&base_sim_config(&out_b)).unwrap();
    for name in ["train.tensor", "test.tensor", "full.tensor", "design.csv", "truth.txt"] {
        let a = fs::read(out_a.join(name)).unwrap();
        let b = fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between reruns");
    }
}

#[test]
fn fit_traces_have_scheme_dependent_columns() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    cmd_simulate(&base_sim_config(&data)).unwrap();

    let out = dir.path().join("fit");
    let cfg = fit_config(&data, &out);
    cmd_fit(&cfg, Scheme::TrainOnly).unwrap();
    cmd_fit(&cfg, Scheme::Joint).unwrap();

    let train_trace = read_trace(out.join("trace_train-only.csv")).unwrap();
    assert_eq!(
        train_trace.param_names,
        ["q11", "q22", "sigma11", "sigma22", "rho"]
    );
    let joint_trace = read_trace(out.join("trace_joint.csv")).unwrap();
    assert_eq!(
        joint_trace.param_names,
        ["s1", "s2", "q11", "q22", "sigma11", "sigma22", "rho"]
    );
    assert_eq!(train_trace.iters.len(), 500);

    // one report row per active parameter, reports re-parse
    let report = read_report(out.join("report_train-only.txt")).unwrap();
    assert_eq!(report.len(), 5);
    let report = read_report(out.join("report_joint.txt")).unwrap();
    assert_eq!(report.len(), 7);

    // histograms re-parse and count all stored samples
    for name in ["q11", "rho"] {
        let bins = read_histogram(out.join(format!("hist_{name}_train-only.csv"))).unwrap();
        let total: usize = bins.iter().map(|b| b.count).sum();
        assert_eq!(total, 500);
    }
}

#[test]
fn predict_consumes_modal_file_and_emits_converted_rows() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    cmd_simulate(&base_sim_config(&data)).unwrap();
    let out = dir.path().join("run");
    let mut cfg = fit_config(&data, &out);
    cmd_fit(&cfg, Scheme::TrainOnly).unwrap();

    cfg.modal_params = Some(out.join("modal_train-only.txt"));
    cfg.seed = 43;
    let written = cmd_predict(&cfg).unwrap();
    assert!(written.iter().any(|p| p.ends_with("trace_predictive.csv")));

    let report = read_report(out.join("report_predictive.txt")).unwrap();
    let names: Vec<&str> = report.iter().map(|r| r.name.as_str()).collect();
    assert_eq!(names, ["s1", "s2", "omega_bar_km_s_kpc", "bar_angle_deg"]);
    // converted rows are the monotone images of the s rows
    let s1 = &report[0];
    let omega = &report[2];
    assert!((omega.interval.lower - 220.0 * s1.interval.lower / 8.0).abs() < 1e-9);
    assert!((omega.interval.upper - 220.0 * s1.interval.upper / 8.0).abs() < 1e-9);

    // missing modal file is a hard error
    cfg.modal_params = Some(out.join("missing.txt"));
    assert!(cmd_predict(&cfg).is_err());
}

#[test]
fn fit_reruns_and_added_chains_do_not_perturb_existing_traces() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    cmd_simulate(&base_sim_config(&data)).unwrap();

    let out1 = dir.path().join("one");
    let mut cfg = fit_config(&data, &out1);
    cmd_fit(&cfg, Scheme::TrainOnly).unwrap();
    let single = fs::read(out1.join("trace_train-only.csv")).unwrap();

    // rerun: byte-identical
    let out2 = dir.path().join("two");
    cfg.output_dir = out2.clone();
    cmd_fit(&cfg, Scheme::TrainOnly).unwrap();
    assert_eq!(single, fs::read(out2.join("trace_train-only.csv")).unwrap());

    // two chains: chain 0 equals the single-chain trace
    let out3 = dir.path().join("three");
    cfg.output_dir = out3.clone();
    cfg.chains = 2;
    cmd_fit(&cfg, Scheme::TrainOnly).unwrap();
    let chain0 = fs::read(out3.join("trace_train-only_chain0.csv")).unwrap();
    let chain1 = fs::read(out3.join("trace_train-only_chain1.csv")).unwrap();
    assert_eq!(single, chain0);
    assert_ne!(chain0, chain1);
}

#[test]
fn analyze_matches_the_fit_report() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    cmd_simulate(&base_sim_config(&data)).unwrap();
    let out = dir.path().join("fit");
    let cfg = fit_config(&data, &out);
    cmd_fit(&cfg, Scheme::TrainOnly).unwrap();

    let analyze_out = dir.path().join("analyze");
    cmd_analyze(&out.join("trace_train-only.csv"), cfg.bins, &analyze_out).unwrap();
    let original = read_report(out.join("report_train-only.txt")).unwrap();
    let recomputed = read_report(analyze_out.join("report_trace_train-only.txt")).unwrap();
    assert_eq!(original, recomputed);
}

#[test]
fn convert_units_round_trips_through_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let report_path = dir.path().join("report_s.txt");
    write_file(
        &report_path,
        "# 95% HPD credible intervals\n\
         parameter lower upper mode\n\
         s1 1.7496 2.0995 1.9\n\
         s2 0.079 0.7609 0.3\n",
    );
    let out = dir.path().join("units");
    let consts = tvgp::units::UnitConstants::default();
    let written = cmd_convert_units(&report_path, &out, &consts).unwrap();
    let rows = read_report(&written).unwrap();
    assert_eq!(rows.len(), 2);
    assert!((rows[0].interval.lower - 48.114).abs() < 0.001);
    assert!((rows[0].interval.upper - 57.73625).abs() < 0.001);
    assert!((rows[1].interval.lower - 4.5263).abs() < 0.001);

    // a report with no s rows cannot be converted
    let gp_only = dir.path().join("report_gp.txt");
    write_file(
        &gp_only,
        "# intervals\nparameter lower upper mode\nq11 1 2 1.5\n",
    );
    assert!(cmd_convert_units(&gp_only, &out, &consts).is_err());
}

#[test]
fn loader_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    cmd_simulate(&base_sim_config(&data)).unwrap();

    // truncated design: row count no longer matches the tensor
    let design_text = fs::read_to_string(data.join("design.csv")).unwrap();
    let truncated: Vec<&str> = design_text.lines().take(5).collect();
    write_file(&data.join("design_short.csv"), &(truncated.join("\n") + "\n"));

    let out = dir.path().join("fit");
    let mut cfg = fit_config(&data, &out);
    cfg.design = Some(data.join("design_short.csv"));
    let err = cmd_fit(&cfg, Scheme::TrainOnly).unwrap_err();
    assert!(err.to_string().contains("mode-1 order"), "{err}");

    // malformed dims header names line 1
    write_file(&data.join("bad.tensor"), "size: 2 2\n1 2 3 4\n");
    let mut cfg = fit_config(&data, &out);
    cfg.train_tensor = Some(data.join("bad.tensor"));
    let err = cmd_fit(&cfg, Scheme::TrainOnly).unwrap_err();
    let chain = format!("{:#}", err);
    assert!(chain.contains(":1:"), "{chain}");
}

#[test]
fn output_dir_env_var_overrides_config() {
    // drive the real binary so the environment stays test-local
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("sim.cfg");
    write_file(
        &cfg_path,
        "output_dir = ignored\nseed = 1\nn_r = 2\nn_phi = 2\nm2 = 3\nm3 = 2\n",
    );
    let out = dir.path().join("env_out");
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_tvgp"))
        .args(["simulate", "--config"])
        .arg(&cfg_path)
        .env("TVGP_OUTPUT_DIR", &out)
        .current_dir(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("train.tensor").exists());
    assert!(!dir.path().join("ignored").exists());
}

#[test]
fn fit_rejects_out_of_support_init_with_advice() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    cmd_simulate(&base_sim_config(&data)).unwrap();
    let out = dir.path().join("fit");
    let mut cfg = fit_config(&data, &out);
    // negative length scale is outside the prior support
    let cfg_path = dir.path().join("bad_init.cfg");
    write_file(
        &cfg_path,
        &format!(
            "train_tensor = {}\ndesign = {}\noutput_dir = {}\ninit_q11 = -5\n",
            data.join("train.tensor").display(),
            data.join("design.csv").display(),
            out.display()
        ),
    );
    cfg = RunConfig::from_file(&cfg_path).unwrap();
    let err = cmd_fit(&cfg, Scheme::TrainOnly).unwrap_err();
    assert!(err.to_string().contains("initial point"), "{err}");
}

fn paths_exist(paths: &[PathBuf]) -> bool {
    paths.iter().all(|p| p.exists())
}

#[test]
fn multi_chain_outputs_are_suffixed() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    cmd_simulate(&base_sim_config(&data)).unwrap();
    let out = dir.path().join("fit");
    let mut cfg = fit_config(&data, &out);
    cfg.chains = 3;
    cfg.iterations = 200;
    cfg.burn_in = 50;
    let written = cmd_fit(&cfg, Scheme::TrainOnly).unwrap();
    assert!(paths_exist(&written));
    for k in 0..3 {
        assert!(out.join(format!("trace_train-only_chain{k}.csv")).exists());
    }
}

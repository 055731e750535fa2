use std::fs;

use adaptscale::io::STEPS_HEADER;
use adaptscale::report::{emit_report, ResultSet, GAP};
use adaptscale::suite::*;
use adaptscale::{ExperimentConfig, LabError};

fn single_cell(dir: &std::path::Path) -> ExperimentConfig {
    ExperimentConfig::from_toml_str(&format!(
        "archetypes = [\"flash_crowd\"]\nseeds = [42]\npolicies = [\"mpc_ar_ls\"]\nout_dir = {:?}\n",
        dir.display().to_string()
    ))
    .unwrap()
}

#[test]
fn single_cell_writes_one_run_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_matrix(&single_cell(tmp.path())).unwrap();
    let runs: Vec<_> = fs::read_dir(&out.dir).unwrap().filter_map(|e| e.ok()).filter(|e| e.path().is_dir()).collect();
    assert_eq!(runs.len(), 1);
    assert_eq!(runs[0].file_name(), "mpc_ar_ls_flash_crowd_42");
    let steps = fs::read_to_string(runs[0].path().join("steps.csv")).unwrap();
    let mut lines = steps.lines();
    assert_eq!(
        lines.next().unwrap(),
        "step,rps,active,warming,capacity,utilization,latency_ms,violated,violation_fraction,cost,n_reactive,n_pro,target,horizon,adapt_estimate"
    );
    assert_eq!(STEPS_HEADER.join(","), steps.lines().next().unwrap());
    // 20% of 500 steps are evaluated
    assert_eq!(lines.count(), 100);
    for name in ["summary.csv", "summary.json", "report.md", "main_results.csv"] {
        assert!(out.dir.join(name).exists(), "{name}");
    }
    assert!(!out.dir.join("INCOMPLETE").exists());
}

#[test]
fn summary_json_echoes_resolved_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = single_cell(tmp.path());
    let out = run_matrix(&cfg).unwrap();
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(json["complete"], true);
    assert_eq!(json["suite"], "matrix");
    assert!(json["ci_method"].as_str().unwrap().contains("student-t"));
    // every default is spelled out, not just the fields the file set
    assert_eq!(json["config"]["sim"]["cold_start"]["nominal_seconds"], 120.0);
    assert_eq!(json["config"]["sim"]["weights"]["gamma"], 1.375);
    assert_eq!(json["cells"].as_array().unwrap().len(), 1);
    assert!(json["aggregates"][0]["sla_violation_rate"]["half_width"].is_null());
}

#[test]
fn failed_cell_aborts_and_marks_outputs_incomplete() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = single_cell(tmp.path());
    cfg.policies = vec!["hpa".into(), "mpc_ar_ls".into()];
    let blocker = tmp.path().join("matrix/hpa_flash_crowd_42");
    fs::create_dir_all(blocker.parent().unwrap()).unwrap();
    fs::write(&blocker, "not a directory").unwrap();
    match run_matrix(&cfg) {
        Err(LabError::Cell { cell, .. }) => assert_eq!(cell, "hpa_flash_crowd_42"),
        other => panic!("expected a cell failure, got {other:?}"),
    }
    let dir = tmp.path().join("matrix");
    assert!(fs::read_to_string(dir.join("INCOMPLETE")).unwrap().contains("hpa_flash_crowd_42"));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(json["complete"], false);
    assert_eq!(json["failures"][0]["cell"], "hpa_flash_crowd_42");
    // the surviving cell is still reported
    assert_eq!(json["cells"].as_array().unwrap().len(), 1);

    // a clean rerun clears the marker
    fs::remove_file(&blocker).unwrap();
    run_matrix(&cfg).unwrap();
    assert!(!dir.join("INCOMPLETE").exists());
}

#[test]
fn sweep_grid_and_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = single_cell(tmp.path());
    cfg.policies = vec!["hpa".into(), "mpc_des".into()];
    cfg.sensitivity.archetypes = vec!["flash_crowd".into()];
    cfg.seeds = vec![42, 123];
    let out = run_sensitivity(&cfg).unwrap();
    assert_eq!(out.suite.cells.len(), 5 * 2 * 2);
    assert!(out.suite.dir.join("delta_30s/hpa_flash_crowd_42/steps.csv").exists());
    assert!(out.suite.dir.join("delta_300s/mpc_des_flash_crowd_123/adapt.csv").exists());
    // per-workload plus pooled rows, every rate a probability
    assert_eq!(out.grid.len(), 5 * 2 * 2);
    assert!(out.grid.iter().all(|r| (0.0..=1.0).contains(&r.sla_violation_rate.mean)));
    let csv = fs::read_to_string(out.suite.dir.join("grid.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), GRID_HEADER.join(","));
    assert_eq!(csv.lines().count(), 1 + out.grid.len());
    // cold start is the only thing that changes between levels
    let at = |l: f64| out.suite.cells.iter().filter(|c| c.cold_start_seconds == l).count();
    assert_eq!(at(30.0), 4);
    assert_eq!(at(300.0), 4);
}

#[test]
fn ab_test_pairs_identical_traces() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = single_cell(tmp.path());
    cfg.seeds = vec![42, 123, 456, 789, 1337];
    let out = run_fhopt_ab(&cfg).unwrap();
    assert_eq!(out.suite.cells.len(), 2 * 2 * 5);
    assert_eq!(out.ab.pairs.len(), 10);
    for c in out.suite.cells.iter().filter(|c| c.variant == "fixed_h2") {
        assert_eq!((c.horizon_min, c.horizon_max), (2, 2));
    }
    for c in &out.ab.comparisons {
        let t = c.test.unwrap();
        assert_eq!(t.n_pairs, if c.workload == "pooled" { 10 } else { 5 });
        assert!(t.p_value >= 0.0625 || c.workload == "pooled");
    }
    let caveat = out.ab.comparisons[0].power_caveat.as_deref().unwrap();
    assert!(caveat.contains("0.0625"));
    let report = fs::read_to_string(out.suite.dir.join("report.md")).unwrap();
    assert!(report.contains("Power caveat"));
}

#[test]
fn broken_pairing_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_fhopt_ab(&single_cell(tmp.path())).unwrap();
    // one seed per workload: paired but untestable
    assert!(out.ab.comparisons.iter().filter(|c| c.workload != "pooled").all(|c| c.test.is_none()));
    let mut cells = out.suite.cells.clone();
    cells[0].trace_sha256 = "0".repeat(64);
    assert!(matches!(paired_analysis(&cells, "mpc_ar_ls", 2), Err(LabError::Pairing(_))));
    let mut cells = out.suite.cells.clone();
    let fixed = cells.iter_mut().find(|c| c.variant == "fixed_h2").unwrap();
    fixed.horizon_max = 3;
    assert!(matches!(paired_analysis(&cells, "mpc_ar_ls", 2), Err(LabError::Pairing(_))));
    let only_one_arm: Vec<_> = out.suite.cells.iter().filter(|c| c.variant == "adaptive").cloned().collect();
    assert!(matches!(paired_analysis(&only_one_arm, "mpc_ar_ls", 2), Err(LabError::Pairing(_))));
}

#[test]
fn report_marks_gaps_and_undefined_intervals() {
    assert!(matches!(emit_report(&ResultSet::default()), Err(LabError::EmptyReport)));
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = single_cell(tmp.path());
    cfg.policies = vec!["hpa".into(), "mpc_ar_ls".into()];
    cfg.archetypes = vec!["flash_crowd".into(), "smooth".into()];
    let mut cells = run_matrix(&cfg).unwrap().cells;
    // drop one (policy, workload) cell entirely
    cells.retain(|c| !(c.policy == "hpa" && c.workload == "smooth"));
    let report = emit_report(&ResultSet {
        matrix: cells,
        ..ResultSet::default()
    })
    .unwrap();
    assert!(report.markdown.contains("± undefined"));
    let (_, table) = report.tables.iter().find(|(n, _)| n == "main_results.csv").unwrap();
    let hpa_row = table.lines().find(|l| l.starts_with("hpa,")).unwrap();
    assert!(hpa_row.contains(GAP), "{hpa_row}");
    assert!(report.markdown.contains("relaxed from the published below-5%"));
}

#[test]
fn default_matrix_has_three_by_six_table() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        out_dir: tmp.path().to_path_buf(),
        ..ExperimentConfig::default()
    };
    let out = run_matrix(&cfg).unwrap();
    assert_eq!(out.cells.len(), 90);
    assert_eq!(out.aggregates.len(), 18);
    let table = fs::read_to_string(out.dir.join("main_results.csv")).unwrap();
    let rows: Vec<&str> = table.lines().collect();
    assert_eq!(rows[0], "policy,smooth,bursty,bimodal,diurnal_burst,flash_crowd,slow_ramp");
    assert_eq!(rows.len(), 4);
    assert!(rows[1..].iter().all(|r| r.matches(" ± ").count() == 6));
    let summary = fs::read_to_string(out.dir.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 90 + 18);
}

#[test]
fn traces_round_trip_with_checksums() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = single_cell(tmp.path());
    let files = gen_traces(&cfg).unwrap();
    assert_eq!(files.len(), 1);
    let back = adaptscale::io::read_trace(&files[0].path, "flash_crowd".parse().unwrap(), 42, 60.0).unwrap();
    assert_eq!(adaptscale::io::trace_checksum(&back), files[0].sha256);
    let index = fs::read_to_string(tmp.path().join("traces/checksums.csv")).unwrap();
    assert!(index.contains(&files[0].sha256));
}

#[test]
fn cell_order_does_not_depend_on_thread_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut cfg = single_cell(a.path());
    cfg.archetypes = vec!["bursty".into(), "bimodal".into()];
    cfg.seeds = vec![1, 2, 3];
    cfg.threads = 1;
    run_matrix(&cfg).unwrap();
    cfg.out_dir = b.path().to_path_buf();
    cfg.threads = 4;
    run_matrix(&cfg).unwrap();
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("matrix/summary.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

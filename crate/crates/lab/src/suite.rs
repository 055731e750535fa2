//! The three experiment suites. Every suite expands into independent cells
//! (policy × workload × seed, plus a variant such as a cold-start level),
//! runs them on a rayon pool and writes results sorted by cell key, so the
//! output bytes do not depend on scheduling.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use adaptscale_core::engine::{run, HorizonMode, PolicySpec, SimConfig};
use adaptscale_core::estimator::EstimatorSummary;
use adaptscale_core::stats::{mean_ci95, summarize_run, wilcoxon_signed_rank, MeanCi, PairedTestResult, RunMetrics, SIGNIFICANCE_LEVEL};
use adaptscale_core::trace::{generate, Archetype, TraceParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::io;
use crate::report::{emit_report, ResultSet};

pub const CI_METHOD: &str = "student-t 95% interval over seeds: mean ± t(0.975, n-1)·s/sqrt(n)";
pub const TEST_METHOD: &str = "two-sided Wilcoxon signed-rank on paired per-seed SLA violation rates; exact null for up to 25 non-zero pairs";
pub const SUMMARY_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Matrix,
    Sensitivity,
    AbTest,
}

impl Suite {
    pub fn dir_name(self) -> &'static str {
        match self {
            Suite::Matrix => "matrix",
            Suite::Sensitivity => "sweep",
            Suite::AbTest => "abtest",
        }
    }
}

/// One independent simulation.
#[derive(Debug, Clone)]
pub struct CellSpec {
    /// Sort rank of the variant (cold-start level or A/B arm).
    pub group: usize,
    /// Sub-directory for the variant; empty for the plain matrix.
    pub variant: String,
    pub policy: PolicySpec,
    pub archetype: Archetype,
    pub seed: u64,
    pub sim: SimConfig,
}

impl CellSpec {
    pub fn id(&self) -> String {
        format!("{}_{}_{}", self.policy, self.archetype, self.seed)
    }

    pub fn relative_dir(&self) -> PathBuf {
        let mut p = PathBuf::from(&self.variant);
        p.push(self.id());
        p
    }

    pub fn label(&self) -> String {
        self.relative_dir().display().to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellResult {
    pub variant: String,
    pub policy: String,
    pub workload: String,
    pub seed: u64,
    pub cold_start_seconds: f64,
    pub horizon_mode: String,
    pub metrics: RunMetrics,
    pub horizon_min: u32,
    pub horizon_max: u32,
    pub horizon_mean: f64,
    pub adapt: EstimatorSummary,
    pub ar_order: Option<usize>,
    pub trace_sha256: String,
    #[serde(skip)]
    pub group: usize,
}

impl CellResult {
    fn key(&self) -> (usize, &str, &str, u64) {
        (self.group, &self.policy, &self.workload, self.seed)
    }
}

/// Mean ± CI over seeds for one (variant, policy, workload).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub variant: String,
    pub policy: String,
    pub workload: String,
    pub n_seeds: usize,
    pub sla_violation_rate: MeanCi,
    pub total_cost_replica_minutes: MeanCi,
    pub avg_replicas: MeanCi,
    pub avg_latency_ms: MeanCi,
    #[serde(skip)]
    pub group: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellFailure {
    pub cell: String,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct SuiteOutput {
    pub dir: PathBuf,
    pub cells: Vec<CellResult>,
    pub aggregates: Vec<Aggregate>,
}

/// One heatmap cell: violation rate at a cold-start level. `workload` is
/// `all` for the pool over every swept archetype and seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub cold_start_seconds: f64,
    pub policy: String,
    pub workload: String,
    pub sla_violation_rate: MeanCi,
}

#[derive(Debug, Clone)]
pub struct SensitivityOutput {
    pub suite: SuiteOutput,
    pub grid: Vec<GridRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairRow {
    pub workload: String,
    pub seed: u64,
    pub adaptive: f64,
    pub fixed: f64,
    pub trace_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedComparison {
    /// A workload name, or `pooled` for all pairs together.
    pub workload: String,
    pub mean_adaptive: f64,
    pub mean_fixed: f64,
    pub n_pairs: usize,
    /// `None` with fewer than two pairs.
    pub test: Option<PairedTestResult>,
    pub power_caveat: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbSummary {
    pub policy: String,
    pub fixed_horizon: u32,
    pub pairs: Vec<PairRow>,
    pub comparisons: Vec<PairedComparison>,
}

#[derive(Debug, Clone)]
pub struct AbOutput {
    pub suite: SuiteOutput,
    pub ab: AbSummary,
}

/// Explains when `n` pairs cannot reach significance at any effect size:
/// the smallest exact two-sided p-value, all signs agreeing, is `2 / 2^n`.
pub fn power_caveat(n_pairs: usize) -> Option<String> {
    let min_p = 2.0 / 2f64.powi(i32::try_from(n_pairs).unwrap_or(i32::MAX));
    (min_p >= SIGNIFICANCE_LEVEL).then(|| {
        format!(
            "with n = {n_pairs} pairs the smallest attainable two-sided exact p-value is {min_p}, \
             not below alpha = {SIGNIFICANCE_LEVEL}: no outcome of this comparison can be significant"
        )
    })
}

fn horizon_label(mode: HorizonMode, policy: PolicySpec) -> String {
    if policy == PolicySpec::HPA {
        return "n/a".into();
    }
    match mode {
        HorizonMode::Adaptive => "adaptive".into(),
        HorizonMode::Fixed(h) => format!("fixed_{h}"),
    }
}

pub fn run_cell(spec: &CellSpec, trace: &TraceParams, num_steps: usize, suite_dir: &Path) -> Result<CellResult> {
    let t = generate(spec.archetype, spec.seed, num_steps, trace)?;
    let out = run(&t, spec.policy, &spec.sim, spec.seed)?;
    let dir = suite_dir.join(spec.relative_dir());
    io::write_steps(&dir.join("steps.csv"), &out.records)?;
    io::write_graduations(&dir.join("adapt.csv"), &out.graduations)?;
    let metrics = summarize_run(&out.records, &out.split)?;
    let horizons = out.records.iter().map(|r| r.horizon);
    Ok(CellResult {
        variant: spec.variant.clone(),
        policy: spec.policy.to_string(),
        workload: spec.archetype.to_string(),
        seed: spec.seed,
        cold_start_seconds: spec.sim.cold_start.nominal_seconds,
        horizon_mode: horizon_label(spec.sim.horizon_mode, spec.policy),
        metrics,
        horizon_min: horizons.clone().min().unwrap_or(0),
        horizon_max: horizons.clone().max().unwrap_or(0),
        horizon_mean: horizons.map(f64::from).sum::<f64>() / out.records.len().max(1) as f64,
        adapt: out.estimator,
        ar_order: out.ar_order,
        trace_sha256: io::trace_checksum(&t),
        group: spec.group,
    })
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| LabError::Config(format!("threads: {e}")))
}

/// Failed cells by label.
type Failures = Vec<(String, LabError)>;

/// Runs every cell; successes come back sorted by cell key, failures by label.
fn execute(cfg: &ExperimentConfig, cells: &[CellSpec], suite_dir: &Path) -> Result<(Vec<CellResult>, Failures)> {
    let outcomes: Vec<(String, Result<CellResult>)> = pool(cfg.threads)?.install(|| {
        cells
            .par_iter()
            .map(|c| (c.label(), run_cell(c, &cfg.trace, cfg.num_steps, suite_dir)))
            .collect()
    });
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for (label, r) in outcomes {
        match r {
            Ok(c) => ok.push(c),
            Err(e) => failed.push((label, e)),
        }
    }
    ok.sort_by(|a, b| a.key().cmp(&b.key()));
    failed.sort_by(|a, b| a.0.cmp(&b.0));
    Ok((ok, failed))
}

pub fn aggregate(cells: &[CellResult]) -> Result<Vec<Aggregate>> {
    let mut groups: BTreeMap<(usize, &str, &str), Vec<&CellResult>> = BTreeMap::new();
    for c in cells {
        groups.entry((c.group, &c.policy, &c.workload)).or_default().push(c);
    }
    groups
        .into_values()
        .map(|g| {
            let ci = |f: fn(&RunMetrics) -> f64| mean_ci95(&g.iter().map(|c| f(&c.metrics)).collect::<Vec<_>>());
            Ok(Aggregate {
                variant: g[0].variant.clone(),
                policy: g[0].policy.clone(),
                workload: g[0].workload.clone(),
                n_seeds: g.len(),
                sla_violation_rate: ci(|m| m.sla_violation_rate)?,
                total_cost_replica_minutes: ci(|m| m.total_cost_replica_minutes)?,
                avg_replicas: ci(|m| m.avg_replicas)?,
                avg_latency_ms: ci(|m| m.avg_latency_ms)?,
                group: g[0].group,
            })
        })
        .collect()
}

pub const SUMMARY_HEADER: [&str; 20] = [
    "row",
    "variant",
    "policy",
    "workload",
    "seed",
    "n",
    "sla_violation_rate",
    "sla_violation_rate_ci95",
    "total_cost_replica_minutes",
    "total_cost_replica_minutes_ci95",
    "avg_replicas",
    "avg_replicas_ci95",
    "avg_latency_ms",
    "avg_latency_ms_ci95",
    "violated_steps",
    "test_steps",
    "adapt_estimate_seconds",
    "adapt_observations",
    "ar_order",
    "trace_sha256",
];

fn half_width(ci: &MeanCi) -> String {
    ci.half_width.map_or_else(|| "undefined".into(), |h| h.to_string())
}

fn summary_csv(cells: &[CellResult], aggregates: &[Aggregate]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut put = |row: Vec<String>| w.write_record(&row).map_err(|e| LabError::Config(e.to_string()));
    put(SUMMARY_HEADER.iter().map(|s| s.to_string()).collect())?;
    for c in cells {
        let m = &c.metrics;
        put(vec![
            "cell".into(),
            c.variant.clone(),
            c.policy.clone(),
            c.workload.clone(),
            c.seed.to_string(),
            "1".into(),
            m.sla_violation_rate.to_string(),
            String::new(),
            m.total_cost_replica_minutes.to_string(),
            String::new(),
            m.avg_replicas.to_string(),
            String::new(),
            m.avg_latency_ms.to_string(),
            String::new(),
            m.violated_steps.to_string(),
            m.test_steps.to_string(),
            c.adapt.estimate_seconds.to_string(),
            c.adapt.count.to_string(),
            c.ar_order.map(|p| p.to_string()).unwrap_or_default(),
            c.trace_sha256.clone(),
        ])?;
    }
    for a in aggregates {
        put(vec![
            "aggregate".into(),
            a.variant.clone(),
            a.policy.clone(),
            a.workload.clone(),
            String::new(),
            a.n_seeds.to_string(),
            a.sla_violation_rate.mean.to_string(),
            half_width(&a.sla_violation_rate),
            a.total_cost_replica_minutes.mean.to_string(),
            half_width(&a.total_cost_replica_minutes),
            a.avg_replicas.mean.to_string(),
            half_width(&a.avg_replicas),
            a.avg_latency_ms.mean.to_string(),
            half_width(&a.avg_latency_ms),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| LabError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Serialize)]
struct SummaryJson<'a> {
    schema_version: u32,
    suite: &'static str,
    complete: bool,
    ci_method: &'static str,
    config: &'a ExperimentConfig,
    cells: &'a [CellResult],
    aggregates: &'a [Aggregate],
    failures: &'a [CellFailure],
    #[serde(flatten)]
    extra: serde_json::Map<String, serde_json::Value>,
}

/// Writes summary.{csv,json}. If a cell or the suite analysis fails, the
/// outputs are marked incomplete (JSON flag plus an `INCOMPLETE` file) and
/// the first failure is returned with its cell identity.
fn finish(
    suite: Suite,
    cfg: &ExperimentConfig,
    dir: &Path,
    cells: Vec<CellResult>,
    mut failed: Failures,
    analysis: impl FnOnce(&[CellResult]) -> Result<serde_json::Map<String, serde_json::Value>>,
) -> Result<SuiteOutput> {
    let mut aggregates = Vec::new();
    let mut extra = serde_json::Map::new();
    if failed.is_empty() {
        match aggregate(&cells).and_then(|a| Ok((a, analysis(&cells)?))) {
            Ok((a, e)) => (aggregates, extra) = (a, e),
            Err(e) => failed.push(("analysis".into(), e)),
        }
    }
    let failures: Vec<CellFailure> = failed
        .iter()
        .map(|(cell, e)| CellFailure {
            cell: cell.clone(),
            error: e.to_string(),
        })
        .collect();
    io::write_text(&dir.join("summary.csv"), &summary_csv(&cells, &aggregates)?)?;
    let json = SummaryJson {
        schema_version: SUMMARY_SCHEMA_VERSION,
        suite: suite.dir_name(),
        complete: failed.is_empty(),
        ci_method: CI_METHOD,
        config: cfg,
        cells: &cells,
        aggregates: &aggregates,
        failures: &failures,
        extra,
    };
    io::write_json(&dir.join("summary.json"), &json)?;
    let marker = dir.join("INCOMPLETE");
    if let Some((cell, source)) = failed.into_iter().next() {
        let text: String = failures.iter().map(|f| format!("{}: {}\n", f.cell, f.error)).collect();
        io::write_text(&marker, &text)?;
        return Err(LabError::Cell {
            cell,
            source: Box::new(source),
        });
    }
    if marker.exists() {
        fs::remove_file(&marker).map_err(LabError::io(&marker))?;
    }
    Ok(SuiteOutput {
        dir: dir.to_path_buf(),
        cells,
        aggregates,
    })
}

fn write_report(dir: &Path, results: &ResultSet) -> Result<()> {
    let report = emit_report(results)?;
    io::write_text(&dir.join("report.md"), &report.markdown)?;
    for (name, text) in &report.tables {
        io::write_text(&dir.join(name), text)?;
    }
    Ok(())
}

pub fn matrix_cells(cfg: &ExperimentConfig) -> Result<Vec<CellSpec>> {
    let mut cells = Vec::new();
    for policy in cfg.policy_list()? {
        for archetype in cfg.archetype_list()? {
            for &seed in &cfg.seeds {
                cells.push(CellSpec {
                    group: 0,
                    variant: String::new(),
                    policy,
                    archetype,
                    seed,
                    sim: cfg.sim.clone(),
                });
            }
        }
    }
    Ok(cells)
}

/// Every (policy, workload, seed) cell at the configured cold start.
pub fn run_matrix(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    cfg.validate()?;
    let dir = cfg.out_dir.join(Suite::Matrix.dir_name());
    let (cells, failed) = execute(cfg, &matrix_cells(cfg)?, &dir)?;
    let done = finish(Suite::Matrix, cfg, &dir, cells, failed, |_| Ok(serde_json::Map::new()))?;
    write_report(
        &dir,
        &ResultSet {
            matrix: done.cells.clone(),
            ..ResultSet::default()
        },
    )?;
    Ok(done)
}

pub fn level_variant(seconds: f64) -> String {
    format!("delta_{seconds}s")
}

pub fn sensitivity_cells(cfg: &ExperimentConfig) -> Result<Vec<CellSpec>> {
    let mut cells = Vec::new();
    for (group, &level) in cfg.sensitivity.levels_seconds.iter().enumerate() {
        let sim = cfg.sim_at_level(level);
        for policy in cfg.policy_list()? {
            for archetype in cfg.sensitivity_archetypes()? {
                for &seed in &cfg.seeds {
                    cells.push(CellSpec {
                        group,
                        variant: level_variant(level),
                        policy,
                        archetype,
                        seed,
                        sim: sim.clone(),
                    });
                }
            }
        }
    }
    Ok(cells)
}

/// Level × policy violation-rate grid, per workload and pooled.
pub fn sensitivity_grid(cells: &[CellResult]) -> Result<Vec<GridRow>> {
    let mut by_key: BTreeMap<(usize, &str, &str), Vec<&CellResult>> = BTreeMap::new();
    for c in cells {
        by_key.entry((c.group, &c.policy, &c.workload)).or_default().push(c);
        by_key.entry((c.group, &c.policy, "all")).or_default().push(c);
    }
    let mut rows: Vec<((usize, &str, bool, &str), GridRow)> = Vec::new();
    for ((group, policy, workload), g) in by_key {
        let rates: Vec<f64> = g.iter().map(|c| c.metrics.sla_violation_rate).collect();
        rows.push((
            (group, policy, workload == "all", workload),
            GridRow {
                cold_start_seconds: g[0].cold_start_seconds,
                policy: policy.to_string(),
                workload: workload.to_string(),
                sla_violation_rate: mean_ci95(&rates)?,
            },
        ));
    }
    // pooled rows after the per-workload rows of the same level and policy
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(rows.into_iter().map(|(_, r)| r).collect())
}

pub const GRID_HEADER: [&str; 6] = [
    "cold_start_seconds",
    "policy",
    "workload",
    "n",
    "sla_violation_rate",
    "sla_violation_rate_ci95",
];

pub fn grid_csv(grid: &[GridRow]) -> String {
    let mut out = GRID_HEADER.join(",");
    out.push('\n');
    for r in grid {
        let ci = &r.sla_violation_rate;
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.cold_start_seconds,
            r.policy,
            r.workload,
            ci.n,
            ci.mean,
            half_width(ci)
        ));
    }
    out
}

/// The configured policies at every cold-start level, all else held fixed.
pub fn run_sensitivity(cfg: &ExperimentConfig) -> Result<SensitivityOutput> {
    cfg.validate()?;
    let dir = cfg.out_dir.join(Suite::Sensitivity.dir_name());
    let (cells, failed) = execute(cfg, &sensitivity_cells(cfg)?, &dir)?;
    let mut grid = Vec::new();
    let done = finish(Suite::Sensitivity, cfg, &dir, cells, failed, |cells| {
        grid = sensitivity_grid(cells)?;
        let mut extra = serde_json::Map::new();
        extra.insert("grid".into(), serde_json::to_value(&grid)?);
        Ok(extra)
    })?;
    io::write_text(&dir.join("grid.csv"), &grid_csv(&grid))?;
    write_report(
        &dir,
        &ResultSet {
            sensitivity: grid.clone(),
            ..ResultSet::default()
        },
    )?;
    Ok(SensitivityOutput { suite: done, grid })
}

pub const ARM_ADAPTIVE: &str = "adaptive";

pub fn fixed_arm(h: u32) -> String {
    format!("fixed_h{h}")
}

pub fn ab_cells(cfg: &ExperimentConfig) -> Result<Vec<CellSpec>> {
    let policy = cfg.ab_policy()?;
    let arms = [
        (ARM_ADAPTIVE.to_string(), HorizonMode::Adaptive),
        (fixed_arm(cfg.abtest.fixed_horizon), HorizonMode::Fixed(cfg.abtest.fixed_horizon)),
    ];
    let mut cells = Vec::new();
    for (group, (variant, mode)) in arms.into_iter().enumerate() {
        for archetype in cfg.ab_archetypes()? {
            for &seed in &cfg.seeds {
                cells.push(CellSpec {
                    group,
                    variant: variant.clone(),
                    policy,
                    archetype,
                    seed,
                    sim: cfg.sim_with_horizon(mode),
                });
            }
        }
    }
    Ok(cells)
}

fn compare(workload: &str, pairs: &[&PairRow]) -> Result<PairedComparison> {
    let a: Vec<f64> = pairs.iter().map(|p| p.adaptive).collect();
    let f: Vec<f64> = pairs.iter().map(|p| p.fixed).collect();
    let n = pairs.len() as f64;
    Ok(PairedComparison {
        workload: workload.to_string(),
        mean_adaptive: a.iter().sum::<f64>() / n,
        mean_fixed: f.iter().sum::<f64>() / n,
        n_pairs: pairs.len(),
        test: if pairs.len() >= 2 { Some(wilcoxon_signed_rank(&a, &f)?) } else { None },
        power_caveat: power_caveat(pairs.len()),
    })
}

/// Pairs the two arms by (workload, seed), checks that each pair saw the
/// same trace and that the fixed arm never left its horizon, then tests
/// per workload and pooled.
pub fn paired_analysis(cells: &[CellResult], policy: &str, fixed_horizon: u32) -> Result<AbSummary> {
    let fixed_name = fixed_arm(fixed_horizon);
    let mut arms: BTreeMap<(&str, u64), (Option<&CellResult>, Option<&CellResult>)> = BTreeMap::new();
    for c in cells {
        let slot = arms.entry((&c.workload, c.seed)).or_default();
        if c.variant == ARM_ADAPTIVE {
            slot.0 = Some(c);
        } else if c.variant == fixed_name {
            if c.horizon_min != fixed_horizon || c.horizon_max != fixed_horizon {
                return Err(LabError::Pairing(format!(
                    "{}_{}: fixed arm used horizons {}..={}, not {fixed_horizon}",
                    c.workload, c.seed, c.horizon_min, c.horizon_max
                )));
            }
            slot.1 = Some(c);
        }
    }
    let mut pairs = Vec::new();
    for ((workload, seed), slot) in arms {
        let (Some(a), Some(f)) = slot else {
            return Err(LabError::Pairing(format!("{workload}_{seed}: one arm is missing")));
        };
        if a.trace_sha256 != f.trace_sha256 {
            return Err(LabError::Pairing(format!("{workload}_{seed}")));
        }
        pairs.push(PairRow {
            workload: workload.to_string(),
            seed,
            adaptive: a.metrics.sla_violation_rate,
            fixed: f.metrics.sla_violation_rate,
            trace_sha256: a.trace_sha256.clone(),
        });
    }
    let mut by_workload: BTreeMap<&str, Vec<&PairRow>> = BTreeMap::new();
    for p in &pairs {
        by_workload.entry(&p.workload).or_default().push(p);
    }
    let mut comparisons = Vec::new();
    for (workload, group) in &by_workload {
        comparisons.push(compare(workload, group)?);
    }
    if by_workload.len() > 1 {
        comparisons.push(compare("pooled", &pairs.iter().collect::<Vec<_>>())?);
    }
    Ok(AbSummary {
        policy: policy.to_string(),
        fixed_horizon,
        pairs,
        comparisons,
    })
}

/// FH-OPT against a fixed horizon: paired runs differing only in horizon mode.
pub fn run_fhopt_ab(cfg: &ExperimentConfig) -> Result<AbOutput> {
    cfg.validate()?;
    let dir = cfg.out_dir.join(Suite::AbTest.dir_name());
    let (cells, failed) = execute(cfg, &ab_cells(cfg)?, &dir)?;
    let policy = cfg.ab_policy()?.to_string();
    let mut ab = None;
    let done = finish(Suite::AbTest, cfg, &dir, cells, failed, |cells| {
        let summary = paired_analysis(cells, &policy, cfg.abtest.fixed_horizon)?;
        let mut extra = serde_json::Map::new();
        extra.insert("test_method".into(), TEST_METHOD.into());
        extra.insert("abtest".into(), serde_json::to_value(&summary)?);
        ab = Some(summary);
        Ok(extra)
    })?;
    let ab = ab.expect("a complete suite always has a paired analysis");
    write_report(
        &dir,
        &ResultSet {
            abtest: Some(ab.clone()),
            ..ResultSet::default()
        },
    )?;
    Ok(AbOutput { suite: done, ab })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceFile {
    pub workload: String,
    pub seed: u64,
    pub path: PathBuf,
    pub sha256: String,
}

/// Writes every (workload, seed) trace to `traces/<workload>_<seed>.csv`
/// plus a checksum index.
pub fn gen_traces(cfg: &ExperimentConfig) -> Result<Vec<TraceFile>> {
    cfg.validate()?;
    let dir = cfg.out_dir.join("traces");
    let mut files = Vec::new();
    for archetype in cfg.archetype_list()? {
        for &seed in &cfg.seeds {
            let t = generate(archetype, seed, cfg.num_steps, &cfg.trace)?;
            let path = dir.join(format!("{archetype}_{seed}.csv"));
            io::write_trace(&path, &t)?;
            files.push(TraceFile {
                workload: archetype.to_string(),
                seed,
                path,
                sha256: io::trace_checksum(&t),
            });
        }
    }
    let mut index = String::from("workload,seed,file,sha256\n");
    for f in &files {
        let name = f.path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default();
        index.push_str(&format!("{},{},{},{}\n", f.workload, f.seed, name, f.sha256));
    }
    io::write_text(&dir.join("checksums.csv"), &index)?;
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caveat_only_when_significance_is_unreachable() {
        assert!(power_caveat(5).unwrap().contains("0.0625"));
        assert!(power_caveat(4).is_some());
        assert!(power_caveat(6).is_none());
    }

    #[test]
    fn default_matrix_is_ninety_cells() {
        let cells = matrix_cells(&ExperimentConfig::default()).unwrap();
        assert_eq!(cells.len(), 90);
        let mut ids: Vec<String> = cells.iter().map(CellSpec::id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 90);
    }

    #[test]
    fn sweep_and_ab_grids() {
        let cfg = ExperimentConfig::default();
        assert_eq!(sensitivity_cells(&cfg).unwrap().len(), 5 * 3 * 6 * 5);
        let ab = ab_cells(&cfg).unwrap();
        assert_eq!(ab.len(), 2 * 2 * 5);
        assert!(ab.iter().all(|c| c.policy.to_string() == "mpc_ar_ls"));
        assert_eq!(ab.iter().filter(|c| c.sim.horizon_mode == HorizonMode::Fixed(2)).count(), 10);
    }

    #[test]
    fn level_variant_names() {
        assert_eq!(level_variant(30.0), "delta_30s");
        assert_eq!(level_variant(22.5), "delta_22.5s");
    }
}

//! Run metrics, confidence intervals and the paired signed-rank test.

use alloc::vec::Vec;

use crate::engine::StepRecord;
use crate::error::{Error, Result};
use crate::trace::SplitIndices;

/// Exact null distribution is used up to this many non-zero differences.
pub const EXACT_LIMIT: usize = 25;

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Differences (and rank ties) closer than this, relative to magnitude, are
/// treated as equal.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunMetrics {
    pub sla_violation_rate: f64,
    pub total_cost_replica_minutes: f64,
    pub avg_replicas: f64,
    pub avg_latency_ms: f64,
    /// Sum of the per-step weighted objective (diagnostic).
    pub objective_total: f64,
    pub test_steps: usize,
    pub violated_steps: usize,
}

/// Aggregates the records that fall inside the test split.
pub fn summarize_run(records: &[StepRecord], split: &SplitIndices) -> Result<RunMetrics> {
    let test: Vec<&StepRecord> = records
        .iter()
        .filter(|r| r.step >= split.val_end && r.step < split.test_end)
        .collect();
    if test.is_empty() {
        return Err(Error::protocol("no records inside the test split"));
    }
    let n = test.len() as f64;
    let violated_steps = test.iter().filter(|r| r.violated).count();
    Ok(RunMetrics {
        sla_violation_rate: violated_steps as f64 / n,
        total_cost_replica_minutes: test.iter().map(|r| r.cost).sum(),
        avg_replicas: test.iter().map(|r| f64::from(r.active + r.warming)).sum::<f64>() / n,
        avg_latency_ms: test.iter().map(|r| r.latency_ms).sum::<f64>() / n,
        objective_total: test.iter().map(|r| r.objective).sum(),
        test_steps: test.len(),
        violated_steps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeanCi {
    pub mean: f64,
    /// Student-t 95% half-width; `None` with fewer than two values.
    pub half_width: Option<f64>,
    pub n: usize,
}

/// `mean ± t(0.975, n−1)·s/√n`.
pub fn mean_ci95(values: &[f64]) -> Result<MeanCi> {
    if values.is_empty() {
        return Err(Error::Argument("mean of an empty sample".into()));
    }
    let n = values.len();
    // shifted by the first value: exact on constant samples
    let shift = values[0];
    let mean = shift + values.iter().map(|v| v - shift).sum::<f64>() / n as f64;
    if n < 2 {
        return Ok(MeanCi {
            mean,
            half_width: None,
            n,
        });
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let sd = libm::sqrt(ss / (n - 1) as f64);
    Ok(MeanCi {
        mean,
        half_width: Some(t_critical_975(n - 1) * sd / libm::sqrt(n as f64)),
        n,
    })
}

/// Two-sided 95% Student-t critical values for 1..=30 degrees of freedom.
const T_975: [f64; 30] = [
    12.706205, 4.302653, 3.182446, 2.776445, 2.570582, 2.446912, 2.364624, 2.306004, 2.262157, 2.228139,
    2.200985, 2.178813, 2.160369, 2.144787, 2.131450, 2.119905, 2.109816, 2.100922, 2.093024, 2.085963,
    2.079614, 2.073873, 2.068658, 2.063899, 2.059539, 2.055529, 2.051831, 2.048407, 2.045230, 2.042272,
];

/// Upper 0.975 quantile of Student's t. Tabulated up to 30 degrees of
/// freedom, Cornish-Fisher expansion around the normal quantile above.
pub fn t_critical_975(df: usize) -> f64 {
    assert!(df >= 1, "t distribution needs at least one degree of freedom");
    if df <= T_975.len() {
        return T_975[df - 1];
    }
    let z: f64 = 1.959_963_984_540_054;
    let v = df as f64;
    let z3 = z * z * z;
    let z5 = z3 * z * z;
    let z7 = z5 * z * z;
    let z9 = z7 * z * z;
    let g1 = (z3 + z) / 4.0;
    let g2 = (5.0 * z5 + 16.0 * z3 + 3.0 * z) / 96.0;
    let g3 = (3.0 * z7 + 19.0 * z5 + 17.0 * z3 - 15.0 * z) / 384.0;
    let g4 = (79.0 * z9 + 776.0 * z7 + 1482.0 * z5 - 1920.0 * z3 - 945.0 * z) / 92160.0;
    z + g1 / v + g2 / (v * v) + g3 / (v * v * v) + g4 / (v * v * v * v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PValueMethod {
    Exact,
    NormalApproximation,
    /// Every difference was zero.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PairedTestResult {
    /// `min(W+, W−)`.
    pub statistic_w: f64,
    pub p_value: f64,
    pub n_pairs: usize,
    pub n_nonzero: usize,
    pub significant_at_005: bool,
    pub method: PValueMethod,
}

impl PairedTestResult {
    pub fn is_degenerate(&self) -> bool {
        self.method == PValueMethod::Degenerate
    }
}

fn nearly_equal(a: f64, b: f64) -> bool {
    libm::fabs(a - b) <= TIE_TOLERANCE * libm::fabs(a).max(libm::fabs(b)).max(1.0)
}

/// Mid-ranks of `abs_diffs` (ascending), doubled so they are integers.
fn doubled_mid_ranks(abs_diffs: &[f64]) -> Vec<u64> {
    let m = abs_diffs.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| abs_diffs[i].total_cmp(&abs_diffs[j]));
    let mut ranks = alloc::vec![0u64; m];
    let mut i = 0;
    while i < m {
        let mut j = i + 1;
        while j < m && nearly_equal(abs_diffs[order[j]], abs_diffs[order[i]]) {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j; twice their mean is i+1+j
        let doubled = (i + 1 + j) as u64;
        for &k in &order[i..j] {
            ranks[k] = doubled;
        }
        i = j;
    }
    ranks
}

/// Number of sign assignments producing each doubled `W+` value.
fn signed_rank_counts(doubled_ranks: &[u64]) -> Vec<u64> {
    let total: u64 = doubled_ranks.iter().sum();
    let mut counts = alloc::vec![0u64; total as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in doubled_ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    counts
}

/// Wilcoxon signed-rank test on paired samples, two-sided.
///
/// Zero differences are dropped and tied magnitudes get mid-ranks. For up to
/// [`EXACT_LIMIT`] non-zero differences the p-value is the exact probability,
/// over all `2^m` equally likely sign assignments, that `min(W+, W−)` is at
/// most the observed value. Larger samples use the normal approximation with
/// tie and continuity corrections.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<PairedTestResult> {
    if a.len() != b.len() {
        return Err(Error::Argument(alloc::format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::Argument("signed-rank test needs at least two pairs".into()));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Argument("paired samples must be finite".into()));
    }
    let diffs: Vec<f64> = a
        .iter()
        .zip(b)
        .filter(|(x, y)| !nearly_equal(**x, **y))
        .map(|(x, y)| x - y)
        .collect();
    let m = diffs.len();
    if m == 0 {
        return Ok(PairedTestResult {
            statistic_w: 0.0,
            p_value: 1.0,
            n_pairs: a.len(),
            n_nonzero: 0,
            significant_at_005: false,
            method: PValueMethod::Degenerate,
        });
    }

    let abs: Vec<f64> = diffs.iter().map(|d| libm::fabs(*d)).collect();
    let ranks = doubled_mid_ranks(&abs);
    let total: u64 = ranks.iter().sum();
    let plus: u64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| *r).sum();
    let w2 = plus.min(total - plus);

    let (p_value, method) = if m <= EXACT_LIMIT {
        let counts = signed_rank_counts(&ranks);
        let hits: u64 = counts
            .iter()
            .enumerate()
            .filter(|(s, _)| (*s as u64).min(total - *s as u64) <= w2)
            .map(|(_, c)| *c)
            .sum();
        (hits as f64 / libm::ldexp(1.0, m as i32), PValueMethod::Exact)
    } else {
        (normal_p_value(w2 as f64 / 2.0, m, &ranks), PValueMethod::NormalApproximation)
    };
    let p_value = p_value.min(1.0);
    Ok(PairedTestResult {
        statistic_w: w2 as f64 / 2.0,
        p_value,
        n_pairs: a.len(),
        n_nonzero: m,
        significant_at_005: p_value < SIGNIFICANCE_LEVEL,
        method,
    })
}

fn normal_p_value(w: f64, m: usize, doubled_ranks: &[u64]) -> f64 {
    let mf = m as f64;
    let mean = mf * (mf + 1.0) / 4.0;
    // tie correction: Σ (t³ − t) / 48 over groups of equal ranks
    let mut sorted = doubled_ranks.to_vec();
    sorted.sort_unstable();
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|r| **r == sorted[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let var = mf * (mf + 1.0) * (2.0 * mf + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = (w - mean + 0.5) / libm::sqrt(var);
    // two-sided: 2·Φ(z) with z <= 0 for the smaller tail
    libm::erfc(-z / core::f64::consts::SQRT_2)
}

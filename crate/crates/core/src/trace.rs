//! Synthetic workload traces.
//!
//! Six archetypes, each a pure function of `(archetype, seed, num_steps,
//! params)`. Every generator draws from one ChaCha8 stream seeded with the
//! trace seed and clamps demand at zero after noise.
//!
//! Traces that carry a one-off event (the flash-crowd spike, the diurnal
//! peak) place it inside the evaluation window (the last fifth of the trace),
//! so that forecasters fitted on the earlier part have never seen it.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric, Normal, Poisson};

use crate::error::{Error, Result};
use crate::rng::trace_rng;

pub const DEFAULT_NUM_STEPS: usize = 500;

/// Shortest trace that still yields non-empty train/validation/test splits.
pub const MIN_SPLIT_LEN: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Archetype {
    Smooth,
    Bursty,
    Bimodal,
    DiurnalBurst,
    FlashCrowd,
    SlowRamp,
}

impl Archetype {
    pub const ALL: [Archetype; 6] = [
        Archetype::Smooth,
        Archetype::Bursty,
        Archetype::Bimodal,
        Archetype::DiurnalBurst,
        Archetype::FlashCrowd,
        Archetype::SlowRamp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Archetype::Smooth => "smooth",
            Archetype::Bursty => "bursty",
            Archetype::Bimodal => "bimodal",
            Archetype::DiurnalBurst => "diurnal_burst",
            Archetype::FlashCrowd => "flash_crowd",
            Archetype::SlowRamp => "slow_ramp",
        }
    }
}

impl fmt::Display for Archetype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Archetype {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Archetype::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::config(format!("archetype: unknown archetype `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SmoothParams {
    pub period_steps: f64,
    pub amplitude_rps: f64,
}

impl Default for SmoothParams {
    fn default() -> Self {
        Self {
            period_steps: 200.0,
            amplitude_rps: 40.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct BurstyParams {
    pub spike_interval_steps: usize,
    /// Spike spacing is `interval ± jitter`, drawn uniformly per spike.
    pub spike_interval_jitter: usize,
    pub spike_min_factor: f64,
    pub spike_max_factor: f64,
    pub spike_steps: usize,
}

impl Default for BurstyParams {
    fn default() -> Self {
        Self {
            spike_interval_steps: 50,
            spike_interval_jitter: 10,
            spike_min_factor: 2.0,
            spike_max_factor: 3.0,
            spike_steps: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct BimodalParams {
    pub low_rps: f64,
    pub high_rps: f64,
    /// Mean of the geometric holding time in each level.
    pub mean_holding_steps: f64,
}

impl Default for BimodalParams {
    fn default() -> Self {
        Self {
            low_rps: 80.0,
            high_rps: 240.0,
            mean_holding_steps: 40.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct DiurnalParams {
    pub period_steps: f64,
    /// Relative swing of the daily curve around the base rate.
    pub amplitude_fraction: f64,
    pub peak_steps: usize,
    /// Peak level as a multiple of the base rate.
    pub peak_factor: f64,
    /// Linear ramp length at each edge of the peak (part of `peak_steps`).
    pub peak_ramp_steps: usize,
    /// Onset is drawn uniformly from this range of trace fractions.
    pub onset_window: [f64; 2],
}

impl Default for DiurnalParams {
    fn default() -> Self {
        Self {
            period_steps: 480.0,
            amplitude_fraction: 0.5,
            peak_steps: 30,
            peak_factor: 2.5,
            peak_ramp_steps: 3,
            onset_window: [0.82, 0.88],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct FlashCrowdParams {
    pub spike_factor: f64,
    pub spike_steps: usize,
    pub onset_window: [f64; 2],
}

impl Default for FlashCrowdParams {
    fn default() -> Self {
        Self {
            spike_factor: 3.0,
            spike_steps: 20,
            onset_window: [0.82, 0.92],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SlowRampParams {
    pub start_rps: f64,
    pub end_rps: f64,
}

impl Default for SlowRampParams {
    fn default() -> Self {
        Self {
            start_rps: 50.0,
            end_rps: 400.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct TraceParams {
    pub base_rps: f64,
    /// Standard deviation of the additive Gaussian noise, as a fraction of
    /// `base_rps`. Bursty traces use Poisson counts instead.
    pub noise_fraction: f64,
    pub step_seconds: f64,
    pub smooth: SmoothParams,
    pub bursty: BurstyParams,
    pub bimodal: BimodalParams,
    pub diurnal: DiurnalParams,
    pub flash_crowd: FlashCrowdParams,
    pub slow_ramp: SlowRampParams,
}

impl Default for TraceParams {
    fn default() -> Self {
        Self {
            base_rps: 100.0,
            noise_fraction: 0.02,
            step_seconds: 60.0,
            smooth: SmoothParams::default(),
            bursty: BurstyParams::default(),
            bimodal: BimodalParams::default(),
            diurnal: DiurnalParams::default(),
            flash_crowd: FlashCrowdParams::default(),
            slow_ramp: SlowRampParams::default(),
        }
    }
}

fn require(ok: bool, field: &str, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(format!("{field}: {what}")))
    }
}

fn positive(x: f64) -> bool {
    x.is_finite() && x > 0.0
}

fn window_ok(w: [f64; 2]) -> bool {
    w[0].is_finite() && w[1].is_finite() && 0.0 <= w[0] && w[0] <= w[1] && w[1] <= 1.0
}

impl TraceParams {
    pub fn validate(&self) -> Result<()> {
        require(positive(self.base_rps), "base_rps", "must be positive")?;
        require(
            self.noise_fraction.is_finite() && (0.0..=0.05).contains(&self.noise_fraction),
            "noise_fraction",
            "must lie in [0, 0.05]",
        )?;
        require(positive(self.step_seconds), "step_seconds", "must be positive")?;

        let s = &self.smooth;
        require(s.period_steps.is_finite() && s.period_steps >= 2.0, "smooth.period_steps", "must be >= 2")?;
        require(s.amplitude_rps.is_finite() && s.amplitude_rps >= 0.0, "smooth.amplitude_rps", "must be >= 0")?;

        let b = &self.bursty;
        require(b.spike_interval_steps >= 1, "bursty.spike_interval_steps", "must be >= 1")?;
        require(
            b.spike_interval_jitter < b.spike_interval_steps,
            "bursty.spike_interval_jitter",
            "must be smaller than spike_interval_steps",
        )?;
        require(
            b.spike_min_factor.is_finite() && b.spike_min_factor >= 1.0,
            "bursty.spike_min_factor",
            "must be >= 1",
        )?;
        require(
            b.spike_max_factor.is_finite() && b.spike_max_factor >= b.spike_min_factor,
            "bursty.spike_max_factor",
            "must be >= spike_min_factor",
        )?;
        require(b.spike_steps >= 1, "bursty.spike_steps", "must be >= 1")?;

        let m = &self.bimodal;
        require(m.low_rps.is_finite() && m.low_rps >= 0.0, "bimodal.low_rps", "must be >= 0")?;
        require(m.high_rps.is_finite() && m.high_rps > m.low_rps, "bimodal.high_rps", "must exceed low_rps")?;
        require(
            m.mean_holding_steps.is_finite() && m.mean_holding_steps >= 1.0,
            "bimodal.mean_holding_steps",
            "must be >= 1",
        )?;

        let d = &self.diurnal;
        require(d.period_steps.is_finite() && d.period_steps >= 2.0, "diurnal.period_steps", "must be >= 2")?;
        require(
            d.amplitude_fraction.is_finite() && (0.0..=1.0).contains(&d.amplitude_fraction),
            "diurnal.amplitude_fraction",
            "must lie in [0, 1]",
        )?;
        require(d.peak_steps >= 1, "diurnal.peak_steps", "must be >= 1")?;
        require(
            d.peak_factor.is_finite() && d.peak_factor >= 1.0,
            "diurnal.peak_factor",
            "must be >= 1",
        )?;
        require(
            2 * d.peak_ramp_steps <= d.peak_steps,
            "diurnal.peak_ramp_steps",
            "both ramps must fit inside peak_steps",
        )?;
        require(window_ok(d.onset_window), "diurnal.onset_window", "must be an ordered range within [0, 1]")?;

        let f = &self.flash_crowd;
        require(
            f.spike_factor.is_finite() && f.spike_factor >= 1.0,
            "flash_crowd.spike_factor",
            "must be >= 1",
        )?;
        require(f.spike_steps >= 1, "flash_crowd.spike_steps", "must be >= 1")?;
        require(window_ok(f.onset_window), "flash_crowd.onset_window", "must be an ordered range within [0, 1]")?;

        let r = &self.slow_ramp;
        require(r.start_rps.is_finite() && r.start_rps >= 0.0, "slow_ramp.start_rps", "must be >= 0")?;
        require(r.end_rps.is_finite() && r.end_rps >= r.start_rps, "slow_ramp.end_rps", "must be >= start_rps")?;
        Ok(())
    }
}

/// Half-open step range `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EventWindow {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadTrace {
    pub archetype: Archetype,
    pub seed: u64,
    pub rps: Vec<f64>,
    pub step_seconds: f64,
    /// The flash-crowd spike or the diurnal peak, when the archetype has one.
    pub event: Option<EventWindow>,
}

impl WorkloadTrace {
    /// Wraps an externally supplied series (e.g. an imported CSV).
    pub fn from_series(archetype: Archetype, seed: u64, step_seconds: f64, rps: Vec<f64>) -> Result<Self> {
        require(positive(step_seconds), "step_seconds", "must be positive")?;
        require(!rps.is_empty(), "rps", "trace is empty")?;
        if let Some(i) = rps.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::config(format!("rps: value at step {i} is negative or non-finite")));
        }
        Ok(Self {
            archetype,
            seed,
            rps,
            step_seconds,
            event: None,
        })
    }

    pub fn len(&self) -> usize {
        self.rps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rps.is_empty()
    }

    pub fn split(&self) -> Result<SplitIndices> {
        split(self.len())
    }
}

/// Split boundaries: train `[0, train_end)`, validation `[train_end, val_end)`,
/// test `[val_end, test_end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SplitIndices {
    pub train_end: usize,
    pub val_end: usize,
    pub test_end: usize,
}

impl SplitIndices {
    pub fn test_len(&self) -> usize {
        self.test_end - self.val_end
    }
}

/// 70/10/20 split: train and validation take the floor, test the remainder.
pub fn split(len: usize) -> Result<SplitIndices> {
    if len < MIN_SPLIT_LEN {
        return Err(Error::config(format!(
            "trace length {len} is below the minimum of {MIN_SPLIT_LEN} for a train/validation/test split"
        )));
    }
    let train_end = len * 7 / 10;
    let val_end = train_end + len / 10;
    Ok(SplitIndices {
        train_end,
        val_end,
        test_end: len,
    })
}

pub fn generate(archetype: Archetype, seed: u64, num_steps: usize, params: &TraceParams) -> Result<WorkloadTrace> {
    if num_steps == 0 {
        return Err(Error::config("num_steps: must be >= 1"));
    }
    params.validate()?;
    let mut rng = trace_rng(seed);
    let sigma = params.noise_fraction * params.base_rps;
    let noise = Normal::new(0.0, sigma).map_err(|_| Error::config("noise_fraction: invalid"))?;

    let mut event = None;
    let mut rps = match archetype {
        Archetype::Smooth => smooth(&mut rng, num_steps, params, &noise),
        Archetype::Bursty => bursty(&mut rng, num_steps, params)?,
        Archetype::Bimodal => bimodal(&mut rng, num_steps, params, &noise)?,
        Archetype::DiurnalBurst => {
            let (series, window) = diurnal(&mut rng, num_steps, params, &noise);
            event = Some(window);
            series
        }
        Archetype::FlashCrowd => {
            let (series, window) = flash_crowd(&mut rng, num_steps, params, &noise);
            event = Some(window);
            series
        }
        Archetype::SlowRamp => slow_ramp(&mut rng, num_steps, params, &noise),
    };
    for v in &mut rps {
        if !v.is_finite() || *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(WorkloadTrace {
        archetype,
        seed,
        rps,
        step_seconds: params.step_seconds,
        event,
    })
}

fn smooth(rng: &mut ChaCha8Rng, n: usize, p: &TraceParams, noise: &Normal<f64>) -> Vec<f64> {
    let s = &p.smooth;
    (0..n)
        .map(|t| {
            let phase = 2.0 * PI * t as f64 / s.period_steps;
            p.base_rps + s.amplitude_rps * libm::sin(phase) + noise.sample(rng)
        })
        .collect()
}

fn bursty(rng: &mut ChaCha8Rng, n: usize, p: &TraceParams) -> Result<Vec<f64>> {
    let b = &p.bursty;
    let arrivals = Poisson::new(p.base_rps).map_err(|_| Error::config("base_rps: invalid Poisson rate"))?;
    let next_gap = |rng: &mut ChaCha8Rng| {
        let j = b.spike_interval_jitter as i64;
        let offset = if j == 0 { 0 } else { rng.random_range(-j..=j) };
        (b.spike_interval_steps as i64 + offset) as usize
    };
    let mut spike_start = next_gap(rng);
    let mut factor = 1.0;
    let mut out = Vec::with_capacity(n);
    for t in 0..n {
        if t == spike_start {
            factor = rng.random_range(b.spike_min_factor..=b.spike_max_factor);
        }
        let in_spike = t >= spike_start && t < spike_start + b.spike_steps;
        let count = arrivals.sample(rng);
        out.push(if in_spike { count * factor } else { count });
        if t + 1 == spike_start + b.spike_steps {
            spike_start += next_gap(rng).max(b.spike_steps);
        }
    }
    Ok(out)
}

fn bimodal(rng: &mut ChaCha8Rng, n: usize, p: &TraceParams, noise: &Normal<f64>) -> Result<Vec<f64>> {
    let m = &p.bimodal;
    let holding = Geometric::new(1.0 / m.mean_holding_steps)
        .map_err(|_| Error::config("bimodal.mean_holding_steps: invalid"))?;
    let mut high = rng.random_bool(0.5);
    let mut remaining = holding.sample(rng) + 1;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        if remaining == 0 {
            high = !high;
            remaining = holding.sample(rng) + 1;
        }
        remaining -= 1;
        let level = if high { m.high_rps } else { m.low_rps };
        out.push(level + noise.sample(rng));
    }
    Ok(out)
}

/// Start of a one-off event of `len` steps, drawn from `window` (fractions of
/// the trace) and clamped so the event ends inside the trace.
fn place_event(rng: &mut ChaCha8Rng, n: usize, len: usize, window: [f64; 2]) -> EventWindow {
    let latest = n.saturating_sub(len);
    let lo = ((window[0] * n as f64) as usize).min(latest);
    let hi = ((window[1] * n as f64) as usize).clamp(lo, latest);
    let start = rng.random_range(lo..=hi);
    EventWindow {
        start,
        end: (start + len).min(n),
    }
}

fn diurnal(rng: &mut ChaCha8Rng, n: usize, p: &TraceParams, noise: &Normal<f64>) -> (Vec<f64>, EventWindow) {
    let d = &p.diurnal;
    let window = place_event(rng, n, d.peak_steps, d.onset_window);
    let peak = d.peak_factor * p.base_rps;
    let ramp = d.peak_ramp_steps;
    let out = (0..n)
        .map(|t| {
            let phase = 2.0 * PI * t as f64 / d.period_steps;
            let curve = p.base_rps * (1.0 - d.amplitude_fraction * libm::cos(phase));
            let level = if t >= window.start && t < window.end {
                let into = t - window.start + 1;
                let left = window.end - t;
                let edge = into.min(left);
                if ramp > 0 && edge <= ramp {
                    let w = edge as f64 / (ramp + 1) as f64;
                    curve + w * (peak - curve)
                } else {
                    peak
                }
            } else {
                curve
            };
            level + noise.sample(rng)
        })
        .collect();
    (out, window)
}

fn flash_crowd(rng: &mut ChaCha8Rng, n: usize, p: &TraceParams, noise: &Normal<f64>) -> (Vec<f64>, EventWindow) {
    let f = &p.flash_crowd;
    let window = place_event(rng, n, f.spike_steps, f.onset_window);
    let out = (0..n)
        .map(|t| {
            let level = if t >= window.start && t < window.end {
                f.spike_factor * p.base_rps
            } else {
                p.base_rps
            };
            level + noise.sample(rng)
        })
        .collect();
    (out, window)
}

fn slow_ramp(rng: &mut ChaCha8Rng, n: usize, p: &TraceParams, noise: &Normal<f64>) -> Vec<f64> {
    let r = &p.slow_ramp;
    let denom = n.saturating_sub(1).max(1) as f64;
    (0..n)
        .map(|t| r.start_rps + (r.end_rps - r.start_rps) * t as f64 / denom + noise.sample(rng))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SEEDS: [u64; 5] = [42, 123, 456, 789, 1337];

    fn quiet() -> TraceParams {
        TraceParams {
            noise_fraction: 0.0,
            ..TraceParams::default()
        }
    }

    #[test]
    fn split_examples() {
        assert_eq!(
            split(500).unwrap(),
            SplitIndices {
                train_end: 350,
                val_end: 400,
                test_end: 500
            }
        );
        assert_eq!(
            split(10).unwrap(),
            SplitIndices {
                train_end: 7,
                val_end: 8,
                test_end: 10
            }
        );
        assert!(matches!(split(9), Err(Error::Config(_))));
    }

    #[test]
    fn flash_crowd_spike_ratio() {
        let p = TraceParams::default();
        for seed in SEEDS {
            let t = generate(Archetype::FlashCrowd, seed, 500, &p).unwrap();
            let w = t.event.unwrap();
            assert_eq!(w.end - w.start, 20);
            assert!(w.start >= 400 && w.end < 500, "{w:?}");
            let pre = &t.rps[..w.start];
            let baseline = pre.iter().sum::<f64>() / pre.len() as f64;
            let max = t.rps.iter().cloned().fold(f64::MIN, f64::max);
            let ratio = max / baseline;
            assert!((2.8..=3.2).contains(&ratio), "seed {seed}: ratio {ratio}");
            // back to baseline after the window
            assert!(t.rps[w.end..].iter().all(|v| *v < 1.5 * baseline));
        }
    }

    #[test]
    fn slow_ramp_without_noise_is_monotone() {
        for seed in SEEDS {
            let t = generate(Archetype::SlowRamp, seed, 500, &quiet()).unwrap();
            assert!(t.rps.windows(2).all(|w| w[1] > w[0]));
            assert_eq!(t.rps[0], 50.0);
            assert_eq!(t.rps[499], 400.0);
        }
    }

    #[test]
    fn flat_smooth_is_constant_base() {
        let mut p = quiet();
        p.smooth.amplitude_rps = 0.0;
        let t = generate(Archetype::Smooth, 42, 500, &p).unwrap();
        assert!(t.rps.iter().all(|v| *v == 100.0));
    }

    #[test]
    fn smooth_noise_is_small() {
        let p = TraceParams::default();
        let t = generate(Archetype::Smooth, 42, 500, &p).unwrap();
        let resid: Vec<f64> = t
            .rps
            .iter()
            .enumerate()
            .map(|(i, v)| v - (100.0 + 40.0 * libm::sin(2.0 * PI * i as f64 / 200.0)))
            .collect();
        let var = resid.iter().map(|r| r * r).sum::<f64>() / resid.len() as f64;
        assert!(libm::sqrt(var) <= 5.0);
    }

    #[test]
    fn bimodal_uses_two_levels() {
        let t = generate(Archetype::Bimodal, 42, 500, &quiet()).unwrap();
        assert!(t.rps.iter().all(|v| *v == 80.0 || *v == 240.0));
        let switches = t.rps.windows(2).filter(|w| w[0] != w[1]).count();
        assert!(switches >= 2, "{switches}");
    }

    #[test]
    fn bursty_has_periodic_spikes() {
        let t = generate(Archetype::Bursty, 42, 500, &TraceParams::default()).unwrap();
        // Poisson(100) rarely exceeds 150 on its own
        let spiky = t.rps.iter().filter(|v| **v > 170.0).count();
        assert!((3 * 6..=3 * 12).contains(&spiky), "{spiky}");
        assert!(t.rps.iter().all(|v| v.fract() == 0.0 || *v > 100.0));
    }

    #[test]
    fn diurnal_peak_is_sharp() {
        let t = generate(Archetype::DiurnalBurst, 42, 500, &quiet()).unwrap();
        let w = t.event.unwrap();
        assert_eq!(w.end - w.start, 30);
        assert!(w.start >= 400);
        let peak = &t.rps[w.start + 3..w.end - 3];
        assert!(peak.iter().all(|v| *v == 250.0));
        assert!(t.rps[w.start - 1] < 100.0);
    }

    #[test]
    fn regeneration_is_bit_identical() {
        let p = TraceParams::default();
        for a in Archetype::ALL {
            let x = generate(a, 1337, 500, &p).unwrap();
            let y = generate(a, 1337, 500, &p).unwrap();
            assert!(x.rps.iter().zip(&y.rps).all(|(a, b)| a.to_bits() == b.to_bits()));
        }
    }

    #[test]
    fn distinct_seeds_give_distinct_traces() {
        let p = TraceParams::default();
        for a in Archetype::ALL {
            let traces: Vec<_> = SEEDS.iter().map(|s| generate(a, *s, 500, &p).unwrap().rps).collect();
            for i in 0..traces.len() {
                for j in i + 1..traces.len() {
                    assert_ne!(traces[i], traces[j], "{a} seeds {} {}", SEEDS[i], SEEDS[j]);
                }
            }
        }
    }

    #[test]
    fn errors() {
        let p = TraceParams::default();
        assert!(matches!(generate(Archetype::Smooth, 1, 0, &p), Err(Error::Config(_))));
        assert!(matches!("weekly".parse::<Archetype>(), Err(Error::Config(_))));
        let bad = TraceParams {
            noise_fraction: 0.2,
            ..TraceParams::default()
        };
        assert!(matches!(generate(Archetype::Smooth, 1, 10, &bad), Err(Error::Config(_))));
        for a in Archetype::ALL {
            assert_eq!(a.name().parse::<Archetype>().unwrap(), a);
        }
    }

    #[test]
    fn single_step_traces() {
        for a in Archetype::ALL {
            let t = generate(a, 5, 1, &TraceParams::default()).unwrap();
            assert_eq!(t.len(), 1);
        }
    }
}

//! Monte Carlo SER estimation over counter-addressed random substreams.
//!
//! Trials are grouped into fixed blocks of [`BLOCK_TRIALS`]; block `k` draws
//! channels, symbols and noise from three substreams addressed by
//! `(seed, stream, k)`. Blocks are run in batches of growing size and the
//! stopping rule is checked between batches, so the set of blocks that
//! contribute to an estimate (and hence the estimate) is fixed by the seed
//! alone, independent of the number of worker threads.
//!
//! The same substreams are used at every SNR point and for every selection
//! scheme (common random numbers), which keeps curves smooth and makes
//! scheme comparisons paired.

pub mod fit;
pub mod stats;

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{fill_channel, sample_cn, ChannelRealization, RngStream, SystemConfig, User};
use crate::constellation::{build_constellation, PncMap};
use crate::detection::Detector;
use crate::error::{Error, Result};
use crate::selection::{Scheme, Selector};

pub use fit::{fit_diversity_slope, FitWindow, SlopeEstimate};
pub use stats::{wilson_interval, Z_95};

pub const BLOCK_TRIALS: u64 = 1024;
pub const MAX_BATCH_BLOCKS: u64 = 64;

pub const CHANNEL_STREAM: u64 = 0;
pub const SYMBOL_STREAM: u64 = 1;
pub const NOISE_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoppingRule {
    pub min_errors: u64,
    pub max_trials: u64,
}

impl StoppingRule {
    pub const MIN_ERRORS_FLOOR: u64 = 100;

    pub fn new(min_errors: u64, max_trials: u64) -> Result<Self> {
        let rule = Self { min_errors, max_trials };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_errors < Self::MIN_ERRORS_FLOOR {
            return Err(Error::InvalidConfig(format!(
                "min_errors must be at least {}, got {}",
                Self::MIN_ERRORS_FLOOR,
                self.min_errors
            )));
        }
        if self.max_trials == 0 {
            return Err(Error::InvalidConfig("max_trials must be positive".into()));
        }
        Ok(())
    }
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self {
            min_errors: 400,
            max_trials: 100_000_000,
        }
    }
}

/// Inclusive SNR grid in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SnrGrid {
    pub fn new(start: f64, stop: f64, step: f64) -> Self {
        Self { start, stop, step }
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        let finite = self.start.is_finite() && self.stop.is_finite() && self.step.is_finite();
        if !finite || self.step <= 0.0 || self.stop < self.start {
            return Err(Error::InvalidConfig(format!(
                "SNR grid needs start <= stop and step > 0, got start={}, stop={}, step={}",
                self.start, self.stop, self.step
            )));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|k| self.start + k as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointStatus {
    Converged,
    Unconverged,
}

impl fmt::Display for PointStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointStatus::Converged => "converged",
            PointStatus::Unconverged => "unconverged",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SerPoint {
    pub snr_db: f64,
    pub trials: u64,
    pub errors: u64,
    pub ser: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub status: PointStatus,
}

impl SerPoint {
    pub fn from_counts(snr_db: f64, errors: u64, trials: u64, status: PointStatus) -> Self {
        let (ci_low, ci_high) = wilson_interval(errors, trials, Z_95);
        Self {
            snr_db,
            trials,
            errors,
            ser: if trials == 0 { 0.0 } else { errors as f64 / trials as f64 },
            ci_low,
            ci_high,
            status,
        }
    }

    pub fn is_converged(&self) -> bool {
        self.status == PointStatus::Converged
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SerCurve {
    pub scheme: Scheme,
    pub n_a: usize,
    pub n_r: usize,
    pub n_b: usize,
    pub order: usize,
    pub delta_ab_db: f64,
    pub points: Vec<SerPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub grid: SnrGrid,
    pub delta_ab_db: f64,
    pub scheme: Scheme,
    pub stopping: StoppingRule,
    pub seed: u64,
    /// Stop the sweep after the first point that is unconverged or whose
    /// SER falls below this value.
    pub ser_floor: Option<f64>,
}

/// Per-trial state with scratch buffers; clone one per worker.
#[derive(Debug, Clone)]
pub struct TrialRunner {
    map: PncMap,
    order: usize,
    n_r: usize,
    sigma: f64,
    points_a: Vec<Complex64>,
    points_b: Vec<Complex64>,
    selector: Selector,
    detector: Detector,
    channel: ChannelRealization,
    noise: Vec<Complex64>,
    y: Vec<Complex64>,
    selected: (usize, usize),
}

impl TrialRunner {
    pub fn new(config: &SystemConfig, scheme: Scheme) -> Result<Self> {
        config.validate()?;
        let constellation = build_constellation(config.order)?;
        let map = PncMap::for_constellation(&constellation);
        let (sa, sb) = (config.e_a.sqrt(), config.e_b.sqrt());
        Ok(Self {
            map,
            order: config.order,
            n_r: config.n_r,
            sigma: config.n0.sqrt(),
            points_a: constellation.points().iter().map(|x| x * sa).collect(),
            points_b: constellation.points().iter().map(|x| x * sb).collect(),
            selector: Selector::new(scheme, &constellation, &map, config),
            detector: Detector::new(&constellation, config),
            channel: ChannelRealization::zeros(config.n_a, config.n_r, config.n_b),
            noise: vec![Complex64::default(); config.n_r],
            y: vec![Complex64::default(); config.n_r],
            selected: (0, 0),
        })
    }

    /// Draws a fresh channel and applies the selection rule.
    #[inline]
    pub fn draw_channel<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        fill_channel(&mut self.channel, rng);
        self.selected = self.selector.select_indices(&self.channel);
    }

    #[inline]
    pub fn draw_symbols<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (usize, usize) {
        (rng.random_range(0..self.order), rng.random_range(0..self.order))
    }

    #[inline]
    pub fn draw_noise<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for n in self.noise.iter_mut() {
            *n = sample_cn(rng) * self.sigma;
        }
    }

    /// Forms the received vector for `(s_a, s_b)` over the selected antennas
    /// and returns whether the relay's network-coded decision is wrong.
    #[inline]
    pub fn detect(&mut self, s_a: usize, s_b: usize) -> bool {
        let (i, j) = self.selected;
        let h_a = self.channel.antenna(User::A, i);
        let h_b = self.channel.antenna(User::B, j);
        let (u_a, u_b) = (self.points_a[s_a], self.points_b[s_b]);
        for r in 0..self.n_r {
            self.y[r] = h_a[r] * u_a + h_b[r] * u_b + self.noise[r];
        }
        let (d_a, d_b, _) = self.detector.detect(&self.y, h_a, h_b);
        self.map.symbol_unchecked(d_a, d_b) != self.map.symbol_unchecked(s_a, s_b)
    }

    /// Runs the first `trials` trials of block `block`; returns the error count.
    pub fn run_block(&mut self, seed: u64, block: u64, trials: u64) -> u64 {
        let mut rng_c = RngStream::new(seed, CHANNEL_STREAM, block).rng();
        let mut rng_s = RngStream::new(seed, SYMBOL_STREAM, block).rng();
        let mut rng_n = RngStream::new(seed, NOISE_STREAM, block).rng();
        let mut errors = 0;
        for _ in 0..trials {
            self.draw_channel(&mut rng_c);
            let (s_a, s_b) = self.draw_symbols(&mut rng_s);
            self.draw_noise(&mut rng_n);
            errors += u64::from(self.detect(s_a, s_b));
        }
        errors
    }
}

/// One trial with all randomness from `rng`: channel, selection, uniform
/// symbols, noise, ML detection. True on a network-coded symbol error.
pub fn run_trial<R: Rng + ?Sized>(config: &SystemConfig, scheme: Scheme, rng: &mut R) -> Result<bool> {
    let mut runner = TrialRunner::new(config, scheme)?;
    runner.draw_channel(rng);
    let (s_a, s_b) = runner.draw_symbols(rng);
    runner.draw_noise(rng);
    Ok(runner.detect(s_a, s_b))
}

/// Estimates the SER at one operating point.
pub fn estimate_ser(config: &SystemConfig, scheme: Scheme, stopping: &StoppingRule, seed: u64) -> Result<SerPoint> {
    stopping.validate()?;
    let template = TrialRunner::new(config, scheme)?;
    let total_blocks = stopping.max_trials.div_ceil(BLOCK_TRIALS);
    let block_len = |k: u64| BLOCK_TRIALS.min(stopping.max_trials - k * BLOCK_TRIALS);
    let (mut errors, mut trials) = (0u64, 0u64);
    let (mut next, mut batch) = (0u64, 1u64);
    let status = loop {
        let end = (next + batch).min(total_blocks);
        let (e, t) = (next..end)
            .into_par_iter()
            .map_init(
                || template.clone(),
                |runner, k| {
                    let n = block_len(k);
                    (runner.run_block(seed, k, n), n)
                },
            )
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        errors += e;
        trials += t;
        next = end;
        if errors >= stopping.min_errors {
            break PointStatus::Converged;
        }
        if next >= total_blocks {
            break PointStatus::Unconverged;
        }
        batch = (batch * 2).min(MAX_BATCH_BLOCKS);
    };
    Ok(SerPoint::from_counts(config.snr_db(), errors, trials, status))
}

/// Runs [`estimate_ser`] over the grid. `config` supplies the antenna counts
/// and modulation order; energies come from the grid and `delta_ab_db`.
pub fn sweep(spec: &SweepSpec, config: &SystemConfig) -> Result<SerCurve> {
    spec.stopping.validate()?;
    let snrs = spec.grid.points()?;
    let at = |snr: f64| -> Result<SerPoint> {
        let cfg = SystemConfig::from_snr_db(config.n_a, config.n_r, config.n_b, config.order, snr, spec.delta_ab_db)?;
        let mut p = estimate_ser(&cfg, spec.scheme, &spec.stopping, spec.seed)?;
        p.snr_db = snr;
        Ok(p)
    };
    let points = match spec.ser_floor {
        None => snrs.par_iter().map(|&s| at(s)).collect::<Result<Vec<_>>>()?,
        Some(floor) => {
            let mut out = Vec::new();
            for &s in &snrs {
                let p = at(s)?;
                out.push(p);
                if !p.is_converged() || p.ser < floor {
                    break;
                }
            }
            out
        }
    };
    Ok(SerCurve {
        scheme: spec.scheme,
        n_a: config.n_a,
        n_r: config.n_r,
        n_b: config.n_b,
        order: config.order,
        delta_ab_db: spec.delta_ab_db,
        points,
    })
}

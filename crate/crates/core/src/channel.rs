//! Rayleigh channel and AWGN sampling, and the energy/SNR bookkeeping of a
//! two-user, one-relay setup.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

/// One of the two end users.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum User {
    A,
    B,
}

/// Antenna counts, modulation order, transmit energies and noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    pub n_a: usize,
    pub n_b: usize,
    pub n_r: usize,
    pub order: usize,
    pub e_a: f64,
    pub e_b: f64,
    pub n0: f64,
}

impl SystemConfig {
    pub fn new(n_a: usize, n_r: usize, n_b: usize, order: usize, e_a: f64, e_b: f64, n0: f64) -> Result<Self> {
        let config = Self {
            n_a,
            n_b,
            n_r,
            order,
            e_a,
            e_b,
            n0,
        };
        config.validate()?;
        Ok(config)
    }

    /// Energies for a sweep point: `E_min/N_0 = snr_db`, user A offset by
    /// `delta_ab_db` (`E_A/N_0 = E_min/N_0 + delta_ab_db`), `N_0 = 1`.
    pub fn from_snr_db(
        n_a: usize,
        n_r: usize,
        n_b: usize,
        order: usize,
        snr_db: f64,
        delta_ab_db: f64,
    ) -> Result<Self> {
        if delta_ab_db.is_nan() || delta_ab_db < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "delta_ab_db must be >= 0 (user B carries E_min), got {delta_ab_db}"
            )));
        }
        let e_min = db_to_linear(snr_db);
        Self::new(n_a, n_r, n_b, order, e_min * db_to_linear(delta_ab_db), e_min, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !matches!(self.order, 2 | 4 | 8 | 16) {
            return Err(Error::UnsupportedOrder(self.order));
        }
        for (name, count) in [("N_A", self.n_a), ("N_B", self.n_b), ("N_R", self.n_r)] {
            if count == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        for (name, value) in [("E_A", self.e_a), ("E_B", self.e_b), ("N_0", self.n0)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {value}")));
            }
        }
        Ok(())
    }

    pub fn e_min(&self) -> f64 {
        self.e_a.min(self.e_b)
    }

    pub fn antennas(&self, user: User) -> usize {
        match user {
            User::A => self.n_a,
            User::B => self.n_b,
        }
    }

    pub fn energy(&self, user: User) -> f64 {
        match user {
            User::A => self.e_a,
            User::B => self.e_b,
        }
    }

    /// `E_min / N_0` in dB.
    pub fn snr_db(&self) -> f64 {
        10.0 * (self.e_min() / self.n0).log10()
    }

    /// Number of user-antenna combinations `n = N_A * N_B`.
    pub fn combinations(&self) -> usize {
        self.n_a * self.n_b
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Channel gains between every user antenna and every relay antenna.
///
/// Stored user-major: all of user A's antennas (each a length-`N_R` column),
/// then user B's.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    n_a: usize,
    n_b: usize,
    n_r: usize,
    gains: Vec<Complex64>,
}

impl ChannelRealization {
    pub fn zeros(n_a: usize, n_r: usize, n_b: usize) -> Self {
        Self {
            n_a,
            n_b,
            n_r,
            gains: vec![Complex64::default(); (n_a + n_b) * n_r],
        }
    }

    /// Builds a realization from per-antenna columns. `a[i][j]` is the gain
    /// from antenna `i` of user A to relay antenna `j`.
    pub fn from_columns(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Result<Self> {
        let n_r = a.first().map_or(0, Vec::len);
        if a.is_empty() || b.is_empty() || n_r == 0 {
            return Err(Error::InvalidConfig("channel needs at least one antenna per node".into()));
        }
        let mut gains = Vec::with_capacity((a.len() + b.len()) * n_r);
        for column in a.iter().chain(b) {
            if column.len() != n_r {
                return Err(Error::DimensionMismatch {
                    expected: n_r,
                    found: column.len(),
                });
            }
            if column.iter().any(|g| !g.re.is_finite() || !g.im.is_finite()) {
                return Err(Error::InvalidConfig("channel gains must be finite".into()));
            }
            gains.extend_from_slice(column);
        }
        Ok(Self {
            n_a: a.len(),
            n_b: b.len(),
            n_r,
            gains,
        })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n_a, self.n_r, self.n_b)
    }

    /// Column `h_{m,i}` (0-based antenna index).
    pub fn antenna(&self, user: User, index: usize) -> &[Complex64] {
        let offset = match user {
            User::A => {
                assert!(index < self.n_a, "antenna index out of range");
                index
            }
            User::B => {
                assert!(index < self.n_b, "antenna index out of range");
                self.n_a + index
            }
        };
        &self.gains[offset * self.n_r..(offset + 1) * self.n_r]
    }

    pub fn gains(&self) -> &[Complex64] {
        &self.gains
    }

    pub(crate) fn gains_mut(&mut self) -> &mut [Complex64] {
        &mut self.gains
    }

    pub fn scale(&mut self, factor: Complex64) {
        for g in &mut self.gains {
            *g *= factor;
        }
    }
}

/// Address of a reproducible random substream: a seed, a stream identifier
/// and a block counter within the stream.
///
/// Each address maps to a disjoint window of a ChaCha8 keystream, so
/// identical triples give identical draws no matter which worker asks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
    pub counter: u64,
}

impl RngStream {
    /// 32-bit words reserved per counter value.
    pub const WORDS_PER_BLOCK: u128 = 1 << 32;

    pub fn new(seed: u64, stream: u64, counter: u64) -> Self {
        Self { seed, stream, counter }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(u128::from(self.counter) * Self::WORDS_PER_BLOCK);
        rng
    }
}

/// One `CN(0, 1)` draw.
#[inline]
pub fn sample_cn<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Redraws every gain of `channel` i.i.d. `CN(0, 1)`, in storage order.
pub fn fill_channel<R: Rng + ?Sized>(channel: &mut ChannelRealization, rng: &mut R) {
    for g in channel.gains_mut() {
        *g = sample_cn(rng);
    }
}

pub fn sample_channel<R: Rng + ?Sized>(config: &SystemConfig, rng: &mut R) -> ChannelRealization {
    let mut channel = ChannelRealization::zeros(config.n_a, config.n_r, config.n_b);
    fill_channel(&mut channel, rng);
    channel
}

/// `n_r` i.i.d. `CN(0, n0)` draws; `n0 = 0` gives the zero vector.
pub fn sample_noise_with<R: Rng + ?Sized>(n0: f64, n_r: usize, rng: &mut R) -> Vec<Complex64> {
    let sigma = n0.sqrt();
    (0..n_r).map(|_| sample_cn(rng) * sigma).collect()
}

pub fn sample_noise<R: Rng + ?Sized>(config: &SystemConfig, rng: &mut R) -> Vec<Complex64> {
    sample_noise_with(config.n0, config.n_r, rng)
}

/// `y = sqrt(E_A) h_A x_A + sqrt(E_B) h_B x_B + n`.
pub fn received_signal(
    h_a: &[Complex64],
    h_b: &[Complex64],
    x_a: Complex64,
    x_b: Complex64,
    config: &SystemConfig,
    noise: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n_r = h_a.len();
    for found in [h_b.len(), noise.len()] {
        if found != n_r {
            return Err(Error::DimensionMismatch { expected: n_r, found });
        }
    }
    let u_a = x_a * config.e_a.sqrt();
    let u_b = x_b * config.e_b.sqrt();
    Ok((0..n_r).map(|j| h_a[j] * u_a + h_b[j] * u_b + noise[j]).collect())
}

//! User-antenna selection: per-user channel-gain selection (AS1) and the
//! exhaustive search maximizing the inter-cluster minimum distance at the
//! relay (AS2).
//!
//! Antenna indices are 0-based throughout. Ties go to the lowest index
//! (lexicographically smallest `(i, j)` for AS2).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::channel::{ChannelRealization, SystemConfig, User};
use crate::constellation::{Constellation, PncMap};

/// Antenna-selection scheme applied before each transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// Maximize each user's overall channel gain.
    #[serde(rename = "AS1")]
    As1,
    /// Maximize the minimum inter-cluster distance at the relay.
    #[serde(rename = "AS2")]
    As2,
    /// Always transmit from the first antenna.
    #[serde(rename = "none")]
    None,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::As1 => "AS1",
            Scheme::As2 => "AS2",
            Scheme::None => "none",
        })
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "AS1" => Ok(Scheme::As1),
            "AS2" => Ok(Scheme::As2),
            "none" => Ok(Scheme::None),
            other => Err(format!("unknown scheme {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectionMetric {
    Fixed,
    /// `sum_j |h_{m,i*,j}|^2` for each user.
    ChannelGain { a: f64, b: f64 },
    /// Squared minimum inter-cluster distance of the chosen pair.
    MinDistanceSqr(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub antenna_a: usize,
    pub antenna_b: usize,
    pub h_a: Vec<Complex64>,
    pub h_b: Vec<Complex64>,
    pub metric: SelectionMetric,
}

impl SelectionResult {
    fn from_indices(channel: &ChannelRealization, antenna_a: usize, antenna_b: usize, metric: SelectionMetric) -> Self {
        Self {
            antenna_a,
            antenna_b,
            h_a: channel.antenna(User::A, antenna_a).to_vec(),
            h_b: channel.antenna(User::B, antenna_b).to_vec(),
            metric,
        }
    }
}

#[inline]
fn pair_distance_sqr(h_a: &[Complex64], h_b: &[Complex64], d_a: Complex64, d_b: Complex64) -> f64 {
    h_a.iter()
        .zip(h_b)
        .map(|(&ga, &gb)| (ga * d_a + gb * d_b).norm_sqr())
        .sum()
}

/// Squared inter-cluster minimum distance by brute force over all `M^4`
/// ordered pairs of joint symbols whose network-coded symbols differ.
pub fn min_intercluster_distance_sqr(
    h_a: &[Complex64],
    h_b: &[Complex64],
    constellation: &Constellation,
    map: &PncMap,
    e_a: f64,
    e_b: f64,
) -> f64 {
    let (sqrt_a, sqrt_b) = (e_a.sqrt(), e_b.sqrt());
    let x = constellation.points();
    let m = x.len();
    let mut best = f64::INFINITY;
    for s1a in 0..m {
        for s1b in 0..m {
            for s2a in 0..m {
                for s2b in 0..m {
                    if map.symbol_unchecked(s1a, s1b) == map.symbol_unchecked(s2a, s2b) {
                        continue;
                    }
                    let d_a = (x[s1a] - x[s2a]) * sqrt_a;
                    let d_b = (x[s1b] - x[s2b]) * sqrt_b;
                    best = best.min(pair_distance_sqr(h_a, h_b, d_a, d_b));
                }
            }
        }
    }
    best
}

/// `d_min(h_A, h_B)`: the unsquared inter-cluster minimum distance.
pub fn min_intercluster_distance(
    h_a: &[Complex64],
    h_b: &[Complex64],
    constellation: &Constellation,
    map: &PncMap,
    e_a: f64,
    e_b: f64,
) -> f64 {
    min_intercluster_distance_sqr(h_a, h_b, constellation, map, e_a, e_b).sqrt()
}

/// Precomputed table of the energy-scaled difference pairs
/// `(sqrt(E_A) dx_A, sqrt(E_B) dx_B)` that separate different clusters.
///
/// The squared distance of a pair expands as
/// `|d_A|^2 ||h_A||^2 + |d_B|^2 ||h_B||^2 + 2 Re(conj(d_A) d_B <h_A, h_B>)`,
/// so each entry is stored as the four coefficients of that form and a
/// candidate antenna pair only needs its three channel statistics. Pairs
/// that give the same coefficients (including joint negations) are merged.
#[derive(Debug, Clone)]
pub struct DistanceKernel {
    terms: Vec<[f64; 4]>,
}

/// `(||h_A||^2, ||h_B||^2, Re <h_A, h_B>, Im <h_A, h_B>)` with
/// `<h_A, h_B> = sum_j conj(h_A,j) h_B,j`.
#[inline]
fn pair_stats(h_a: &[Complex64], h_b: &[Complex64]) -> [f64; 4] {
    let mut s = [0.0; 4];
    for (ga, gb) in h_a.iter().zip(h_b) {
        s[0] += ga.norm_sqr();
        s[1] += gb.norm_sqr();
        let c = ga.conj() * gb;
        s[2] += c.re;
        s[3] += c.im;
    }
    s
}

#[inline]
fn quad_form(t: &[f64; 4], s: &[f64; 4]) -> f64 {
    t[0] * s[0] + t[1] * s[1] + t[2] * s[2] - t[3] * s[3]
}

impl DistanceKernel {
    pub fn new(constellation: &Constellation, map: &PncMap, e_a: f64, e_b: f64) -> Self {
        use std::collections::HashSet;
        let (sqrt_a, sqrt_b) = (e_a.sqrt(), e_b.sqrt());
        let x = constellation.points();
        let m = x.len();
        let mut seen = HashSet::new();
        let mut terms = Vec::new();
        for s1a in 0..m {
            for s1b in 0..m {
                for s2a in 0..m {
                    for s2b in 0..m {
                        if map.symbol_unchecked(s1a, s1b) == map.symbol_unchecked(s2a, s2b) {
                            continue;
                        }
                        let d_a = (x[s1a] - x[s2a]) * sqrt_a;
                        let d_b = (x[s1b] - x[s2b]) * sqrt_b;
                        let p = d_a.conj() * d_b;
                        let t = [d_a.norm_sqr(), d_b.norm_sqr(), 2.0 * p.re, 2.0 * p.im];
                        if seen.insert(t.map(f64::to_bits)) {
                            terms.push(t);
                        }
                    }
                }
            }
        }
        // Short differences first: they tend to set the minimum, which makes
        // the early exit in `min_distance_sqr_above` effective.
        terms.sort_by(|p, q| (p[0] + p[1]).total_cmp(&(q[0] + q[1])));
        Self { terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    #[inline]
    pub fn min_distance_sqr(&self, h_a: &[Complex64], h_b: &[Complex64]) -> f64 {
        let s = pair_stats(h_a, h_b);
        self.terms.iter().map(|t| quad_form(t, &s)).fold(f64::INFINITY, f64::min)
    }

    /// Returns the squared minimum distance if it is strictly greater than
    /// `floor`; stops early with `None` as soon as it cannot be.
    #[inline]
    pub fn min_distance_sqr_above(&self, h_a: &[Complex64], h_b: &[Complex64], floor: f64) -> Option<f64> {
        let s = pair_stats(h_a, h_b);
        let mut best = f64::INFINITY;
        for t in &self.terms {
            best = best.min(quad_form(t, &s));
            if best <= floor {
                return None;
            }
        }
        Some(best)
    }
}

fn strongest_antenna(channel: &ChannelRealization, user: User, count: usize) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..count {
        let gain: f64 = channel.antenna(user, i).iter().map(|g| g.norm_sqr()).sum();
        if gain > best.1 {
            best = (i, gain);
        }
    }
    best
}

/// AS1: each user independently picks the antenna with the largest
/// `sum_j |h_{m,i,j}|^2`.
pub fn select_as1(channel: &ChannelRealization) -> SelectionResult {
    let (n_a, _, n_b) = channel.dims();
    let (i, gain_a) = strongest_antenna(channel, User::A, n_a);
    let (j, gain_b) = strongest_antenna(channel, User::B, n_b);
    SelectionResult::from_indices(channel, i, j, SelectionMetric::ChannelGain { a: gain_a, b: gain_b })
}

fn as2_search(channel: &ChannelRealization, kernel: &DistanceKernel) -> (usize, usize, f64) {
    let (n_a, _, n_b) = channel.dims();
    let mut best = (0, 0, f64::NEG_INFINITY);
    for i in 0..n_a {
        let h_a = channel.antenna(User::A, i);
        for j in 0..n_b {
            let h_b = channel.antenna(User::B, j);
            if let Some(d) = kernel.min_distance_sqr_above(h_a, h_b, best.2) {
                best = (i, j, d);
            }
        }
    }
    best
}

/// AS2: exhaustive search over all `N_A * N_B` antenna pairs for the largest
/// squared inter-cluster minimum distance.
pub fn select_as2(
    channel: &ChannelRealization,
    constellation: &Constellation,
    map: &PncMap,
    config: &SystemConfig,
) -> SelectionResult {
    let kernel = DistanceKernel::new(constellation, map, config.e_a, config.e_b);
    let (i, j, d) = as2_search(channel, &kernel);
    SelectionResult::from_indices(channel, i, j, SelectionMetric::MinDistanceSqr(d))
}

/// Reusable selector for the simulation loop: holds the distance table for
/// AS2 so it is built once per configuration.
#[derive(Debug, Clone)]
pub struct Selector {
    scheme: Scheme,
    kernel: Option<DistanceKernel>,
}

impl Selector {
    pub fn new(scheme: Scheme, constellation: &Constellation, map: &PncMap, config: &SystemConfig) -> Self {
        let kernel = (scheme == Scheme::As2).then(|| DistanceKernel::new(constellation, map, config.e_a, config.e_b));
        Self { scheme, kernel }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Selected `(i, j)` antenna indices.
    #[inline]
    pub fn select_indices(&self, channel: &ChannelRealization) -> (usize, usize) {
        match (self.scheme, &self.kernel) {
            (Scheme::As2, Some(kernel)) => {
                let (i, j, _) = as2_search(channel, kernel);
                (i, j)
            }
            (Scheme::As1, _) => {
                let (n_a, _, n_b) = channel.dims();
                (
                    strongest_antenna(channel, User::A, n_a).0,
                    strongest_antenna(channel, User::B, n_b).0,
                )
            }
            _ => (0, 0),
        }
    }

    pub fn select(&self, channel: &ChannelRealization) -> SelectionResult {
        match (self.scheme, &self.kernel) {
            (Scheme::As2, Some(kernel)) => {
                let (i, j, d) = as2_search(channel, kernel);
                SelectionResult::from_indices(channel, i, j, SelectionMetric::MinDistanceSqr(d))
            }
            (Scheme::As1, _) => select_as1(channel),
            _ => SelectionResult::from_indices(channel, 0, 0, SelectionMetric::Fixed),
        }
    }
}

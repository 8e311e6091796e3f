//! Rank and eigenvalue structure of the AS2 difference matrices.
//!
//! For every antenna combination `(i, j)` (ordered `i`-major, column
//! `k = i N_B + j`) a cross-cluster confusion contributes a column whose only
//! nonzero entries are `sqrt(E_A) dx_A` in row `i` and `sqrt(E_B) dx_B` in
//! row `N_A + j`. The minimum rank over all such matrices and the smallest
//! nonzero eigenvalue of `X X^H` govern the AS2 diversity.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rand::Rng;

use crate::channel::{RngStream, SystemConfig};
use crate::constellation::{Constellation, PncMap};
use crate::error::{Error, Result};

pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationMode {
    /// Every matrix; fails if there are more than `cap`.
    Exhaustive { cap: u128 },
    /// `samples` matrices with columns drawn uniformly and independently.
    Sampled { samples: u64, seed: u64 },
}

impl Default for EnumerationMode {
    fn default() -> Self {
        EnumerationMode::Exhaustive {
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaDMatrix {
    pub n_a: usize,
    pub n_b: usize,
    /// `(N_A + N_B) x (N_A N_B)`.
    pub matrix: DMatrix<Complex64>,
}

impl DeltaDMatrix {
    /// Numerical rank and smallest nonzero eigenvalue of `X X^H`.
    pub fn rank_and_lambda(&self) -> (usize, f64) {
        let sv = self.matrix.singular_values();
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let mut rank = 0;
        let mut smallest = f64::INFINITY;
        for &s in sv.iter() {
            if s > RANK_TOLERANCE * max {
                rank += 1;
                smallest = smallest.min(s);
            }
        }
        (rank, smallest * smallest)
    }
}

/// The set of difference matrices for one antenna configuration.
#[derive(Debug, Clone)]
pub struct DeltaDSet {
    n_a: usize,
    n_b: usize,
    alphabet: Vec<(Complex64, Complex64)>,
    mode: EnumerationMode,
    total: u128,
}

/// Scaled cross-cluster differences `(sqrt(E_A) dx_A, sqrt(E_B) dx_B)` over
/// all ordered confusions, duplicates kept.
pub fn cross_cluster_differences(
    constellation: &Constellation,
    map: &PncMap,
    e_a: f64,
    e_b: f64,
) -> Vec<(Complex64, Complex64)> {
    let x = constellation.points();
    let m = x.len();
    let (sa, sb) = (e_a.sqrt(), e_b.sqrt());
    let mut out = Vec::new();
    for a in 0..m {
        for b in 0..m {
            for a2 in 0..m {
                for b2 in 0..m {
                    if map.symbol_unchecked(a, b) != map.symbol_unchecked(a2, b2) {
                        out.push(((x[a] - x[a2]) * sa, (x[b] - x[b2]) * sb));
                    }
                }
            }
        }
    }
    out
}

pub fn delta_d_enumerate(
    n_a: usize,
    n_b: usize,
    constellation: &Constellation,
    map: &PncMap,
    e_a: f64,
    e_b: f64,
    mode: EnumerationMode,
) -> Result<DeltaDSet> {
    if n_a == 0 || n_b == 0 {
        return Err(Error::InvalidConfig("antenna counts must be positive".into()));
    }
    let alphabet = cross_cluster_differences(constellation, map, e_a, e_b);
    let columns = (n_a * n_b) as u32;
    let total = match mode {
        EnumerationMode::Exhaustive { cap } => {
            let size = (alphabet.len() as u128).checked_pow(columns).unwrap_or(u128::MAX);
            if size > cap {
                return Err(Error::EnumerationCap { size, cap });
            }
            size
        }
        EnumerationMode::Sampled { samples, .. } => samples as u128,
    };
    Ok(DeltaDSet {
        n_a,
        n_b,
        alphabet,
        mode,
        total,
    })
}

impl DeltaDSet {
    pub fn alphabet(&self) -> &[(Complex64, Complex64)] {
        &self.alphabet
    }

    /// Number of matrices yielded.
    pub fn len(&self) -> u128 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn is_exhaustive(&self) -> bool {
        matches!(self.mode, EnumerationMode::Exhaustive { .. })
    }

    fn choices(&self, index: u64) -> Vec<usize> {
        let n = self.n_a * self.n_b;
        let l = self.alphabet.len();
        match self.mode {
            EnumerationMode::Exhaustive { .. } => {
                // Mixed radix, first column most significant.
                let mut rest = index;
                let mut out = vec![0; n];
                for slot in out.iter_mut().rev() {
                    *slot = (rest % l as u64) as usize;
                    rest /= l as u64;
                }
                out
            }
            EnumerationMode::Sampled { seed, .. } => {
                let mut rng = RngStream::new(seed, 0, index).rng();
                (0..n).map(|_| rng.random_range(0..l)).collect()
            }
        }
    }

    fn build(&self, choices: &[usize]) -> DeltaDMatrix {
        let (n_a, n_b) = (self.n_a, self.n_b);
        let mut matrix = DMatrix::zeros(n_a + n_b, n_a * n_b);
        for i in 0..n_a {
            for j in 0..n_b {
                let k = i * n_b + j;
                let (da, db) = self.alphabet[choices[k]];
                matrix[(i, k)] = da;
                matrix[(n_a + j, k)] = db;
            }
        }
        DeltaDMatrix { n_a, n_b, matrix }
    }

    /// The `index`-th matrix, `index < len()`.
    pub fn get(&self, index: u64) -> DeltaDMatrix {
        self.build(&self.choices(index))
    }

    pub fn iter(&self) -> impl Iterator<Item = DeltaDMatrix> + '_ {
        (0..self.total as u64).map(move |k| self.get(k))
    }
}

/// Result of a rank/eigenvalue scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSummary {
    pub r_min: usize,
    pub lambda_star: f64,
    pub matrices: u128,
    /// False when the scan was sampled; `r_min` and `lambda_star` are then
    /// only upper bounds on the true minima.
    pub exhaustive: bool,
}

pub fn r_min_and_lambda(
    n_a: usize,
    n_b: usize,
    constellation: &Constellation,
    map: &PncMap,
    e_a: f64,
    e_b: f64,
) -> Result<RankSummary> {
    r_min_and_lambda_with(n_a, n_b, constellation, map, e_a, e_b, EnumerationMode::default())
}

pub fn r_min_and_lambda_with(
    n_a: usize,
    n_b: usize,
    constellation: &Constellation,
    map: &PncMap,
    e_a: f64,
    e_b: f64,
    mode: EnumerationMode,
) -> Result<RankSummary> {
    let set = delta_d_enumerate(n_a, n_b, constellation, map, e_a, e_b, mode)?;
    let (r_min, lambda_star) = (0..set.len() as u64)
        .into_par_iter()
        .map(|k| set.get(k).rank_and_lambda())
        .reduce(
            || (usize::MAX, f64::INFINITY),
            |a, b| (a.0.min(b.0), a.1.min(b.1)),
        );
    Ok(RankSummary {
        r_min,
        lambda_star,
        matrices: set.len(),
        exhaustive: set.is_exhaustive(),
    })
}

/// Chernoff-style upper bound on the AS2 error probability,
/// `C(M,2) (E_min lambda* / (4 n N0))^{-r_min N_R}` with `n = N_A N_B`.
pub fn as2_chernoff_bound(config: &SystemConfig, r_min: usize, lambda_star: f64) -> f64 {
    let m = config.order as f64;
    let n = (config.n_a * config.n_b) as f64;
    let base = config.e_min() * lambda_star / (4.0 * n * config.n0);
    m * (m - 1.0) / 2.0 * base.powi(-((r_min * config.n_r) as i32))
}

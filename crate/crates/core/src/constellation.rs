//! PSK constellations, the XOR network-coding map and the cluster structure
//! it induces on the joint symbol space.
//!
//! Labeling: BPSK is `{+1, -1}`. QPSK uses the natural angular order
//! `F(s) = exp(i(pi/4 + s*pi/2))`, so `F(0) = (1+i)/sqrt(2)` and the XOR map
//! reproduces the usual QPSK network-coding table. 8-PSK and 16-PSK place the
//! points at `exp(i*pi*(2k+1)/M)` and Gray-label them along the circle
//! (position `k` carries symbol `k ^ (k >> 1)`).

use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// Unit-energy M-PSK symbol set. `points()[s]` is the constellation point of
/// symbol `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: Vec<Complex64>,
}

impl Constellation {
    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// The mapping `F`.
    pub fn point(&self, symbol: usize) -> Result<Complex64> {
        self.points.get(symbol).copied().ok_or(Error::SymbolOutOfRange {
            symbol,
            order: self.order(),
        })
    }

    /// The inverse mapping `F^-1`, for points taken from this constellation.
    pub fn symbol_of(&self, point: Complex64) -> Option<usize> {
        self.points.iter().position(|&p| (p - point).norm() < 1e-9)
    }

    pub fn mean_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.order() as f64
    }
}

/// Builds the Gray/angular-labeled unit-energy M-PSK constellation.
pub fn build_constellation(order: usize) -> Result<Constellation> {
    let points = match order {
        2 => vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
        4 => vec![
            Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
            Complex64::new(-FRAC_1_SQRT_2, FRAC_1_SQRT_2),
            Complex64::new(-FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
            Complex64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
        ],
        8 | 16 => {
            let mut points = vec![Complex64::default(); order];
            for position in 0..order {
                let angle = PI * (2 * position + 1) as f64 / order as f64;
                points[position ^ (position >> 1)] = Complex64::from_polar(1.0, angle);
            }
            points
        }
        other => return Err(Error::UnsupportedOrder(other)),
    };
    Ok(Constellation { points })
}

/// Fixed network-coding map `M_s(a, b) = a XOR b` on `Z_M`.
///
/// XOR satisfies the exclusive law for every power-of-two order: fixing one
/// argument makes the map a bijection in the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PncMap {
    order: usize,
}

impl PncMap {
    pub fn new(order: usize) -> Result<Self> {
        if matches!(order, 2 | 4 | 8 | 16) {
            Ok(Self { order })
        } else {
            Err(Error::UnsupportedOrder(order))
        }
    }

    pub fn for_constellation(constellation: &Constellation) -> Self {
        Self {
            order: constellation.order(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `M_s` with range checks.
    pub fn symbol(&self, s_a: usize, s_b: usize) -> Result<usize> {
        for symbol in [s_a, s_b] {
            if symbol >= self.order {
                return Err(Error::SymbolOutOfRange {
                    symbol,
                    order: self.order,
                });
            }
        }
        Ok(s_a ^ s_b)
    }

    /// `M_s` for symbols already known to be in range.
    #[inline]
    pub fn symbol_unchecked(&self, s_a: usize, s_b: usize) -> usize {
        s_a ^ s_b
    }

    /// `M_c(x_A, x_B) = F(M_s(F^-1(x_A), F^-1(x_B)))`, on symbol indices.
    pub fn point(&self, constellation: &Constellation, s_a: usize, s_b: usize) -> Result<Complex64> {
        constellation.point(self.symbol(s_a, s_b)?)
    }
}

/// `pnc_map(s_A, s_B, M)`.
pub fn pnc_map(s_a: usize, s_b: usize, order: usize) -> Result<usize> {
    PncMap::new(order)?.symbol(s_a, s_b)
}

/// Partition of `Z_M x Z_M` into clusters; `clusters[r]` lists the symbol
/// pairs `(s_A, s_B)` with `M_s(s_A, s_B) = r`, in lexicographic order.
pub fn cluster_partition(constellation: &Constellation, map: &PncMap) -> Vec<Vec<(usize, usize)>> {
    let m = constellation.order();
    let mut clusters = vec![Vec::with_capacity(m); m];
    for s_a in 0..m {
        for s_b in 0..m {
            clusters[map.symbol_unchecked(s_a, s_b)].push((s_a, s_b));
        }
    }
    clusters
}

/// Differences `x - x'` over ordered pairs of constellation points.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceSet {
    pub elements: Vec<Complex64>,
}

impl DifferenceSet {
    pub fn contains(&self, value: Complex64, tol: f64) -> bool {
        self.elements.iter().any(|e| (e - value).norm() <= tol)
    }
}

/// All `x - x'` for `(x, x')` in `X^2`. With `dedup`, values equal to within
/// 1e-12 are reported once; otherwise all `M^2` ordered differences are kept
/// in `(x, x')` lexicographic order.
pub fn difference_set(constellation: &Constellation, dedup: bool) -> DifferenceSet {
    let mut elements: Vec<Complex64> = Vec::with_capacity(constellation.order().pow(2));
    for &x in constellation.points() {
        for &x_prime in constellation.points() {
            let delta = x - x_prime;
            if dedup && elements.iter().any(|e| (e - delta).norm() <= 1e-12) {
                continue;
            }
            elements.push(delta);
        }
    }
    DifferenceSet { elements }
}

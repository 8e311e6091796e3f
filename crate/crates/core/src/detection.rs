//! Joint maximum-likelihood detection of the user symbol pair at the relay,
//! followed by the network-coding map.

use num_complex::Complex64;

use crate::channel::SystemConfig;
use crate::constellation::{Constellation, PncMap};
use crate::error::{Error, Result};

/// Relay decision: the joint estimate and the network-coded symbol it maps to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayDecision {
    pub s_a: usize,
    pub s_b: usize,
    pub x_a: Complex64,
    pub x_b: Complex64,
    pub s_r: usize,
    pub x_r: Complex64,
    /// Residual norm `||y - sqrt(E_A) h_A x_A - sqrt(E_B) h_B x_B||`.
    pub metric: f64,
}

/// Exhaustive ML search over all `M^2` joint symbols; ties go to the
/// lexicographically smallest `(s_A, s_B)`.
pub fn ml_joint_detect(
    y: &[Complex64],
    h_a: &[Complex64],
    h_b: &[Complex64],
    config: &SystemConfig,
    constellation: &Constellation,
) -> Result<RelayDecision> {
    let n_r = y.len();
    for found in [h_a.len(), h_b.len()] {
        if found != n_r {
            return Err(Error::DimensionMismatch { expected: n_r, found });
        }
    }
    let mut detector = Detector::new(constellation, config);
    let (s_a, s_b, residual) = detector.detect(y, h_a, h_b);
    let map = PncMap::for_constellation(constellation);
    let x = constellation.points();
    let s_r = map.symbol_unchecked(s_a, s_b);
    Ok(RelayDecision {
        s_a,
        s_b,
        x_a: x[s_a],
        x_b: x[s_b],
        s_r,
        x_r: x[s_r],
        metric: residual.sqrt(),
    })
}

/// True when the relay's network-coded symbol is wrong. A wrong joint
/// estimate that stays inside the correct cluster is not an error.
pub fn error_event(decision: &RelayDecision, s_a: usize, s_b: usize, map: &PncMap) -> bool {
    decision.s_r != map.symbol_unchecked(s_a, s_b)
}

/// ML detector with scratch buffers, for repeated use in a simulation loop.
#[derive(Debug, Clone)]
pub struct Detector {
    points_a: Vec<Complex64>,
    points_b: Vec<Complex64>,
    contrib_a: Vec<Complex64>,
    contrib_b: Vec<Complex64>,
}

impl Detector {
    pub fn new(constellation: &Constellation, config: &SystemConfig) -> Self {
        let (sqrt_a, sqrt_b) = (config.e_a.sqrt(), config.e_b.sqrt());
        Self {
            points_a: constellation.points().iter().map(|x| x * sqrt_a).collect(),
            points_b: constellation.points().iter().map(|x| x * sqrt_b).collect(),
            contrib_a: Vec::new(),
            contrib_b: Vec::new(),
        }
    }

    /// Returns `(s_A, s_B, squared residual)`. Slices must share one length.
    #[inline]
    pub fn detect(&mut self, y: &[Complex64], h_a: &[Complex64], h_b: &[Complex64]) -> (usize, usize, f64) {
        let n_r = y.len();
        let m = self.points_a.len();
        // contrib_a[s * n_r + j] = y_j - sqrt(E_A) h_{A,j} x_s
        self.contrib_a.clear();
        self.contrib_b.clear();
        for s in 0..m {
            let (pa, pb) = (self.points_a[s], self.points_b[s]);
            self.contrib_a.extend((0..n_r).map(|j| y[j] - h_a[j] * pa));
            self.contrib_b.extend((0..n_r).map(|j| h_b[j] * pb));
        }
        let mut best = (0, 0, f64::INFINITY);
        for s_a in 0..m {
            let r_a = &self.contrib_a[s_a * n_r..(s_a + 1) * n_r];
            for s_b in 0..m {
                let r_b = &self.contrib_b[s_b * n_r..(s_b + 1) * n_r];
                let mut metric = 0.0;
                for j in 0..n_r {
                    metric += (r_a[j] - r_b[j]).norm_sqr();
                    if metric >= best.2 {
                        break;
                    }
                }
                if metric < best.2 {
                    best = (s_a, s_b, metric);
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{received_signal, sample_cn, RngStream};
    use crate::constellation::build_constellation;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Independent brute force: enumerate candidates, build the noiseless
    /// superposition directly, keep the first strict minimum.
    fn oracle(y: &[Complex64], h_a: &[Complex64], h_b: &[Complex64], cfg: &SystemConfig, x: &[Complex64]) -> (usize, usize) {
        let mut best = (usize::MAX, usize::MAX);
        let mut best_d = f64::INFINITY;
        for a in 0..x.len() {
            for b in 0..x.len() {
                let d: f64 = (0..y.len())
                    .map(|j| {
                        let s = cfg.e_a.sqrt() * h_a[j] * x[a] + cfg.e_b.sqrt() * h_b[j] * x[b];
                        (y[j] - s).norm_sqr()
                    })
                    .sum::<f64>()
                    .sqrt();
                if d < best_d {
                    best_d = d;
                    best = (a, b);
                }
            }
        }
        best
    }

    #[test]
    fn noiseless_detection_is_exact() {
        let x = build_constellation(4).unwrap();
        let cfg = SystemConfig::new(1, 2, 1, 4, 1.0, 2.0, 1.0).unwrap();
        let h_a = [c(0.3, -1.1), c(0.9, 0.2)];
        let h_b = [c(-0.7, 0.4), c(0.1, 1.3)];
        let zero = [Complex64::default(); 2];
        for s_a in 0..4 {
            for s_b in 0..4 {
                let y = received_signal(&h_a, &h_b, x.points()[s_a], x.points()[s_b], &cfg, &zero).unwrap();
                let d = ml_joint_detect(&y, &h_a, &h_b, &cfg, &x).unwrap();
                assert_eq!((d.s_a, d.s_b), (s_a, s_b));
                assert!(d.metric < 1e-12);
            }
        }
    }

    #[test]
    fn bpsk_midpoint_lands_in_cross_cluster() {
        // Candidates: +2 (0,0), 0 (0,1), 0 (1,0), -2 (1,1); y = 0.1 is closest to 0.
        let x = build_constellation(2).unwrap();
        let cfg = SystemConfig::new(1, 1, 1, 2, 1.0, 1.0, 1.0).unwrap();
        let one = [c(1.0, 0.0)];
        let d = ml_joint_detect(&[c(0.1, 0.0)], &one, &one, &cfg, &x).unwrap();
        assert_eq!(d.s_r, 1);
        // exact tie between (0,1) and (1,0): lexicographic rule keeps (0,1)
        assert_eq!((d.s_a, d.s_b), (0, 1));
        assert!((d.metric - 0.1).abs() < 1e-15);
    }

    #[test]
    fn qpsk_table_row() {
        let x = build_constellation(4).unwrap();
        let cfg = SystemConfig::new(1, 1, 1, 4, 1.0, 1.0, 1.0).unwrap();
        let (h_a, h_b) = ([c(1.0, 0.2)], [c(-0.3, 0.8)]);
        let y = received_signal(&h_a, &h_b, x.points()[0], x.points()[3], &cfg, &[Complex64::default()]).unwrap();
        let d = ml_joint_detect(&y, &h_a, &h_b, &cfg, &x).unwrap();
        assert_eq!(d.s_r, 3);
        assert_eq!(d.x_r, x.points()[3]);
    }

    #[test]
    fn error_event_counts_cluster_errors_only() {
        let x = build_constellation(4).unwrap();
        let map = PncMap::new(4).unwrap();
        let decision = |s_a: usize, s_b: usize| RelayDecision {
            s_a,
            s_b,
            x_a: x.points()[s_a],
            x_b: x.points()[s_b],
            s_r: s_a ^ s_b,
            x_r: x.points()[s_a ^ s_b],
            metric: 0.0,
        };
        assert!(!error_event(&decision(0, 0), 0, 0, &map));
        assert!(!error_event(&decision(1, 1), 0, 0, &map));
        assert!(error_event(&decision(0, 1), 0, 0, &map));
    }

    #[test]
    fn dimension_mismatch() {
        let x = build_constellation(4).unwrap();
        let cfg = SystemConfig::new(1, 2, 1, 4, 1.0, 1.0, 1.0).unwrap();
        let r = ml_joint_detect(&[c(0.0, 0.0); 2], &[c(1.0, 0.0)], &[c(1.0, 0.0); 2], &cfg, &x);
        assert_eq!(r, Err(Error::DimensionMismatch { expected: 2, found: 1 }));
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut rng = RngStream::new(77, 0, 0).rng();
        for (m, n_r) in [(2, 1), (4, 1), (4, 2), (8, 3)] {
            let x = build_constellation(m).unwrap();
            let cfg = SystemConfig::new(1, n_r, 1, m, 3.0, 1.5, 1.0).unwrap();
            for _ in 0..2500 {
                let h_a: Vec<_> = (0..n_r).map(|_| sample_cn(&mut rng)).collect();
                let h_b: Vec<_> = (0..n_r).map(|_| sample_cn(&mut rng)).collect();
                let y: Vec<_> = (0..n_r).map(|_| sample_cn(&mut rng) * 2.0).collect();
                let d = ml_joint_detect(&y, &h_a, &h_b, &cfg, &x).unwrap();
                assert_eq!((d.s_a, d.s_b), oracle(&y, &h_a, &h_b, &cfg, x.points()));
            }
        }
    }

    proptest! {
        #[test]
        fn invariant_to_common_rotation(
            seed in 0u64..10_000, phase in -3.1f64..3.1,
        ) {
            let x = build_constellation(4).unwrap();
            let cfg = SystemConfig::new(1, 2, 1, 4, 2.0, 1.0, 0.5).unwrap();
            let mut rng = RngStream::new(seed, 0, 0).rng();
            let h_a: Vec<_> = (0..2).map(|_| sample_cn(&mut rng)).collect();
            let h_b: Vec<_> = (0..2).map(|_| sample_cn(&mut rng)).collect();
            let y: Vec<_> = (0..2).map(|_| sample_cn(&mut rng)).collect();
            let r = Complex64::from_polar(1.0, phase);
            let rot = |v: &[Complex64]| v.iter().map(|z| z * r).collect::<Vec<_>>();
            let d1 = ml_joint_detect(&y, &h_a, &h_b, &cfg, &x).unwrap();
            let d2 = ml_joint_detect(&rot(&y), &rot(&h_a), &rot(&h_b), &cfg, &x).unwrap();
            prop_assert_eq!((d1.s_a, d1.s_b), (d2.s_a, d2.s_b));
        }
    }
}

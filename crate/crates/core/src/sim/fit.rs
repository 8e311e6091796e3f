use serde::{Deserialize, Serialize};

use super::{PointStatus, SerPoint};
use crate::error::{Error, Result};

/// Which points of a curve enter the slope fit. Only converged points with
/// a nonzero error count are ever used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitWindow {
    /// Points within this many dB of the highest usable SNR.
    TopDb(f64),
    SnrRange { low_db: f64, high_db: f64 },
    SerRange { low: f64, high: f64 },
}

impl Default for FitWindow {
    fn default() -> Self {
        FitWindow::TopDb(10.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeEstimate {
    /// Diversity estimate: the negated fitted slope, floored at zero.
    pub slope: f64,
    /// SNR range actually spanned by the fitted points.
    pub low_db: f64,
    pub high_db: f64,
    /// RMS residual of the fit in decades.
    pub residual: f64,
    pub points: usize,
}

pub const MIN_FIT_POINTS: usize = 3;

/// Least-squares fit of `log10(SER)` against `SNR_dB / 10`.
pub fn fit_diversity_slope(points: &[SerPoint], window: FitWindow) -> Result<SlopeEstimate> {
    let usable: Vec<&SerPoint> = points
        .iter()
        .filter(|p| p.status == PointStatus::Converged && p.errors > 0 && p.ser > 0.0)
        .collect();
    let chosen: Vec<&SerPoint> = match window {
        FitWindow::TopDb(width) => {
            let top = usable.iter().map(|p| p.snr_db).fold(f64::NEG_INFINITY, f64::max);
            usable.into_iter().filter(|p| p.snr_db >= top - width - 1e-9).collect()
        }
        FitWindow::SnrRange { low_db, high_db } => usable
            .into_iter()
            .filter(|p| p.snr_db >= low_db - 1e-9 && p.snr_db <= high_db + 1e-9)
            .collect(),
        FitWindow::SerRange { low, high } => usable.into_iter().filter(|p| p.ser >= low && p.ser <= high).collect(),
    };
    if chosen.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            found: chosen.len(),
            required: MIN_FIT_POINTS,
        });
    }
    let xs: Vec<f64> = chosen.iter().map(|p| p.snr_db / 10.0).collect();
    let ys: Vec<f64> = chosen.iter().map(|p| p.ser.log10()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let ss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - my - b * (x - mx)).powi(2)).sum();
    Ok(SlopeEstimate {
        slope: (-b).max(0.0),
        low_db: chosen.iter().map(|p| p.snr_db).fold(f64::INFINITY, f64::min),
        high_db: chosen.iter().map(|p| p.snr_db).fold(f64::NEG_INFINITY, f64::max),
        residual: (ss / n).sqrt(),
        points: chosen.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(snr_db: f64, ser: f64) -> SerPoint {
        SerPoint {
            snr_db,
            trials: 1,
            errors: 1,
            ser,
            ci_low: ser,
            ci_high: ser,
            status: PointStatus::Converged,
        }
    }

    #[test]
    fn exact_power_law() {
        let curve: Vec<_> = (0..=8).map(|k| {
            let db = 5.0 * k as f64;
            point(db, 0.7 * 10f64.powf(-3.0 * db / 10.0))
        }).collect();
        let fit = fit_diversity_slope(&curve, FitWindow::SnrRange { low_db: 0.0, high_db: 40.0 }).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-9);
        assert!(fit.residual < 1e-9);
        let top = fit_diversity_slope(&curve, FitWindow::default()).unwrap();
        assert_eq!((top.points, top.low_db, top.high_db), (3, 30.0, 40.0));
        assert!((top.slope - 3.0).abs() < 1e-9);
    }

    #[test]
    fn skips_unconverged_and_zero_points() {
        let mut curve: Vec<_> = (0..5).map(|k| point(10.0 * k as f64, 10f64.powi(-k))).collect();
        curve[4].status = PointStatus::Unconverged;
        curve[3].errors = 0;
        let fit = fit_diversity_slope(&curve, FitWindow::TopDb(100.0)).unwrap();
        assert_eq!(fit.points, 3);
        assert!((fit.slope - 1.0).abs() < 1e-12);
        let err = fit_diversity_slope(&curve, FitWindow::SerRange { low: 1e-3, high: 1e-1 });
        assert_eq!(err.unwrap_err(), Error::InsufficientPoints { found: 2, required: 3 });
    }

    #[test]
    fn rising_curve_clamps_to_zero() {
        let curve: Vec<_> = (0..4).map(|k| point(k as f64, 0.01 * (k + 1) as f64)).collect();
        assert_eq!(fit_diversity_slope(&curve, FitWindow::default()).unwrap().slope, 0.0);
    }
}

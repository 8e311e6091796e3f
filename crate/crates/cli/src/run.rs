use pnc_lab_core::analysis::ser_upper_bound;
use pnc_lab_core::selftest::run_selftest;
use pnc_lab_core::{
    build_constellation, fit_diversity_slope, sweep, PncMap, Scheme, SerCurve, SnrGrid, StoppingRule, SweepSpec,
    SystemConfig,
};

use crate::config::{ExperimentConfig, Mode};
use crate::error::Result;
use crate::figures;
use crate::output::{bound_record, curve_records, setup_label, CheckRow, Report, SlopeRow};

/// Diversity order the theory predicts: AS2 (and AS1 with binary
/// modulation) collect `min(N_A, N_B) N_R`; otherwise only the relay
/// antennas help.
pub fn expected_diversity(scheme: Scheme, order: usize, n_a: usize, n_r: usize, n_b: usize) -> usize {
    match scheme {
        Scheme::As2 => n_a.min(n_b) * n_r,
        Scheme::As1 if order == 2 => n_a.min(n_b) * n_r,
        _ => n_r,
    }
}

struct Plan {
    order: usize,
    setup: (usize, usize, usize),
    delta_ab_db: f64,
    grid: SnrGrid,
    stopping: StoppingRule,
    seed: u64,
    ser_floor: Option<f64>,
}

impl Plan {
    fn base(&self) -> Result<SystemConfig> {
        let (n_a, n_r, n_b) = self.setup;
        Ok(SystemConfig::from_snr_db(n_a, n_r, n_b, self.order, 0.0, self.delta_ab_db)?)
    }

    fn simulate(&self, scheme: Scheme) -> Result<SerCurve> {
        let spec = SweepSpec {
            grid: self.grid,
            delta_ab_db: self.delta_ab_db,
            scheme,
            stopping: self.stopping,
            seed: self.seed,
            ser_floor: self.ser_floor,
        };
        Ok(sweep(&spec, &self.base()?)?)
    }

    fn bound(&self, report: &mut Report) -> Result<()> {
        let (n_a, n_r, n_b) = self.setup;
        let x = build_constellation(self.order)?;
        let map = PncMap::new(self.order)?;
        let label = setup_label(n_a, n_r, n_b);
        for snr in self.grid.points()? {
            let cfg = SystemConfig::from_snr_db(n_a, n_r, n_b, self.order, snr, self.delta_ab_db)?;
            report.records.push(bound_record(snr, ser_upper_bound(&cfg, &x, &map)?, &label));
        }
        Ok(())
    }
}

fn plan_from(config: &ExperimentConfig) -> Plan {
    Plan {
        order: config.order,
        setup: (config.n_a, config.n_r, config.n_b),
        delta_ab_db: config.delta_ab_db,
        grid: config.snr_db.expect("validated"),
        stopping: config.stopping(),
        seed: config.seed,
        ser_floor: config.ser_floor,
    }
}

/// Executes a validated config. Output is a pure function of the config.
pub fn run(config: &ExperimentConfig) -> Result<Report> {
    let mut report = Report::default();
    match config.mode {
        Mode::Simulate => {
            let plan = plan_from(config);
            for scheme in config.schemes() {
                report.records.extend(curve_records(&plan.simulate(scheme)?));
            }
        }
        Mode::Bound => plan_from(config).bound(&mut report)?,
        Mode::Diversity => {
            let plan = plan_from(config);
            for scheme in config.schemes() {
                let curve = plan.simulate(scheme)?;
                let (n_a, n_r, n_b) = plan.setup;
                let mut row = SlopeRow {
                    setup: setup_label(n_a, n_r, n_b),
                    scheme: scheme.to_string(),
                    slope: None,
                    low_db: None,
                    high_db: None,
                    points: None,
                    residual: None,
                    expected: expected_diversity(scheme, config.order, n_a, n_r, n_b),
                    note: None,
                };
                match fit_diversity_slope(&curve.points, config.fit) {
                    Ok(fit) => {
                        row.slope = Some(fit.slope);
                        row.low_db = Some(fit.low_db);
                        row.high_db = Some(fit.high_db);
                        row.points = Some(fit.points);
                        row.residual = Some(fit.residual);
                    }
                    Err(e) => row.note = Some(e.to_string()),
                }
                report.slopes.push(row);
                report.records.extend(curve_records(&curve));
            }
        }
        Mode::ReproduceFigure => {
            let name = config.figure.as_deref().expect("validated");
            let b = figures::bundle(name).expect("validated");
            let stopping = StoppingRule {
                min_errors: config.min_errors.unwrap_or(b.min_errors),
                max_trials: config.max_trials.unwrap_or(b.max_trials),
            };
            for &[n_a, n_r, n_b] in &b.setups {
                let plan = Plan {
                    order: b.order,
                    setup: (n_a, n_r, n_b),
                    delta_ab_db: b.delta_ab_db,
                    grid: config.snr_db.unwrap_or(b.snr_db),
                    stopping,
                    seed: config.seed,
                    ser_floor: config.ser_floor.or(b.ser_floor),
                };
                for &scheme in &b.schemes {
                    report.records.extend(curve_records(&plan.simulate(scheme)?));
                }
                if b.bound {
                    plan.bound(&mut report)?;
                }
            }
        }
        Mode::Selftest => {
            report.checks = run_selftest()
                .into_iter()
                .map(|c| CheckRow {
                    name: c.name.to_string(),
                    passed: c.passed,
                    detail: c.detail,
                })
                .collect();
        }
    }
    Ok(report)
}

//! Acceptance suite: one test per criterion, each printing a single
//! `PASS`/`FAIL` line (with indented detail lines underneath).
//!
//! The suite is ignored by a plain `cargo test`; run it with
//!
//! ```text
//! cargo test --release -p pnc-lab-core --test acceptance -- --ignored --nocapture --test-threads 1
//! ```
//!
//! The simulation criteria (1 to 5) take several minutes each on one core.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use pnc_lab_core::analysis::{
    chiani_q, pdf_z, q_function, r_min_and_lambda, ser_upper_bound, theta_case12, xi_case3, ChianiTerm,
};
use pnc_lab_core::channel::{fill_channel, sample_cn, ChannelRealization, RngStream, SystemConfig, User};
use pnc_lab_core::selection::min_intercluster_distance_sqr;
use pnc_lab_core::sim::{fit_diversity_slope, sweep, FitWindow, SerCurve, SnrGrid, StoppingRule, SweepSpec};
use pnc_lab_core::{build_constellation, ml_joint_detect, select_as1, select_as2, PncMap, Scheme};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::{gamma_lr, ln_gamma};

const SEED: u64 = 20_240_601;

struct Outcome {
    lines: Vec<String>,
    passed: bool,
}

impl Outcome {
    fn new() -> Self {
        Self {
            lines: Vec::new(),
            passed: true,
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.passed &= ok;
        self.lines.push(format!("    [{}] {detail}", if ok { "ok" } else { "FAIL" }));
    }

    fn finish(self, id: u32, title: &str) {
        println!("{} criterion {id}: {title}", if self.passed { "PASS" } else { "FAIL" });
        for l in &self.lines {
            println!("{l}");
        }
        assert!(self.passed, "criterion {id} failed");
    }
}

// ---------------------------------------------------------------------------
// Simulation plans and a per-process curve cache (criteria 1 and 4 share the
// symmetric AS1 curves).

#[derive(Clone, Copy)]
struct Plan {
    grid: SnrGrid,
    stopping: StoppingRule,
    floor: f64,
}

fn miso_plan(scheme: Scheme) -> Plan {
    let grid = match scheme {
        Scheme::As2 => SnrGrid::new(5.0, 40.0, 2.5),
        _ => SnrGrid::new(10.0, 60.0, 5.0),
    };
    Plan {
        grid,
        stopping: StoppingRule::new(400, 40_000_000).unwrap(),
        floor: 1e-5,
    }
}

fn mimo_plan(scheme: Scheme) -> Plan {
    let grid = match scheme {
        Scheme::As2 => SnrGrid::new(2.0, 30.0, 2.0),
        _ => SnrGrid::new(6.0, 42.0, 3.0),
    };
    Plan {
        grid,
        stopping: StoppingRule::new(100, 120_000_000).unwrap(),
        floor: 1e-6,
    }
}

fn curve(m: usize, setup: (usize, usize, usize), scheme: Scheme, delta_ab_db: f64, plan: Plan) -> SerCurve {
    static CACHE: OnceLock<Mutex<HashMap<String, SerCurve>>> = OnceLock::new();
    let key = format!("{m}/{setup:?}/{scheme}/{delta_ab_db}/{:?}/{:?}", plan.grid, plan.stopping);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(c) = guard.get(&key) {
        return c.clone();
    }
    let (n_a, n_r, n_b) = setup;
    let base = SystemConfig::from_snr_db(n_a, n_r, n_b, m, 0.0, 0.0).unwrap();
    let spec = SweepSpec {
        grid: plan.grid,
        delta_ab_db,
        scheme,
        stopping: plan.stopping,
        seed: SEED,
        ser_floor: Some(plan.floor),
    };
    let c = sweep(&spec, &base).unwrap();
    guard.insert(key, c.clone());
    c
}

fn slope_check(out: &mut Outcome, c: &SerCurve, window: FitWindow, target: f64, tol: f64) {
    let name = format!("({},{},{}) {}", c.n_a, c.n_r, c.n_b, c.scheme);
    let deepest = c.points.iter().filter(|p| p.is_converged()).map(|p| p.ser).fold(1.0, f64::min);
    match fit_diversity_slope(&c.points, window) {
        Ok(fit) => out.check(
            (fit.slope - target).abs() <= tol,
            format!(
                "{name}: slope {:.3} (target {target} +/- {tol}) over {}..{} dB, {} points, deepest SER {deepest:.2e}",
                fit.slope, fit.low_db, fit.high_db, fit.points
            ),
        ),
        Err(e) => out.check(false, format!("{name}: {e}")),
    }
}

fn miso_slopes(delta_ab_db: f64) -> Outcome {
    let mut out = Outcome::new();
    for (setup, as2_target, as2_tol) in [((2, 1, 2), 2.0, 0.3), ((3, 1, 2), 2.0, 0.3), ((3, 1, 3), 3.0, 0.4)] {
        let c1 = curve(4, setup, Scheme::As1, delta_ab_db, miso_plan(Scheme::As1));
        slope_check(&mut out, &c1, FitWindow::TopDb(10.0), 1.0, 0.2);
        let c2 = curve(4, setup, Scheme::As2, delta_ab_db, miso_plan(Scheme::As2));
        slope_check(&mut out, &c2, FitWindow::TopDb(10.0), as2_target, as2_tol);
    }
    out
}

#[test]
#[ignore = "acceptance suite; run with --ignored"]
fn criterion_1_miso_symmetric_slopes() {
    miso_slopes(0.0).finish(1, "QPSK N_R=1 symmetric: AS1 slope 1, AS2 slope min(N_A,N_B)");
}

#[test]
#[ignore = "acceptance suite; run with --ignored"]
fn criterion_2_miso_asymmetric_slopes() {
    miso_slopes(5.0).finish(2, "QPSK N_R=1 with E_A/N_0 = E_min/N_0 + 5 dB: same slopes");
}

#[test]
#[ignore = "acceptance suite; run with --ignored"]
fn criterion_3_mimo_slopes() {
    let mut out = Outcome::new();
    let window = FitWindow::SerRange { low: 1e-6, high: 1e-2 };
    for (setup, as2_target, as2_tol) in [((2, 2, 2), 4.0, 0.5), ((2, 2, 3), 4.0, 0.5), ((3, 2, 3), 6.0, 0.8)] {
        let c1 = curve(4, setup, Scheme::As1, 0.0, mimo_plan(Scheme::As1));
        slope_check(&mut out, &c1, window, 2.0, 0.3);
        let c2 = curve(4, setup, Scheme::As2, 0.0, mimo_plan(Scheme::As2));
        slope_check(&mut out, &c2, window, as2_target, as2_tol);
    }
    out.finish(3, "QPSK N_R=2: AS1 slope 2, AS2 slope 4 / 6");
}

fn bound_at(setup: (usize, usize, usize), snr_db: f64) -> f64 {
    let x = build_constellation(4).unwrap();
    let map = PncMap::new(4).unwrap();
    let cfg = SystemConfig::from_snr_db(setup.0, setup.1, setup.2, 4, snr_db, 0.0).unwrap();
    ser_upper_bound(&cfg, &x, &map).unwrap()
}

/// SNR at which the (decreasing) bound equals `ser`, by bisection.
fn bound_snr_for(setup: (usize, usize, usize), ser: f64) -> f64 {
    let (mut lo, mut hi) = (-20.0, 100.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if bound_at(setup, mid) > ser {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
#[ignore = "acceptance suite; run with --ignored"]
fn criterion_4_bound_tightness() {
    let mut out = Outcome::new();
    for setup in [(2, 1, 2), (3, 1, 3)] {
        let c = curve(4, setup, Scheme::As1, 0.0, miso_plan(Scheme::As1));
        let mut below = Vec::new();
        let mut worst_offset: f64 = 0.0;
        let mut in_range = 0;
        for p in c.points.iter().filter(|p| p.is_converged()) {
            let ub = bound_at(setup, p.snr_db);
            if ub < p.ci_low {
                below.push(format!("{} dB: bound {ub:.3e} < sim {:.3e}", p.snr_db, p.ser));
            }
            if (1e-4..=1e-2).contains(&p.ser) {
                in_range += 1;
                let offset = bound_snr_for(setup, p.ser) - p.snr_db;
                if offset.abs() > worst_offset.abs() {
                    worst_offset = offset;
                }
            }
        }
        out.check(
            below.is_empty(),
            format!("{setup:?}: bound above simulated AS1 SER at all converged points {below:?}"),
        );
        out.check(
            in_range >= 2 && worst_offset.abs() <= 3.0,
            format!("{setup:?}: largest horizontal offset {worst_offset:.2} dB over {in_range} points with SER in [1e-4, 1e-2]"),
        );
    }
    out.finish(4, "closed-form AS1 upper bound is above and within 3 dB of simulation");
}

#[test]
#[ignore = "acceptance suite; run with --ignored"]
fn criterion_5_bpsk_full_diversity() {
    let mut out = Outcome::new();
    // The BPSK curve only straightens out below ~1e-4, so this plan goes
    // deeper than the QPSK ones; BPSK trials are cheap.
    let plan = Plan {
        grid: SnrGrid::new(0.0, 24.0, 2.0),
        stopping: StoppingRule::new(100, 1_500_000_000).unwrap(),
        floor: 1e-7,
    };
    let c = curve(2, (2, 2, 2), Scheme::As1, 0.0, plan);
    slope_check(&mut out, &c, FitWindow::TopDb(10.0), 4.0, 0.5);
    out.finish(5, "BPSK (2,2,2) AS1 slope min(N_A,N_B) N_R = 4");
}

// ---------------------------------------------------------------------------
// Closed-form oracles.

/// Product-form density of the largest of `n_m` i.i.d. Gamma(n_r, 1).
fn density(z: f64, n_m: usize, n_r: usize) -> f64 {
    if z <= 0.0 {
        return if n_r == 1 { n_m as f64 * if n_m == 1 { 1.0 } else { 0.0 } } else { 0.0 };
    }
    let f1 = ((n_r as f64 - 1.0) * z.ln() - z - ln_gamma(n_r as f64)).exp();
    n_m as f64 * gamma_lr(n_r as f64, z).powi(n_m as i32 - 1) * f1
}

fn laplace_oracle(a: f64, n_m: usize, n_r: usize) -> f64 {
    let s = 1.0 / (1.0 + a);
    let norm = (1.0 + a).powi((n_m * n_r) as i32);
    quadrature::integrate(
        |t: f64| {
            if t <= 0.0 || t >= 1.0 {
                return 0.0;
            }
            let z = s * t / (1.0 - t);
            norm * density(z, n_m, n_r) * (-a * z).exp() * s / ((1.0 - t) * (1.0 - t))
        },
        0.0,
        1.0,
        1e-14,
    )
    .integral
        / norm
}

fn integrate_pdf(lo: f64, hi: f64, n_m: usize, n_r: usize) -> f64 {
    if hi.is_infinite() {
        return quadrature::integrate(
            |t: f64| {
                if t >= 1.0 {
                    return 0.0;
                }
                let z = lo + t / (1.0 - t);
                pdf_z(z, n_m, n_r) / ((1.0 - t) * (1.0 - t))
            },
            0.0,
            1.0,
            1e-13,
        )
        .integral;
    }
    quadrature::integrate(|z: f64| pdf_z(z, n_m, n_r), lo, hi, 1e-13).integral
}

fn max_gain_cdf(z: f64, n_m: usize, n_r: usize) -> f64 {
    gamma_lr(n_r as f64, z).powi(n_m as i32)
}

fn chi_square_max_gain(n_m: usize, n_r: usize, samples: usize, bins: usize, seed: u64) -> (f64, f64) {
    // Equiprobable bin edges from the product-form CDF.
    let mut edges = vec![0.0];
    for k in 1..bins {
        let target = k as f64 / bins as f64;
        let (mut lo, mut hi) = (0.0, 100.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if max_gain_cdf(mid, n_m, n_r) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        edges.push(0.5 * (lo + hi));
    }
    edges.push(f64::INFINITY);
    // Expected probabilities from the closed-form density itself.
    let probs: Vec<f64> = edges.windows(2).map(|w| integrate_pdf(w[0], w[1], n_m, n_r)).collect();
    let mut counts = vec![0u64; bins];
    let mut rng = RngStream::new(seed, 0, 0).rng();
    let mut channel = ChannelRealization::zeros(n_m, n_r, 1);
    for _ in 0..samples {
        fill_channel(&mut channel, &mut rng);
        let z = (0..n_m)
            .map(|i| channel.antenna(User::A, i).iter().map(|g| g.norm_sqr()).sum::<f64>())
            .fold(0.0, f64::max);
        let k = edges.partition_point(|&e| e <= z) - 1;
        counts[k.min(bins - 1)] += 1;
    }
    let chi2: f64 = counts
        .iter()
        .zip(&probs)
        .map(|(&o, &p)| {
            let e = p * samples as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let critical = ChiSquared::new((bins - 1) as f64).unwrap().inverse_cdf(0.99);
    (chi2, critical)
}

#[test]
#[ignore = "acceptance suite; run with --ignored"]
fn criterion_6_closed_form_oracles() {
    let mut out = Outcome::new();

    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n_m in 1..=3 {
        for n_r in 1..=3 {
            for db in [0.0, 5.0, 10.0, 15.0, 20.0] {
                let e = 10f64.powf(db / 10.0);
                for term in ChianiTerm::BOTH {
                    let got = theta_case12(2.0, e, 1.0, n_m, n_r, term).unwrap();
                    let want = term.weight() * laplace_oracle(term.rate(2.0, e, 1.0), n_m, n_r);
                    worst = worst.max(((got - want) / want).abs());
                    cases += 1;
                }
            }
        }
    }
    out.check(worst <= 1e-8, format!("theta vs quadrature: max relative error {worst:.2e} over {cases} cases"));

    let mut worst_norm: f64 = 0.0;
    let mut min_value = f64::INFINITY;
    for n_m in 1..=4 {
        for n_r in 1..=4 {
            worst_norm = worst_norm.max((integrate_pdf(0.0, f64::INFINITY, n_m, n_r) - 1.0).abs());
            for k in 0..1000 {
                min_value = min_value.min(pdf_z(k as f64 * 0.03, n_m, n_r));
            }
        }
    }
    out.check(worst_norm <= 1e-8, format!("pdf_z integrates to 1: max deviation {worst_norm:.2e} for N_m, N_R <= 4"));
    out.check(min_value >= 0.0, format!("pdf_z nonnegative on a 1000-point grid: min {min_value:.2e}"));

    for (n_m, n_r, seed) in [(3, 2, 1), (2, 3, 2)] {
        let (chi2, critical) = chi_square_max_gain(n_m, n_r, 1_000_000, 40, seed);
        out.check(
            chi2 < critical,
            format!("chi-square ({n_m},{n_r}), 10^6 samples, 40 bins: {chi2:.1} < {critical:.1}"),
        );
    }

    // xi_1 for (2,2), QPSK |dx|^2 = 2, E = N0 = 1, against the AS1-selected
    // single-antenna channels.
    let samples = 10_000_000u64;
    let want = xi_case3(2.0, 2.0, 1.0, 1.0, 1.0, 2, 2, ChianiTerm::First).unwrap();
    let mut rng = RngStream::new(SEED, 7, 0).rng();
    let mut channel = ChannelRealization::zeros(2, 1, 2);
    let dx = pnc_lab_core::Complex64::new(1.0, 1.0);
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..samples {
        fill_channel(&mut channel, &mut rng);
        let sel = select_as1(&channel);
        let v = (-(sel.h_a[0] * dx + sel.h_b[0] * dx).norm_sqr() / 4.0).exp() / 12.0;
        sum += v;
        sum2 += v * v;
    }
    let mean = sum / samples as f64;
    let se = ((sum2 / samples as f64 - mean * mean) / samples as f64).sqrt();
    let z = (mean - want) / se;
    out.check(
        z.abs() < 3.0,
        format!("xi_1 (2,2): closed form {want:.7e}, Monte Carlo {mean:.7e} ({z:+.2} SE, 10^7 samples)"),
    );
    out.finish(6, "closed-form oracles");
}

#[test]
#[ignore = "acceptance suite; run with --ignored"]
fn criterion_7_rank_and_eigenvalue() {
    let mut out = Outcome::new();
    let x = build_constellation(2).unwrap();
    let map = PncMap::new(2).unwrap();
    for (n_a, n_b) in [(2, 2), (3, 2), (2, 3)] {
        let t = std::time::Instant::now();
        let r = r_min_and_lambda(n_a, n_b, &x, &map, 1.0, 1.0).unwrap();
        out.check(
            r.exhaustive && r.r_min == n_a.min(n_b) && r.lambda_star > 0.0,
            format!(
                "BPSK ({n_a},{n_b}): {} matrices, r_min {}, lambda* {:.4}, {:.1}s",
                r.matrices,
                r.r_min,
                r.lambda_star,
                t.elapsed().as_secs_f64()
            ),
        );
    }
    out.finish(7, "exhaustive difference-matrix rank equals min(N_A, N_B), lambda* > 0");
}

// ---------------------------------------------------------------------------
// Property suite.

#[test]
#[ignore = "acceptance suite; run with --ignored"]
fn criterion_8_property_suite() {
    let mut out = Outcome::new();

    for (m, setup) in [(4, (2, 1, 2)), (4, (3, 2, 3)), (8, (2, 1, 2))] {
        let x = build_constellation(m).unwrap();
        let map = PncMap::new(m).unwrap();
        let cfg = SystemConfig::from_snr_db(setup.0, setup.1, setup.2, m, 10.0, 0.0).unwrap();
        let mut rng = RngStream::new(SEED, 11, m as u64).rng();
        let mut channel = ChannelRealization::zeros(setup.0, setup.1, setup.2);
        let mut violations = 0;
        for _ in 0..1000 {
            fill_channel(&mut channel, &mut rng);
            let s1 = select_as1(&channel);
            let s2 = select_as2(&channel, &x, &map, &cfg);
            let d1 = min_intercluster_distance_sqr(&s1.h_a, &s1.h_b, &x, &map, cfg.e_a, cfg.e_b);
            let d2 = min_intercluster_distance_sqr(&s2.h_a, &s2.h_b, &x, &map, cfg.e_a, cfg.e_b);
            violations += usize::from(d2 < d1);
        }
        out.check(violations == 0, format!("AS2 d_min >= AS1 d_min, M={m} {setup:?}: {violations} violations in 1000"));
    }

    let mut mismatches = 0;
    let mut instances = 0;
    for (m, n_r) in [(2, 1), (4, 1), (4, 2), (8, 2), (16, 1)] {
        let x = build_constellation(m).unwrap();
        let cfg = SystemConfig::new(1, n_r, 1, m, 4.0, 2.5, 1.0).unwrap();
        let mut rng = RngStream::new(SEED, 12, m as u64 * 10 + n_r as u64).rng();
        for _ in 0..2000 {
            let h_a: Vec<_> = (0..n_r).map(|_| sample_cn(&mut rng)).collect();
            let h_b: Vec<_> = (0..n_r).map(|_| sample_cn(&mut rng)).collect();
            let y: Vec<_> = (0..n_r).map(|_| sample_cn(&mut rng) * 3.0).collect();
            let d = ml_joint_detect(&y, &h_a, &h_b, &cfg, &x).unwrap();
            let mut best = (f64::INFINITY, 0, 0);
            for a in 0..m {
                for b in 0..m {
                    let dist: f64 = (0..n_r)
                        .map(|j| {
                            let s = h_a[j] * x.points()[a] * cfg.e_a.sqrt() + h_b[j] * x.points()[b] * cfg.e_b.sqrt();
                            (y[j] - s).norm()
                        })
                        .map(|v| v * v)
                        .sum();
                    if dist < best.0 {
                        best = (dist, a, b);
                    }
                }
            }
            mismatches += usize::from((d.s_a, d.s_b) != (best.1, best.2));
            instances += 1;
        }
    }
    out.check(mismatches == 0, format!("ML detector vs brute force: {mismatches} mismatches in {instances}"));

    let spec = SweepSpec {
        grid: SnrGrid::new(0.0, 20.0, 5.0),
        delta_ab_db: 3.0,
        scheme: Scheme::As2,
        stopping: StoppingRule::new(150, 1_000_000).unwrap(),
        seed: SEED,
        ser_floor: None,
    };
    let base = SystemConfig::from_snr_db(2, 2, 3, 4, 0.0, 0.0).unwrap();
    let runs: Vec<SerCurve> = [1, 2, 3, 8]
        .into_iter()
        .map(|threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| sweep(&spec, &base).unwrap())
        })
        .collect();
    let identical = runs.iter().all(|r| {
        r.points.len() == runs[0].points.len()
            && r.points.iter().zip(&runs[0].points).all(|(p, q)| {
                p.errors == q.errors && p.trials == q.trials && p.ser.to_bits() == q.ser.to_bits()
            })
    });
    out.check(identical, "bit-identical sweep for 1, 2, 3, 8 worker threads".to_string());

    let n = 100_000;
    let mut violations = Vec::new();
    for k in 0..=n {
        let x = 8.0 * k as f64 / n as f64;
        if chiani_q(x).unwrap() < q_function(x) {
            violations.push(x);
        }
    }
    let detail = match (violations.first(), violations.last()) {
        (Some(first), Some(last)) => format!(
            "chiani_q >= Q on [0, 8] ({} grid points): violated at {} points in [{first:.5}, {last:.5}], e.g. x=0: {:.4} < {:.4}",
            n + 1,
            violations.len(),
            chiani_q(0.0).unwrap(),
            q_function(0.0)
        ),
        _ => format!("chiani_q >= Q on [0, 8] ({} grid points)", n + 1),
    };
    out.check(violations.is_empty(), detail);
    out.finish(8, "property suite");
}

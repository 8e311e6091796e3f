//! Fast self-checks against independent oracles, run by `pnc-lab` in
//! `selftest` mode. Each check takes well under a few seconds.

use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::analysis::{
    chiani_q, pdf_z, q_function, r_min_and_lambda, theta_case12, xi_case3, ChianiTerm,
};
use crate::channel::{fill_channel, sample_cn, ChannelRealization, RngStream, SystemConfig};
use crate::constellation::{build_constellation, PncMap};
use crate::detection::Detector;
use crate::selection::{min_intercluster_distance_sqr, select_as1, select_as2};
use crate::sim::{estimate_ser, StoppingRule};
use crate::Scheme;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> CheckResult {
    CheckResult { name, passed, detail }
}

/// `E[exp(-a z)]` for `z` the max of `n_m` i.i.d. `Gamma(n_r, 1)`, by
/// quadrature of a positive integrand.
pub fn laplace_by_quadrature(a: f64, n_m: usize, n_r: usize) -> f64 {
    let s = 1.0 / (1.0 + a);
    let norm = (1.0 + a).powi((n_m * n_r) as i32);
    quadrature::integrate(
        |t: f64| {
            if t <= 0.0 || t >= 1.0 {
                return 0.0;
            }
            let z = s * t / (1.0 - t);
            let f1 = ((n_r as f64 - 1.0) * z.ln() - z - ln_gamma(n_r as f64)).exp();
            let density = n_m as f64 * gamma_lr(n_r as f64, z).powi(n_m as i32 - 1) * f1;
            norm * density * (-a * z).exp() * s / ((1.0 - t) * (1.0 - t))
        },
        0.0,
        1.0,
        1e-14,
    )
    .integral
        / norm
}

fn pdf_normalisation() -> CheckResult {
    let mut worst: f64 = 0.0;
    for n_m in 1..=4 {
        for n_r in 1..=4 {
            let q = quadrature::integrate(
                |t: f64| {
                    if t >= 1.0 {
                        return 0.0;
                    }
                    let z = t / (1.0 - t);
                    pdf_z(z, n_m, n_r) / ((1.0 - t) * (1.0 - t))
                },
                0.0,
                1.0,
                1e-12,
            );
            worst = worst.max((q.integral - 1.0).abs());
        }
    }
    check("pdf_z integrates to 1", worst < 1e-8, format!("max |integral - 1| = {worst:.2e}"))
}

fn theta_vs_quadrature() -> CheckResult {
    let mut worst: f64 = 0.0;
    for n_m in 1..=3 {
        for n_r in 1..=3 {
            for db in [0.0, 5.0, 10.0, 15.0, 20.0] {
                let e = 10f64.powf(db / 10.0);
                for term in ChianiTerm::BOTH {
                    let got = theta_case12(2.0, e, 1.0, n_m, n_r, term).unwrap_or(f64::NAN);
                    let want = term.weight() * laplace_by_quadrature(term.rate(2.0, e, 1.0), n_m, n_r);
                    worst = worst.max(((got - want) / want).abs());
                }
            }
        }
    }
    check("theta closed form vs quadrature", worst < 1e-8, format!("max rel err = {worst:.2e}"))
}

fn xi_vs_monte_carlo() -> CheckResult {
    let samples = 1_000_000u64;
    let (n_a, n_b) = (2, 2);
    let want = xi_case3(2.0, 2.0, 1.0, 1.0, 1.0, n_a, n_b, ChianiTerm::First).unwrap_or(f64::NAN);
    let mut rng = RngStream::new(17, 0, 0).rng();
    let mut channel = ChannelRealization::zeros(n_a, 1, n_b);
    let d = std::f64::consts::SQRT_2;
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..samples {
        fill_channel(&mut channel, &mut rng);
        let sel = select_as1(&channel);
        let v = (-(sel.h_a[0] * d + sel.h_b[0] * d).norm_sqr() / 4.0).exp() / 12.0;
        sum += v;
        sum2 += v * v;
    }
    let mean = sum / samples as f64;
    let se = ((sum2 / samples as f64 - mean * mean) / samples as f64).sqrt();
    let z = (mean - want) / se;
    check(
        "xi closed form vs Monte Carlo",
        z.abs() < 3.0,
        format!("closed {want:.6e}, MC {mean:.6e}, {z:+.2} SE"),
    )
}

fn detector_vs_brute_force() -> CheckResult {
    let x = build_constellation(4).expect("QPSK");
    let cfg = SystemConfig::new(1, 2, 1, 4, 2.0, 1.0, 1.0).expect("valid");
    let mut det = Detector::new(&x, &cfg);
    let mut rng = RngStream::new(3, 0, 0).rng();
    let mut mismatches = 0;
    for _ in 0..2000 {
        let h_a = [sample_cn(&mut rng), sample_cn(&mut rng)];
        let h_b = [sample_cn(&mut rng), sample_cn(&mut rng)];
        let y = [sample_cn(&mut rng) * 2.0, sample_cn(&mut rng) * 2.0];
        let (a, b, _) = det.detect(&y, &h_a, &h_b);
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..4 {
            for j in 0..4 {
                let d: f64 = (0..2)
                    .map(|r| (y[r] - h_a[r] * x.points()[i] * 2f64.sqrt() - h_b[r] * x.points()[j]).norm_sqr())
                    .sum();
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        mismatches += usize::from((a, b) != (best.1, best.2));
    }
    check("ML detector vs brute force", mismatches == 0, format!("{mismatches} mismatches in 2000"))
}

fn as2_dominates_as1() -> CheckResult {
    let x = build_constellation(4).expect("QPSK");
    let map = PncMap::new(4).expect("QPSK");
    let cfg = SystemConfig::new(3, 1, 3, 4, 1.0, 1.0, 1.0).expect("valid");
    let mut rng = RngStream::new(5, 0, 0).rng();
    let mut channel = ChannelRealization::zeros(3, 1, 3);
    let mut violations = 0;
    for _ in 0..1000 {
        fill_channel(&mut channel, &mut rng);
        let s1 = select_as1(&channel);
        let s2 = select_as2(&channel, &x, &map, &cfg);
        let d1 = min_intercluster_distance_sqr(&s1.h_a, &s1.h_b, &x, &map, 1.0, 1.0);
        let d2 = min_intercluster_distance_sqr(&s2.h_a, &s2.h_b, &x, &map, 1.0, 1.0);
        violations += usize::from(d2 < d1);
    }
    check("AS2 d_min >= AS1 d_min", violations == 0, format!("{violations} violations in 1000"))
}

fn thread_count_invariance() -> CheckResult {
    let cfg = SystemConfig::from_snr_db(2, 1, 2, 4, 10.0, 0.0).expect("valid");
    let rule = StoppingRule::new(100, 200_000).expect("valid");
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map(|pool| pool.install(|| estimate_ser(&cfg, Scheme::As2, &rule, 99)))
    };
    let results: Vec<_> = [1, 2, 4].into_iter().map(run).collect();
    let same = results.iter().all(|r| matches!((r, &results[0]), (Ok(Ok(a)), Ok(Ok(b))) if a == b));
    check("identical results for 1, 2, 4 threads", same, String::new())
}

fn bpsk_rank() -> CheckResult {
    let x = build_constellation(2).expect("BPSK");
    let map = PncMap::new(2).expect("BPSK");
    match r_min_and_lambda(2, 2, &x, &map, 1.0, 1.0) {
        Ok(r) => check(
            "BPSK (2,2) r_min = 2, lambda* > 0",
            r.r_min == 2 && r.lambda_star > 0.0,
            format!("r_min {}, lambda* {:.4}", r.r_min, r.lambda_star),
        ),
        Err(e) => check("BPSK (2,2) r_min = 2, lambda* > 0", false, e.to_string()),
    }
}

fn chiani_above_crossover() -> CheckResult {
    let mut worst = f64::INFINITY;
    for i in 0..=10_000 {
        let x = 0.666 + i as f64 * (8.0 - 0.666) / 10_000.0;
        let c = chiani_q(x).unwrap_or(f64::NAN);
        worst = worst.min(c / q_function(x));
    }
    check("chiani_q >= Q for x in [0.666, 8]", worst >= 1.0, format!("min ratio {worst:.6}"))
}

fn exclusive_law() -> CheckResult {
    let mut ok = true;
    for m in [2, 4, 8, 16] {
        let map = PncMap::new(m).expect("supported");
        for a in 0..m {
            for b in 0..m {
                for b2 in 0..m {
                    ok &= b == b2 || map.symbol_unchecked(a, b) != map.symbol_unchecked(a, b2);
                    ok &= b == b2 || map.symbol_unchecked(b, a) != map.symbol_unchecked(b2, a);
                }
            }
        }
    }
    check("network-coding map satisfies the exclusive law", ok, String::new())
}

pub fn run_selftest() -> Vec<CheckResult> {
    vec![
        exclusive_law(),
        pdf_normalisation(),
        theta_vs_quadrature(),
        xi_vs_monte_carlo(),
        detector_vs_brute_force(),
        as2_dominates_as1(),
        thread_count_invariance(),
        bpsk_rank(),
        chiani_above_crossover(),
    ]
}

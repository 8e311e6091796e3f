//! Closed-form averages of the two Chiani exponentials over the AS1
//! channel statistics.
//!
//! Both families are alternating sums whose terms grow far beyond the
//! result at high SNR, so they are accumulated in exact rational arithmetic
//! and rounded once at the end.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::multinomial::{binomial, factorial, multinomial_terms};
use crate::error::{Error, Result};

/// Which exponential of `Q(x) ~ e^{-x^2/2}/12 + e^{-2x^2/3}/4` is averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChianiTerm {
    /// Weight 1/12, rate `E |dx|^2 / (4 N0)`.
    First,
    /// Weight 1/4, rate `E |dx|^2 / (3 N0)`.
    Second,
}

impl ChianiTerm {
    pub const BOTH: [ChianiTerm; 2] = [ChianiTerm::First, ChianiTerm::Second];

    pub fn weight(self) -> f64 {
        match self {
            ChianiTerm::First => 1.0 / 12.0,
            ChianiTerm::Second => 0.25,
        }
    }

    fn weight_exact(self) -> BigRational {
        match self {
            ChianiTerm::First => ratio(1, 12),
            ChianiTerm::Second => ratio(1, 4),
        }
    }

    /// Denominator scale: 4 for the first term, 3 for the second.
    pub fn scale(self) -> f64 {
        match self {
            ChianiTerm::First => 4.0,
            ChianiTerm::Second => 3.0,
        }
    }

    /// Exponent rate `energy * |dx|^2 / (scale * n0)`.
    pub fn rate(self, delta_sqr: f64, energy: f64, n0: f64) -> f64 {
        energy * delta_sqr / (self.scale() * n0)
    }
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn big(n: u128) -> BigInt {
    BigInt::from(n)
}

fn exact(x: f64, function: &'static str) -> Result<BigRational> {
    BigRational::from_float(x).ok_or(Error::Domain { function, value: x })
}

fn check_inputs(function: &'static str, values: &[f64], n0: f64) -> Result<()> {
    for &v in values {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Domain { function, value: v });
        }
    }
    if !(n0.is_finite() && n0 > 0.0) {
        return Err(Error::Domain { function, value: n0 });
    }
    Ok(())
}

fn to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// `E_z[exp(-a z)]` for the AS1 gain `z` of a user with `n_m` antennas and a
/// relay with `n_r` antennas, exactly.
fn laplace_max_gamma(a: &BigRational, n_m: usize, n_r: usize) -> BigRational {
    // Group terms sharing (k0, power) before dividing.
    let mut grouped: BTreeMap<(usize, usize), BigRational> = BTreeMap::new();
    for term in multinomial_terms(n_m, n_r) {
        let power = n_r + term.exponent;
        let numerator = big(term.coefficient) * big(factorial(power - 1));
        let mut c = BigRational::new(numerator, big(term.factor_denominator));
        if term.sign < 0 {
            c = -c;
        }
        *grouped.entry((term.k0(), power)).or_insert_with(BigRational::zero) += c;
    }
    let mut sum = BigRational::zero();
    for ((k0, power), c) in grouped {
        let base = a + BigRational::from_integer(BigInt::from(n_m - k0));
        sum += c / base.pow(power as i32);
    }
    sum * BigRational::new(BigInt::from(n_m), big(factorial(n_r - 1)))
}

/// Average of one Chiani exponential over the AS1-selected channel of a
/// single user: `w E[exp(-c E |dx|^2 z / N0)]` with `z` the largest of
/// `n_m` i.i.d. `Gamma(n_r, 1)` gains.
pub fn theta_case12(
    delta_sqr: f64,
    energy: f64,
    n0: f64,
    n_m: usize,
    n_r: usize,
    term: ChianiTerm,
) -> Result<f64> {
    check_inputs("theta_case12", &[delta_sqr, energy], n0)?;
    if n_m == 0 || n_r == 0 {
        return Err(Error::InvalidConfig("antenna counts must be positive".into()));
    }
    let a = exact(term.rate(delta_sqr, energy, n0), "theta_case12")?;
    Ok(to_f64(&(term.weight_exact() * laplace_max_gamma(&a, n_m, n_r))))
}

/// Single-relay-antenna quantities for the case where both symbols differ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseThreeAux {
    pub n_a: usize,
    pub n_b: usize,
    pub e_a: f64,
    pub e_b: f64,
    pub n0: f64,
    pub delta_a_sqr: f64,
    pub delta_b_sqr: f64,
}

impl CaseThreeAux {
    pub fn psi_a(&self, k: usize) -> f64 {
        1.0 + self.e_a * self.delta_a_sqr / (4.0 * k as f64 * self.n0)
    }

    pub fn psi_b(&self, l: usize) -> f64 {
        1.0 + self.e_b * self.delta_b_sqr / (4.0 * l as f64 * self.n0)
    }

    pub fn omega(&self) -> f64 {
        self.e_a * self.e_b * self.delta_a_sqr * self.delta_b_sqr / (4.0 * self.n0 * self.n0)
    }

    pub fn xi_a(&self, k: usize) -> f64 {
        1.0 + self.e_a * self.delta_a_sqr / (3.0 * k as f64 * self.n0)
    }

    pub fn xi_b(&self, l: usize) -> f64 {
        1.0 + self.e_b * self.delta_b_sqr / (3.0 * l as f64 * self.n0)
    }

    pub fn phi(&self) -> f64 {
        4.0 * self.e_a * self.e_b * self.delta_a_sqr * self.delta_b_sqr / (9.0 * self.n0 * self.n0)
    }

    pub fn g(&self, k: usize, l: usize) -> f64 {
        self.delta_a_sqr / (4.0 * k as f64) + self.delta_b_sqr / (4.0 * l as f64)
    }

    pub fn g_prime(&self, k: usize, l: usize) -> f64 {
        self.delta_a_sqr / (3.0 * k as f64) + self.delta_b_sqr / (3.0 * l as f64)
    }

    fn high_snr_coefficient(&self, m: u32, weight: f64, g: impl Fn(usize, usize) -> f64) -> f64 {
        let mut sum = 0.0;
        for k in 1..=self.n_a {
            for l in 1..=self.n_b {
                let sign = if (k + l + m as usize + 1) & 1 == 0 { 1.0 } else { -1.0 };
                sum += sign * (binomial(self.n_a, k) * binomial(self.n_b, l)) as f64 * g(k, l).powi(-(m as i32));
            }
        }
        weight * sum
    }

    /// Coefficient of `(E/N0)^{-m}` in the high-SNR expansion of the first
    /// term (equal user energies).
    pub fn b_minus(&self, m: u32) -> f64 {
        self.high_snr_coefficient(m, 1.0 / 12.0, |k, l| self.g(k, l))
    }

    /// Same for the second term.
    pub fn b_prime_minus(&self, m: u32) -> f64 {
        self.high_snr_coefficient(m, 0.25, |k, l| self.g_prime(k, l))
    }

    /// Direct floating-point evaluation through `Psi`/`Omega` (or
    /// `Xi`/`Phi`). Loses accuracy at high SNR; kept for cross-checking.
    pub fn xi_literal(&self, term: ChianiTerm) -> f64 {
        let mut sum = 0.0;
        for k in 1..=self.n_a {
            for l in 1..=self.n_b {
                let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
                let kl = (k * l) as f64;
                let den = match term {
                    ChianiTerm::First => self.psi_a(k) * self.psi_b(l) - self.omega() / (4.0 * kl),
                    ChianiTerm::Second => self.xi_a(k) * self.xi_b(l) - self.phi() / (4.0 * kl),
                };
                sum += sign * (binomial(self.n_a, k) * binomial(self.n_b, l)) as f64 / den;
            }
        }
        term.weight() * sum
    }
}

/// Average of one Chiani exponential over the AS1 selection of both users
/// with a single relay antenna, when both symbols are in error.
#[allow(clippy::too_many_arguments)]
pub fn xi_case3(
    delta_a_sqr: f64,
    delta_b_sqr: f64,
    e_a: f64,
    e_b: f64,
    n0: f64,
    n_a: usize,
    n_b: usize,
    term: ChianiTerm,
) -> Result<f64> {
    check_inputs("xi_case3", &[delta_a_sqr, delta_b_sqr, e_a, e_b], n0)?;
    if n_a == 0 || n_b == 0 {
        return Err(Error::InvalidConfig("antenna counts must be positive".into()));
    }
    let a = exact(term.rate(delta_a_sqr, e_a, n0), "xi_case3")?;
    let b = exact(term.rate(delta_b_sqr, e_b, n0), "xi_case3")?;
    // Each term is C(N_A,k) C(N_B,l) (-1)^{k+l} / (1 + a/k + b/l).
    let mut sum = BigRational::zero();
    for k in 1..=n_a {
        let kk = BigRational::from_integer(BigInt::from(k));
        for l in 1..=n_b {
            let ll = BigRational::from_integer(BigInt::from(l));
            let kl = &kk * &ll;
            let den = &kl + &a * &ll + &b * &kk;
            let mut t = BigRational::from_integer(big(binomial(n_a, k) * binomial(n_b, l))) * kl / den;
            if (k + l) % 2 == 1 {
                t = -t;
            }
            sum += t;
        }
    }
    Ok(to_f64(&(term.weight_exact() * sum)))
}

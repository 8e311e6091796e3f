//! Multinomial expansion of the CDF power behind the density of the
//! AS1-selected channel gain `z_m = max_i sum_j |h_{m,i,j}|^2`.
//!
//! With `F(t) = 1 - e^{-t} sum_{j<N_R} t^j / j!` (Erlang CDF), the density is
//! `N_m F(t)^{N_m - 1} F'(t)`, and expanding the power over compositions
//! `k_0 + ... + k_{N_R} = N_m - 1` gives a finite sum of terms
//! `c * t^{N_R + s - 1} e^{-(N_m - k_0) t}` with `s = sum_j j k_{j+1}`.

use statrs::function::gamma::ln_gamma;

/// Stars-and-bars iterator over compositions of `total` into `parts`
/// nonnegative integers, in lexicographic order.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Option<Vec<usize>>,
}

impl Compositions {
    pub fn new(total: usize, parts: usize) -> Self {
        assert!(parts > 0, "need at least one part");
        let mut first = vec![0; parts];
        first[parts - 1] = total;
        Self { current: Some(first) }
    }
}

impl Iterator for Compositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let parts = out.len();
        // Successor: bump the rightmost position that has mass to its right,
        // then push the remaining mass to the last slot.
        let mut suffix = 0;
        for i in (0..parts - 1).rev() {
            suffix += out[i + 1];
            if suffix > 0 {
                let mut next = out.clone();
                next[i] += 1;
                next[i + 1..].iter_mut().for_each(|v| *v = 0);
                next[parts - 1] = suffix - 1;
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// Number of compositions, `C(total + parts - 1, parts - 1)`.
pub fn composition_count(total: usize, parts: usize) -> u128 {
    binomial(total + parts - 1, parts - 1)
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// One term of the expansion of `F(t)^{N_m - 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultinomialTerm {
    /// `(k_0, ..., k_{N_R})`, summing to `N_m - 1`.
    pub composition: Vec<usize>,
    /// Multinomial coefficient `(N_m - 1)! / prod k_j!`.
    pub coefficient: u128,
    /// `+1` or `-1`, i.e. `(-1)^{N_m - 1 - k_0}`.
    pub sign: i8,
    /// `prod_{j=0}^{N_R-1} (j!)^{k_{j+1}}`; the factor is its reciprocal.
    pub factor_denominator: u128,
    /// `s = sum_{j=0}^{N_R-1} j k_{j+1}`.
    pub exponent: usize,
}

impl MultinomialTerm {
    pub fn k0(&self) -> usize {
        self.composition[0]
    }

    pub fn factor(&self) -> f64 {
        1.0 / self.factor_denominator as f64
    }

    /// `ln(coefficient * factor)`.
    pub fn ln_weight(&self) -> f64 {
        let ln_coef = ln_gamma(self.composition.iter().sum::<usize>() as f64 + 1.0)
            - self.composition.iter().map(|&k| ln_gamma(k as f64 + 1.0)).sum::<f64>();
        let ln_den: f64 = self.composition[1..]
            .iter()
            .enumerate()
            .map(|(j, &k)| k as f64 * ln_gamma(j as f64 + 1.0))
            .sum();
        ln_coef - ln_den
    }
}

/// All terms for a user with `n_m` antennas and a relay with `n_r` antennas.
pub fn multinomial_terms(n_m: usize, n_r: usize) -> Vec<MultinomialTerm> {
    assert!(n_m >= 1 && n_r >= 1, "antenna counts must be positive");
    let total = n_m - 1;
    let numerator = factorial(total);
    Compositions::new(total, n_r + 1)
        .map(|composition| {
            let coefficient = numerator / composition.iter().map(|&k| factorial(k)).product::<u128>();
            let factor_denominator = composition[1..]
                .iter()
                .enumerate()
                .map(|(j, &k)| factorial(j).pow(k as u32))
                .product();
            let exponent = composition[1..].iter().enumerate().map(|(j, &k)| j * k).sum();
            let sign = if (total - composition[0]) & 1 == 0 { 1 } else { -1 };
            MultinomialTerm {
                composition,
                coefficient,
                sign,
                factor_denominator,
                exponent,
            }
        })
        .collect()
}

/// Density of `z_m`, the largest of `n_m` i.i.d. `Gamma(n_r, 1)` variables,
/// evaluated through the multinomial expansion.
pub fn pdf_z(z: f64, n_m: usize, n_r: usize) -> f64 {
    if z < 0.0 {
        return 0.0;
    }
    let ln_front = (n_m as f64).ln() - ln_gamma(n_r as f64);
    let mut sum = 0.0;
    for term in multinomial_terms(n_m, n_r) {
        let power = (n_r + term.exponent - 1) as f64;
        let rate = (n_m - term.k0()) as f64;
        let ln_z_part = if power == 0.0 {
            0.0
        } else if z == 0.0 {
            continue;
        } else {
            power * z.ln()
        };
        sum += f64::from(term.sign) * (ln_front + term.ln_weight() + ln_z_part - rate * z).exp();
    }
    // Cancellation near z = 0 can leave a tiny negative residue.
    sum.max(0.0)
}

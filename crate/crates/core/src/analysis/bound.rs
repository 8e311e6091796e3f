//! Union bound on the network-coded symbol error rate under AS1.

use std::collections::HashMap;

use num_complex::Complex64;

use super::closed_form::{theta_case12, xi_case3, ChianiTerm};
use crate::channel::{SystemConfig, User};
use crate::constellation::{Constellation, PncMap};
use crate::error::{Error, Result};

/// Which pairwise-error family a competing symbol pair falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorCase {
    /// Only user A's symbol differs.
    OnlyA,
    /// Only user B's symbol differs.
    OnlyB,
    /// Both differ.
    Both,
}

/// Both Chiani contributions of one pairwise error term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTerms {
    pub case: ErrorCase,
    pub first: f64,
    pub second: f64,
}

impl BoundTerms {
    pub fn total(&self) -> f64 {
        self.first + self.second
    }

    /// Evaluate the term for symbol differences `dx_a = x_A - x'_A` and
    /// `dx_b = x_B - x'_B` (unscaled constellation points).
    pub fn evaluate(config: &SystemConfig, dx_a: Complex64, dx_b: Complex64) -> Result<Self> {
        let (da, db) = (dx_a.norm_sqr(), dx_b.norm_sqr());
        let case = match (da > 0.0, db > 0.0) {
            (true, false) => ErrorCase::OnlyA,
            (false, true) => ErrorCase::OnlyB,
            (true, true) if config.n_r == 1 => ErrorCase::Both,
            (true, true) => {
                return Err(Error::NoClosedForm {
                    order: config.order,
                    n_r: config.n_r,
                })
            }
            (false, false) => {
                return Err(Error::InvalidConfig("competing pair equals the transmitted pair".into()))
            }
        };
        let eval = |t| match case {
            ErrorCase::OnlyA => single(config, User::A, da, t),
            ErrorCase::OnlyB => single(config, User::B, db, t),
            ErrorCase::Both => xi_case3(da, db, config.e_a, config.e_b, config.n0, config.n_a, config.n_b, t),
        };
        Ok(Self {
            case,
            first: eval(ChianiTerm::First)?,
            second: eval(ChianiTerm::Second)?,
        })
    }
}

fn single(config: &SystemConfig, user: User, delta_sqr: f64, term: ChianiTerm) -> Result<f64> {
    theta_case12(
        delta_sqr,
        config.energy(user),
        config.n0,
        config.antennas(user),
        config.n_r,
        term,
    )
}

/// Union bound `(1/M^2) sum_{(x_A,x_B)} sum_{cross-cluster (x'_A,x'_B)} P_pair`
/// with each pairwise probability averaged in closed form.
///
/// Returns [`Error::NoClosedForm`] when `M > 2` and `N_R > 1`, since the
/// both-symbols-differ term is only available for a single relay antenna.
pub fn ser_upper_bound(config: &SystemConfig, constellation: &Constellation, map: &PncMap) -> Result<f64> {
    config.validate()?;
    let m = constellation.order();
    if m > 2 && config.n_r > 1 {
        return Err(Error::NoClosedForm {
            order: m,
            n_r: config.n_r,
        });
    }
    let x = constellation.points();
    let mut cache: HashMap<(u64, u64), f64> = HashMap::new();
    let mut sum = 0.0;
    for sa in 0..m {
        for sb in 0..m {
            let cluster = map.symbol_unchecked(sa, sb);
            for sa2 in 0..m {
                for sb2 in 0..m {
                    if map.symbol_unchecked(sa2, sb2) == cluster {
                        continue;
                    }
                    let (dx_a, dx_b) = (x[sa] - x[sa2], x[sb] - x[sb2]);
                    let key = (
                        if sa == sa2 { 0 } else { dx_a.norm_sqr().to_bits() },
                        if sb == sb2 { 0 } else { dx_b.norm_sqr().to_bits() },
                    );
                    let value = match cache.get(&key) {
                        Some(&v) => v,
                        None => {
                            let da = if sa == sa2 { Complex64::default() } else { dx_a };
                            let db = if sb == sb2 { Complex64::default() } else { dx_b };
                            let v = BoundTerms::evaluate(config, da, db)?.total();
                            cache.insert(key, v);
                            v
                        }
                    };
                    sum += value;
                }
            }
        }
    }
    Ok(sum / (m * m) as f64)
}

//! The twin-prime constant `C`, the multiplicative factor `H(n)` and the
//! singular series `𝔖(n) = 2 C H(n)`.
//!
//! Infinite products over primes are truncated at a shared `prime_limit`;
//! identities between them are checked at matched truncation.

use serde::{Deserialize, Serialize};

use crate::arith::{euler_phi, factorize, lcm_with_two, SieveTable};
use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Smallest accepted truncation point for the products.
pub const MIN_PRIME_LIMIT: u64 = 1_000;

/// Products with more factors than this are accumulated as sums of logs.
const LOG_SPACE_THRESHOLD: usize = 100_000;

#[derive(Debug, Clone)]
pub struct SingularSeriesCtx {
    prime_limit: u64,
    c_value: f64,
    tail_bound: f64,
    odd_primes: Vec<u32>,
}

impl SingularSeriesCtx {
    /// Truncated product `Π_{2<p≤P} (1 − 1/(p−1)²)` with tail bound `1/(P−1)`.
    pub fn new(prime_limit: u64) -> Result<Self> {
        if prime_limit < MIN_PRIME_LIMIT {
            return Err(Error::Domain(format!(
                "prime_limit {prime_limit} below {MIN_PRIME_LIMIT}"
            )));
        }
        let sieve = SieveTable::new(prime_limit)?;
        let odd_primes: Vec<u32> = sieve.primes().iter().copied().filter(|&p| p > 2).collect();
        let c_value = product_over(&odd_primes, |p| {
            let d = p - 1.0;
            -1.0 / (d * d)
        });
        Ok(Self {
            prime_limit,
            c_value,
            tail_bound: 1.0 / (prime_limit as f64 - 1.0),
            odd_primes,
        })
    }

    pub fn prime_limit(&self) -> u64 {
        self.prime_limit
    }

    pub fn c_value(&self) -> f64 {
        self.c_value
    }

    /// Bound on `Σ_{p>P} 1/(p−1)²`, which controls the relative truncation error.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn odd_primes(&self) -> &[u32] {
        &self.odd_primes
    }

    /// `𝔖(n) = 2 C H(n)`; defined for odd `n` too.
    pub fn singular_series(&self, n: u64, sieve: &SieveTable) -> Result<f64> {
        Ok(self.singular_series_from_h(hl_factor_h(n, sieve)?))
    }

    #[inline]
    pub fn singular_series_from_h(&self, h: f64) -> f64 {
        2.0 * self.c_value * h
    }

    /// Compares both sides of `res_{s=1} Z_q(s) = 1/(2 C φ(q))`.
    pub fn residue_identity_check(&self, q: u64) -> Result<ResidueCheck> {
        if q == 0 {
            return Err(Error::Domain("q must be at least 1".into()));
        }
        let k = lcm_with_two(q);
        let k_fact = factorize(k)?;
        let h_k = h_from_primes(k_fact.primes());
        let survivors: Vec<u32> = self
            .odd_primes
            .iter()
            .copied()
            .filter(|&p| k % p as u64 != 0)
            .collect();
        let prod = product_over(&survivors, |p| 1.0 / (p * (p - 2.0)));
        let lhs = h_k / k as f64 * prod;
        let rhs = 1.0 / (2.0 * self.c_value * euler_phi(q)? as f64);
        Ok(ResidueCheck {
            q,
            lhs,
            rhs,
            rel_err: (lhs - rhs).abs() / rhs,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidueCheck {
    pub q: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

/// `Π (1 + term(p))` over the given primes.
fn product_over(primes: &[u32], term: impl Fn(f64) -> f64) -> f64 {
    if primes.len() > LOG_SPACE_THRESHOLD {
        primes
            .iter()
            .map(|&p| term(p as f64).ln_1p())
            .collect::<CompensatedSum>()
            .value()
            .exp()
    } else {
        primes.iter().fold(1.0, |acc, &p| acc * (1.0 + term(p as f64)))
    }
}

fn h_from_primes(primes: impl Iterator<Item = u64>) -> f64 {
    primes
        .filter(|&p| p > 2)
        .fold(1.0, |acc, p| acc * (1.0 + 1.0 / (p as f64 - 2.0)))
}

/// `H(n) = Π_{p | n, p > 2} (1 + 1/(p − 2))`.
pub fn hl_factor_h(n: u64, sieve: &SieveTable) -> Result<f64> {
    let f = sieve.factorize(n)?;
    Ok(h_from_primes(f.primes()))
}

/// `H(n)` for every `n` in `0..=limit` from the sieve's spf chains (entry 0 unused).
pub fn hl_factor_table(limit: u64, sieve: &SieveTable) -> Result<Vec<f64>> {
    sieve.require(limit)?;
    let n = limit as usize;
    let mut h = vec![1.0f64; n + 1];
    for m in 2..=n {
        let p = sieve.spf(m as u64) as usize;
        let rest = m / p;
        h[m] = if rest % p == 0 || p == 2 {
            h[rest]
        } else {
            h[rest] * (1.0 + 1.0 / (p as f64 - 2.0))
        };
    }
    Ok(h)
}

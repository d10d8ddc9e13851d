//! Integer arithmetic: the smallest-prime-factor sieve, von Mangoldt values,
//! factorization and Euler's totient.

use crate::error::{Error, Result};
use crate::sum::CompensatedSum;

/// Largest sieve limit accepted by [`SieveTable::new`].
pub const MAX_SIEVE_LIMIT: u64 = 1 << 31;

/// Smallest-prime-factor table with von Mangoldt values up to `limit`.
///
/// `lambda(m)` is `ln p` when `m = p^k` and zero otherwise. The logarithm of
/// each prime is computed once, so every power of the same prime carries a
/// bit-identical value.
#[derive(Debug, Clone)]
pub struct SieveTable {
    limit: u32,
    spf: Vec<u32>,
    lambda: Vec<f64>,
    primes: Vec<u32>,
}

impl SieveTable {
    pub fn new(limit: u64) -> Result<Self> {
        if !(2..=MAX_SIEVE_LIMIT).contains(&limit) {
            return Err(Error::Size(format!(
                "sieve limit {limit} outside [2, {MAX_SIEVE_LIMIT}]"
            )));
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut lambda = vec![0.0f64; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        spf[1] = 1;
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
                lambda[i] = (i as f64).ln();
            } else {
                let p = spf[i] as usize;
                let rest = i / p;
                if spf[rest] as usize == p {
                    lambda[i] = lambda[rest];
                }
            }
            let si = spf[i];
            for &p in &primes {
                if p > si {
                    break;
                }
                let ip = i as u64 * p as u64;
                if ip > limit {
                    break;
                }
                spf[ip as usize] = p;
            }
        }
        Ok(Self {
            limit: limit as u32,
            spf,
            lambda,
            primes,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit as u64
    }

    /// Von Mangoldt function; panics above the limit.
    #[inline]
    pub fn lambda(&self, m: u64) -> f64 {
        self.lambda[m as usize]
    }

    /// Dense view of Λ indexed by `m` (entry 0 is zero).
    pub fn lambda_slice(&self) -> &[f64] {
        &self.lambda
    }

    #[inline]
    pub fn spf(&self, m: u64) -> u64 {
        self.spf[m as usize] as u64
    }

    pub fn is_prime(&self, m: u64) -> bool {
        m >= 2 && m <= self.limit() && self.spf(m) == m
    }

    /// All primes up to the limit, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Checks that `needed` is indexable.
    pub fn require(&self, needed: u64) -> Result<()> {
        if needed > self.limit() {
            Err(Error::Size(format!(
                "sieve limit {} is below required {needed}",
                self.limit
            )))
        } else {
            Ok(())
        }
    }

    /// Factorization by spf chains below the limit, trial division above it.
    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        if n == 0 {
            return Err(Error::Domain("cannot factor 0".into()));
        }
        if n > self.limit() {
            return factorize(n);
        }
        let mut pairs = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf(m);
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            pairs.push((p, e));
        }
        Ok(Factorization { pairs })
    }

    /// Chebyshev's ψ(x) = Σ_{m ≤ x} Λ(m).
    pub fn chebyshev_psi(&self, x: u64) -> f64 {
        let x = x.min(self.limit()) as usize;
        self.lambda[..=x].iter().copied().collect::<CompensatedSum>().value()
    }
}

/// Canonical prime factorization, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pub pairs: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.pairs.iter().map(|&(p, _)| p)
    }

    pub fn value(&self) -> u64 {
        self.pairs.iter().map(|&(p, e)| p.pow(e)).product()
    }

    pub fn euler_phi(&self) -> u64 {
        self.pairs
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }
}

/// Trial-division factorization.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain("cannot factor 0".into()));
    }
    let mut pairs = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            pairs.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        pairs.push((m, 1));
    }
    Ok(Factorization { pairs })
}

pub fn euler_phi(n: u64) -> Result<u64> {
    Ok(factorize(n)?.euler_phi())
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// `k = [2, q]`, the modulus of the model sum.
pub fn lcm_with_two(q: u64) -> u64 {
    lcm(2, q)
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).map(|f| f.pairs == [(n, 1)]).unwrap_or(false)
}

pub fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % m as u128) as u64;
        }
        base = (base as u128 * base as u128 % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

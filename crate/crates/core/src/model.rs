//! The singular-series model `Σ_{k | n} 𝔖(n) n e^{−n/N}` with `k = [2, q]`,
//! its expected size `N²/φ(q)`, and the Dirichlet series
//! `Z_q(s) = Σ_{k | n} H(n) n^{−s}`.

use serde::{Deserialize, Serialize};

use crate::arith::{euler_phi, lcm_with_two, SieveTable};
use crate::error::{Error, Result};
use crate::lfunc::hurwitz::zeta_real;
use crate::singular::SingularSeriesCtx;
use crate::sum::{map_chunks, CompensatedSum, CHUNK};

/// Terms with `n > MODEL_CUTOFF_FACTOR · N` are left to the tail bound.
pub const MODEL_CUTOFF_FACTOR: f64 = 40.0;
/// Upper end of the direct partial sum of `Z_q(s)` is `ZQ_DIRECT_SPAN / q`.
pub const ZQ_DIRECT_SPAN: u64 = 10_000_000;
pub const ZQ_MIN_S: f64 = 1.05;
const ZETA_EM_TERMS: usize = 6;

/// Bound on `H(n)` for `n < 2⁶⁴`: at most 15 distinct odd primes fit.
fn h_max() -> f64 {
    const ODD: [f64; 15] = [
        3., 5., 7., 11., 13., 17., 19., 23., 29., 31., 37., 41., 43., 47., 53.,
    ];
    ODD.iter().map(|p| (p - 1.0) / (p - 2.0)).product()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub q: u64,
    #[serde(rename = "N")]
    pub n_scale: f64,
    pub model_sum: f64,
    pub main_term: f64,
    pub rel_err: f64,
    pub lemma_ratio: f64,
}

impl ModelReport {
    /// `φ(q) · model_sum / N²`.
    pub fn normalized(&self) -> f64 {
        self.model_sum / self.main_term
    }
}

/// `H(n)` by walking the smallest-prime-factor chain.
#[inline]
fn h_of(mut n: u64, sieve: &SieveTable) -> f64 {
    let mut h = 1.0;
    while n > 1 {
        let p = sieve.spf(n);
        if p > 2 {
            h *= 1.0 + 1.0 / (p as f64 - 2.0);
        }
        while n % p == 0 {
            n /= p;
        }
    }
    h
}

fn model_cutoff(n_scale: f64) -> u64 {
    (MODEL_CUTOFF_FACTOR * n_scale).floor() as u64
}

pub fn model_sum(
    q: u64,
    n_scale: f64,
    ctx: &SingularSeriesCtx,
    sieve: &SieveTable,
) -> Result<ModelReport> {
    if q == 0 {
        return Err(Error::Domain("q must be at least 1".into()));
    }
    if !(n_scale >= 1.0 && n_scale.is_finite()) {
        return Err(Error::Domain(format!("N = {n_scale} must be at least 1")));
    }
    let cutoff = model_cutoff(n_scale);
    sieve.require(cutoff)?;
    let k = lcm_with_two(q);
    let terms = (cutoff / k) as usize;
    let parts = map_chunks(1..terms + 1, CHUNK, |r| {
        let mut acc = CompensatedSum::new();
        for j in r {
            let n = j as u64 * k;
            let x = n as f64;
            acc.add(h_of(n, sieve) * x * (-x / n_scale).exp());
        }
        acc
    });
    let mut total = CompensatedSum::new();
    for p in &parts {
        total.merge(p);
    }
    let model = ctx.singular_series_from_h(1.0) * total.value();
    let main_term = n_scale * n_scale / euler_phi(q)? as f64;
    let rel_err = (model - main_term).abs() / main_term;
    Ok(ModelReport {
        q,
        n_scale,
        model_sum: model,
        main_term,
        rel_err,
        lemma_ratio: rel_err / (q as f64 / n_scale).sqrt(),
    })
}

/// Bound on the terms dropped beyond `40N`, from `∫_{aN}^∞ x e^{−x/N} dx`.
pub fn model_tail_bound(q: u64, n_scale: f64, ctx: &SingularSeriesCtx) -> f64 {
    let a = MODEL_CUTOFF_FACTOR;
    let k = lcm_with_two(q) as f64;
    let edge = a * n_scale * (-a).exp();
    2.0 * ctx.c_value() * h_max() * (n_scale * n_scale * (a + 1.0) * (-a).exp() / k + edge)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZqValue {
    pub q: u64,
    pub s: f64,
    /// Partial sum up to `10⁷/q` plus the estimated tail.
    pub direct: f64,
    /// `ρ X^{1−s}/(s−1)` with `ρ` the mean density of `H` on multiples of `k`.
    pub direct_tail: f64,
    pub closed: f64,
    pub rel_diff: f64,
}

/// `Z_q(s)` twice: by direct summation and by its Euler product
/// `H(k) k^{−s} ζ(s) Π_{p∤k} (1 + 1/(p^s (p−2)))`, truncated at the
/// context's prime limit.
pub fn zq_eval(q: u64, s: f64, ctx: &SingularSeriesCtx, sieve: &SieveTable) -> Result<ZqValue> {
    if q == 0 {
        return Err(Error::Domain("q must be at least 1".into()));
    }
    if !(s >= ZQ_MIN_S) {
        return Err(Error::Domain(format!(
            "s = {s} too close to 1 for direct summation; use the residue identity"
        )));
    }
    let k = lcm_with_two(q);
    let x_max = ZQ_DIRECT_SPAN / q;
    sieve.require(x_max)?;
    let terms = (x_max / k) as usize;
    let parts = map_chunks(1..terms + 1, CHUNK, |r| {
        let mut acc = CompensatedSum::new();
        for j in r {
            let n = j as u64 * k;
            acc.add(h_of(n, sieve) * (n as f64).powf(-s));
        }
        acc
    });
    let mut partial = CompensatedSum::new();
    for p in &parts {
        partial.merge(p);
    }
    let h_k = h_of(k, sieve);
    let survivors = ctx.odd_primes().iter().map(|&p| p as u64).filter(|p| k % p != 0);
    let mut density = h_k / k as f64;
    let mut euler = 1.0;
    for p in survivors {
        let pf = p as f64;
        density *= 1.0 + 1.0 / (pf * (pf - 2.0));
        euler *= 1.0 + 1.0 / (pf.powf(s) * (pf - 2.0));
    }
    let x_end = (terms as u64 * k) as f64;
    let direct_tail = density * x_end.powf(1.0 - s) / (s - 1.0);
    let direct = partial.value() + direct_tail;
    let closed = h_k * (k as f64).powf(-s) * zeta_real(s, ZETA_EM_TERMS) * euler;
    Ok(ZqValue {
        q,
        s,
        direct,
        direct_tail,
        closed,
        rel_diff: (direct - closed).abs() / closed,
    })
}

/// `(s − 1) Z_q(s)` from the Euler product alone, for probing the residue.
pub fn zq_closed_scaled(q: u64, s: f64, ctx: &SingularSeriesCtx) -> Result<f64> {
    if q == 0 || !(s > 1.0) {
        return Err(Error::Domain(format!("need q >= 1 and s > 1, got q={q}, s={s}")));
    }
    let k = lcm_with_two(q);
    let f = crate::arith::factorize(k)?;
    let h_k: f64 = f
        .primes()
        .filter(|&p| p > 2)
        .map(|p| 1.0 + 1.0 / (p as f64 - 2.0))
        .product();
    let euler: f64 = ctx
        .odd_primes()
        .iter()
        .map(|&p| p as u64)
        .filter(|p| k % p != 0)
        .map(|p| {
            let pf = p as f64;
            1.0 + 1.0 / (pf.powf(s) * (pf - 2.0))
        })
        .product();
    Ok((s - 1.0) * h_k * (k as f64).powf(-s) * zeta_real(s, ZETA_EM_TERMS) * euler)
}

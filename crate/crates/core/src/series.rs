//! The character side: `S(q)` by direct sieving, the prime sums
//! `P(χ) = Σ χ(m) Λ(m) e^{−m/N}`, the orthogonality decomposition of `S(q)`
//! and its split into principal, exceptional and remaining characters.
//!
//! Orthogonality gives, exactly,
//! `Σ_{m₁+m₂ ≡ 0 (q), (m₁m₂, q) = 1} Λ(m₁)Λ(m₂)e^{−(m₁+m₂)/N} = φ(q)⁻¹ Σ_χ χ(−1) P(χ) P(χ̄)`.
//! `S(q)` itself restricts to odd `m₁, m₂` and keeps the non-coprime pairs;
//! both mismatches are computed exactly and reported.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, SieveTable};
use crate::characters::{Character, CharacterGroup};
use crate::error::{Error, Result};
use crate::format::round_sig;
use crate::sum::{map_chunks, CompensatedSum, ComplexSum, CHUNK};

/// Minimum ratio `cutoff_M / N`; the dropped tail is then below `e^{−40}` relative.
pub const MIN_CUTOFF_FACTOR: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesParams {
    pub q: u64,
    /// Scale of the weight `e^{−m/N}`.
    pub n_scale: f64,
    pub cutoff_m: u64,
    /// Bound on `Σ_{m > M} Λ(m) e^{−m/N}`.
    pub tail_bound: f64,
}

impl SeriesParams {
    pub fn new(q: u64, n_scale: f64, cutoff_factor: f64) -> Result<Self> {
        if !(cutoff_factor >= MIN_CUTOFF_FACTOR) {
            return Err(Error::Domain(format!(
                "cutoff factor {cutoff_factor} below {MIN_CUTOFF_FACTOR}"
            )));
        }
        Self::with_cutoff(q, n_scale, (cutoff_factor * n_scale).ceil() as u64)
    }

    pub fn with_cutoff(q: u64, n_scale: f64, cutoff_m: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("q must be at least 1".into()));
        }
        if !(n_scale > 0.0 && n_scale.is_finite()) {
            return Err(Error::Domain(format!("N = {n_scale} must be positive")));
        }
        if (cutoff_m as f64) < MIN_CUTOFF_FACTOR * n_scale {
            return Err(Error::Domain(format!(
                "cutoff {cutoff_m} below {MIN_CUTOFF_FACTOR}·N"
            )));
        }
        let m = cutoff_m as f64;
        let tail_bound = n_scale * (-m / n_scale).exp() * (m.ln() + n_scale / m);
        Ok(Self {
            q,
            n_scale,
            cutoff_m,
            tail_bound,
        })
    }

    /// `N ≥ q`, the standing assumption of the principal-character estimate.
    pub fn n_at_least_q(&self) -> bool {
        self.n_scale >= self.q as f64
    }

    /// `N ≥ q²`, the assumption of the window comparison.
    pub fn n_at_least_q_squared(&self) -> bool {
        self.n_scale >= (self.q as f64).powi(2)
    }

    #[inline]
    fn weight(&self, m: u64) -> f64 {
        (-(m as f64) / self.n_scale).exp()
    }
}

/// `P(χ) = Σ_{m ≤ M} χ(m) Λ(m) e^{−m/N}`.
pub fn p_chi(chi: &Character, params: &SeriesParams, sieve: &SieveTable) -> Result<Complex64> {
    sieve.require(params.cutoff_m)?;
    let lambda = sieve.lambda_slice();
    let parts = map_chunks(1..params.cutoff_m as usize + 1, CHUNK, |r| {
        let mut acc = ComplexSum::new();
        for m in r {
            let l = lambda[m];
            if l == 0.0 {
                continue;
            }
            if chi.angle(m as u64).is_some() {
                acc.add(chi.eval(m as u64) * (l * params.weight(m as u64)));
            }
        }
        acc
    });
    let mut total = ComplexSum::new();
    for p in &parts {
        total.merge(p);
    }
    Ok(total.value())
}

/// `Σ_{m ≤ M} Λ(m) e^{−m/N}` with no character, which dominates every `|P(χ)|`.
pub fn weighted_psi(params: &SeriesParams, sieve: &SieveTable) -> Result<f64> {
    let trivial = CharacterGroup::new(1)?.principal();
    Ok(p_chi(&trivial, params, sieve)?.re)
}

/// Per-residue sums `B(a) = Σ_{m ≡ a (q), keep(m)} Λ(m) e^{−m/N}`.
fn residue_buckets(
    params: &SeriesParams,
    sieve: &SieveTable,
    keep: impl Fn(u64) -> bool + Sync + Send,
) -> Result<Vec<f64>> {
    sieve.require(params.cutoff_m)?;
    let q = params.q as usize;
    let lambda = sieve.lambda_slice();
    let parts = map_chunks(1..params.cutoff_m as usize + 1, CHUNK, |r| {
        let mut b = vec![CompensatedSum::new(); q];
        for m in r {
            let l = lambda[m];
            if l != 0.0 && keep(m as u64) {
                b[m % q].add(l * params.weight(m as u64));
            }
        }
        b
    });
    let mut total = vec![CompensatedSum::new(); q];
    for part in &parts {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    Ok(total.iter().map(|s| s.value()).collect())
}

fn pair_buckets(buckets: &[f64], q: u64, residue: impl Fn(u64) -> bool) -> f64 {
    (0..q)
        .filter(|&a| residue(a))
        .map(|a| buckets[a as usize] * buckets[((q - a) % q) as usize])
        .collect::<CompensatedSum>()
        .value()
}

/// `S(q) = Σ_{n ≡ 0 (q)} G(n) e^{−n/N}` from odd-residue buckets.
pub fn s_direct(params: &SeriesParams, sieve: &SieveTable) -> Result<f64> {
    let b = residue_buckets(params, sieve, |m| m % 2 == 1)?;
    Ok(pair_buckets(&b, params.q, |_| true))
}

/// Exact orthogonality identity and the terms separating it from `S(q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionCheck {
    pub q: u64,
    #[serde(rename = "N")]
    pub n_scale: f64,
    /// `φ(q)⁻¹ Σ_χ χ(−1) P(χ) P(χ̄)`, real part.
    pub character_sum: f64,
    /// Imaginary part of the same sum; zero up to rounding.
    pub character_sum_imag: f64,
    /// Direct sum over `m₁ + m₂ ≡ 0`, `(m₁m₂, q) = 1`, any parity.
    pub coprime_sum: f64,
    pub defect: f64,
    #[serde(rename = "S_direct")]
    pub s_direct: f64,
    /// Odd pairs with `(m₁m₂, q) > 1`, present in `S(q)` only.
    pub coprimality_terms: f64,
    /// Coprime pairs with an even member, present in the character sum only.
    pub parity_terms: f64,
}

impl DecompositionCheck {
    /// `character_sum − parity_terms + coprimality_terms − S_direct`.
    pub fn reconstruction_error(&self) -> f64 {
        self.character_sum - self.parity_terms + self.coprimality_terms - self.s_direct
    }
}

/// `P(χ)` for every character of the group, in enumeration order.
pub fn p_chi_all(
    params: &SeriesParams,
    group: &Arc<CharacterGroup>,
    sieve: &SieveTable,
) -> Result<Vec<(Character, Complex64)>> {
    group
        .characters()
        .into_iter()
        .map(|chi| {
            let p = p_chi(&chi, params, sieve)?;
            Ok((chi, p))
        })
        .collect()
}

fn check_group(params: &SeriesParams, group: &CharacterGroup) -> Result<()> {
    if group.modulus() != params.q {
        return Err(Error::Domain(format!(
            "group modulus {} differs from q = {}",
            group.modulus(),
            params.q
        )));
    }
    Ok(())
}

fn conj_position(all: &[(Character, Complex64)], chi: &Character) -> usize {
    let target = chi.conj();
    all.iter()
        .position(|(c, _)| *c == target)
        .expect("conjugate belongs to the group")
}

fn decomposition_from(
    params: &SeriesParams,
    all: &[(Character, Complex64)],
    sieve: &SieveTable,
) -> Result<DecompositionCheck> {
    let q = params.q;
    let phi = all.len() as f64;
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for (chi, p) in all {
        let pc = all[conj_position(all, chi)].1;
        let term = *p * pc * chi.parity() as f64;
        re.add(term.re);
        im.add(term.im);
    }
    let unit = |a: u64| gcd(a, q) == 1;
    let odd = residue_buckets(params, sieve, |m| m % 2 == 1)?;
    let coprime = residue_buckets(params, sieve, |m| gcd(m % q, q) == 1)?;
    let coprime_sum = pair_buckets(&coprime, q, unit);
    let odd_units = pair_buckets(&odd, q, unit);
    let odd_nonunits = pair_buckets(&odd, q, |a| !unit(a));
    let s_direct = pair_buckets(&odd, q, |_| true);
    let character_sum = re.value() / phi;
    Ok(DecompositionCheck {
        q,
        n_scale: params.n_scale,
        character_sum,
        character_sum_imag: im.value() / phi,
        coprime_sum,
        defect: (character_sum - coprime_sum).abs(),
        s_direct,
        coprimality_terms: odd_nonunits,
        parity_terms: coprime_sum - odd_units,
    })
}

pub fn decomposition_check(
    params: &SeriesParams,
    group: &Arc<CharacterGroup>,
    sieve: &SieveTable,
) -> Result<DecompositionCheck> {
    check_group(params, group)?;
    let all = p_chi_all(params, group, sieve)?;
    decomposition_from(params, &all, sieve)
}

/// `S(q)` split over characters, with the observed `ε(q, N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub q: u64,
    #[serde(rename = "N")]
    pub n_scale: f64,
    #[serde(rename = "S_direct")]
    pub s_direct: f64,
    #[serde(rename = "S0")]
    pub s0: f64,
    #[serde(rename = "S1")]
    pub s1: f64,
    #[serde(rename = "S_inf")]
    pub s_inf: f64,
    pub chi1: String,
    pub chi1_parity: i32,
    pub epsilon_obs: f64,
    pub decomposition_defect: f64,
}

impl SeriesReport {
    /// `φ(q) S / N² − 1 − χ₁(−1)(|P(χ₁)|/N)²` recomputed from the stored fields.
    pub fn epsilon_from_fields(&self) -> f64 {
        let phi = crate::arith::euler_phi(self.q).map_or(f64::NAN, |p| p as f64);
        phi * self.s_direct / (self.n_scale * self.n_scale) - 1.0 - phi * self.s1 / (self.n_scale * self.n_scale)
    }

    /// Copy with every float rounded to the printed precision.
    pub fn rounded(&self) -> Self {
        Self {
            n_scale: round_sig(self.n_scale),
            s_direct: round_sig(self.s_direct),
            s0: round_sig(self.s0),
            s1: round_sig(self.s1),
            s_inf: round_sig(self.s_inf),
            epsilon_obs: round_sig(self.epsilon_obs),
            decomposition_defect: round_sig(self.decomposition_defect),
            ..self.clone()
        }
    }
}

/// Full report plus the values behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesComponents {
    pub report: SeriesReport,
    pub decomposition: DecompositionCheck,
    pub p_chi0: Complex64,
    pub p_chi1: Complex64,
    /// Imaginary part of the `S_inf` sum.
    pub s_inf_imag: f64,
}

pub fn components(
    params: &SeriesParams,
    group: &Arc<CharacterGroup>,
    sieve: &SieveTable,
    chi1: &Character,
) -> Result<SeriesComponents> {
    check_group(params, group)?;
    if chi1.is_principal() || !chi1.is_real() {
        return Err(Error::Domain(format!(
            "χ₁ must be real and non-principal, got {}",
            chi1.id()
        )));
    }
    let all = p_chi_all(params, group, sieve)?;
    let phi = all.len() as f64;
    let decomposition = decomposition_from(params, &all, sieve)?;
    let p0 = all[0].1;
    let p1 = all
        .iter()
        .find(|(c, _)| c == chi1)
        .map(|(_, p)| *p)
        .expect("χ₁ belongs to the group");
    let parity1 = chi1.parity();
    let s0 = p0.norm_sqr() / phi;
    let s1 = parity1 as f64 * p1.norm_sqr() / phi;
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for (chi, p) in all.iter().filter(|(c, _)| !c.is_principal() && c != chi1) {
        let pc = all[conj_position(&all, chi)].1;
        let term = *p * pc * chi.parity() as f64;
        re.add(term.re);
        im.add(term.im);
    }
    let n2 = params.n_scale * params.n_scale;
    let s_direct = decomposition.s_direct;
    let epsilon_obs = phi * s_direct / n2 - 1.0 - parity1 as f64 * p1.norm_sqr() / n2;
    Ok(SeriesComponents {
        report: SeriesReport {
            q: params.q,
            n_scale: params.n_scale,
            s_direct,
            s0,
            s1,
            s_inf: re.value() / phi,
            chi1: chi1.id().to_string(),
            chi1_parity: parity1,
            epsilon_obs,
            decomposition_defect: decomposition.defect,
        },
        decomposition,
        p_chi0: p0,
        p_chi1: p1,
        s_inf_imag: im.value() / phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sieve() -> SieveTable {
        SieveTable::new(20_000).unwrap()
    }

    /// O(M²) double sum over odd prime powers.
    fn brute_s(params: &SeriesParams, s: &SieveTable) -> f64 {
        let pp: Vec<(u64, f64)> = (1..=params.cutoff_m)
            .filter(|m| m % 2 == 1 && s.lambda(*m) != 0.0)
            .map(|m| (m, s.lambda(m) * (-(m as f64) / params.n_scale).exp()))
            .collect();
        let mut acc = CompensatedSum::new();
        for &(m1, w1) in &pp {
            for &(m2, w2) in &pp {
                if (m1 + m2) % params.q == 0 {
                    acc.add(w1 * w2);
                }
            }
        }
        acc.value()
    }

    #[test]
    fn params_validation() {
        assert!(SeriesParams::new(3, 100.0, 39.0).is_err());
        assert!(SeriesParams::with_cutoff(3, 300.0, 10_000).is_err());
        assert!(SeriesParams::with_cutoff(0, 100.0, 10_000).is_err());
        let p = SeriesParams::new(3, 100.0, 40.0).unwrap();
        assert_eq!(p.cutoff_m, 4_000);
        assert!(p.tail_bound < 1e-12 * 100.0);
        assert!(p.n_at_least_q() && p.n_at_least_q_squared());
        assert!(!SeriesParams::new(30, 100.0, 40.0).unwrap().n_at_least_q_squared());
    }

    #[test]
    fn s_direct_single_bucket_for_q1() {
        let s = sieve();
        let p = SeriesParams::with_cutoff(1, 500.0, 20_000).unwrap();
        let odd: f64 = (1..=20_000u64)
            .filter(|m| m % 2 == 1)
            .map(|m| s.lambda(m) * (-(m as f64) / 500.0).exp())
            .collect::<CompensatedSum>()
            .value();
        let got = s_direct(&p, &s).unwrap();
        assert!((got - odd * odd).abs() <= 1e-13 * got);
    }

    #[test]
    fn s_direct_matches_brute_force() {
        let s = sieve();
        for q in [3u64, 5, 12] {
            let p = SeriesParams::with_cutoff(q, 200.0, 10_000).unwrap();
            let fast = s_direct(&p, &s).unwrap();
            let slow = brute_s(&p, &s);
            assert!((fast - slow).abs() <= 1e-10 * slow, "q={q}");
        }
    }

    #[test]
    fn p_chi_examples() {
        let s = SieveTable::new(400_000).unwrap();
        let g3 = CharacterGroup::new(3).unwrap();
        let p = SeriesParams::new(3, 1e4, 40.0).unwrap();
        let p0 = p_chi(&g3.principal(), &p, &s).unwrap();
        assert!((p0.re / 1e4 - 1.0).abs() < 0.15);
        assert_eq!(p0.im, 0.0);
        let g4 = CharacterGroup::new(4).unwrap();
        let p4 = SeriesParams::new(4, 1e3, 40.0).unwrap();
        let pc = p_chi(&g4.character(vec![1]).unwrap(), &p4, &s).unwrap();
        assert!(pc.norm() < 0.05 * 1e3, "{pc}");
        let bound = weighted_psi(&p4, &s).unwrap();
        let g5 = CharacterGroup::new(5).unwrap();
        for chi in g5.characters() {
            assert!(p_chi(&chi, &p4, &s).unwrap().norm() <= bound);
        }
        let tiny = SieveTable::new(100).unwrap();
        assert!(matches!(p_chi(&g3.principal(), &p, &tiny), Err(Error::Size(_))));
    }

    #[test]
    fn decomposition_is_exact() {
        let s = sieve();
        for q in [1u64, 3, 5, 8, 12] {
            let p = SeriesParams::with_cutoff(q, 100.0, 10_000).unwrap();
            let g = CharacterGroup::new(q).unwrap();
            let d = decomposition_check(&p, &g, &s).unwrap();
            assert!(d.defect < 1e-8 * 1e4, "q={q} {d:?}");
            assert!(d.character_sum_imag.abs() < 1e-8 * 1e4);
            assert!(d.reconstruction_error().abs() < 1e-8 * d.s_direct);
            if q == 1 {
                assert!(d.defect <= 1e-12 * d.coprime_sum);
                assert_eq!(d.coprimality_terms, 0.0);
            }
        }
    }

    #[test]
    fn squared_form_is_conjugate_symmetric() {
        // Σ χ(−1) P(χ)² is real, since χ̄ contributes the conjugate
        let s = sieve();
        let p = SeriesParams::with_cutoff(5, 100.0, 10_000).unwrap();
        let g = CharacterGroup::new(5).unwrap();
        let total: Complex64 = p_chi_all(&p, &g, &s)
            .unwrap()
            .iter()
            .map(|(c, v)| v * v * c.parity() as f64)
            .sum();
        assert!(total.im.abs() < 1e-8 * 1e4);
    }

    #[test]
    fn components_add_up() {
        let s = SieveTable::new(400_000).unwrap();
        let g = CharacterGroup::new(5).unwrap();
        let p = SeriesParams::new(5, 1e4, 40.0).unwrap();
        let chi1 = g.character(vec![2]).unwrap();
        let c = components(&p, &g, &s, &chi1).unwrap();
        let r = &c.report;
        let d = &c.decomposition;
        let rebuilt = r.s0 + r.s1 + r.s_inf - d.parity_terms + d.coprimality_terms;
        assert!((rebuilt - r.s_direct).abs() < 1e-8 * r.s_direct);
        assert!((r.epsilon_from_fields() - r.epsilon_obs).abs() < 1e-12);
        assert!(r.s_direct > 0.0);
        assert_eq!(r.chi1, "q:5,idx:2");
        assert_eq!(r.chi1_parity, 1);
        assert!(c.s_inf_imag.abs() < 1e-8 * 1e8);
        assert!(components(&p, &g, &s, &g.principal()).is_err());
        assert!(components(&p, &g, &s, &g.character(vec![1]).unwrap()).is_err());
    }

    #[test]
    fn report_json_field_names() {
        let r = SeriesReport {
            q: 3,
            n_scale: 100.0,
            s_direct: 1.0,
            s0: 1.0,
            s1: 0.0,
            s_inf: 0.0,
            chi1: "q:3,idx:1".into(),
            chi1_parity: -1,
            epsilon_obs: 0.0,
            decomposition_defect: 0.0,
        };
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        keys.sort();
        let mut want = vec![
            "q", "N", "S_direct", "S0", "S1", "S_inf", "chi1", "chi1_parity", "epsilon_obs",
            "decomposition_defect",
        ];
        want.sort();
        assert_eq!(keys, want);
        let back: SeriesReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
    }
}

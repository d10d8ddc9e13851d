//! Dirichlet characters mod `q`.
//!
//! `(ℤ/qℤ)*` is written as a product of cyclic factors: a primitive root for
//! each odd prime power, `−1` for `4`, and `{−1, 5}` for `2^a` with `a ≥ 3`.
//! Each generator is lifted to a residue mod `q` by CRT. A character is an
//! exponent vector against these generators; its values are exact rational
//! angles `k / exponent` and become complex numbers only on evaluation.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::arith::{euler_phi, factorize, gcd, lcm, mod_pow};
use crate::error::{Error, Result};

/// Largest modulus with a dense discrete-log table.
pub const MAX_GROUP_MODULUS: u64 = 100_000;

const NO_LOG: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Generator {
    pub residue: u64,
    pub order: u64,
}

/// The dual group of `(ℤ/qℤ)*` with a dense discrete-log table.
#[derive(Debug)]
pub struct CharacterGroup {
    q: u64,
    gens: Vec<Generator>,
    /// `q * gens.len()` exponents, `NO_LOG` for residues sharing a factor with `q`.
    dlog: Vec<u32>,
    size: u64,
    exponent: u64,
    roots: Vec<Complex64>,
}

/// One cyclic factor of a local group `(ℤ/p^eℤ)*`.
struct LocalFactor {
    modulus: u64,
    gens: Vec<(u64, u64)>,
    /// local residue -> exponent vector (flattened), NO_LOG if not a unit
    dlog: Vec<u32>,
}

fn local_factor(p: u64, e: u32) -> LocalFactor {
    let pe = p.pow(e);
    let gens: Vec<(u64, u64)> = if p == 2 {
        match e {
            1 => vec![],
            2 => vec![(3, 2)],
            _ => vec![(pe - 1, 2), (5, pe / 4)],
        }
    } else {
        let order = (p - 1) * p.pow(e - 1);
        let ord_primes: Vec<u64> = factorize(order).unwrap().primes().collect();
        let g = (2..pe)
            .find(|&g| gcd(g, p) == 1 && ord_primes.iter().all(|&r| mod_pow(g, order / r, pe) != 1))
            .expect("odd prime powers have primitive roots");
        vec![(g, order)]
    };
    let width = gens.len();
    let mut dlog = vec![NO_LOG; pe as usize * width.max(1)];
    match gens.as_slice() {
        [] => dlog[1 % pe as usize] = 0,
        [(g, order)] => {
            let mut x = 1 % pe;
            for k in 0..*order {
                dlog[x as usize] = k as u32;
                x = x * g % pe;
            }
        }
        [(m1, o1), (g, o2)] => {
            let mut sign = 1 % pe;
            for a in 0..*o1 {
                let mut x = sign;
                for b in 0..*o2 {
                    dlog[2 * x as usize] = a as u32;
                    dlog[2 * x as usize + 1] = b as u32;
                    x = x * g % pe;
                }
                sign = sign * m1 % pe;
            }
        }
        _ => unreachable!(),
    }
    LocalFactor {
        modulus: pe,
        gens,
        dlog,
    }
}

impl CharacterGroup {
    pub fn new(q: u64) -> Result<Arc<Self>> {
        if q == 0 {
            return Err(Error::Domain("modulus must be at least 1".into()));
        }
        if q > MAX_GROUP_MODULUS {
            return Err(Error::Size(format!(
                "modulus {q} exceeds dense table limit {MAX_GROUP_MODULUS}"
            )));
        }
        let locals: Vec<LocalFactor> = factorize(q)?
            .pairs
            .iter()
            .map(|&(p, e)| local_factor(p, e))
            .collect();
        let mut gens = Vec::new();
        for lf in &locals {
            let others = q / lf.modulus;
            for &(g, order) in &lf.gens {
                // residue ≡ g mod p^e and ≡ 1 mod the rest
                let residue = (0..others)
                    .map(|t| g + t * lf.modulus)
                    .find(|x| x % others == 1 % others)
                    .expect("CRT lift exists");
                gens.push(Generator { residue, order });
            }
        }
        let width = gens.len();
        let mut dlog = vec![NO_LOG; q as usize * width];
        for m in 0..q {
            if gcd(m, q) != 1 {
                continue;
            }
            let mut col = 0;
            for lf in &locals {
                let w = lf.gens.len();
                let r = (m % lf.modulus) as usize;
                for j in 0..w {
                    dlog[m as usize * width + col + j] = lf.dlog[r * w + j];
                }
                col += w;
            }
        }
        let exponent = gens.iter().fold(1, |acc, g| lcm(acc, g.order));
        let roots = (0..exponent).map(|k| root_of_unity(k, exponent)).collect();
        Ok(Arc::new(Self {
            q,
            gens,
            dlog,
            size: euler_phi(q)?,
            exponent,
            roots,
        }))
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    /// `φ(q)`, the number of characters.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// Exponent of the group (lcm of generator orders).
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Exponent vector of `m` against the generators, `None` if `gcd(m, q) > 1`.
    pub fn dlog(&self, m: u64) -> Option<&[u32]> {
        let w = self.gens.len();
        let r = (m % self.q) as usize;
        if gcd(r as u64, self.q) != 1 {
            return None;
        }
        Some(&self.dlog[r * w..(r + 1) * w])
    }

    /// Rebuilds a residue from its exponent vector.
    pub fn residue_from_exponents(&self, exps: &[u32]) -> u64 {
        self.gens
            .iter()
            .zip(exps)
            .fold(1 % self.q, |acc, (g, &e)| acc * mod_pow(g.residue, e as u64, self.q) % self.q)
    }

    pub fn root(&self, k: u64) -> Complex64 {
        self.roots[(k % self.exponent) as usize]
    }

    pub fn character(self: &Arc<Self>, index: Vec<u32>) -> Result<Character> {
        if index.len() != self.gens.len()
            || index.iter().zip(&self.gens).any(|(&i, g)| i as u64 >= g.order)
        {
            return Err(Error::Domain(format!(
                "index {index:?} does not fit generator orders {:?}",
                self.gens.iter().map(|g| g.order).collect::<Vec<_>>()
            )));
        }
        Ok(Character::build(Arc::clone(self), index))
    }

    pub fn principal(self: &Arc<Self>) -> Character {
        Character::build(Arc::clone(self), vec![0; self.gens.len()])
    }

    /// All `φ(q)` characters in lexicographic order of index vectors.
    pub fn characters(self: &Arc<Self>) -> Vec<Character> {
        let mut out = Vec::with_capacity(self.size as usize);
        let mut idx = vec![0u32; self.gens.len()];
        loop {
            out.push(Character::build(Arc::clone(self), idx.clone()));
            // odometer with the last generator fastest
            let mut j = idx.len();
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                idx[j] += 1;
                if (idx[j] as u64) < self.gens[j].order {
                    break;
                }
                idx[j] = 0;
            }
        }
    }

    /// Real characters, principal first, then lexicographic.
    pub fn real_characters(self: &Arc<Self>) -> Vec<Character> {
        self.characters().into_iter().filter(|c| c.is_real()).collect()
    }

    /// Number of characters of order at most 2.
    pub fn real_character_count(&self) -> u64 {
        self.gens
            .iter()
            .map(|g| if g.order % 2 == 0 { 2 } else { 1 })
            .product()
    }
}

fn root_of_unity(k: u64, n: u64) -> Complex64 {
    // quarter turns exactly
    if (4 * k) % n == 0 {
        return match 4 * k / n {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let theta = std::f64::consts::TAU * k as f64 / n as f64;
    let (s, c) = theta.sin_cos();
    Complex64::new(c, s)
}

/// A Dirichlet character, identified by its exponent vector.
#[derive(Clone)]
pub struct Character {
    group: Arc<CharacterGroup>,
    index: Vec<u32>,
    /// angle numerator over the group exponent for each residue, NO_LOG off the units
    angles: Vec<u32>,
}

impl Character {
    fn build(group: Arc<CharacterGroup>, index: Vec<u32>) -> Self {
        let q = group.q;
        let scale: Vec<u64> = group.gens.iter().map(|g| group.exponent / g.order).collect();
        let angles = (0..q)
            .map(|m| match group.dlog(m) {
                None => NO_LOG,
                Some(d) => {
                    let k = d
                        .iter()
                        .zip(&index)
                        .zip(&scale)
                        .map(|((&dj, &ij), &sj)| dj as u64 * ij as u64 % group.exponent * sj)
                        .sum::<u64>()
                        % group.exponent;
                    k as u32
                }
            })
            .collect();
        Self {
            group,
            index,
            angles,
        }
    }

    pub fn group(&self) -> &Arc<CharacterGroup> {
        &self.group
    }

    pub fn modulus(&self) -> u64 {
        self.group.q
    }

    pub fn index(&self) -> &[u32] {
        &self.index
    }

    /// `χ(m) = e(k / exponent)` as the numerator `k`, or `None` off the units.
    #[inline]
    pub fn angle(&self, m: u64) -> Option<u64> {
        let a = self.angles[(m % self.group.q) as usize];
        (a != NO_LOG).then_some(a as u64)
    }

    #[inline]
    pub fn eval(&self, m: u64) -> Complex64 {
        match self.angle(m) {
            Some(k) => self.group.roots[k as usize],
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// `χ(−1)` as `±1`.
    pub fn parity(&self) -> i32 {
        let q = self.group.q;
        let k = self.angle(q - 1).expect("-1 is a unit");
        if k == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_principal(&self) -> bool {
        self.index.iter().all(|&i| i == 0)
    }

    pub fn is_real(&self) -> bool {
        self.index
            .iter()
            .zip(&self.group.gens)
            .all(|(&i, g)| (2 * i as u64) % g.order == 0)
    }

    pub fn conj(&self) -> Character {
        let index = self
            .index
            .iter()
            .zip(&self.group.gens)
            .map(|(&i, g)| ((g.order - i as u64) % g.order) as u32)
            .collect();
        Character::build(Arc::clone(&self.group), index)
    }

    /// The smallest `d | q` through which the character factors.
    pub fn conductor(&self) -> u64 {
        let q = self.group.q;
        (1..=q)
            .filter(|d| q % d == 0)
            .find(|&d| {
                (0..q / d)
                    .map(|t| 1 + t * d)
                    .all(|m| self.angle(m).is_none_or(|k| k == 0))
            })
            .unwrap_or(q)
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.group.q
    }

    /// Values of the inducing primitive character, tabulated mod its conductor.
    pub fn primitive_table(&self) -> CharTable {
        let q = self.group.q;
        let d = self.conductor();
        let values = (0..d)
            .map(|r| {
                if gcd(r, d) != 1 {
                    return Complex64::new(0.0, 0.0);
                }
                let m = (0..q / d.max(1) + 1)
                    .map(|t| r + t * d)
                    .find(|&m| gcd(m, q) == 1)
                    .expect("a unit lift exists");
                self.eval(m)
            })
            .collect();
        CharTable { modulus: d, values }
    }

    /// Values of this character tabulated mod `q`.
    pub fn table(&self) -> CharTable {
        CharTable {
            modulus: self.group.q,
            values: (0..self.group.q).map(|m| self.eval(m)).collect(),
        }
    }

    pub fn id(&self) -> CharacterId {
        CharacterId {
            q: self.group.q,
            index: self.index.clone(),
        }
    }
}

impl fmt::Debug for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Character({})", self.id())
    }
}

impl PartialEq for Character {
    fn eq(&self, other: &Self) -> bool {
        self.group.q == other.group.q && self.index == other.index
    }
}

/// Character values as a plain periodic table.
#[derive(Debug, Clone, PartialEq)]
pub struct CharTable {
    pub modulus: u64,
    pub values: Vec<Complex64>,
}

impl CharTable {
    #[inline]
    pub fn eval(&self, m: u64) -> Complex64 {
        self.values[(m % self.modulus) as usize]
    }

    /// `χ(−1)` read from the table, as `0` (even) or `1` (odd).
    pub fn parity_exponent(&self) -> u32 {
        if self.eval(self.modulus - 1).re > 0.0 {
            0
        } else {
            1
        }
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn conj(&self) -> CharTable {
        CharTable {
            modulus: self.modulus,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }
}

/// External name of a character: `q:<q>,idx:<v1,v2,...>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CharacterId {
    pub q: u64,
    pub index: Vec<u32>,
}

impl fmt::Display for CharacterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.index.iter().map(|i| i.to_string()).collect();
        write!(f, "q:{},idx:{}", self.q, idx.join(","))
    }
}

impl FromStr for CharacterId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Domain(format!("malformed character id {s:?}"));
        let rest = s.strip_prefix("q:").ok_or_else(bad)?;
        let (q, idx) = rest.split_once(",idx:").ok_or_else(bad)?;
        let q = q.parse().map_err(|_| bad())?;
        Ok(CharacterId {
            q,
            index: parse_index(idx).ok_or_else(bad)?,
        })
    }
}

/// Parses `v1,v2,...` (empty string for the trivial group).
pub fn parse_index(s: &str) -> Option<Vec<u32>> {
    if s.trim().is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|v| v.trim().parse().ok()).collect()
}

/// Source of real zeros of `L(s, χ)` in `(0, 1)`.
pub trait RealZeroProvider {
    /// All real zeros of `L(s, χ)` in `(0, 1)` found by the provider, ascending.
    fn real_zeros(&self, chi: &Character) -> Result<Vec<f64>>;
}

/// The character playing the role of `χ₁`.
#[derive(Debug, Clone, PartialEq)]
pub enum ExceptionalCandidate {
    /// Real character whose L-function has the largest real zero.
    RealZero { chi: Character, beta: f64 },
    /// No real zero found; the real non-principal character of largest conductor.
    Fallback { chi: Character },
    NoCandidate,
}

impl ExceptionalCandidate {
    pub fn character(&self) -> Option<&Character> {
        match self {
            ExceptionalCandidate::RealZero { chi, .. } | ExceptionalCandidate::Fallback { chi } => {
                Some(chi)
            }
            ExceptionalCandidate::NoCandidate => None,
        }
    }

    pub fn is_fallback(&self) -> bool {
        matches!(self, ExceptionalCandidate::Fallback { .. })
    }
}

pub fn exceptional_candidate(
    group: &Arc<CharacterGroup>,
    zeros: &dyn RealZeroProvider,
) -> Result<ExceptionalCandidate> {
    if group.modulus() < 3 {
        return Err(Error::Domain(format!(
            "no non-principal character mod {}",
            group.modulus()
        )));
    }
    let candidates: Vec<Character> = group
        .real_characters()
        .into_iter()
        .filter(|c| !c.is_principal())
        .collect();
    let mut best: Option<(Character, f64)> = None;
    for chi in &candidates {
        if let Some(&beta) = zeros.real_zeros(chi)?.last() {
            if best.as_ref().is_none_or(|(_, b)| beta > *b) {
                best = Some((chi.clone(), beta));
            }
        }
    }
    if let Some((chi, beta)) = best {
        return Ok(ExceptionalCandidate::RealZero { chi, beta });
    }
    let mut fallback: Option<(u64, &Character)> = None;
    for chi in &candidates {
        let d = chi.conductor();
        if fallback.is_none_or(|(bd, _)| d > bd) {
            fallback = Some((d, chi));
        }
    }
    Ok(match fallback {
        Some((_, chi)) => ExceptionalCandidate::Fallback { chi: chi.clone() },
        None => ExceptionalCandidate::NoCandidate,
    })
}

/// Column orthogonality defect `max_c |Σ_χ χ(c) − φ(q)[c ≡ 1]|` over units `c`.
///
/// `Σ_χ χ(a) χ̄(b)` depends on the pair only through `c = a b⁻¹`, so the
/// maximum over pairs equals the maximum over single units.
pub fn orthogonality_check(group: &Arc<CharacterGroup>) -> Result<f64> {
    if group.size() > 10_000 {
        return Err(Error::Size(format!(
            "orthogonality check limited to φ(q) <= 10^4, got {}",
            group.size()
        )));
    }
    let q = group.modulus();
    let chars = group.characters();
    let phi = group.size() as f64;
    let mut worst = 0.0f64;
    for c in (0..q).filter(|&c| gcd(c, q) == 1) {
        let mut acc = crate::sum::ComplexSum::new();
        for chi in &chars {
            acc.add(chi.eval(c));
        }
        let target = if c % q == 1 % q { phi } else { 0.0 };
        worst = worst.max((acc.value() - target).norm());
    }
    Ok(worst)
}

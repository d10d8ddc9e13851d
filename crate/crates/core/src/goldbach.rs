//! The weighted Goldbach sum `G(n) = Σ Λ(m₁)Λ(m₂)` over ordered odd pairs
//! `m₁ + m₂ = n`, and scans of `G(n) / (𝔖(n) n)` against the window
//! `(δ, 2 − δ)`.
//!
//! Both the single-`n` and the bulk routine accumulate the pairs with
//! `m₁ < m₂` in ascending `m₁`, double the compensated total and add the
//! diagonal `Λ(n/2)²`. Sharing that order makes the two bit-identical.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::arith::SieveTable;
use crate::error::{Error, Result};
use crate::format::fmt_num;
use crate::singular::{hl_factor_table, SingularSeriesCtx};
use crate::sum::{map_chunks, CompensatedSum};

/// `G(n)` for a single `n`.
pub fn goldbach_g(n: u64, sieve: &SieveTable) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("G(n) needs n >= 2, got {n}")));
    }
    sieve.require(n)?;
    if n % 2 == 1 {
        return Ok(0.0);
    }
    let mut half = CompensatedSum::new();
    let mut m1 = 3;
    while 2 * m1 < n {
        let l1 = sieve.lambda(m1);
        if l1 != 0.0 {
            let l2 = sieve.lambda(n - m1);
            if l2 != 0.0 {
                half.add(l1 * l2);
            }
        }
        m1 += 2;
    }
    Ok(2.0 * half.value() + diagonal(n, sieve))
}

fn diagonal(n: u64, sieve: &SieveTable) -> f64 {
    let h = n / 2;
    if h % 2 == 1 {
        let l = sieve.lambda(h);
        l * l
    } else {
        0.0
    }
}

/// Odd prime powers up to `limit` with their Λ values, ascending.
fn odd_prime_powers(limit: u64, sieve: &SieveTable) -> Vec<(u64, f64)> {
    (3..=limit)
        .step_by(2)
        .filter_map(|m| {
            let l = sieve.lambda(m);
            (l != 0.0).then_some((m, l))
        })
        .collect()
}

const BLOCK: usize = 1 << 15;

/// `G(n)` for every `n` in `range`, indexed by `n - range.start()`.
/// Odd `n` yield zero.
pub fn goldbach_g_range(range: RangeInclusive<u64>, sieve: &SieveTable) -> Result<Vec<f64>> {
    let (from, to) = (*range.start(), *range.end());
    if from > to {
        return Ok(Vec::new());
    }
    sieve.require(to)?;
    let pp = odd_prime_powers(to, sieve);
    let blocks = map_chunks(from as usize..to as usize + 1, BLOCK, |block| {
        let lo = block.start as u64;
        let hi = block.end as u64;
        let mut half = vec![CompensatedSum::new(); block.len()];
        for (i, &(m1, l1)) in pp.iter().enumerate() {
            if 2 * m1 + 2 > hi {
                break;
            }
            let rest = &pp[i + 1..];
            let start = rest.partition_point(|&(m2, _)| m1 + m2 < lo);
            for &(m2, l2) in &rest[start..] {
                let n = m1 + m2;
                if n >= hi {
                    break;
                }
                half[(n - lo) as usize].add(l1 * l2);
            }
        }
        half.iter()
            .zip(lo..hi)
            .map(|(h, n)| {
                if n % 2 == 1 || n < 2 {
                    0.0
                } else {
                    2.0 * h.value() + diagonal(n, sieve)
                }
            })
            .collect::<Vec<f64>>()
    });
    Ok(blocks.concat())
}

/// `G(n)` for all `n ≤ limit` by a single convolution-style pass.
pub fn goldbach_g_all(limit: u64, sieve: &SieveTable) -> Result<Vec<f64>> {
    goldbach_g_range(0..=limit, sieve)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub n: u64,
    #[serde(rename = "G")]
    pub g: f64,
    pub singular_series: f64,
    pub ratio: f64,
    pub in_window: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioScan {
    pub n_from: u64,
    pub n_to: u64,
    pub delta: f64,
    pub records: Vec<RatioRecord>,
    pub violations: Vec<u64>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

pub const RATIO_CSV_HEADER: &str = "n,G,singular_series,ratio,in_window";

impl RatioScan {
    /// Mean of the ratio over records with `lo ≤ n ≤ hi`.
    pub fn mean_ratio(&self, lo: u64, hi: u64) -> Option<f64> {
        let sel: Vec<f64> = self
            .records
            .iter()
            .filter(|r| (lo..=hi).contains(&r.n))
            .map(|r| r.ratio)
            .collect();
        if sel.is_empty() {
            return None;
        }
        let total: CompensatedSum = sel.iter().copied().collect();
        Some(total.value() / sel.len() as f64)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.records.len() * 64);
        out.push_str(RATIO_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n,
                fmt_num(r.g),
                fmt_num(r.singular_series),
                fmt_num(r.ratio),
                r.in_window
            ));
        }
        out
    }
}

/// Scans `G(n) / (𝔖(n) n)` over even `n` in `[n_from, n_to]`.
pub fn ratio_scan(
    n_from: u64,
    n_to: u64,
    delta: f64,
    sieve: &SieveTable,
    ctx: &SingularSeriesCtx,
) -> Result<RatioScan> {
    if n_from % 2 == 1 || n_to % 2 == 1 {
        return Err(Error::Domain(format!(
            "scan endpoints must be even, got [{n_from}, {n_to}]"
        )));
    }
    if n_from < 4 || n_from > n_to {
        return Err(Error::Domain(format!(
            "scan needs 4 <= n_from <= n_to, got [{n_from}, {n_to}]"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta {delta} not in (0, 1)")));
    }
    sieve.require(n_to)?;
    let g = goldbach_g_range(n_from..=n_to, sieve)?;
    let h = hl_factor_table(n_to, sieve)?;
    let mut records = Vec::with_capacity(((n_to - n_from) / 2 + 1) as usize);
    let mut violations = Vec::new();
    let (mut min_ratio, mut max_ratio) = (f64::INFINITY, f64::NEG_INFINITY);
    for n in (n_from..=n_to).step_by(2) {
        let gn = g[(n - n_from) as usize];
        let ss = ctx.singular_series_from_h(h[n as usize]);
        let ratio = gn / (ss * n as f64);
        let in_window = ratio > delta && ratio < 2.0 - delta;
        if !in_window {
            violations.push(n);
        }
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
        records.push(RatioRecord {
            n,
            g: gn,
            singular_series: ss,
            ratio,
            in_window,
        });
    }
    Ok(RatioScan {
        n_from,
        n_to,
        delta,
        records,
        violations,
        min_ratio,
        max_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Ordered pairs, no shortcuts.
    fn brute_g(n: u64, sieve: &SieveTable) -> f64 {
        (1..n)
            .filter(|m| m % 2 == 1)
            .map(|m1| sieve.lambda(m1) * sieve.lambda(n - m1))
            .sum()
    }

    #[test]
    fn small_values() {
        let s = SieveTable::new(100).unwrap();
        assert_eq!(goldbach_g(4, &s).unwrap(), 0.0);
        let g6 = 3f64.ln().powi(2);
        assert!((goldbach_g(6, &s).unwrap() - g6).abs() < 1e-15);
        assert!((g6 - 1.206949).abs() < 1e-6);
        let g10 = 2.0 * 3f64.ln() * 7f64.ln() + 5f64.ln().powi(2);
        assert!((goldbach_g(10, &s).unwrap() - g10).abs() < 1e-14);
        assert!((g10 - 6.865892).abs() < 1e-6);
        for n in (2..=100).step_by(2) {
            assert!((goldbach_g(n, &s).unwrap() - brute_g(n, &s)).abs() < 1e-12);
        }
    }

    #[test]
    fn errors() {
        let s = SieveTable::new(50).unwrap();
        assert!(matches!(goldbach_g(60, &s), Err(Error::Size(_))));
        assert!(matches!(goldbach_g(1, &s), Err(Error::Domain(_))));
        assert!(matches!(goldbach_g_all(51, &s), Err(Error::Size(_))));
    }

    #[test]
    fn bulk_equals_single_bitwise() {
        let s = SieveTable::new(2_000).unwrap();
        let all = goldbach_g_all(2_000, &s).unwrap();
        assert_eq!(all.len(), 2_001);
        for n in (2..=2_000u64).step_by(2) {
            assert_eq!(all[n as usize].to_bits(), goldbach_g(n, &s).unwrap().to_bits(), "n={n}");
        }
        assert!(all.iter().skip(1).step_by(2).all(|&g| g == 0.0));
        assert_eq!(all[4], 0.0);
    }

    #[test]
    fn bulk_range_blocks_agree_with_full_pass() {
        let s = SieveTable::new(200_000).unwrap();
        let full = goldbach_g_all(200_000, &s).unwrap();
        let part = goldbach_g_range(150_002..=200_000, &s).unwrap();
        for (i, g) in part.iter().enumerate() {
            assert_eq!(g.to_bits(), full[150_002 + i].to_bits());
        }
    }

    #[test]
    fn swapped_pair_order_is_identical() {
        let s = SieveTable::new(3_000).unwrap();
        for n in (6..=3_000u64).step_by(2) {
            // iterate over the larger member of each pair, descending
            let mut half = CompensatedSum::new();
            let mut m2 = n - 3;
            while 2 * m2 > n {
                let m1 = n - m2;
                let (l1, l2) = (s.lambda(m1), s.lambda(m2));
                if l1 != 0.0 && l2 != 0.0 {
                    half.add(l1 * l2);
                }
                m2 -= 2;
            }
            let swapped = 2.0 * half.value() + diagonal(n, &s);
            assert_eq!(swapped.to_bits(), goldbach_g(n, &s).unwrap().to_bits());
        }
    }

    #[test]
    fn scan_small() {
        let s = SieveTable::new(1_000).unwrap();
        let ctx = SingularSeriesCtx::new(1_000_000).unwrap();
        let scan = ratio_scan(6, 6, 0.1, &s, &ctx).unwrap();
        assert_eq!(scan.records.len(), 1);
        let r = scan.records[0];
        assert!((r.ratio - 0.07618).abs() < 1e-5, "{}", r.ratio);
        assert_eq!(scan.violations, vec![6]);
        assert!(scan.min_ratio <= scan.max_ratio);

        let scan = ratio_scan(100, 1_000, 0.5, &s, &ctx).unwrap();
        assert_eq!(scan.records.len(), 451);
        let flagged: Vec<u64> = scan
            .records
            .iter()
            .filter(|r| !(r.ratio > 0.5 && r.ratio < 1.5))
            .map(|r| r.n)
            .collect();
        assert_eq!(flagged, scan.violations);
        assert!(scan.records.windows(2).all(|w| w[0].n + 2 == w[1].n));
    }

    #[test]
    fn scan_rejects_bad_input() {
        let s = SieveTable::new(1_000).unwrap();
        let ctx = SingularSeriesCtx::new(1_000).unwrap();
        assert!(matches!(ratio_scan(5, 10, 0.5, &s, &ctx), Err(Error::Domain(_))));
        assert!(matches!(ratio_scan(4, 11, 0.5, &s, &ctx), Err(Error::Domain(_))));
        assert!(matches!(ratio_scan(4, 10, 1.0, &s, &ctx), Err(Error::Domain(_))));
        assert!(matches!(ratio_scan(2, 10, 0.5, &s, &ctx), Err(Error::Domain(_))));
        assert!(matches!(ratio_scan(4, 2_000, 0.5, &s, &ctx), Err(Error::Size(_))));
    }

    #[test]
    fn csv_header_and_rows() {
        let s = SieveTable::new(100).unwrap();
        let ctx = SingularSeriesCtx::new(1_000).unwrap();
        let csv = ratio_scan(6, 10, 0.5, &s, &ctx).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,G,singular_series,ratio,in_window");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("6,1.20694896"));
        assert!(lines[1].ends_with(",false"));
    }
}

//! Zero search: sign changes of Hardy's function on the critical line,
//! completeness by the argument principle, and real zeros on `(0, 1)`.

use std::sync::Arc;

use num_complex::Complex64;

use super::argument::{count_zeros_in, locate_zeros_in, Rect};
use super::LFunction;
use crate::characters::{Character, CharacterGroup, CharacterId, RealZeroProvider};
use crate::error::{Error, Result};
use crate::format::fmt_num;

pub const MAX_ZERO_MODULUS: u64 = 100;
pub const MAX_ZERO_HEIGHT: f64 = 60.0;
pub const MAX_REGION_MODULUS: u64 = 50;
/// Bumped whenever the search tolerances change; part of the cache key.
pub const ZERO_TOLERANCE_VERSION: u32 = 1;
pub const ZERO_CSV_HEADER: &str = "q,chi,beta,gamma";

/// Real-part bounds of the counting rectangle.
const STRIP: (f64, f64) = (-0.5, 1.5);
const GRID_STEP: f64 = 0.05;
/// Keep contour edges at least this far from known zeros.
const EDGE_CLEARANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub beta: f64,
    pub gamma: f64,
}

impl Zero {
    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.beta, self.gamma)
    }
}

/// Nontrivial zeros of one `L(s, χ)` up to height `T`.
///
/// For real `χ` only `γ ≥ 0` is stored (zeros with `γ > 0` have conjugate
/// partners); for complex `χ` the list covers `−T ≤ γ ≤ T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroList {
    pub chi_id: CharacterId,
    pub height: f64,
    pub zeros: Vec<Zero>,
    pub count_verified: bool,
    /// Argument-principle count over the full symmetric rectangle.
    pub argument_count: i64,
    pub real_character: bool,
}

impl ZeroList {
    /// Every zero with `|γ| ≤ T`, conjugates included for real characters.
    pub fn all_zeros(&self) -> Vec<Zero> {
        let mut out = Vec::with_capacity(2 * self.zeros.len());
        for z in &self.zeros {
            out.push(*z);
            if self.real_character && z.gamma > 0.0 {
                out.push(Zero {
                    beta: z.beta,
                    gamma: -z.gamma,
                });
            }
        }
        out.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(ZERO_CSV_HEADER.split(',')).unwrap();
        let id = self.chi_id.to_string();
        for z in &self.zeros {
            w.write_record([
                self.chi_id.q.to_string(),
                id.clone(),
                fmt_num(z.beta),
                fmt_num(z.gamma),
            ])
            .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    /// Parses rows written by [`Self::to_csv`]; metadata comes from the caller.
    pub fn zeros_from_csv(text: &str, chi_id: &CharacterId) -> Result<Vec<Zero>> {
        let bad = |m: String| Error::Domain(format!("zero CSV: {m}"));
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers().map_err(|e| bad(e.to_string()))?;
        if header.iter().collect::<Vec<_>>().join(",") != ZERO_CSV_HEADER {
            return Err(bad(format!("unexpected header {header:?}")));
        }
        let mut zeros = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            if rec.len() != 4 {
                return Err(bad(format!("row has {} fields", rec.len())));
            }
            let q: u64 = rec[0].parse().map_err(|_| bad(format!("q {:?}", &rec[0])))?;
            let id: CharacterId = rec[1].parse()?;
            if q != chi_id.q || &id != chi_id {
                return Err(bad(format!("row for {id}, expected {chi_id}")));
            }
            let beta: f64 = rec[2].parse().map_err(|_| bad(format!("beta {:?}", &rec[2])))?;
            let gamma: f64 = rec[3].parse().map_err(|_| bad(format!("gamma {:?}", &rec[3])))?;
            zeros.push(Zero { beta, gamma });
        }
        Ok(zeros)
    }
}

/// Bisection on a sign change of `f` in `[a, b]` down to `tol`.
fn bisect_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Sign changes of Hardy's function on `[lo, hi]`, refined by bisection.
fn line_zeros(lf: &LFunction, lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    let h = (hi - lo) / n as f64;
    let z = |t: f64| lf.hardy_z(t);
    let mut out = Vec::new();
    let mut ta = lo;
    let mut za = z(ta);
    for k in 1..=n {
        let tb = lo + h * k as f64;
        let zb = z(tb);
        if za == 0.0 {
            out.push(ta);
        } else if (za < 0.0) != (zb < 0.0) && zb != 0.0 {
            out.push(bisect_root(z, ta, tb, za, 1e-13));
        }
        ta = tb;
        za = zb;
    }
    if za == 0.0 {
        out.push(ta);
    }
    out
}

/// A height in `[from, from + span]` (moving away from zero) far from every known zero.
fn clear_height(from: f64, span: f64, gammas: &[f64]) -> f64 {
    let dist = |t: f64| gammas.iter().map(|g| (g - t).abs()).fold(f64::INFINITY, f64::min);
    let dir = from.signum();
    (0..=100)
        .map(|k| from + dir * span * k as f64 / 100.0)
        .find(|&t| dist(t) > EDGE_CLEARANCE * 10.0)
        .unwrap_or(from)
}

fn phase_fn(lf: &LFunction) -> impl Fn(Complex64) -> (f64, Complex64) + '_ {
    move |s| lf.completed_phase(s)
}

fn check_zero_inputs(chi: &Character, height: f64) -> Result<()> {
    if chi.is_principal() {
        return Err(Error::Domain("zero search needs a non-principal character".into()));
    }
    if chi.modulus() > MAX_ZERO_MODULUS {
        return Err(Error::Size(format!(
            "zero search limited to q <= {MAX_ZERO_MODULUS}"
        )));
    }
    if !(height > 0.0 && height <= MAX_ZERO_HEIGHT) {
        return Err(Error::Domain(format!(
            "height {height} outside (0, {MAX_ZERO_HEIGHT}]"
        )));
    }
    Ok(())
}

/// All zeros of `L(s, χ)` with `0 < γ ≤ T` (real `χ`) or `|γ| ≤ T` (complex `χ`),
/// verified complete by the argument principle.
pub fn find_zeros(chi: &Character, height: f64, zero_tol: f64) -> Result<ZeroList> {
    check_zero_inputs(chi, height)?;
    let lf = LFunction::new(chi);
    let real = chi.is_real();
    let lo = if real { 0.0 } else { -height };
    let phase = phase_fn(&lf);

    let mut step = GRID_STEP;
    let mut expected = 0;
    let mut found = Vec::new();
    let mut offline: Vec<Complex64> = Vec::new();
    let mut verified = false;
    let real_zeros = if real {
        real_zeros_of(&lf, 1e-3, 1.0 - 1e-3)
    } else {
        Vec::new()
    };
    for _attempt in 0..3 {
        // search slightly past ±T so the contour edge can be placed away from zeros
        let reach = height + 0.5;
        let gammas = line_zeros(&lf, if real { 0.0 } else { -reach }, reach, step);
        let top = clear_height(height, 0.5, &gammas);
        let bottom = if real { -top } else { clear_height(-height, 0.5, &gammas) };
        let rect = Rect::new(STRIP.0, STRIP.1, bottom, top);
        expected = count_zeros_in(&phase, rect)?;
        let in_rect: Vec<f64> = gammas.iter().copied().filter(|g| *g >= bottom && *g <= top).collect();
        let line_count = if real {
            2 * in_rect.iter().filter(|g| **g > 0.0).count() as i64
        } else {
            in_rect.len() as i64
        };
        let have = line_count + real_zeros.len() as i64;
        found = gammas;
        if have == expected {
            verified = true;
            offline.clear();
            break;
        }
        // look for zeros off the critical line on both sides of it
        offline = off_line_search(&lf, bottom, top)?;
        let extra = offline.len() as i64;
        if have + extra == expected {
            verified = true;
            break;
        }
        step /= 8.0;
    }
    if !verified {
        return Err(Error::IncompleteZeroList {
            found: found.len(),
            expected,
        });
    }
    let mut zeros: Vec<Zero> = found
        .iter()
        .filter(|&&g| g >= lo && g <= height && !(real && g <= 0.0))
        .map(|&g| Zero { beta: 0.5, gamma: g })
        .collect();
    zeros.extend(real_zeros.iter().map(|&b| Zero { beta: b, gamma: 0.0 }));
    zeros.extend(
        offline
            .iter()
            .filter(|z| z.im >= lo && z.im <= height && !(real && z.im < 0.0))
            .map(|z| Zero { beta: z.re, gamma: z.im }),
    );
    zeros.sort_by(|a, b| a.gamma.total_cmp(&b.gamma).then(a.beta.total_cmp(&b.beta)));
    for z in &zeros {
        let v = lf.value(z.as_complex()).norm();
        if !(v < zero_tol) {
            return Err(Error::AccuracyLoss(format!(
                "|L| = {v:e} at listed zero {} + {}i exceeds {zero_tol:e}",
                z.beta, z.gamma
            )));
        }
    }
    Ok(ZeroList {
        chi_id: chi.id(),
        height,
        zeros,
        count_verified: true,
        argument_count: expected,
        real_character: real,
    })
}

/// Zeros strictly left or right of the critical line, by rectangle bisection.
fn off_line_search(lf: &LFunction, bottom: f64, top: f64) -> Result<Vec<Complex64>> {
    let phase = phase_fn(lf);
    let value = |s: Complex64| lf.primitive_value(s);
    let mut out = Vec::new();
    for (a, b) in [(STRIP.0, 0.5 - EDGE_CLEARANCE), (0.5 + EDGE_CLEARANCE, STRIP.1)] {
        out.extend(locate_zeros_in(&phase, &value, Rect::new(a, b, bottom, top))?);
    }
    Ok(out)
}

fn real_zeros_of(lf: &LFunction, lo: f64, hi: f64) -> Vec<f64> {
    let f = |x: f64| lf.primitive_value(Complex64::new(x, 0.0)).re;
    let n = 400;
    let h = (hi - lo) / n as f64;
    let mut out = Vec::new();
    let mut a = lo;
    let mut fa = f(a);
    for k in 1..=n {
        let b = lo + h * k as f64;
        let fb = f(b);
        if fa == 0.0 {
            out.push(a);
        } else if (fa < 0.0) != (fb < 0.0) && fb != 0.0 {
            out.push(bisect_root(f, a, b, fa, 1e-12));
        }
        a = b;
        fa = fb;
    }
    out
}

/// Sign changes of the real-valued `L(s, χ)` on `[lo, hi] ⊂ (0, 1)`.
pub fn real_zero_scan(chi: &Character, lo: f64, hi: f64) -> Result<Vec<f64>> {
    if !(0.0 < lo && lo < hi && hi < 1.0) {
        return Err(Error::Domain(format!("need 0 < lo < hi < 1, got [{lo}, {hi}]")));
    }
    if !chi.is_real() || chi.is_principal() {
        return Err(Error::Domain("real zero scan needs a real non-principal character".into()));
    }
    let lf = LFunction::new(chi);
    Ok(real_zeros_of(&lf, lo, hi))
}

/// Real-zero provider backed by [`real_zero_scan`] over `[lo, hi]`.
#[derive(Debug, Clone, Copy)]
pub struct LfuncZeros {
    pub lo: f64,
    pub hi: f64,
}

impl Default for LfuncZeros {
    fn default() -> Self {
        Self { lo: 0.01, hi: 0.999 }
    }
}

impl RealZeroProvider for LfuncZeros {
    fn real_zeros(&self, chi: &Character) -> Result<Vec<f64>> {
        real_zero_scan(chi, self.lo, self.hi)
    }
}

/// Zero count `N(α, T)` over all characters mod `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionCount {
    pub count: i64,
    pub per_character: Vec<(CharacterId, i64)>,
    /// Left edge actually used (moved left when the requested edge grazed zeros).
    pub alpha_used: f64,
    pub height_used: f64,
}

/// Zeros `ρ = β + iγ` with `α ≤ β < 1`, `|γ| ≤ T` of every non-principal
/// `L(s, χ)` mod `q`, by the argument principle. When an edge passes within
/// reach of a zero the left edge moves left and the horizontal edges move
/// out, in steps of `2·10⁻³`, up to five times.
pub fn zero_count_region(
    group: &Arc<CharacterGroup>,
    alpha: f64,
    height: f64,
    exclude: Option<(&Character, f64)>,
) -> Result<RegionCount> {
    if !(0.5..=1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha {alpha} outside [1/2, 1]")));
    }
    if !(height >= 2.0) {
        return Err(Error::Domain(format!("T = {height} below 2")));
    }
    if group.modulus() > MAX_REGION_MODULUS {
        return Err(Error::Size(format!(
            "region counts limited to q <= {MAX_REGION_MODULUS}"
        )));
    }
    let chars: Vec<Character> = group
        .characters()
        .into_iter()
        .filter(|c| !c.is_principal())
        .collect();
    let mut last_err = None;
    for k in 0..6 {
        let shift = 2e-3 * k as f64;
        let rect = Rect::new(alpha - shift, STRIP.1, -height - shift, height + shift);
        let mut per = Vec::with_capacity(chars.len());
        let mut failed = false;
        for chi in &chars {
            let lf = LFunction::new(chi);
            let counted = count_zeros_in(&phase_fn(&lf), rect);
            match counted {
                Ok(mut n) => {
                    if let Some((ex, beta)) = exclude {
                        if ex == chi && beta >= rect.re_lo && beta < 1.0 {
                            n -= 1;
                        }
                    }
                    per.push((chi.id(), n));
                }
                Err(e) => {
                    last_err = Some(e);
                    failed = true;
                    break;
                }
            }
        }
        if !failed {
            return Ok(RegionCount {
                count: per.iter().map(|(_, n)| n).sum(),
                per_character: per,
                alpha_used: rect.re_lo,
                height_used: rect.im_hi,
            });
        }
    }
    Err(last_err.unwrap_or_else(|| Error::ContourNearZero("region count".into())))
}

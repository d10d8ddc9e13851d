//! Argument-principle zero counting on rectangles.
//!
//! The counted function is supplied as `s ↦ (|f(s)|, f(s)/|f(s)|)`, so
//! callers can drop factors that only affect the modulus (and would
//! otherwise under- or overflow).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl Rect {
    pub fn new(re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> Self {
        Self {
            re_lo,
            re_hi,
            im_lo,
            im_hi,
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (self.re_lo..self.re_hi).contains(&z.re) && (self.im_lo..self.im_hi).contains(&z.im)
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_lo, self.im_lo),
            Complex64::new(self.re_hi, self.im_lo),
            Complex64::new(self.re_hi, self.im_hi),
            Complex64::new(self.re_lo, self.im_hi),
        ]
    }
}

const SEGMENT: f64 = 0.25;
const MAX_DEPTH: u32 = 40;
const NEAR_ZERO: f64 = 1e-13;

struct Walker<'a, F> {
    f: &'a F,
}

impl<F: Fn(Complex64) -> (f64, Complex64)> Walker<'_, F> {
    fn sample(&self, z: Complex64) -> Result<Complex64> {
        let (m, u) = (self.f)(z);
        if !(m > NEAR_ZERO) || !u.re.is_finite() || !u.im.is_finite() {
            return Err(Error::ContourNearZero(format!("|f| = {m:e} at {z}")));
        }
        Ok(u)
    }

    fn edge(&self, a: Complex64, b: Complex64) -> Result<f64> {
        let pieces = ((b - a).norm() / SEGMENT).ceil().max(1.0) as usize;
        let mut total = 0.0;
        let mut za = a;
        let mut ua = self.sample(a)?;
        for k in 1..=pieces {
            let zb = a + (b - a) * (k as f64 / pieces as f64);
            let ub = self.sample(zb)?;
            total += self.adaptive(za, zb, ua, ub, 0)?;
            za = zb;
            ua = ub;
        }
        Ok(total)
    }

    fn adaptive(&self, a: Complex64, b: Complex64, ua: Complex64, ub: Complex64, depth: u32) -> Result<f64> {
        let m = (a + b) / 2.0;
        let um = self.sample(m)?;
        let d_ab = (ub / ua).arg();
        let d_am = (um / ua).arg();
        let d_mb = (ub / um).arg();
        if d_am.abs() < PI / 4.0 && d_mb.abs() < PI / 4.0 && (d_am + d_mb - d_ab).abs() < 1e-9 {
            return Ok(d_ab);
        }
        if depth >= MAX_DEPTH {
            return Err(Error::ContourNearZero(format!(
                "phase unresolved between {a} and {b}"
            )));
        }
        Ok(self.adaptive(a, m, ua, um, depth + 1)? + self.adaptive(m, b, um, ub, depth + 1)?)
    }
}

/// Number of zeros inside `rect`, by the total phase change along its
/// boundary. Fails when the boundary passes (numerically) through a zero.
pub fn count_zeros_in<F>(f: &F, rect: Rect) -> Result<i64>
where
    F: Fn(Complex64) -> (f64, Complex64),
{
    let w = Walker { f };
    let c = rect.corners();
    let mut total = 0.0;
    for i in 0..4 {
        total += w.edge(c[i], c[(i + 1) % 4])?;
    }
    let winding = total / (2.0 * PI);
    let n = winding.round();
    if (winding - n).abs() > 0.05 {
        return Err(Error::ContourNearZero(format!(
            "non-integral winding {winding:.4}"
        )));
    }
    Ok(n as i64)
}

/// Locates all zeros inside `rect` by bisecting with the argument principle,
/// then polishing each isolated zero with Newton's method on `value`.
pub fn locate_zeros_in<F, G>(phase: &F, value: &G, rect: Rect) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> (f64, Complex64),
    G: Fn(Complex64) -> Complex64,
{
    let count = count_with_shift(phase, rect)?;
    let mut out = Vec::new();
    bisect(phase, value, rect, count, 0, &mut out)?;
    out.sort_by(|a, b| a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re)));
    Ok(out)
}

/// Counts, nudging the rectangle outwards when an edge grazes a zero.
fn count_with_shift<F>(phase: &F, rect: Rect) -> Result<i64>
where
    F: Fn(Complex64) -> (f64, Complex64),
{
    let mut last = None;
    for k in 0..6 {
        let d = 1.7e-4 * k as f64;
        let r = Rect::new(rect.re_lo - d, rect.re_hi + d, rect.im_lo - d, rect.im_hi + d);
        match count_zeros_in(phase, r) {
            Ok(n) => return Ok(n),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

fn bisect<F, G>(phase: &F, value: &G, rect: Rect, count: i64, depth: u32, out: &mut Vec<Complex64>) -> Result<()>
where
    F: Fn(Complex64) -> (f64, Complex64),
    G: Fn(Complex64) -> Complex64,
{
    if count == 0 {
        return Ok(());
    }
    let width = rect.re_hi - rect.re_lo;
    let height = rect.im_hi - rect.im_lo;
    if count == 1 && width.max(height) < 0.05 {
        let start = Complex64::new((rect.re_lo + rect.re_hi) / 2.0, (rect.im_lo + rect.im_hi) / 2.0);
        out.push(newton(value, start)?);
        return Ok(());
    }
    if depth > 60 {
        return Err(Error::ContourNearZero(format!(
            "cannot separate {count} zeros in {rect:?}"
        )));
    }
    // split slightly off-centre so the cut avoids symmetric zero positions
    let (a, b) = if width >= height {
        let cut = rect.re_lo + 0.4937 * width;
        (
            Rect::new(rect.re_lo, cut, rect.im_lo, rect.im_hi),
            Rect::new(cut, rect.re_hi, rect.im_lo, rect.im_hi),
        )
    } else {
        let cut = rect.im_lo + 0.4937 * height;
        (
            Rect::new(rect.re_lo, rect.re_hi, rect.im_lo, cut),
            Rect::new(rect.re_lo, rect.re_hi, cut, rect.im_hi),
        )
    };
    let na = count_zeros_in(phase, a)?;
    let nb = count - na;
    bisect(phase, value, a, na, depth + 1, out)?;
    bisect(phase, value, b, nb, depth + 1, out)
}

fn newton<G: Fn(Complex64) -> Complex64>(value: &G, start: Complex64) -> Result<Complex64> {
    let h = 1e-6;
    let mut z = start;
    for _ in 0..60 {
        let fz = value(z);
        let d = (value(z + h) - value(z - h)) / (2.0 * h);
        let step = fz / d;
        z -= step;
        if step.norm() < 1e-14 {
            return Ok(z);
        }
    }
    if value(z).norm() < 1e-9 {
        Ok(z)
    } else {
        Err(Error::ContourNearZero(format!("Newton did not converge near {start}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(roots: &[Complex64]) -> impl Fn(Complex64) -> Complex64 + '_ {
        move |z| roots.iter().map(|r| z - r).product()
    }

    fn as_phase<G: Fn(Complex64) -> Complex64>(g: G) -> impl Fn(Complex64) -> (f64, Complex64) {
        move |z| {
            let v = g(z);
            (v.norm(), v / v.norm())
        }
    }

    #[test]
    fn counts_polynomial_roots() {
        let roots = [
            Complex64::new(0.7, 3.0),
            Complex64::new(0.3, 3.0),
            Complex64::new(0.5, 5.0),
            Complex64::new(0.5, -2.0),
        ];
        let f = as_phase(poly(&roots));
        assert_eq!(count_zeros_in(&f, Rect::new(-0.5, 1.5, 0.0, 10.0)).unwrap(), 3);
        assert_eq!(count_zeros_in(&f, Rect::new(-0.5, 1.5, -10.0, 10.0)).unwrap(), 4);
        assert_eq!(count_zeros_in(&f, Rect::new(0.6, 1.5, 0.0, 10.0)).unwrap(), 1);
        assert_eq!(count_zeros_in(&f, Rect::new(0.8, 1.5, 0.0, 10.0)).unwrap(), 0);
    }

    #[test]
    fn edge_through_zero_is_reported() {
        let roots = [Complex64::new(0.5, 3.0)];
        let f = as_phase(poly(&roots));
        let r = count_zeros_in(&f, Rect::new(0.5, 1.5, 0.0, 10.0));
        assert!(matches!(r, Err(Error::ContourNearZero(_))), "{r:?}");
    }

    #[test]
    fn locates_off_line_roots() {
        let roots = [
            Complex64::new(0.7, 3.0),
            Complex64::new(0.3, 3.0),
            Complex64::new(0.5, 5.25),
        ];
        let g = poly(&roots);
        let f = as_phase(poly(&roots));
        let found = locate_zeros_in(&f, &g, Rect::new(-0.5, 1.5, 0.0, 10.0)).unwrap();
        assert_eq!(found.len(), 3);
        for r in &roots {
            assert!(found.iter().any(|z| (z - r).norm() < 1e-10), "{r}");
        }
    }
}

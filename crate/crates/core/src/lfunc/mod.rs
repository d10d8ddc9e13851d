//! Dirichlet L-functions for small moduli.
//!
//! `L(s, χ) = q^{−s} Σ_{a=1}^{q} χ(a) ζ(s, a/q)` with every Hurwitz zeta
//! evaluated by Euler–Maclaurin. The pole terms `x^{1−s}/(s−1)` are combined
//! across residues before dividing, so non-principal characters evaluate
//! cleanly at `s = 1`.
//!
//! Zero searches work with the inducing primitive character `χ*` mod the
//! conductor `q*`: the completed function
//! `Λ(s) = (q*/π)^{(s+a)/2} Γ((s+a)/2) L(s, χ*)` is entire, has only the
//! nontrivial zeros, and `ε^{−1/2} Λ(½ + it)` is real.

mod argument;
mod explicit;
pub mod gamma;
pub mod hurwitz;
mod zeros;

pub use argument::{count_zeros_in, locate_zeros_in, Rect};
pub use explicit::{explicit_formula_residual, ExplicitResidual, DEFAULT_EXPLICIT_CONSTANT};
pub use zeros::{
    find_zeros, real_zero_scan, zero_count_region, LfuncZeros, Zero, ZeroList, ZERO_CSV_HEADER,
    ZERO_TOLERANCE_VERSION,
};

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::arith::{factorize, gcd};
use crate::characters::{CharTable, Character};
use crate::error::{Error, Result};
use gamma::ln_gamma;
use hurwitz::{direct_terms_for, em_correction, exprel};

/// Euler–Maclaurin corrections used for L-values.
pub const EM_TERMS: usize = 20;
/// Height up to which the target accuracy `1e-10` is expected.
pub const ACCURATE_HEIGHT: f64 = 60.0;
pub const MAX_HEIGHT: f64 = 200.0;
pub const RE_RANGE: (f64, f64) = (-2.0, 3.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LValue {
    pub value: Complex64,
    /// Set when `|Im s|` exceeds [`ACCURATE_HEIGHT`].
    pub accuracy_loss: bool,
}

/// `Σ_{m ≥ 1} χ(m) m^{−s}` for a periodic table, via Hurwitz zeta.
fn eval_table(table: &CharTable, s: Complex64) -> Complex64 {
    let q = table.modulus;
    let qf = q as f64;
    let blocks = direct_terms_for(s, EM_TERMS);
    let mut direct = Complex64::new(0.0, 0.0);
    for m in 1..=(blocks as u64 * q) {
        let c = table.eval(m);
        if c.re != 0.0 || c.im != 0.0 {
            direct += c * (-s * (m as f64).ln()).exp();
        }
    }
    let q_ms = (-s * qf.ln()).exp();
    let principal_sum: Complex64 = table.values.iter().sum();
    let nonprincipal = principal_sum.norm() < 1e-9;
    let x0 = blocks as f64;
    let mut tail = Complex64::new(0.0, 0.0);
    for a in 1..=q {
        let c = table.eval(a);
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        let x = x0 + a as f64 / qf;
        let pole = if nonprincipal {
            // (x^{1−s} − x0^{1−s}) / (s − 1), the x0 part cancels over a
            let r = (x / x0).ln();
            -(-(s - 1.0) * x0.ln()).exp() * r * exprel(-(s - 1.0) * r)
        } else {
            (-(s - 1.0) * x.ln()).exp() / (s - 1.0)
        };
        tail += c * (pole + em_correction(s, x, EM_TERMS));
    }
    direct + q_ms * tail
}

/// L-function of one character, with its primitive data precomputed.
#[derive(Debug, Clone)]
pub struct LFunction {
    chi: Character,
    table: CharTable,
    primitive: CharTable,
    parity: u32,
    root_number: Complex64,
    /// `(p, χ*(p))` for primes dividing `q` but not the conductor.
    euler_factors: Vec<(u64, Complex64)>,
}

impl LFunction {
    pub fn new(chi: &Character) -> Self {
        let table = chi.table();
        let primitive = chi.primitive_table();
        let parity = if chi.parity() == 1 { 0 } else { 1 };
        let conductor = primitive.modulus;
        let euler_factors = factorize(chi.modulus())
            .expect("modulus >= 1")
            .primes()
            .filter(|p| conductor % p != 0)
            .map(|p| (p, primitive.eval(p)))
            .collect();
        let root_number = root_number(&primitive, parity);
        Self {
            chi: chi.clone(),
            table,
            primitive,
            parity,
            root_number,
            euler_factors,
        }
    }

    pub fn character(&self) -> &Character {
        &self.chi
    }

    pub fn conductor(&self) -> u64 {
        self.primitive.modulus
    }

    /// `0` for even, `1` for odd characters.
    pub fn parity_exponent(&self) -> u32 {
        self.parity
    }

    pub fn root_number(&self) -> Complex64 {
        self.root_number
    }

    pub fn is_real(&self) -> bool {
        self.chi.is_real()
    }

    /// `L(s, χ)` with range and pole checks.
    pub fn eval(&self, s: Complex64) -> Result<LValue> {
        if !(RE_RANGE.0..=RE_RANGE.1).contains(&s.re) || s.im.abs() > MAX_HEIGHT {
            return Err(Error::AccuracyLoss(format!(
                "s = {s} outside Re s in [{}, {}], |Im s| <= {MAX_HEIGHT}",
                RE_RANGE.0, RE_RANGE.1
            )));
        }
        if self.chi.is_principal() && (s - 1.0).norm() < 1e-6 {
            return Err(Error::Pole(format!("principal L(s) at s = {s}")));
        }
        Ok(LValue {
            value: eval_table(&self.table, s),
            accuracy_loss: s.im.abs() > ACCURATE_HEIGHT,
        })
    }

    /// `L(s, χ)` without range checks.
    pub fn value(&self, s: Complex64) -> Complex64 {
        eval_table(&self.table, s)
    }

    /// `L(s, χ*)` for the inducing primitive character.
    pub fn primitive_value(&self, s: Complex64) -> Complex64 {
        eval_table(&self.primitive, s)
    }

    /// `Π (1 − χ*(p) p^{−s})` over primes of `q` missing from the conductor.
    pub fn euler_factor(&self, s: Complex64) -> Complex64 {
        self.euler_factors
            .iter()
            .map(|&(p, c)| 1.0 - c * (-s * (p as f64).ln()).exp())
            .product()
    }

    /// `ln` of the gamma factor `(q*/π)^{(s+a)/2} Γ((s+a)/2)`.
    pub fn ln_gamma_factor(&self, s: Complex64) -> Complex64 {
        let w = (s + self.parity as f64) / 2.0;
        w * (self.conductor() as f64 / PI).ln() + ln_gamma(w)
    }

    /// `Λ(s, χ*)` as `(|L(s, χ*)|, e^{i arg Λ})`; the gamma factor's modulus is
    /// dropped because only the phase and the nearness to zero matter.
    pub fn completed_phase(&self, s: Complex64) -> (f64, Complex64) {
        let l = self.primitive_value(s);
        let g = self.ln_gamma_factor(s);
        let phase = Complex64::from_polar(1.0, g.im) * l / l.norm();
        (l.norm(), phase)
    }

    /// Rotation `θ(t)` with `e^{iθ(t)} L(½ + it, χ*)` real.
    pub fn theta(&self, t: f64) -> f64 {
        self.ln_gamma_factor(Complex64::new(0.5, t)).im - 0.5 * self.root_number.arg()
    }

    /// Hardy's function: real-valued, `|Z(t)| = |L(½ + it, χ*)|`.
    pub fn hardy_z(&self, t: f64) -> f64 {
        self.hardy_z_complex(t).re
    }

    /// Same as [`Self::hardy_z`] before taking the real part; the imaginary
    /// part vanishes up to rounding when the root number is right.
    pub fn hardy_z_complex(&self, t: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.theta(t)) * self.primitive_value(Complex64::new(0.5, t))
    }
}

/// `ε(χ) = τ(χ) / (i^a √q)` for a primitive table.
fn root_number(prim: &CharTable, parity: u32) -> Complex64 {
    let q = prim.modulus;
    if q == 1 {
        return Complex64::new(1.0, 0.0);
    }
    let tau: Complex64 = (1..=q)
        .filter(|&a| gcd(a, q) == 1)
        .map(|a| prim.eval(a) * Complex64::from_polar(1.0, 2.0 * PI * a as f64 / q as f64))
        .sum();
    let i_a = if parity == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::i()
    };
    tau / (i_a * (q as f64).sqrt())
}

/// `L(s, χ)` for a character, range-checked.
pub fn l_eval(chi: &Character, s: Complex64) -> Result<LValue> {
    LFunction::new(chi).eval(s)
}

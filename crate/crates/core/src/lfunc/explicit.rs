use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::gamma::ln_gamma;
use super::zeros::ZeroList;
use crate::arith::SieveTable;
use crate::characters::Character;
use crate::error::{Error, Result};
use crate::series::{p_chi, SeriesParams};

pub const DEFAULT_EXPLICIT_CONSTANT: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplicitResidual {
    pub chi: String,
    #[serde(rename = "N")]
    pub n_scale: f64,
    #[serde(rename = "T")]
    pub height: f64,
    pub p_chi_re: f64,
    pub p_chi_im: f64,
    pub zero_sum_re: f64,
    pub zero_sum_im: f64,
    pub zeros_used: usize,
    pub residual: f64,
    pub bound: f64,
    /// Size of the omitted zeros above `T`, roughly `N e^{−πT/2}` times the zero density.
    pub gamma_tail: f64,
    pub within_bound: bool,
}

/// `|P(χ) + Σ_ρ Γ(ρ) N^ρ|` over the verified zeros with `β ≥ ½`, against
/// `C √N (log N)²`.
pub fn explicit_formula_residual(
    chi: &Character,
    params: &SeriesParams,
    sieve: &SieveTable,
    zeros: &ZeroList,
    constant: f64,
) -> Result<ExplicitResidual> {
    if chi.is_principal() {
        return Err(Error::Domain("explicit formula needs a non-principal character".into()));
    }
    if !zeros.count_verified {
        return Err(Error::IncompleteZeroList {
            found: zeros.zeros.len(),
            expected: zeros.argument_count,
        });
    }
    if zeros.chi_id != chi.id() {
        return Err(Error::Domain(format!(
            "zero list is for {}, not {}",
            zeros.chi_id,
            chi.id()
        )));
    }
    let n = params.n_scale;
    let p = p_chi(chi, params, sieve)?;
    let ln_n = n.ln();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut used = 0;
    for z in zeros.all_zeros().iter().filter(|z| z.beta >= 0.5) {
        let rho = z.as_complex();
        sum += (ln_gamma(rho) + rho * ln_n).exp();
        used += 1;
    }
    let residual = (p + sum).norm();
    let bound = constant * n.sqrt() * ln_n * ln_n;
    let t = zeros.height;
    let density = (t.max(2.0) * chi.modulus() as f64 / (2.0 * PI)).ln().max(1.0);
    let gamma_tail = n * density * (-PI * t / 2.0).exp() * t.max(1.0).powf(-0.5);
    Ok(ExplicitResidual {
        chi: chi.id().to_string(),
        n_scale: n,
        height: t,
        p_chi_re: p.re,
        p_chi_im: p.im,
        zero_sum_re: sum.re,
        zero_sum_im: sum.im,
        zeros_used: used,
        residual,
        bound,
        gamma_tail,
        within_bound: residual <= bound,
    })
}

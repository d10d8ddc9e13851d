//! Hurwitz zeta by Euler–Maclaurin summation.

use num_complex::Complex64;

/// `(numerator, denominator)` of `B_2, B_4, …, B_40`.
const BERNOULLI: [(f64, f64); 20] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
    (-7709321041217.0, 510.0),
    (2577687858367.0, 6.0),
    (-26315271553053477373.0, 1919190.0),
    (2929993913841559.0, 6.0),
    (-261082718496449122051.0, 13530.0),
];

pub const MAX_EM_TERMS: usize = BERNOULLI.len();

/// `B_{2j} / (2j)!` for `j = 1..=terms`.
fn em_coefficients(terms: usize) -> impl Iterator<Item = f64> {
    let mut fact = 1.0f64;
    BERNOULLI.iter().take(terms).enumerate().map(move |(j, &(n, d))| {
        let k = 2 * (j + 1);
        fact *= ((k - 1) * k) as f64;
        n / d / fact
    })
}

/// Euler–Maclaurin correction `x^{−s}/2 + Σ_j B_{2j}/(2j)! (s)_{2j−1} x^{−s−2j+1}`,
/// everything in the tail except the `x^{1−s}/(s−1)` term.
pub fn em_correction(s: Complex64, x: f64, terms: usize) -> Complex64 {
    let ln_x = x.ln();
    let x_ms = (-s * ln_x).exp();
    let mut total = 0.5 * x_ms;
    // rising factorial (s)_{2j−1} times x^{−s−2j+1}
    let mut factor = s * x_ms / x;
    let inv_x2 = 1.0 / (x * x);
    for (j, c) in em_coefficients(terms.min(MAX_EM_TERMS)).enumerate() {
        total += c * factor;
        let k = (2 * j + 1) as f64;
        factor *= (s + k) * (s + k + 1.0) * inv_x2;
    }
    total
}

/// Number of direct terms that keeps the Euler–Maclaurin remainder near
/// machine precision for `terms` corrections.
pub fn direct_terms_for(s: Complex64, terms: usize) -> usize {
    ((s.norm() + 2.0 * terms as f64) / std::f64::consts::PI).ceil() as usize + 10
}

/// `ζ(s, a) = Σ_{n ≥ 0} (n + a)^{−s}` for `a > 0`, `s ≠ 1`.
pub fn hurwitz_zeta(s: Complex64, a: f64, terms: usize) -> Complex64 {
    let n = direct_terms_for(s, terms);
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..n {
        total += (-s * (k as f64 + a).ln()).exp();
    }
    let x = n as f64 + a;
    total + (-(s - 1.0) * x.ln()).exp() / (s - 1.0) + em_correction(s, x, terms)
}

/// Riemann zeta for real `s > 1` with `terms` Euler–Maclaurin corrections.
pub fn zeta_real(s: f64, terms: usize) -> f64 {
    hurwitz_zeta(Complex64::new(s, 0.0), 1.0, terms).re
}

/// `(e^z − 1) / z`, stable near zero.
pub fn exprel(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)))
    } else {
        (z.exp() - 1.0) / z
    }
}

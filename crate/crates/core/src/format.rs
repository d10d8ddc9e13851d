//! Fixed number formatting shared by every report: 12 significant digits,
//! scientific notation below 1e-4 in magnitude (and at or above 1e15).

pub const SIG_DIGITS: usize = 12;

pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let a = x.abs();
    if !(1e-4..1e15).contains(&a) {
        return format!("{:.*e}", SIG_DIGITS - 1, x);
    }
    // the decimal exponent after rounding to SIG_DIGITS
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    trim_zeros(s)
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Rounds to the formatted precision so JSON output is stable.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-2.5), "-2.5");
        assert_eq!(fmt_num(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_num(123456.789012345), "123456.789012");
        assert_eq!(fmt_num(9.9999999999999e-1), "1");
        assert_eq!(fmt_num(1.5e-5), "1.50000000000e-5");
        assert_eq!(fmt_num(2e20), "2.00000000000e20");
        assert_eq!(fmt_num(1e-4), "0.0001");
    }

    #[test]
    fn round_sig_is_idempotent() {
        let x = round_sig(1.0 / 3.0);
        assert_eq!(round_sig(x), x);
        assert_eq!(fmt_num(x), "0.333333333333");
    }
}

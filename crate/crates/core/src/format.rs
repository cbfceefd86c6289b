//! Fixed significant-digit rendering for reports.

/// `x` rounded to `digits` significant digits, positional unless the
/// exponent is very large or small.
pub fn sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..15).contains(&exp) {
        return sci;
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let rounded: f64 = mantissa.parse::<f64>().expect("mantissa") * 10f64.powi(exp);
    let s = format!("{rounded:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Ten significant digits.
pub fn sig10(x: f64) -> String {
    sig(x, 10)
}

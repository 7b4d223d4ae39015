//! Decimal formatting with a fixed number of significant digits.

/// Formats `x` with `digits` significant digits.
///
/// Positional notation is used for decimal exponents in `[-5, digits)`,
/// scientific notation otherwise. Trailing zeros are kept so that every value
/// carries the same precision.
pub fn format_sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return if digits == 1 {
            "0".to_string()
        } else {
            format!("{:.*}", digits - 1, 0.0)
        };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (_, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        return sci;
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

/// Fifteen significant digits, the precision used by every CSV column.
pub fn real(x: f64) -> String {
    format_sig(x, 15)
}

/// Seventeen significant digits: enough to round-trip any `f64`.
pub fn real_exact(x: f64) -> String {
    format_sig(x, 17)
}

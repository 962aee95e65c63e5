//! Locale-independent number rendering with 12 significant digits.

pub const SIG_DIGITS: usize = 12;

/// `%.12g`-style rendering: fixed notation for decimal exponents in
/// `-4..12`, scientific otherwise, trailing zeros trimmed. Infinities are
/// written `inf`/`-inf`, and negative zero as `0`.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // Round to the target precision first so the exponent reflects any carry.
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Same as [`num`] for an optional value, empty when absent.
pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

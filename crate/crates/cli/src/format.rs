//! Number formatting for CSV and single-line outputs.

use crowdrate::bounds::RateBound;

/// `value` rounded to `digits` significant digits in plain decimal
/// notation, trailing zeros removed. Infinite values print as `inf`.
pub fn sig(value: f64, digits: usize) -> String {
    if value.is_nan() {
        return "nan".into();
    }
    if value.is_infinite() {
        return if value > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if value == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    // Round in scientific form first so the exponent reflects carries.
    let sci = format!("{:.*e}", digits - 1, value);
    let exponent: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    let rounded: f64 = sci.parse().unwrap_or(value);
    let mut text = format!("{rounded:.decimals$}");
    if text.contains('.') {
        text = text.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if text == "-0" {
        text = "0".into();
    }
    text
}

pub fn rate(bound: RateBound, digits: usize) -> String {
    match bound {
        RateBound::Feasible(v) => sig(v, digits),
        RateBound::Infeasible => "inf".into(),
    }
}

pub fn optional(value: Option<f64>, digits: usize) -> String {
    value.map(|v| sig(v, digits)).unwrap_or_default()
}

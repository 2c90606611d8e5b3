//! Output formatting helpers: significant-digit numbers for CSV and
//! JSON-safe serialization of extended reals.

use serde::Serializer;

/// Serialize a possibly infinite f64: finite values as numbers, infinities
/// as the strings `"inf"` / `"-inf"` (plain JSON has no infinity literal).
pub fn ser_ext_real<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// Format with `sig` significant digits, plain decimal notation, trailing
/// zeros trimmed. CSV output uses 6 significant digits throughout.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let mag = x.abs().log10().floor() as i32;
    let places = sig as i32 - 1 - mag;
    if places >= 0 && places <= 17 {
        trim_zeros(format!("{:.*}", places as usize, x))
    } else if places < 0 && mag < 18 {
        // Large magnitude: round away the digits beyond `sig`.
        let factor = 10f64.powi(-places);
        format!("{:.0}", (x / factor).round() * factor)
    } else {
        // Fall back to scientific notation for extreme magnitudes.
        format!("{:.*e}", sig - 1, x)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

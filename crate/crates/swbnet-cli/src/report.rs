//! Report formatting helpers.

/// Formats a float with 10 significant digits in plain decimal notation,
/// the fixed precision of every CSV report; byte-stable for regression
/// tests.
pub fn fmt_sig10(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (9 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Empty cell for an absent value, `fmt_sig10` otherwise.
pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_sig10).unwrap_or_default()
}

//! Fixed-precision float rendering for reproducible reports.

/// Round to `digits` significant decimal digits.
///
/// Rendering the result with `{}` prints at most `digits` significant
/// digits, which keeps serialized reports byte-stable across platforms.
pub fn round_significant(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let digits = digits.max(1);
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

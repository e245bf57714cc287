//! Ten-significant-digit number formatting shared by every CSV/JSON writer.

pub const SIGNIFICANT_DIGITS: i32 = 10;

/// Formats `x` with ten significant digits, in positional notation for
/// moderate magnitudes and scientific notation otherwise. Trailing zeros
/// are kept so column widths are stable.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded = round_sig(x);
    let exp = rounded.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS - 1 - exp).max(0) as usize;
        format!("{rounded:.decimals$}")
    } else {
        format!("{:.*e}", (SIGNIFICANT_DIGITS - 1) as usize, rounded)
    }
}

/// Rounds to ten significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", (SIGNIFICANT_DIGITS - 1) as usize, x)
        .parse()
        .unwrap_or(x)
}

/// Rounds every float inside a JSON value to ten significant digits.
pub fn round_json(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Number(num) if num.is_f64() => {
            if let Some(r) = num
                .as_f64()
                .and_then(|f| serde_json::Number::from_f64(round_sig(f)))
            {
                *num = r;
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_json),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

//! Plain-text number formatting for CSV output.

/// Significant digits written for every CSV number.
pub const CSV_DIGITS: usize = 12;

/// Formats `v` with [`CSV_DIGITS`] significant digits and a '.' separator.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let magnitude = v.abs().log10().floor() as i32;
    if !(-4..15).contains(&magnitude) {
        return format!("{:.*e}", CSV_DIGITS - 1, v);
    }
    let decimals = (CSV_DIGITS as i32 - 1 - magnitude).max(0) as usize;
    format!("{v:.decimals$}")
}

pub fn csv_row<I, S>(fields: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut line = fields
        .into_iter()
        .map(|s| s.as_ref().to_string())
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(2.0 * 2f64.sqrt()), "2.82842712475");
        assert_eq!(fmt_num(0.8), "0.800000000000");
        assert_eq!(fmt_num(-0.0123456789012345), "-0.0123456789012");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(1.5e-7), "1.50000000000e-7");
    }

    #[test]
    fn parses_back_within_tolerance() {
        for v in [0.766588417465459, 1e-3 / 3.0, 123.456789, -2.5] {
            let back: f64 = fmt_num(v).parse().unwrap();
            assert!((back - v).abs() <= 1e-11 * v.abs());
        }
    }
}

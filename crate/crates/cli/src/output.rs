use std::fs;
use std::io::{self, Write};
use std::path::Path;

use funk_core::Point;

use crate::CliError;

pub const SIG_DIGITS: usize = 12;

/// Decimal with `SIG_DIGITS` significant digits; zero prints as `0.000000000000`, and
/// magnitudes below 1e-6 switch to exponent form.
pub fn num(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return format!("{:.*}", SIG_DIGITS, 0.0);
    }
    // round first so that 9.9999999999996 lands in the right decade
    let rounded = round_sig(v);
    let exp = rounded.abs().log10().floor() as i64;
    if exp < -6 {
        return format!("{:.*e}", SIG_DIGITS - 1, rounded);
    }
    let decimals = (SIG_DIGITS as i64 - 1 - exp).max(0) as usize;
    let s = format!("{:.*}", decimals, rounded);
    if s.starts_with("-") && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// `v` rounded to `SIG_DIGITS` significant digits.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{:.*e}", SIG_DIGITS - 1, v).parse().unwrap_or(v)
}

pub fn point(p: &Point) -> String {
    p.iter().map(|c| num(*c)).collect::<Vec<_>>().join(",")
}

/// Parses `0.5,0`, `(0.5, 0)` or `[0.5 0]`.
pub fn parse_point(text: &str) -> Result<Point, CliError> {
    let inner = text.trim().trim_start_matches(['(', '[']).trim_end_matches([')', ']']);
    let coords: Result<Vec<f64>, _> = inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(str::parse::<f64>)
        .collect();
    match coords {
        Ok(v) if !v.is_empty() && v.iter().all(|c| c.is_finite()) => Ok(Point::from_vec(v)),
        _ => Err(CliError::Validation(format!("cannot read a point from {text:?}"))),
    }
}

pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Validation(format!("stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(2f64.ln()), "0.693147180560");
        assert_eq!(num(0.5 * 3f64.ln()), "0.549306144334");
        assert_eq!(num(0.0), "0.000000000000");
        assert_eq!(num(-0.0), "0.000000000000");
        assert_eq!(num(1.0), "1.00000000000");
        assert_eq!(num(-2.5), "-2.50000000000");
        assert_eq!(num(123456.789), "123456.789000");
        assert_eq!(num(1e-5), "0.0000100000000000");
        assert_eq!(num(3.061616997868383e-17), "3.06161699787e-17");
        assert_eq!(num(-1.5e-9), "-1.50000000000e-9");
        assert_eq!(num(9.9999999999996), "10.0000000000");
        assert_eq!(num(1e15), "1000000000000000");
    }

    #[test]
    fn points() {
        assert_eq!(parse_point("0.5,0").unwrap(), dvector![0.5, 0.0]);
        assert_eq!(parse_point("(-1, 2.5)").unwrap(), dvector![-1.0, 2.5]);
        assert_eq!(parse_point("[1 2 3]").unwrap(), dvector![1.0, 2.0, 3.0]);
        assert!(parse_point("").is_err());
        assert!(parse_point("1,x").is_err());
        assert!(parse_point("1,nan").is_err());
        assert_eq!(point(&dvector![0.5, 0.0]), "0.500000000000,0.000000000000");
    }
}

//! Locale-independent number formatting and CSV output.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::CliError;

/// `value` with 12 significant digits, in the style of C's `%.12g`.
pub fn sig12(value: f64) -> String {
    if value.is_nan() {
        return "nan".into();
    }
    if value.is_infinite() {
        return if value > 0.0 { "inf" } else { "-inf" }.into();
    }
    if value == 0.0 {
        return "0".into();
    }
    let sci = format!("{value:.11e}");
    let (mantissa, exponent) = sci.split_once('e').expect("scientific notation");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if (-4..12).contains(&exponent) {
        let decimals = (11 - exponent).max(0) as usize;
        trim_zeros(format!("{value:.decimals$}"))
    } else {
        format!("{}e{exponent}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// CSV document with `#`-prefixed metadata lines before the header row.
#[derive(Debug, Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(metadata: &[(&str, String)], columns: &[&str]) -> Self {
        let mut text = String::new();
        for (key, value) in metadata {
            writeln!(text, "# {key}: {value}").expect("writing to a String");
        }
        text.push_str(&columns.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&v| sig12(v)).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, &self.text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(0.198450467), "0.198450467");
        assert_eq!(sig12(std::f64::consts::LN_2), "0.69314718056");
        assert_eq!(sig12(-2.5), "-2.5");
        assert_eq!(sig12(1234567.0), "1234567");
        assert_eq!(sig12(1.5e-7), "1.5e-7");
        assert_eq!(sig12(8.5e-5), "8.5e-5");
        assert_eq!(sig12(2.5e-4), "0.00025");
        assert_eq!(sig12(3.0e15), "3e15");
        assert_eq!(sig12(f64::INFINITY), "inf");
        assert_eq!(sig12(0.1 + 0.2), "0.3");
    }

    #[test]
    fn csv_layout() {
        let mut csv = Csv::new(&[("seed", "7".into())], &["a", "b"]);
        csv.row(&[0.5, 2.0]);
        assert_eq!(csv.as_str(), "# seed: 7\na,b\n0.5,2\n");
    }
}

//! Plain-text series files: `# key=value` header lines followed by one
//! decimal sample per line.
//!
//! ```text
//! # generator=davies-harte
//! # h=0.8
//! # n=3
//! 0.123
//! -1.5
//! 0.25
//! ```
//!
//! Samples are written in shortest round-trip form, so reading a file back
//! reproduces the values bit for bit. `origin` and `step` headers, when
//! present, become the series time base.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{HurstError, Result};
use crate::model::TimeSeries;

/// Series with its header metadata, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFile {
    pub metadata: Vec<(String, String)>,
    pub series: TimeSeries,
}

impl SeriesFile {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

pub fn format_series(series: &TimeSeries, metadata: &[(String, String)]) -> String {
    let mut out = String::with_capacity(series.len() * 22 + 64 * metadata.len());
    let mut seen = BTreeMap::new();
    for (k, v) in metadata {
        seen.insert(k.as_str(), ());
        let _ = writeln!(out, "# {k}={v}");
    }
    if let (Some(origin), Some(step)) = (series.origin(), series.step()) {
        if !seen.contains_key("origin") {
            let _ = writeln!(out, "# origin={origin}");
        }
        if !seen.contains_key("step") {
            let _ = writeln!(out, "# step={step}");
        }
    }
    for v in series.values() {
        let _ = writeln!(out, "{v}");
    }
    out
}

pub fn parse_series(text: &str, source: &Path) -> Result<SeriesFile> {
    let mut metadata = Vec::new();
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('#') {
            if let Some((k, v)) = header.split_once('=') {
                metadata.push((k.trim().to_owned(), v.trim().to_owned()));
            }
            continue;
        }
        let v: f64 = line.parse().map_err(|_| HurstError::Ingest {
            path: source.to_path_buf(),
            line: idx as u64 + 1,
            message: format!("not a number: '{line}'"),
        })?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(HurstError::EmptyInput(format!("{} holds no samples", source.display())));
    }
    let mut series = TimeSeries::new(values).map_err(|e| HurstError::Ingest {
        path: source.to_path_buf(),
        line: 0,
        message: e.to_string(),
    })?;
    let lookup = |key: &str| {
        metadata
            .iter()
            .find(|(k, _): &&(String, String)| k == key)
            .and_then(|(_, v)| v.parse::<f64>().ok())
    };
    if let (Some(origin), Some(step)) = (lookup("origin"), lookup("step")) {
        series = series.with_time_base(origin, step)?;
    }
    Ok(SeriesFile { metadata, series })
}

pub fn read_series(path: &Path) -> Result<SeriesFile> {
    let text = fs::read_to_string(path).map_err(|e| HurstError::io(path, e))?;
    parse_series(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_and_time_base() {
        let s = TimeSeries::new(vec![1.0, 2.5, -3.0]).unwrap().with_time_base(10.0, 0.01).unwrap();
        let text = format_series(&s, &[("h".into(), "0.8".into())]);
        assert!(text.starts_with("# h=0.8\n# origin=10\n# step=0.01\n1\n2.5\n-3\n"));
        let back = parse_series(&text, Path::new("x")).unwrap();
        assert_eq!(back.series, s);
        assert_eq!(back.get("h"), Some("0.8"));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_series("# a=1\n1.0\nabc\n", Path::new("f.series")) {
            Err(HurstError::Ingest { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_series("# only=header\n", Path::new("f")),
            Err(HurstError::EmptyInput(_))
        ));
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(values in prop::collection::vec(-1e300f64..1e300, 1..64)) {
            let s = TimeSeries::new(values).unwrap();
            let back = parse_series(&format_series(&s, &[]), Path::new("p")).unwrap();
            prop_assert!(back.series.values().iter().zip(s.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
        }
    }
}

//! Flat `key = value` report documents.
//!
//! Keys are dotted (`eta.min_eigenvalue`), lines starting with `#` are
//! comments, and floats are written in shortest round-trip form so that
//! parse(emit(x)) returns exactly x.

use std::fmt;

use entropygate_core::{ConvexityReport, TemperatureReport};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReportParseError {
    #[error("line {line}: expected `key = value`")]
    MissingSeparator { line: usize },
    #[error("line {line}: empty key")]
    EmptyKey { line: usize },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportDocument {
    comments: Vec<String>,
    entries: Vec<(String, String)>,
}

impl ReportDocument {
    pub fn new(command: &str) -> Self {
        let mut doc = ReportDocument::default();
        doc.comment("entropygate report");
        doc.text("tool.version", env!("CARGO_PKG_VERSION"));
        doc.text("command", command);
        doc
    }

    pub fn comment(&mut self, text: impl Into<String>) {
        self.comments.push(text.into());
    }

    pub fn text(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn num(&mut self, key: impl Into<String>, value: f64) {
        self.entries.push((key.into(), format!("{value:?}")));
    }

    pub fn int(&mut self, key: impl Into<String>, value: usize) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn flag(&mut self, key: impl Into<String>, value: bool) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn convexity(&mut self, prefix: &str, r: &ConvexityReport) {
        self.text(format!("{prefix}.verdict"), r.verdict);
        self.num(format!("{prefix}.worst_eigenvalue"), r.worst_eigenvalue);
        for (i, x) in r.worst_point.iter().enumerate() {
            self.num(format!("{prefix}.worst_point.{i}"), *x);
        }
        self.num(format!("{prefix}.tolerance"), r.tolerance_used);
        self.num(format!("{prefix}.normalized_excess"), r.normalized_excess());
        self.num(format!("{prefix}.min_eigenvalue"), r.min_eigenvalue);
        self.num(format!("{prefix}.max_eigenvalue"), r.max_eigenvalue);
        self.int(format!("{prefix}.samples_checked"), r.samples_checked);
        self.int(format!("{prefix}.samples_skipped"), r.samples_skipped);
        self.text(format!("{prefix}.route"), r.route.name());
    }

    pub fn temperature(&mut self, prefix: &str, r: &TemperatureReport) {
        self.text(format!("{prefix}.verdict"), r.verdict_str());
        self.num(format!("{prefix}.min_temperature"), r.min_temperature);
        self.num(format!("{prefix}.min_point.rho"), r.min_point[0]);
        self.num(format!("{prefix}.min_point.e"), r.min_point[1]);
        self.int(format!("{prefix}.violations"), r.violations);
        self.int(format!("{prefix}.samples_checked"), r.samples_checked);
    }

    pub fn parse(text: &str) -> Result<Self, ReportParseError> {
        let mut doc = ReportDocument::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                doc.comments.push(c.trim().to_string());
                continue;
            }
            let (k, v) = line
                .split_once(" = ")
                .or_else(|| line.split_once('='))
                .ok_or(ReportParseError::MissingSeparator { line: i + 1 })?;
            let key = k.trim();
            if key.is_empty() {
                return Err(ReportParseError::EmptyKey { line: i + 1 });
            }
            if doc.get(key).is_some() {
                return Err(ReportParseError::DuplicateKey {
                    line: i + 1,
                    key: key.to_string(),
                });
            }
            doc.entries.push((key.to_string(), v.trim().to_string()));
        }
        Ok(doc)
    }
}

impl fmt::Display for ReportDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.comments {
            writeln!(f, "# {c}")?;
        }
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        let values = [
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            1e308,
            f64::MIN_POSITIVE,
            0.0,
            -0.0,
            123456789.0,
        ];
        let mut doc = ReportDocument::new("test");
        for (i, v) in values.iter().enumerate() {
            doc.num(format!("x.{i}"), *v);
        }
        let back = ReportDocument::parse(&doc.to_string()).unwrap();
        assert_eq!(back, doc);
        for (i, v) in values.iter().enumerate() {
            assert_eq!(
                back.get_f64(&format!("x.{i}")).unwrap().to_bits(),
                v.to_bits()
            );
        }
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            ReportDocument::parse("a = 1\nnope\n"),
            Err(ReportParseError::MissingSeparator { line: 2 })
        );
        assert!(matches!(
            ReportDocument::parse("a = 1\na = 2"),
            Err(ReportParseError::DuplicateKey { line: 2, .. })
        ));
    }
}

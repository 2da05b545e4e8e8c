//! Ordered key-value reports with deterministic rendering.

use std::fmt::Write as _;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ReportFormat {
    Text,
    Kv,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Option<ReportFormat> {
        match s {
            "text" => Some(ReportFormat::Text),
            "kv" => Some(ReportFormat::Kv),
            _ => None,
        }
    }
}

/// An ordered list of `key = value` entries; insertion order is preserved so
/// repeated runs produce byte-identical output.
#[derive(Clone, Debug, Default)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.push((key.into(), value.into()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn render(&self, format: ReportFormat) -> String {
        match format {
            ReportFormat::Kv => {
                let mut out = String::new();
                for (k, v) in &self.entries {
                    writeln!(out, "{k} = {v}").unwrap();
                }
                out
            }
            ReportFormat::Text => {
                let mut out = String::new();
                let mut last_section = String::new();
                for (k, v) in &self.entries {
                    let section = k.split('.').next().unwrap_or("").to_string();
                    if section != last_section && !last_section.is_empty() {
                        out.push('\n');
                    }
                    last_section = section;
                    writeln!(out, "{k}: {v}").unwrap();
                }
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_rendering_is_flat() {
        let mut r = Report::new();
        r.push("command", "selftest");
        r.push("suite.a", "ok");
        assert_eq!(r.render(ReportFormat::Kv), "command = selftest\nsuite.a = ok\n");
        assert!(r.render(ReportFormat::Text).contains("suite.a: ok"));
    }
}

//! Plain-text key=value config files with `[section]` headers.
//!
//! Unknown sections and keys are rejected by name so a typo cannot silently
//! fall back to a default.

use crate::{Error, Result};

/// Parsed config file: ordered `(section, key, value)` entries. Keys before
/// any section header live in the empty section.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    pub entries: Vec<(String, String, String)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<RawConfig> {
        let mut entries = Vec::new();
        let mut section = String::new();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| {
                    Error::Parse(format!("line {}: unterminated section header", lineno + 1))
                })?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!(
                    "line {}: expected key = value, got {line:?}",
                    lineno + 1
                ))
            })?;
            entries.push((
                section.clone(),
                key.trim().to_string(),
                value.trim().to_string(),
            ));
        }
        Ok(RawConfig { entries })
    }

    pub fn load(path: &std::path::Path) -> Result<RawConfig> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

pub(crate) fn bad_value(key: &str, reason: impl std::fmt::Display) -> Error {
    Error::BadConfigValue {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

pub(crate) fn parse_scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| bad_value(key, e))
}

pub(crate) fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|e| bad_value(key, e)))
        .collect()
}

pub(crate) fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(bad_value(
            key,
            format!("expected true/false, got {other:?}"),
        )),
    }
}

pub(crate) fn unknown_key(section: &str, key: &str) -> Error {
    Error::UnknownConfigKey {
        key: key.to_string(),
        section: section.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let text = "# comment\ntop = 1\n[alpha]\nkey = value with spaces\n; another comment\n[beta]\nn = 2\n";
        let cfg = RawConfig::parse(text).unwrap();
        assert_eq!(
            cfg.entries,
            vec![
                ("".into(), "top".into(), "1".into()),
                ("alpha".into(), "key".into(), "value with spaces".into()),
                ("beta".into(), "n".into(), "2".into()),
            ]
        );
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(RawConfig::parse("just a line").is_err());
        assert!(RawConfig::parse("[unterminated").is_err());
    }

    #[test]
    fn list_parsing() {
        let ks: Vec<i64> = parse_list("k_list", "2, 4,6").unwrap();
        assert_eq!(ks, vec![2, 4, 6]);
        assert!(parse_list::<i64>("k_list", "2,x").is_err());
    }
}

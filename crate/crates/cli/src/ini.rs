//! Flat `key = value` files with `[section]` headers.
//!
//! `#` and `;` start comments (whole-line or trailing). Keys before the
//! first header belong to the unnamed section. Duplicate keys within a
//! section are rejected.

use std::collections::BTreeMap;

use crate::ConfigError;

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: String,
    pub line: usize,
}

/// `(section, key) -> entry`, in file order per section.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IniDoc {
    pub entries: BTreeMap<(String, String), Entry>,
    /// Line of each section header.
    pub sections: BTreeMap<String, usize>,
}

fn strip_comment(line: &str) -> &str {
    match line.find(['#', ';']) {
        Some(i) => &line[..i],
        None => line,
    }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse(text: &str) -> Result<IniDoc, ConfigError> {
    let mut doc = IniDoc::default();
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .map(str::trim)
                .filter(|n| valid_name(n))
                .ok_or_else(|| ConfigError::parse(line, None, format!("malformed section header `{body}`")))?;
            if doc.sections.insert(name.to_string(), line).is_some() {
                return Err(ConfigError::parse(line, None, format!("section [{name}] appears twice")));
            }
            section = name.to_string();
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| ConfigError::parse(line, None, format!("expected `key = value`, found `{body}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !valid_name(key) {
            return Err(ConfigError::parse(line, None, format!("invalid key `{key}`")));
        }
        if value.is_empty() {
            return Err(ConfigError::parse(line, Some(key), "missing value".into()));
        }
        let slot = (section.clone(), key.to_string());
        if let Some(prev) = doc.entries.get(&slot) {
            return Err(ConfigError::parse(line, Some(key), format!("duplicate key (first set on line {})", prev.line)));
        }
        doc.entries.insert(slot, Entry { value: value.to_string(), line });
    }
    Ok(doc)
}

//! Plain-text configuration files: one `key = value` pair per line, UTF-8,
//! `#` comments. Keys are the long flag names without the leading dashes;
//! command-line flags take precedence over file values.

use std::collections::BTreeMap;
use std::path::Path;

pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn empty() -> Self {
        FileConfig {
            values: BTreeMap::new(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(idx) => &raw[..idx],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!("line {}: expected `key = value`", lineno + 1));
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    pub fn fill_flag(&self, key: &str, slot: &mut bool) {
        if !*slot {
            if let Some(v) = self.get(key) {
                *slot = matches!(v.to_ascii_lowercase().as_str(), "true" | "1" | "yes");
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let cfg = FileConfig::parse("# a comment\nscheme = twin\nvsq = 0.5 # inline\n\n").unwrap();
        assert_eq!(cfg.get("scheme"), Some("twin"));
        assert_eq!(cfg.get("vsq"), Some("0.5"));
        assert_eq!(cfg.get("missing"), None);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(FileConfig::parse("just words\n").is_err());
    }

    #[test]
    fn boolean_flags_fill_from_file() {
        let cfg = FileConfig::parse("strict = true\n").unwrap();
        let mut strict = false;
        cfg.fill_flag("strict", &mut strict);
        assert!(strict);
        let mut already = true;
        FileConfig::parse("strict = false\n")
            .unwrap()
            .fill_flag("strict", &mut already);
        assert!(already);
    }
}

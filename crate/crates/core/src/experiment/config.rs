//! Configuration files: `key = value` lines grouped in named `[section]`s,
//! `#`/`;` comments, with every unknown section or key rejected by name and
//! line number. Command-line flags override file values.

use std::collections::BTreeMap;
use std::path::Path;

use crate::{Result, ZkError};

#[derive(Debug, Clone)]
pub struct ConfigValue {
    pub line: usize,
    pub raw: String,
}

/// Parsed configuration file: section -> key -> value.
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    pub path: String,
    sections: BTreeMap<String, BTreeMap<String, ConfigValue>>,
}

impl ConfigFile {
    pub fn parse(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_str(&text, &path.display().to_string())
    }

    pub fn parse_str(text: &str, path: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, ConfigValue>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (i, raw_line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| ZkError::Config {
                    path: path.into(),
                    line: line_no,
                    message: format!("unterminated section header `{line}`"),
                })?;
                let name = name.trim().to_string();
                if name.is_empty() {
                    return Err(ZkError::Config {
                        path: path.into(),
                        line: line_no,
                        message: "empty section name".into(),
                    });
                }
                sections.entry(name.clone()).or_default();
                current = Some(name);
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ZkError::Config {
                path: path.into(),
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(ZkError::Config {
                    path: path.into(),
                    line: line_no,
                    message: "empty key".into(),
                });
            }
            let section = current.clone().ok_or_else(|| ZkError::Config {
                path: path.into(),
                line: line_no,
                message: format!("key `{key}` appears before any [section]"),
            })?;
            let entry = sections.entry(section).or_default();
            if entry.contains_key(&key) {
                return Err(ZkError::Config {
                    path: path.into(),
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
            entry.insert(
                key,
                ConfigValue {
                    line: line_no,
                    raw: value.trim().to_string(),
                },
            );
        }
        Ok(Self {
            path: path.into(),
            sections,
        })
    }

    /// Rejects any section/key pair not present in `schema`
    /// (section -> allowed keys), naming the offender.
    pub fn validate_schema(&self, schema: &[(&str, &[&str])]) -> Result<()> {
        for (section, keys) in &self.sections {
            let allowed = schema
                .iter()
                .find(|(name, _)| name == section)
                .map(|(_, keys)| *keys)
                .ok_or_else(|| ZkError::Config {
                    path: self.path.clone(),
                    line: 0,
                    message: format!("unknown section `[{section}]`"),
                })?;
            for (key, value) in keys {
                if !allowed.contains(&key.as_str()) {
                    return Err(ZkError::Config {
                        path: self.path.clone(),
                        line: value.line,
                        message: format!("unknown key `{key}` in section `[{section}]`"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&ConfigValue> {
        self.sections.get(section).and_then(|s| s.get(key))
    }

    fn parse_with<T, F: FnOnce(&str) -> Option<T>>(
        &self,
        section: &str,
        key: &str,
        what: &str,
        f: F,
    ) -> Result<Option<T>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => f(&v.raw).map(Some).ok_or_else(|| ZkError::Config {
                path: self.path.clone(),
                line: v.line,
                message: format!("key `{key}`: expected {what}, got `{}`", v.raw),
            }),
        }
    }

    pub fn get_f64(&self, section: &str, key: &str) -> Result<Option<f64>> {
        self.parse_with(section, key, "a real number", |s| s.parse().ok())
    }

    pub fn get_u64(&self, section: &str, key: &str) -> Result<Option<u64>> {
        self.parse_with(section, key, "a nonnegative integer", |s| s.parse().ok())
    }

    pub fn get_usize(&self, section: &str, key: &str) -> Result<Option<usize>> {
        self.parse_with(section, key, "a nonnegative integer", |s| s.parse().ok())
    }

    pub fn get_bool(&self, section: &str, key: &str) -> Result<Option<bool>> {
        self.parse_with(section, key, "true or false", |s| s.parse().ok())
    }

    pub fn get_string(&self, section: &str, key: &str) -> Option<String> {
        self.get(section, key).map(|v| v.raw.clone())
    }

    pub fn get_u32_list(&self, section: &str, key: &str) -> Result<Option<Vec<u32>>> {
        self.parse_with(section, key, "a comma-separated integer list", |s| {
            s.split(',')
                .map(|p| p.trim().parse().ok())
                .collect::<Option<Vec<u32>>>()
                .filter(|v| !v.is_empty())
        })
    }

    pub fn get_f64_list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        self.parse_with(section, key, "a comma-separated real list", |s| {
            s.split(',')
                .map(|p| p.trim().parse().ok())
                .collect::<Option<Vec<f64>>>()
                .filter(|v| !v.is_empty())
        })
    }
}

/// `MxxMy` grid syntax used by the `--grid` flag, e.g. `256x256`.
pub fn parse_grid_spec(s: &str) -> Result<(usize, usize)> {
    let (a, b) = s.split_once('x').ok_or_else(|| {
        ZkError::InvalidParameter(format!("grid spec must look like 128x128, got `{s}`"))
    })?;
    let mx = a
        .trim()
        .parse()
        .map_err(|_| ZkError::InvalidParameter(format!("bad grid x-size `{a}`")))?;
    let my = b
        .trim()
        .parse()
        .map_err(|_| ZkError::InvalidParameter(format!("bad grid y-size `{b}`")))?;
    Ok((mx, my))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# experiment configuration
[run]
out = runs/demo
seed = 7

[solve]
dt = 5e-4
m = 8,16,32
dealias = true
";

    #[test]
    fn parses_sections_and_values() {
        let cfg = ConfigFile::parse_str(SAMPLE, "test.cfg").unwrap();
        assert_eq!(cfg.get_string("run", "out").unwrap(), "runs/demo");
        assert_eq!(cfg.get_u64("run", "seed").unwrap(), Some(7));
        assert_eq!(cfg.get_f64("solve", "dt").unwrap(), Some(5e-4));
        assert_eq!(
            cfg.get_u32_list("solve", "m").unwrap(),
            Some(vec![8, 16, 32])
        );
        assert_eq!(cfg.get_bool("solve", "dealias").unwrap(), Some(true));
        assert_eq!(cfg.get_f64("solve", "missing").unwrap(), None);
    }

    #[test]
    fn rejects_unknown_key_by_name_and_line() {
        let cfg = ConfigFile::parse_str(SAMPLE, "test.cfg").unwrap();
        let schema: &[(&str, &[&str])] = &[
            ("run", &["out", "seed"]),
            ("solve", &["dt", "m"]), // `dealias` not allowed here
        ];
        let err = cfg.validate_schema(schema).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("dealias"), "{msg}");
        assert!(msg.contains("test.cfg:9"), "{msg}");
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(ConfigFile::parse_str("[run\nx = 1\n", "f").is_err());
        assert!(ConfigFile::parse_str("x = 1\n", "f").is_err()); // before section
        assert!(ConfigFile::parse_str("[a]\nnot a pair\n", "f").is_err());
        assert!(ConfigFile::parse_str("[a]\nx = 1\nx = 2\n", "f").is_err());
    }

    #[test]
    fn type_errors_carry_position() {
        let cfg = ConfigFile::parse_str("[a]\nn = twelve\n", "f").unwrap();
        let err = cfg.get_u64("a", "n").unwrap_err();
        assert!(err.to_string().contains("f:2"), "{err}");
    }

    #[test]
    fn grid_spec() {
        assert_eq!(parse_grid_spec("256x128").unwrap(), (256, 128));
        assert!(parse_grid_spec("256").is_err());
    }
}

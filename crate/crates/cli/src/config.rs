//! `key = value` configuration files and parameter resolution.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use steklov_core::{Error, Result};

/// Keys accepted in a configuration file.
pub const KNOWN_KEYS: &[&str] = &[
    "base", "condition", "count", "dirichlet", "eps", "eps_list", "genus", "grid", "h", "h0", "h1", "j", "jobs",
    "k", "kind", "orientable", "same_component", "mesh", "n_angular", "n_radial", "neumann", "nx", "ny", "out", "r_inner", "reverse", "tol_gap",
];

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Parse { line: i + 1, message: format!("expected key = value, got '{line}'") });
            };
            let (k, v) = (k.trim(), v.trim());
            if !KNOWN_KEYS.contains(&k) {
                return Err(Error::Parse { line: i + 1, message: format!("unknown key '{k}'") });
            }
            if values.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::Parse { line: i + 1, message: format!("key '{k}' given twice") });
            }
        }
        Ok(ConfigFile { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Command-line value if given, else the file value, else `default`.
    pub fn pick<T: FromStr>(&self, cli: Option<T>, key: &str, default: T) -> Result<T> {
        if let Some(v) = cli {
            return Ok(v);
        }
        match self.raw(key) {
            Some(s) => s
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("config key '{key}': cannot parse '{s}'"))),
            None => Ok(default),
        }
    }

    pub fn pick_opt<T: FromStr>(&self, cli: Option<T>, key: &str) -> Result<Option<T>> {
        match (cli, self.raw(key)) {
            (Some(v), _) => Ok(Some(v)),
            (None, Some(s)) => s
                .parse()
                .map(Some)
                .map_err(|_| Error::InvalidArgument(format!("config key '{key}': cannot parse '{s}'"))),
            (None, None) => Ok(None),
        }
    }

    /// Comma-separated list.
    pub fn pick_list<T: FromStr>(&self, cli: Option<Vec<T>>, key: &str, default: Vec<T>) -> Result<Vec<T>> {
        if let Some(v) = cli {
            return Ok(v);
        }
        match self.raw(key) {
            Some(s) => parse_list(s).map_err(|_| Error::InvalidArgument(format!("config key '{key}': bad list '{s}'"))),
            None => Ok(default),
        }
    }
}

pub fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse().map_err(|_| format!("cannot parse '{x}'")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let c = ConfigFile::parse("# comment\neps = 0.2\nh=3 # trailing\n").unwrap();
        assert_eq!(c.pick(Some(0.1), "eps", 0.15).unwrap(), 0.1);
        assert_eq!(c.pick(None, "eps", 0.15).unwrap(), 0.2);
        assert_eq!(c.pick(None::<f64>, "h", 2.5).unwrap(), 3.0);
        assert_eq!(c.pick(None, "grid", 27usize).unwrap(), 27);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(matches!(ConfigFile::parse("epsilon = 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(ConfigFile::parse("\neps 1"), Err(Error::Parse { line: 2, .. })));
        assert!(ConfigFile::parse("eps=1\neps=2").is_err());
        let c = ConfigFile::parse("eps = abc").unwrap();
        assert!(c.pick(None::<f64>, "eps", 1.0).is_err());
    }

    #[test]
    fn lists() {
        let c = ConfigFile::parse("eps_list = 0.3, 0.2,0.1").unwrap();
        assert_eq!(c.pick_list::<f64>(None, "eps_list", vec![]).unwrap(), vec![0.3, 0.2, 0.1]);
    }
}

//! `key = value` config files with one section per command. Keys outside any
//! section apply to every command; flags override both.

use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};
use ini::Ini;

use crate::grid;

#[derive(Default)]
pub struct Config {
    ini: Option<Ini>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let ini = match path {
            Some(p) => Some(
                Ini::load_from_file(p)
                    .with_context(|| format!("reading config {}", p.display()))?,
            ),
            None => None,
        };
        Ok(Config { ini })
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        let ini = self.ini.as_ref()?;
        ini.get_from(Some(section), key)
            .or_else(|| ini.get_from(None::<String>, key))
    }

    pub fn section(&self, name: &'static str) -> Params<'_> {
        Params {
            config: self,
            section: name,
        }
    }
}

pub struct Params<'a> {
    config: &'a Config,
    section: &'static str,
}

impl Params<'_> {
    pub fn optional<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.config.get(self.section, key) {
            Some(text) => text
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| anyhow!("[{}] {key} = {text} is not valid", self.section)),
            None => Ok(None),
        }
    }

    pub fn value<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(self.optional(flag, key)?.unwrap_or(default))
    }

    pub fn grid(&self, flag: Option<&str>, key: &str, default: &str) -> Result<Vec<f64>> {
        let text = match flag {
            Some(t) => t.to_string(),
            None => self
                .config
                .get(self.section, key)
                .unwrap_or(default)
                .to_string(),
        };
        grid::parse(&text).with_context(|| format!("--{key}"))
    }

    pub fn optional_grid(&self, flag: Option<&str>, key: &str) -> Result<Option<Vec<f64>>> {
        match flag.or_else(|| self.config.get(self.section, key)) {
            Some(text) => Ok(Some(grid::parse(text).with_context(|| format!("--{key}"))?)),
            None => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_sections_over_globals() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.ini");
        std::fs::write(&path, "d = 2\nr = 9\n[verify]\nr = 0.5\nNgrid = 5:10:5\n").unwrap();
        let config = Config::load(Some(&path)).unwrap();
        let p = config.section("verify");
        assert_eq!(p.value(None, "r", 1.0).unwrap(), 0.5);
        assert_eq!(p.value(Some(0.1), "r", 1.0).unwrap(), 0.1);
        assert_eq!(p.value::<usize>(None, "d", 1).unwrap(), 2);
        assert_eq!(p.grid(None, "Ngrid", "1").unwrap(), vec![5.0, 10.0]);
        assert_eq!(config.section("lemma").value(None, "r", 1.0).unwrap(), 9.0);
        assert!(p.value::<u64>(None, "r", 1).is_err());
    }
}

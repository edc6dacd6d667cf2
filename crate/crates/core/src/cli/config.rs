//! Layered run settings: defaults, then a `key = value` file, then flags.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};

/// Subcommands and the settings each one reads besides the common ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Hodge,
    Wente,
    Norms,
    Coulomb,
    Frame,
    Regularity,
    Harmonic,
    Pmc,
    Counterexample,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Hodge => "hodge",
            CommandKind::Wente => "wente",
            CommandKind::Norms => "norms",
            CommandKind::Coulomb => "coulomb",
            CommandKind::Frame => "frame",
            CommandKind::Regularity => "regularity",
            CommandKind::Harmonic => "harmonic",
            CommandKind::Pmc => "pmc",
            CommandKind::Counterexample => "counterexample",
        }
    }

    fn specific_defaults(self) -> &'static [(&'static str, &'static str)] {
        match self {
            CommandKind::Hodge | CommandKind::Coulomb => &[("field", "random"), ("l2", "1.0")],
            CommandKind::Wente => &[("case", "random")],
            CommandKind::Norms => &[("field", "random"), ("input", "")],
            CommandKind::Frame => &[("omega", "random"), ("l2", "0.5"), ("lambda", "0.1")],
            CommandKind::Regularity => &[("omega", "harmonic"), ("lambda", "0.1"), ("m", "3")],
            CommandKind::Harmonic => &[
                ("boundary", "stereographic"),
                ("method", "tangent"),
                ("lambda", "1.0"),
                ("perturbation", "0.1"),
                ("m", "3"),
            ],
            CommandKind::Pmc => &[("patch", "sphere"), ("sign", "1"), ("m", "3")],
            CommandKind::Counterexample => &[("resolutions", "65,129,257")],
        }
    }
}

const COMMON_DEFAULTS: &[(&str, &str)] = &[
    ("n", "65"),
    ("m", "2"),
    ("seed", "0"),
    ("eps", "2.0"),
    ("out", "out"),
    ("tol-coulomb", "1e-4"),
    ("tol-fp", "1e-12"),
    ("tol-hm", "1e-6"),
    ("tol-input", "0.1"),
    ("tol-conf", "0.05"),
    ("tol-wente", "0.05"),
];

/// Parse `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "line {}: expected `key = value`, got {raw:?}",
                i + 1
            ))
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::Config(format!("line {}: empty key", i + 1)));
        }
        out.insert(k.to_string(), v.to_string());
    }
    Ok(out)
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub settings: BTreeMap<String, String>,
}

impl RunConfig {
    /// Merge defaults, file settings and flags (later layers win) and validate.
    pub fn resolve(
        command: CommandKind,
        file: Option<BTreeMap<String, String>>,
        flags: Vec<(&'static str, String)>,
    ) -> Result<Self> {
        let mut settings: BTreeMap<String, String> = COMMON_DEFAULTS
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        for (k, v) in command.specific_defaults() {
            settings.insert(k.to_string(), v.to_string());
        }
        if let Some(file) = file {
            for (k, v) in file {
                if !settings.contains_key(&k) {
                    return Err(Error::Config(format!(
                        "unknown setting {k:?} for {}",
                        command.name()
                    )));
                }
                settings.insert(k, v);
            }
        }
        for (k, v) in flags {
            settings.insert(k.to_string(), v);
        }
        let cfg = Self { command, settings };
        cfg.validate()?;
        Ok(cfg)
    }

    fn raw(&self, key: &str) -> Result<&str> {
        self.settings
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::Config(format!("missing setting {key:?}")))
    }

    pub fn text(&self, key: &str) -> Result<String> {
        self.raw(key).map(str::to_string)
    }

    pub fn real(&self, key: &str) -> Result<f64> {
        let v = self.raw(key)?;
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::Config(format!("{key} = {v:?} is not a finite number")))
    }

    pub fn count(&self, key: &str) -> Result<usize> {
        let v = self.raw(key)?;
        v.parse()
            .map_err(|_| Error::Config(format!("{key} = {v:?} is not a count")))
    }

    pub fn n(&self) -> Result<usize> {
        self.count("n")
    }

    pub fn m(&self) -> Result<usize> {
        self.count("m")
    }

    pub fn seed(&self) -> Result<u64> {
        let v = self.raw("seed")?;
        v.parse()
            .map_err(|_| Error::Config(format!("seed = {v:?} is not a 64-bit integer")))
    }

    pub fn out(&self) -> Result<PathBuf> {
        self.raw("out").map(PathBuf::from)
    }

    pub fn resolutions(&self) -> Result<Vec<usize>> {
        let v = self.raw("resolutions")?;
        v.split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Config(format!("bad resolution {s:?}")))
            })
            .collect()
    }

    /// One of `allowed`, or a config error.
    pub fn choice(&self, key: &str, allowed: &[&str]) -> Result<String> {
        let v = self.raw(key)?;
        if allowed.contains(&v) {
            Ok(v.to_string())
        } else {
            Err(Error::Config(format!(
                "{key} = {v:?}; expected one of {}",
                allowed.join(", ")
            )))
        }
    }

    fn validate(&self) -> Result<()> {
        let check_n = |n: usize| {
            if n < 33 || n.is_multiple_of(2) {
                Err(Error::Config(format!(
                    "n = {n}: grids need an odd node count of at least 33"
                )))
            } else {
                Ok(())
            }
        };
        check_n(self.n()?)?;
        if self.command == CommandKind::Counterexample {
            for n in self.resolutions()? {
                check_n(n)?;
            }
        }
        let m = self.m()?;
        if m == 0 || m > 8 {
            return Err(Error::Config(format!(
                "m = {m}: fiber dimension must be in 1..=8"
            )));
        }
        self.seed()?;
        for key in self
            .settings
            .keys()
            .filter(|k| k.starts_with("tol-") || *k == "eps")
        {
            if self.real(key)? <= 0.0 {
                return Err(Error::Config(format!("{key} must be positive")));
            }
        }
        let needs_sphere_dim = match self.command {
            CommandKind::Harmonic | CommandKind::Pmc => true,
            CommandKind::Frame | CommandKind::Regularity => self.raw("omega")? == "harmonic",
            _ => false,
        };
        if needs_sphere_dim && m != 3 {
            return Err(Error::Config(format!(
                "maps into the 2-sphere need m = 3, got {m}"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_key_value_lines() {
        let map = parse_config_text("# run\nn = 129\n\nseed=7 # trailing\n").unwrap();
        assert_eq!(map["n"], "129");
        assert_eq!(map["seed"], "7");
        assert!(parse_config_text("n 129").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file = parse_config_text("n = 129\nseed = 3").unwrap();
        let cfg =
            RunConfig::resolve(CommandKind::Hodge, Some(file), vec![("n", "65".into())]).unwrap();
        assert_eq!(cfg.n().unwrap(), 65);
        assert_eq!(cfg.seed().unwrap(), 3);
    }

    #[test]
    fn rejects_bad_grids_and_unknown_keys() {
        assert!(RunConfig::resolve(CommandKind::Hodge, None, vec![("n", "64".into())]).is_err());
        assert!(RunConfig::resolve(CommandKind::Hodge, None, vec![("n", "17".into())]).is_err());
        let file = parse_config_text("boundary = stereographic").unwrap();
        assert!(RunConfig::resolve(CommandKind::Hodge, Some(file), vec![]).is_err());
        assert!(RunConfig::resolve(CommandKind::Harmonic, None, vec![("m", "2".into())]).is_err());
    }
}

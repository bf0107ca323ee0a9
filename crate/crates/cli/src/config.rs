//! Value resolution with precedence flags > config file > defaults, and the
//! canonical record of what was resolved (hashed into every output header).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use sha2::{Digest, Sha256};

use crate::args::{Family, Format, OpChoice, PsiChoice, Variant};
use crate::CliError;

/// Keys accepted in a config file: the long flag names.
pub const KNOWN_KEYS: &[&str] = &[
    "family",
    "a",
    "gamma",
    "b",
    "nu",
    "d",
    "grid-min",
    "grid-max",
    "grid-n",
    "grid-log",
    "out",
    "format",
    "clip",
    "pmax",
    "psi",
    "psi-a",
    "psi-b",
    "psi-alpha",
    "psi-beta",
    "psi-scale",
    "m",
    "p0",
    "theta",
    "psi-file",
    "op",
    "C",
    "alpha",
    "beta",
    "a1",
    "b1",
    "Cd",
    "c-high",
    "p",
    "t",
    "tail-file",
    "rel-tol",
    "variant",
    "exact-levelset",
    "u",
    "suite",
    "tol",
    "seed",
];

/// Parse a flat `key = value` file. `#` starts a comment; blank lines are
/// ignored; keys must be in [`KNOWN_KEYS`].
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", i + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if !KNOWN_KEYS.contains(&k) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key `{k}`",
                i + 1
            )));
        }
        if map.insert(k.to_string(), v.to_string()).is_some() {
            return Err(CliError::Usage(format!(
                "config line {}: duplicate key `{k}`",
                i + 1
            )));
        }
    }
    Ok(map)
}

pub fn load_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// A value that can come from a flag or a config string and be written
/// back canonically.
pub trait ConfigValue: Sized + Clone {
    fn parse_value(s: &str) -> Result<Self, String>;
    fn render(&self) -> String;
}

impl ConfigValue for f64 {
    fn parse_value(s: &str) -> Result<Self, String> {
        s.parse::<f64>().map_err(|e| format!("`{s}`: {e}"))
    }
    fn render(&self) -> String {
        format!("{self:?}")
    }
}

macro_rules! int_value {
    ($($t:ty),*) => {$(
        impl ConfigValue for $t {
            fn parse_value(s: &str) -> Result<Self, String> {
                s.parse::<$t>().map_err(|e| format!("`{s}`: {e}"))
            }
            fn render(&self) -> String {
                self.to_string()
            }
        }
    )*};
}
int_value!(u32, u64, usize);

impl ConfigValue for bool {
    fn parse_value(s: &str) -> Result<Self, String> {
        match s {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            _ => Err(format!("`{s}` is not a boolean")),
        }
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

impl ConfigValue for PathBuf {
    fn parse_value(s: &str) -> Result<Self, String> {
        Ok(PathBuf::from(s))
    }
    fn render(&self) -> String {
        self.display().to_string()
    }
}

impl ConfigValue for Vec<f64> {
    fn parse_value(s: &str) -> Result<Self, String> {
        s.split(',').map(|x| f64::parse_value(x.trim())).collect()
    }
    fn render(&self) -> String {
        self.iter().map(ConfigValue::render).collect::<Vec<_>>().join(",")
    }
}

impl ConfigValue for Vec<String> {
    fn parse_value(s: &str) -> Result<Self, String> {
        Ok(s.split(',').map(|x| x.trim().to_string()).collect())
    }
    fn render(&self) -> String {
        self.join(",")
    }
}

macro_rules! enum_value {
    ($($t:ty),*) => {$(
        impl ConfigValue for $t {
            fn parse_value(s: &str) -> Result<Self, String> {
                <$t as ValueEnum>::from_str(s, false)
            }
            fn render(&self) -> String {
                self.to_possible_value().expect("no skipped variants").get_name().to_string()
            }
        }
    )*};
}
enum_value!(Family, PsiChoice, OpChoice, Format, Variant);

/// Looks values up flag-first, then in the file, then in the default, and
/// records each resolved value under its key.
#[derive(Debug, Default)]
pub struct Resolver {
    file: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

impl Resolver {
    pub fn new(file: BTreeMap<String, String>) -> Self {
        Self {
            file,
            resolved: BTreeMap::new(),
        }
    }

    pub fn opt<T: ConfigValue>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError> {
        let v = match flag {
            Some(v) => Some(v),
            None => match self.file.get(key) {
                Some(s) => {
                    Some(T::parse_value(s).map_err(|e| CliError::Usage(format!("config key `{key}`: {e}")))?)
                }
                None => None,
            },
        };
        if let Some(v) = &v {
            self.resolved.insert(key.to_string(), v.render());
        }
        Ok(v)
    }

    pub fn get<T: ConfigValue>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError> {
        let v = self.opt(key, flag)?.unwrap_or(default);
        self.resolved.insert(key.to_string(), v.render());
        Ok(v)
    }

    pub fn required<T: ConfigValue>(&mut self, key: &str, flag: Option<T>) -> Result<T, CliError> {
        self.opt(key, flag)?
            .ok_or_else(|| CliError::Usage(format!("missing required value `--{key}`")))
    }

    /// Record a derived value (e.g. a model-dependent default grid end).
    pub fn note(&mut self, key: &str, value: String) {
        self.resolved.insert(key.to_string(), value);
    }

    /// `key=value` pairs in key order, excluding the output path (which must
    /// not change the bytes written).
    pub fn canonical(&self, command: &str) -> String {
        let mut s = format!("command={command}");
        for (k, v) in &self.resolved {
            if k != "out" {
                s.push(';');
                s.push_str(k);
                s.push('=');
                s.push_str(v);
            }
        }
        s
    }
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// A resolved sampling grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub n: usize,
    pub log: bool,
}

pub const MAX_GRID_POINTS: usize = 10_000_000;

impl GridSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(2..=MAX_GRID_POINTS).contains(&self.n) {
            return Err(CliError::Usage(format!(
                "grid-n must be in [2, {MAX_GRID_POINTS}], got {}",
                self.n
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(CliError::Usage(format!(
                "grid needs finite min < max, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.log && self.min <= 0.0 {
            return Err(CliError::Usage("log grid needs grid-min > 0".into()));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.n - 1) as f64;
        let mut pts: Vec<f64> = (0..self.n)
            .map(|k| {
                let f = k as f64 / last;
                if self.log {
                    (self.min.ln() + f * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + f * (self.max - self.min)
                }
            })
            .collect();
        // pin the ends exactly
        pts[0] = self.min;
        pts[self.n - 1] = self.max;
        pts
    }
}

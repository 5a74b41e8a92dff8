use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{check_dimension, TargetFunction};

/// How `c_values` turn into bandwidths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CRule {
    /// c_values are bandwidths.
    Absolute,
    /// c = value · n^{1/d}.
    NRootMultiple,
}

impl CRule {
    pub fn id(&self) -> &'static str {
        match self {
            CRule::Absolute => "absolute",
            CRule::NRootMultiple => "n_root_multiple",
        }
    }
}

/// One (d, n, c, seed) cell of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub d: usize,
    pub n: usize,
    pub c: f64,
    /// c / n^{1/d}.
    pub c_ratio: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub d_list: Vec<usize>,
    pub n_list: Vec<usize>,
    pub c_rule: CRule,
    pub c_values: Vec<f64>,
    pub seeds: Vec<u64>,
    pub f0: TargetFunction,
    pub m_test: usize,
    pub alpha_witness: f64,
}

pub const CONFIG_KEYS: [&str; 8] = [
    "d_list",
    "n_list",
    "c_rule",
    "c_values",
    "seeds",
    "f0",
    "m_test",
    "alpha_witness",
];

impl Default for SweepGrid {
    /// d ∈ {1, 3}, n ∈ {100, …, 1600}, c = {0.25, …, 32}·n^{1/d}, seeds 1..=10.
    fn default() -> Self {
        SweepGrid {
            d_list: vec![1, 3],
            n_list: vec![100, 200, 400, 800, 1600],
            c_rule: CRule::NRootMultiple,
            c_values: vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0],
            seeds: (1..=10).collect(),
            f0: TargetFunction::ConstOne,
            m_test: 20_000,
            alpha_witness: 0.4,
        }
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Config(format!("{key}: cannot parse `{s}`")))
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse `{}`", value.trim())))
}

impl SweepGrid {
    /// Parse a flat `key = value` file. Lists are comma separated, `#` starts
    /// a comment, and keys left out keep their default.
    pub fn parse(text: &str) -> Result<Self> {
        let mut grid = SweepGrid::default();
        let mut seen = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
            grid.set(key, value)?;
            seen.push(key);
        }
        grid.validate()?;
        Ok(grid)
    }

    /// Set one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "d_list" => self.d_list = parse_list(key, value)?,
            "n_list" => self.n_list = parse_list(key, value)?,
            "c_values" => self.c_values = parse_list(key, value)?,
            "seeds" => self.seeds = parse_list(key, value)?,
            "m_test" => self.m_test = parse_one(key, value)?,
            "alpha_witness" => self.alpha_witness = parse_one(key, value)?,
            "c_rule" => {
                self.c_rule = match value.trim() {
                    "absolute" => CRule::Absolute,
                    "n_root_multiple" => CRule::NRootMultiple,
                    other => return Err(Error::Config(format!("c_rule: unknown rule `{other}`"))),
                }
            }
            "f0" => {
                self.f0 = TargetFunction::from_id(value.trim())
                    .ok_or_else(|| Error::Config(format!("f0: unknown target `{}`", value.trim())))?
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown key `{other}` (expected one of {})",
                    CONFIG_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let lists = [
            ("d_list", self.d_list.is_empty()),
            ("n_list", self.n_list.is_empty()),
            ("c_values", self.c_values.is_empty()),
            ("seeds", self.seeds.is_empty()),
        ];
        for (key, empty) in lists {
            if empty {
                return Err(Error::Config(format!("{key} is empty")));
            }
        }
        for &d in &self.d_list {
            check_dimension(d).map_err(|_| Error::Config(format!("d_list: {d} is not an odd dimension")))?;
        }
        if self.n_list.contains(&0) {
            return Err(Error::Config("n_list: sample sizes must be positive".into()));
        }
        if let Some(c) = self.c_values.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
            return Err(Error::Config(format!("c_values: {c} is not positive")));
        }
        if self.m_test < 2 {
            return Err(Error::Config("m_test must be at least 2".into()));
        }
        if !(self.alpha_witness > 0.0 && self.alpha_witness < 0.5) {
            return Err(Error::Config(format!("alpha_witness: {} is not in (0, 1/2)", self.alpha_witness)));
        }
        Ok(())
    }

    /// Canonical text form; parsing it gives back the same grid.
    pub fn to_config_string(&self) -> String {
        fn join<T: ToString>(xs: &[T]) -> String {
            xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
        }
        let mut s = String::new();
        let _ = writeln!(s, "d_list = {}", join(&self.d_list));
        let _ = writeln!(s, "n_list = {}", join(&self.n_list));
        let _ = writeln!(s, "c_rule = {}", self.c_rule.id());
        let _ = writeln!(s, "c_values = {}", join(&self.c_values));
        let _ = writeln!(s, "seeds = {}", join(&self.seeds));
        let _ = writeln!(s, "f0 = {}", self.f0.id());
        let _ = writeln!(s, "m_test = {}", self.m_test);
        let _ = writeln!(s, "alpha_witness = {}", self.alpha_witness);
        s
    }

    /// First 16 hex digits of the SHA-256 of the canonical config.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_config_string().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn bandwidth(&self, d: usize, n: usize, value: f64) -> f64 {
        match self.c_rule {
            CRule::Absolute => value,
            CRule::NRootMultiple => value * (n as f64).powf(1.0 / d as f64),
        }
    }

    /// Cells in canonical order: d, n, c, seed.
    pub fn cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for &d in &self.d_list {
            for &n in &self.n_list {
                let root = (n as f64).powf(1.0 / d as f64);
                for &v in &self.c_values {
                    let c = self.bandwidth(d, n, v);
                    for &seed in &self.seeds {
                        cells.push(Cell {
                            d,
                            n,
                            c,
                            c_ratio: c / root,
                            seed,
                        });
                    }
                }
            }
        }
        cells
    }
}

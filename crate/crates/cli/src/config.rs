//! Run configuration: defaults, a `key = value` file, then flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

/// Everything a command needs. Output paths and the worker count are not
/// echoed into reports, so reports depend only on the mathematical inputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub q: u64,
    pub n: u32,
    pub r: usize,
    pub r_prime: usize,
    pub e: u32,
    pub variety: String,
    pub r_max: usize,
    pub rprime_max: usize,
    pub n_max: u32,
    /// Largest group order tabulated in full.
    pub group_cap: u64,
    /// Largest point set enumerated by brute force.
    pub point_cap: u64,
    /// Largest coefficient degree tried by the Lang search.
    pub lang_cap: u32,
    pub seed: u64,
    pub samples: usize,
    pub budget: u64,
    #[serde(skip)]
    pub workers: usize,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub csv: Option<PathBuf>,
    #[serde(skip)]
    pub timings: bool,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            q: 3,
            n: 3,
            r: 2,
            r_prime: 3,
            e: 2,
            variety: "Y-mod-SS".into(),
            r_max: 2,
            rprime_max: 4,
            n_max: 2,
            group_cap: 5000,
            point_cap: 1 << 24,
            lang_cap: 4,
            seed: 0,
            samples: 10_000,
            budget: edlforge::syscheck::DEFAULT_BUDGET,
            workers: 0,
            output: None,
            csv: None,
            timings: false,
        }
    }
}

impl RunConfig {
    /// Sets one key; `threads` is accepted as an alias of `workers`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().ok().with_context(|| format!("`{key}` expects a number, got `{v}`"))
        }
        match key {
            "q" => self.q = num(key, value)?,
            "n" => self.n = num(key, value)?,
            "r" => self.r = num(key, value)?,
            "r_prime" | "r-prime" => self.r_prime = num(key, value)?,
            "e" => self.e = num(key, value)?,
            "variety" => self.variety = value.to_string(),
            "r_max" | "r-max" => self.r_max = num(key, value)?,
            "rprime_max" | "rprime-max" => self.rprime_max = num(key, value)?,
            "n_max" | "n-max" => self.n_max = num(key, value)?,
            "group_cap" | "group-cap" => self.group_cap = num(key, value)?,
            "point_cap" | "point-cap" => self.point_cap = num(key, value)?,
            "lang_cap" | "lang-cap" => self.lang_cap = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "samples" => self.samples = num(key, value)?,
            "budget" => self.budget = num(key, value)?,
            "workers" | "threads" => self.workers = num(key, value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "csv" => self.csv = Some(PathBuf::from(value)),
            "timings" => {
                self.timings = match value {
                    "true" | "yes" | "1" => true,
                    "false" | "no" | "0" => false,
                    _ => bail!("`timings` expects true or false, got `{value}`"),
                }
            }
            _ => bail!("unknown configuration key `{key}`"),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').with_context(|| format!("line {}: expected `key = value`", no + 1))?;
            self.set(k.trim(), v.trim()).with_context(|| format!("line {}", no + 1))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.apply_text(&text).with_context(|| format!("in {}", path.display()))
    }

    /// `(p, k)` with `q = p^k`, for odd prime powers.
    pub fn prime_power(&self) -> Result<(u32, u32)> {
        prime_power(self.q)
    }

    /// Checks parameters shared by every command.
    pub fn validate(&self) -> Result<()> {
        let (p, _) = self.prime_power()?;
        if p == 2 {
            bail!("q must be odd (the ramified quadratic extension needs p != 2)");
        }
        if self.n == 0 || self.r == 0 || self.r_prime == 0 || self.e == 0 {
            bail!("n, r, r_prime and e must be positive");
        }
        if self.r_prime > edlforge::truncring::MAX_LEVEL {
            bail!("r_prime is at most {}", edlforge::truncring::MAX_LEVEL);
        }
        if self.e > 2 && !(self.q - 1).is_multiple_of(self.e as u64) {
            bail!("tame ramification e = {} needs e | q - 1", self.e);
        }
        if self.lang_cap == 0 {
            bail!("lang_cap must be positive");
        }
        Ok(())
    }
}

pub fn prime_power(q: u64) -> Result<(u32, u32)> {
    if q < 2 {
        bail!("q = {q} is not a prime power");
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).expect("q >= 2 has a prime factor");
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    if rest != 1 {
        bail!("q = {q} is not a prime power");
    }
    Ok((u32::try_from(p)?, k))
}

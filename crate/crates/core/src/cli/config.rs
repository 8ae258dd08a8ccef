//! Flat `key = value` configuration for the pipeline.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::evaluate::Method;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "CRFTIW_OUT_DIR";

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub curves: Option<PathBuf>,
    pub covariates: Option<PathBuf>,
    pub wavelet: String,
    /// Constant `C` of the link bandwidth `C n^{-1/5}`; the rule of thumb when unset.
    pub bandwidth_constant: Option<f64>,
    pub l_min: usize,
    pub l_max: usize,
    /// Elbow threshold used when `l_min < l_max`.
    pub tau: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub method: Method,
    pub truncate_to_dyadic: bool,
    /// Standardize covariate columns before the regression.
    pub standardize: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let out_dir = std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("crftiw-out"));
        PipelineConfig {
            curves: None,
            covariates: None,
            wavelet: "sym8".into(),
            bandwidth_constant: None,
            l_min: 3,
            l_max: 3,
            tau: 15.0,
            seed: 0,
            out_dir,
            method: Method::Crftiw,
            truncate_to_dyadic: false,
            standardize: false,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::InvalidConfig(format!(
            "bad value `{value}` for `{key}`"
        ))),
    }
}

/// Parses `3` or `1..10` (inclusive).
pub fn parse_l_range(value: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidConfig(format!("bad L range `{value}`"));
    let (lo, hi) = match value.split_once("..") {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim()
                .trim_start_matches('=')
                .parse()
                .map_err(|_| bad())?,
        ),
        None => {
            let l = value.trim().parse().map_err(|_| bad())?;
            (l, l)
        }
    };
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

impl PipelineConfig {
    /// Sets one key. Used for file entries and command-line overrides alike.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "curves" => self.curves = Some(PathBuf::from(value)),
            "covariates" => self.covariates = Some(PathBuf::from(value)),
            "wavelet" => self.wavelet = value.to_string(),
            "bandwidth_constant" => self.bandwidth_constant = Some(parse(key, value)?),
            "l" => (self.l_min, self.l_max) = parse_l_range(value)?,
            "tau" => self.tau = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "method" => self.method = value.parse()?,
            "truncate_to_dyadic" => self.truncate_to_dyadic = parse_bool(key, value)?,
            "standardize" => self.standardize = parse_bool(key, value)?,
            other => return Err(Error::InvalidConfig(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text`; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut config = PipelineConfig::default();
        config.apply_text(&text)?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.curves.is_none() {
            return Err(Error::InvalidConfig("no curves file given".into()));
        }
        if self.l_min == 0 || self.l_min > self.l_max {
            return Err(Error::InvalidConfig(format!(
                "empty L range {}..{}",
                self.l_min, self.l_max
            )));
        }
        if !(self.tau > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        if let Some(c) = self.bandwidth_constant {
            if !(c > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "bandwidth constant must be positive, got {c}"
                )));
            }
        }
        Ok(())
    }
}

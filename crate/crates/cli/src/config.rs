//! `key = value` experiment files for `sweep`.

use std::fs;
use std::path::Path;

use dioph_lab::rational::{parse_rational, Rational};

use crate::error::CliError;
use crate::params::{parse_grid, Grid, RegimeArg};

#[derive(Debug, Clone, Default)]
pub struct ExperimentConfig {
    pub seq: Option<String>,
    pub base: Option<u32>,
    pub eta: Option<Rational>,
    pub vhat: Option<Rational>,
    pub theta: Option<Rational>,
    pub rho: Option<Rational>,
    pub regime: Option<RegimeArg>,
    pub depth: Option<u64>,
    pub vhat_grid: Option<Grid>,
    pub theta_grid: Option<Grid>,
    pub burn_in: Option<f64>,
    pub out: Option<String>,
    pub seed: Option<u64>,
}

pub const KEYS: &[&str] = &[
    "seq",
    "base",
    "eta",
    "vhat",
    "theta",
    "rho",
    "regime",
    "depth",
    "vhat_grid",
    "theta_grid",
    "burn_in",
    "out",
    "seed",
];

impl ExperimentConfig {
    pub fn read(path: impl AsRef<Path>) -> Result<Self, CliError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |msg: String| CliError::Config { line, msg };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) =
                content.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.contains(&key.to_string()) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            seen.push(key.to_string());
            let rational = |v: &str| parse_rational(v).map_err(|e| err(e.to_string()));
            let integer =
                |v: &str| v.parse::<u64>().map_err(|_| err(format!("`{key}` needs a nonnegative integer, got `{v}`")));
            match key {
                "seq" => cfg.seq = Some(value.to_string()),
                "base" => cfg.base = Some(u32::try_from(integer(value)?).map_err(|_| err("base too large".into()))?),
                "eta" => cfg.eta = Some(rational(value)?),
                "vhat" => cfg.vhat = Some(rational(value)?),
                "theta" => cfg.theta = Some(rational(value)?),
                "rho" => cfg.rho = Some(rational(value)?),
                "regime" => cfg.regime = Some(value.parse().map_err(err)?),
                "depth" => cfg.depth = Some(integer(value)?),
                "vhat_grid" => cfg.vhat_grid = Some(parse_grid(value).map_err(err)?),
                "theta_grid" => cfg.theta_grid = Some(parse_grid(value).map_err(err)?),
                "burn_in" => {
                    cfg.burn_in = Some(value.parse::<f64>().map_err(|_| err(format!("bad burn_in `{value}`")))?)
                }
                "out" => cfg.out = Some(value.to_string()),
                "seed" => cfg.seed = Some(integer(value)?),
                _ => return Err(err(format!("unknown key `{key}` (known: {})", KEYS.join(", ")))),
            }
        }
        Ok(cfg)
    }
}

use std::fs;
use std::path::Path;

use serde::Deserialize;
use stripfe_core::strip::GeometryConfig;
use stripfe_core::{Error, Result, StripGeometry};

pub const DEFAULT_PRECISION: u32 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Records,
}

/// Optional `[run]` table of a config file; command-line flags take precedence.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub g_max: Option<usize>,
    pub precision: Option<u32>,
    pub q_order: Option<u32>,
    pub degree: Option<i64>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub geometry: StripGeometry,
    pub g_max: usize,
    pub precision: u32,
    pub q_order: u32,
    pub degree: i64,
    pub format: Format,
    pub seed: u64,
}

/// Overrides collected from flags and the environment.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub g_max: Option<usize>,
    pub precision: Option<u32>,
    pub q_order: Option<u32>,
    pub degree: Option<i64>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
}

pub fn parse(text: &str) -> Result<(GeometryConfig, RunSection)> {
    let mut table: toml::Table = text.parse().map_err(|e| Error::Parse(format!("{e}")))?;
    let run = match table.remove("run") {
        Some(v) => v.try_into().map_err(|e| Error::Parse(format!("[run]: {e}")))?,
        None => RunSection::default(),
    };
    let geom: GeometryConfig =
        toml::Value::Table(table).try_into().map_err(|e| Error::Parse(format!("{e}")))?;
    Ok((geom, run))
}

pub fn load(path: &Path, over: &Overrides) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let (geom, run) = parse(&text)?;
    let cfg = RunConfig {
        geometry: geom.into_geometry()?,
        g_max: over.g_max.or(run.g_max).unwrap_or(3),
        precision: over.precision.or(run.precision).unwrap_or(DEFAULT_PRECISION),
        q_order: over.q_order.or(run.q_order).unwrap_or(4),
        degree: over.degree.or(run.degree).unwrap_or(2),
        format: over.format.or(run.format).unwrap_or(Format::Table),
        seed: over.seed.or(run.seed).unwrap_or(0),
    };
    if cfg.precision < 64 {
        return Err(Error::Invalid(format!("precision {} is below 64 bits", cfg.precision)));
    }
    Ok(cfg)
}

use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::benchmark::{BenchmarkConfig, DataSettings, EstimatorKind, EstimatorSettings, Truncation};
use super::networks::builtin_network;
use super::sweep::{CovarianceSweepConfig, SWEEP_NOISE_PCT};
use crate::error::{Error, Result};
use crate::grid_model::NetworkSpec;
use crate::io::{read_network, ConfigFile};

/// A built-in network name or a path to a network file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetworkSource {
    Builtin(String),
    File(PathBuf),
}

impl NetworkSource {
    pub fn parse(s: &str) -> Self {
        let s = s.trim();
        if builtin_network(s).is_some() {
            NetworkSource::Builtin(s.to_string())
        } else {
            NetworkSource::File(PathBuf::from(s))
        }
    }

    /// Relative paths are resolved against `base`.
    pub fn load(&self, base: &Path) -> Result<(String, NetworkSpec)> {
        match self {
            NetworkSource::Builtin(name) => Ok((name.clone(), builtin_network(name).expect("checked at parse time"))),
            NetworkSource::File(path) => {
                let full = if path.is_absolute() { path.clone() } else { base.join(path) };
                let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("network").to_string();
                let spec = read_network(&full).map_err(|e| match e {
                    Error::Io(io) => Error::Config(format!("cannot read network {}: {io}", full.display())),
                    other => other,
                })?;
                Ok((name, spec))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TablePlan {
    pub networks: Vec<NetworkSource>,
    pub noise_pct: Vec<f64>,
    pub estimators: Vec<EstimatorKind>,
    pub replicates: usize,
    pub data: DataSettings,
    pub settings: EstimatorSettings,
    pub parallel: bool,
}

impl TablePlan {
    pub fn resolve(&self, base: &Path) -> Result<BenchmarkConfig> {
        Ok(BenchmarkConfig {
            networks: self.networks.iter().map(|s| s.load(base)).collect::<Result<_>>()?,
            noise_pct: self.noise_pct.clone(),
            estimators: self.estimators.clone(),
            replicates: self.replicates,
            data: self.data,
            settings: self.settings.clone(),
            parallel: self.parallel,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub network: NetworkSource,
    pub points: usize,
    pub correlation_length: f64,
    pub data: DataSettings,
    pub noise_pct: f64,
    pub settings: EstimatorSettings,
}

impl SweepPlan {
    pub fn resolve(&self, base: &Path) -> Result<CovarianceSweepConfig> {
        let (_, network) = self.network.load(base)?;
        Ok(CovarianceSweepConfig {
            network,
            samples: self.data.samples,
            noise_pct: self.noise_pct,
            points: self.points,
            current_sigma: self.data.current_sigma,
            correlation_length: self.correlation_length,
            operating_point: self.data.operating_point,
            settings: self.settings.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Table(TablePlan),
    Sweep(SweepPlan),
}

/// Validated run description; file names are relative to the output
/// directory.
#[derive(Debug, Clone, PartialEq)]
pub struct SuitePlan {
    pub experiment: Experiment,
    pub csv: String,
    pub markdown: Option<String>,
}

const TOP_KEYS: &[&str] = &["experiment", "parallel"];
const DATA_KEYS: &[&str] = &[
    "networks",
    "samples",
    "noise_pct",
    "replicates",
    "current_sigma",
    "constant_xr",
    "load",
    "reference_sigma",
];
const ESTIMATOR_KEYS: &[&str] = &[
    "run",
    "wcwf_l",
    "lasso_alpha_ratio",
    "lasso_max_iters",
    "lasso_tol",
    "map_beta",
    "map_max_iters",
    "map_tol",
    "condition_ceiling",
    "postfilter",
];
const TABLE_NOISE_PCT: f64 = 0.01;
const SWEEP_KEYS: &[&str] = &["network", "points", "correlation_length"];
const OUTPUT_KEYS: &[&str] = &["csv", "markdown"];

fn line_of(cfg: &ConfigFile, section: &str, key: &str) -> usize {
    cfg.get(section, key).map_or(0, |e| e.line)
}

/// Typed value that must satisfy `ok`.
fn checked<T: FromStr + Copy>(
    cfg: &ConfigFile,
    section: &str,
    key: &str,
    default: T,
    ok: impl Fn(T) -> bool,
    what: &str,
) -> Result<T> {
    let v = cfg.value_or(section, key, default)?;
    if !ok(v) {
        return Err(Error::parse(line_of(cfg, section, key), format!("{key} must be {what}")));
    }
    Ok(v)
}

fn positive(v: f64) -> bool {
    v > 0.0 && v.is_finite()
}

fn data_settings(cfg: &ConfigFile) -> Result<DataSettings> {
    let d = DataSettings::default();
    let mut op = d.operating_point;
    op.load = checked(cfg, "data", "load", op.load, |v: f64| v >= 0.0 && v.is_finite(), "≥ 0")?;
    op.reference_sigma =
        checked(cfg, "data", "reference_sigma", op.reference_sigma, |v: f64| v >= 0.0 && v.is_finite(), "≥ 0")?;
    Ok(DataSettings {
        samples: checked(cfg, "data", "samples", d.samples, |v| v >= 2, "at least 2")?,
        current_sigma: checked(cfg, "data", "current_sigma", d.current_sigma, positive, "positive")?,
        operating_point: op,
        constant_xr: cfg.value_or("data", "constant_xr", d.constant_xr)?,
    })
}

fn estimator_settings(cfg: &ConfigFile) -> Result<EstimatorSettings> {
    let d = EstimatorSettings::default();
    let section = "estimators";
    let truncation = match cfg.get(section, "wcwf_l") {
        None => d.truncation,
        Some(e) => e.value.parse::<Truncation>().map_err(|err| Error::parse(e.line, err.to_string()))?,
    };
    let map_beta = match cfg.get(section, "map_beta") {
        None => d.map_beta,
        Some(e) if e.value == "auto" => None,
        Some(_) => Some(checked(cfg, section, "map_beta", 0.0, positive, "positive or `auto`")?),
    };
    Ok(EstimatorSettings {
        truncation,
        lasso_alpha_ratio: checked(cfg, section, "lasso_alpha_ratio", d.lasso_alpha_ratio, |v: f64| v >= 0.0 && v.is_finite(), "≥ 0")?,
        lasso_max_iters: checked(cfg, section, "lasso_max_iters", d.lasso_max_iters, |v| v > 0, "positive")?,
        lasso_tol: checked(cfg, section, "lasso_tol", d.lasso_tol, positive, "positive")?,
        map_beta,
        map_max_iters: checked(cfg, section, "map_max_iters", d.map_max_iters, |v| v > 0, "positive")?,
        map_tol: checked(cfg, section, "map_tol", d.map_tol, positive, "positive")?,
        condition_ceiling: checked(cfg, section, "condition_ceiling", d.condition_ceiling, positive, "positive")?,
        postfilter: cfg.value_or(section, "postfilter", d.postfilter)?,
    })
}

fn noise_levels(cfg: &ConfigFile, default: f64) -> Result<Vec<f64>> {
    let levels: Vec<f64> = cfg.list("data", "noise_pct")?.unwrap_or_else(|| vec![default]);
    if levels.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::parse(line_of(cfg, "data", "noise_pct"), "noise_pct values must be finite and ≥ 0"));
    }
    Ok(levels)
}

fn output_name(cfg: &ConfigFile, key: &str) -> Result<Option<String>> {
    match cfg.get("output", key) {
        None => Ok(None),
        Some(e) if e.value.contains(['/', '\\']) || e.value.starts_with('.') => {
            Err(Error::parse(e.line, format!("{key} must be a plain file name")))
        }
        Some(e) => Ok(Some(e.value.clone())),
    }
}

/// Validates a suite config without touching the filesystem.
pub fn plan_from_config(cfg: &ConfigFile) -> Result<SuitePlan> {
    cfg.check_sections(&["data", "estimators", "sweep", "output"])?;
    cfg.check_keys("", TOP_KEYS)?;
    cfg.check_keys("data", DATA_KEYS)?;
    cfg.check_keys("estimators", ESTIMATOR_KEYS)?;
    cfg.check_keys("sweep", SWEEP_KEYS)?;
    cfg.check_keys("output", OUTPUT_KEYS)?;

    let data = data_settings(cfg)?;
    let settings = estimator_settings(cfg)?;
    let kind = cfg.get("", "experiment").map_or("table", |e| e.value.as_str());
    let noise = noise_levels(cfg, if kind == "sweep" { SWEEP_NOISE_PCT } else { TABLE_NOISE_PCT })?;
    let (experiment, default_csv) = match kind {
        "table" => {
            if cfg.has_section("sweep") {
                return Err(Error::Config("[sweep] is only valid with experiment = sweep".into()));
            }
            let networks: Vec<String> = cfg
                .list("data", "networks")?
                .ok_or_else(|| Error::Config("[data] networks is required".into()))?;
            let estimators = match cfg.get("estimators", "run") {
                None => EstimatorKind::ALL.to_vec(),
                Some(e) if e.value == "all" => EstimatorKind::ALL.to_vec(),
                Some(e) => e
                    .value
                    .split(',')
                    .map(|s| s.parse().map_err(|err: Error| Error::parse(e.line, err.to_string())))
                    .collect::<Result<Vec<_>>>()?,
            };
            let plan = TablePlan {
                networks: networks.iter().map(|s| NetworkSource::parse(s)).collect(),
                noise_pct: noise,
                estimators,
                replicates: checked(cfg, "data", "replicates", 1usize, |v| v > 0, "positive")?,
                data,
                settings,
                parallel: cfg.value_or("", "parallel", false)?,
            };
            (Experiment::Table(plan), "benchmark.csv")
        }
        "sweep" => {
            if noise.len() != 1 {
                return Err(Error::parse(line_of(cfg, "data", "noise_pct"), "sweep takes a single noise level"));
            }
            if cfg.get("data", "networks").is_some() || cfg.get("data", "replicates").is_some() {
                return Err(Error::Config("sweep takes [sweep] network, not [data] networks or replicates".into()));
            }
            let network = cfg
                .get("sweep", "network")
                .ok_or_else(|| Error::Config("[sweep] network is required".into()))?;
            let plan = SweepPlan {
                network: NetworkSource::parse(&network.value),
                points: checked(cfg, "sweep", "points", 9usize, |v| v >= 2, "at least 2")?,
                correlation_length: checked(cfg, "sweep", "correlation_length", 2.0, positive, "positive")?,
                data,
                noise_pct: noise[0],
                settings,
            };
            (Experiment::Sweep(plan), "sweep.csv")
        }
        other => {
            return Err(Error::parse(
                line_of(cfg, "", "experiment"),
                format!("experiment must be `table` or `sweep`, got {other:?}"),
            ))
        }
    };
    Ok(SuitePlan {
        experiment,
        csv: output_name(cfg, "csv")?.unwrap_or_else(|| default_csv.to_string()),
        markdown: output_name(cfg, "markdown")?,
    })
}

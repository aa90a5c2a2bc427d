use std::fmt::Write;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use super::metrics::{mean_std, relative_frobenius_error};
use crate::covariance::{condition_number, joint_covariance, sample_covariance, truncated_eigenbasis};
use crate::error::{Error, Result};
use crate::estimators::{
    build_structure_maps, constrained_ls, lasso_alpha_max, lasso_estimate, map_lambda_estimate, ols_estimate,
    postfilter, recover_eigenvectors, wcwf_estimate, wiener_filter, LassoConfig, MapLambdaConfig,
    DEFAULT_CONDITION_CEILING,
};
use crate::grid_model::{build_admittance, make_constant_xr, NetworkSpec};
use crate::linalg::CMat;
use crate::scenario::{center, mix_seed, simulate, CurrentModel, NoiseLevel, OperatingPoint, PhasorDataset, SimulationConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorKind {
    Ols,
    Lasso,
    Wiener,
    Wcwf,
    MapLambda,
    ConstrainedLs,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 6] = [
        EstimatorKind::Ols,
        EstimatorKind::Lasso,
        EstimatorKind::Wiener,
        EstimatorKind::Wcwf,
        EstimatorKind::MapLambda,
        EstimatorKind::ConstrainedLs,
    ];

    /// Short name used in files and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Ols => "ols",
            EstimatorKind::Lasso => "lasso",
            EstimatorKind::Wiener => "wiener",
            EstimatorKind::Wcwf => "wcwf",
            EstimatorKind::MapLambda => "map",
            EstimatorKind::ConstrainedLs => "cls",
        }
    }

    /// Display name used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            EstimatorKind::Ols => "OLS",
            EstimatorKind::Lasso => "Lasso",
            EstimatorKind::Wiener => "Wiener",
            EstimatorKind::Wcwf => "WCWF",
            EstimatorKind::MapLambda => "MAP_λ",
            EstimatorKind::ConstrainedLs => "Constrained LS",
        }
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = match s.trim() {
            "constrained_ls" => "cls",
            "map_lambda" => "map",
            other => other,
        };
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown estimator {s:?}")))
    }
}

/// Number of retained eigenpairs for the well-conditioned Wiener filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// `L = n`.
    BusCount,
    Fixed(usize),
}

impl Truncation {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            Truncation::BusCount => n,
            Truncation::Fixed(l) => l,
        }
    }
}

impl FromStr for Truncation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "n" => Ok(Truncation::BusCount),
            other => other
                .parse()
                .ok()
                .filter(|&l: &usize| l > 0)
                .map(Truncation::Fixed)
                .ok_or_else(|| Error::InvalidParameter(format!("truncation must be `n` or a positive integer, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSettings {
    pub truncation: Truncation,
    /// Lasso weight as a fraction of the smallest weight giving `Ŷ = 0`.
    pub lasso_alpha_ratio: f64,
    pub lasso_max_iters: usize,
    pub lasso_tol: f64,
    /// Ridge weight; `None` derives it from the dataset noise levels.
    pub map_beta: Option<f64>,
    pub map_max_iters: usize,
    pub map_tol: f64,
    pub condition_ceiling: f64,
    /// Project every estimate onto symmetric zero-row-sum matrices.
    pub postfilter: bool,
}

impl Default for EstimatorSettings {
    fn default() -> Self {
        let lasso = LassoConfig::default();
        let map = MapLambdaConfig::default();
        Self {
            truncation: Truncation::BusCount,
            lasso_alpha_ratio: 1e-3,
            lasso_max_iters: lasso.max_iters,
            lasso_tol: lasso.tol,
            map_beta: None,
            map_max_iters: map.max_iters,
            map_tol: map.tol,
            condition_ceiling: DEFAULT_CONDITION_CEILING,
            postfilter: false,
        }
    }
}

impl EstimatorSettings {
    pub fn map_config(&self, ds: &PhasorDataset) -> MapLambdaConfig {
        let base = MapLambdaConfig::for_noise(ds.sigma_v, ds.sigma_i);
        MapLambdaConfig {
            beta: self.map_beta.unwrap_or(base.beta),
            max_iters: self.map_max_iters,
            tol: self.map_tol,
            record_trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorRun {
    pub estimate: CMat,
    /// Seconds spent inside the estimator, excluding data handling.
    pub wall_time: f64,
    /// False when an iterative estimator hit its iteration budget.
    pub converged: bool,
}

/// Runs one estimator on a dataset, centering it first if needed.
pub fn run_estimator(kind: EstimatorKind, ds: &PhasorDataset, settings: &EstimatorSettings) -> Result<EstimatorRun> {
    let centered;
    let ds = if ds.centered {
        ds
    } else {
        centered = center(ds)?;
        &centered
    };
    let n = ds.n();
    let start = Instant::now();
    let mut converged = true;
    let mut estimate = match kind {
        EstimatorKind::Ols => ols_estimate(ds)?,
        EstimatorKind::Lasso => {
            let cfg = LassoConfig {
                alpha: settings.lasso_alpha_ratio * lasso_alpha_max(ds),
                max_iters: settings.lasso_max_iters,
                tol: settings.lasso_tol,
            };
            let out = lasso_estimate(ds, &cfg)?;
            converged = out.converged;
            out.estimate
        }
        EstimatorKind::Wiener => {
            let jc = joint_covariance(&ds.i_meas, &ds.v_meas)?;
            wiener_filter(&jc, settings.condition_ceiling)?.estimate
        }
        EstimatorKind::Wcwf => {
            let jc = joint_covariance(&ds.i_meas, &ds.v_meas)?;
            wcwf_estimate(&truncated_eigenbasis(&jc, settings.truncation.resolve(n))?)?
        }
        EstimatorKind::MapLambda => {
            let rec = recover_eigenvectors(&sample_covariance(&ds.v_meas)?)?;
            let out = map_lambda_estimate(ds, &rec.basis.w, &settings.map_config(ds))?;
            converged = out.converged;
            out.estimate
        }
        EstimatorKind::ConstrainedLs => constrained_ls(ds, &build_structure_maps(n)?)?,
    };
    if settings.postfilter && kind != EstimatorKind::ConstrainedLs {
        estimate = postfilter(&estimate, &build_structure_maps(n)?)?;
    }
    Ok(EstimatorRun {
        estimate,
        wall_time: start.elapsed().as_secs_f64(),
        converged,
    })
}

/// Condition numbers of the matrices the covariance-based filters invert.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionDiagnostics {
    pub kappa_sigma_v: f64,
    pub kappa_sigma_i: f64,
    /// κ(X_VLᴴ X_VL); `None` when the truncation is invalid for this `n`.
    pub kappa_xvl: Option<f64>,
}

pub fn condition_diagnostics(ds: &PhasorDataset, truncation: Truncation) -> Result<ConditionDiagnostics> {
    let jc = joint_covariance(&ds.i_meas, &ds.v_meas)?;
    let kappa_xvl = truncated_eigenbasis(&jc, truncation.resolve(ds.n()))
        .ok()
        .map(|tb| condition_number(&(tb.x_vl.adjoint() * &tb.x_vl)))
        .transpose()?;
    Ok(ConditionDiagnostics {
        kappa_sigma_v: condition_number(&jc.sigma_v())?,
        kappa_sigma_i: condition_number(&jc.sigma_i())?,
        kappa_xvl,
    })
}

/// Data-generation settings shared by every benchmark cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataSettings {
    pub samples: usize,
    /// Standard deviation of the white current fluctuations, per unit.
    pub current_sigma: f64,
    pub operating_point: OperatingPoint,
    /// Replace every network by its constant-x/r version.
    pub constant_xr: bool,
}

impl Default for DataSettings {
    fn default() -> Self {
        Self {
            samples: 10_080,
            current_sigma: 0.01,
            operating_point: OperatingPoint::default(),
            constant_xr: false,
        }
    }
}

impl DataSettings {
    /// White currents, balanced whenever the network has no shunt path.
    pub fn simulation_config(&self, spec: &NetworkSpec, noise_pct: f64) -> Result<SimulationConfig> {
        let noise = NoiseLevel::PercentOfMean(noise_pct);
        Ok(SimulationConfig {
            samples: self.samples,
            currents: CurrentModel::white(self.current_sigma, !spec.has_shunts())?,
            operating_point: self.operating_point,
            noise_v: noise,
            noise_i: noise,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub networks: Vec<(String, NetworkSpec)>,
    pub noise_pct: Vec<f64>,
    pub estimators: Vec<EstimatorKind>,
    pub replicates: usize,
    pub data: DataSettings,
    pub settings: EstimatorSettings,
    /// Run cells concurrently. Timings are then affected by contention.
    pub parallel: bool,
}

/// One row of the benchmark report.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationReport {
    pub network: String,
    pub n: usize,
    pub samples: usize,
    pub noise_pct: f64,
    pub estimator: EstimatorKind,
    pub seed: u64,
    /// `None` when the estimator failed.
    pub epsilon_f: Option<f64>,
    pub wall_time: f64,
    pub diagnostics: ConditionDiagnostics,
    pub converged: bool,
    pub error: Option<String>,
}

/// Seed of replicate `k`; shared by every network and noise level so that
/// noise sweeps reuse the same underlying draws.
pub fn replicate_seed(master: u64, k: usize) -> u64 {
    mix_seed(master, k as u64)
}

fn run_cell(
    cfg: &BenchmarkConfig,
    name: &str,
    spec: &NetworkSpec,
    noise_pct: f64,
    seed: u64,
) -> Result<Vec<EstimationReport>> {
    let y = build_admittance(spec);
    let ds = center(&simulate(&y, &cfg.data.simulation_config(spec, noise_pct)?, seed)?)?;
    let diagnostics = condition_diagnostics(&ds, cfg.settings.truncation)?;
    let reports = cfg
        .estimators
        .iter()
        .map(|&kind| {
            let base = EstimationReport {
                network: name.to_string(),
                n: spec.n(),
                samples: ds.samples(),
                noise_pct,
                estimator: kind,
                seed,
                epsilon_f: None,
                wall_time: f64::NAN,
                diagnostics,
                converged: false,
                error: None,
            };
            match run_estimator(kind, &ds, &cfg.settings)
                .and_then(|run| Ok((relative_frobenius_error(&run.estimate, y.matrix())?, run)))
            {
                Ok((eps, run)) => EstimationReport {
                    epsilon_f: Some(eps),
                    wall_time: run.wall_time,
                    converged: run.converged,
                    ..base
                },
                Err(e) => EstimationReport {
                    error: Some(e.to_string()),
                    ..base
                },
            }
        })
        .collect();
    Ok(reports)
}

/// Runs every (network, noise level, replicate) cell. Estimator failures are
/// recorded in the reports; data-generation failures abort the run.
pub fn run_benchmark(cfg: &BenchmarkConfig, master_seed: u64) -> Result<Vec<EstimationReport>> {
    if cfg.replicates == 0 || cfg.networks.is_empty() || cfg.noise_pct.is_empty() || cfg.estimators.is_empty() {
        return Err(Error::Config("benchmark needs networks, noise levels, estimators and ≥ 1 replicate".into()));
    }
    let mut cells = Vec::new();
    for (name, spec) in &cfg.networks {
        let spec = if cfg.data.constant_xr { make_constant_xr(spec) } else { spec.clone() };
        for &noise in &cfg.noise_pct {
            for k in 0..cfg.replicates {
                cells.push((name.clone(), spec.clone(), noise, replicate_seed(master_seed, k)));
            }
        }
    }
    let run = |(name, spec, noise, seed): &(String, NetworkSpec, f64, u64)| run_cell(cfg, name, spec, *noise, *seed);
    let results: Vec<Result<Vec<EstimationReport>>> = if cfg.parallel {
        cells.par_iter().map(run).collect()
    } else {
        cells.iter().map(run).collect()
    };
    let mut reports = Vec::new();
    for r in results {
        reports.extend(r?);
    }
    Ok(reports)
}

pub const CSV_HEADER: &str = "network,n,N,noise_pct,estimator,seed,eps_F,tau_s,kappa_sigma_V,kappa_sigma_I,kappa_XVL,converged";

fn sci(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6e}")).unwrap_or_default()
}

/// Machine-readable report. Failed estimators have an empty `eps_F` and
/// `converged = failed`.
pub fn reports_to_csv(reports: &[EstimationReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let status = match (&r.error, r.converged) {
            (Some(_), _) => "failed",
            (None, true) => "true",
            (None, false) => "false",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{:.6},{},{},{},{}",
            r.network,
            r.n,
            r.samples,
            r.noise_pct,
            r.estimator.name(),
            r.seed,
            sci(r.epsilon_f),
            r.wall_time,
            sci(Some(r.diagnostics.kappa_sigma_v)),
            sci(Some(r.diagnostics.kappa_sigma_i)),
            sci(r.diagnostics.kappa_xvl),
            status
        );
    }
    out
}

fn unique<T: PartialEq + Clone>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for it in items {
        if !out.contains(&it) {
            out.push(it);
        }
    }
    out
}

fn pm(values: &[f64], scale: f64, digits: usize) -> String {
    let (m, s) = mean_std(values);
    if values.len() > 1 {
        format!("{:.*} ± {:.*}", digits, m * scale, digits, s * scale)
    } else {
        format!("{:.*}", digits, m * scale)
    }
}

/// Human-readable accuracy/time and conditioning tables, one pair per
/// noise level. Multi-seed cells show mean ± standard deviation.
pub fn reports_to_markdown(reports: &[EstimationReport]) -> String {
    let mut out = String::new();
    let networks = unique(reports.iter().map(|r| r.network.clone()));
    let estimators = unique(reports.iter().map(|r| r.estimator));
    for noise in unique(reports.iter().map(|r| r.noise_pct)) {
        let at_noise: Vec<&EstimationReport> = reports.iter().filter(|r| r.noise_pct == noise).collect();
        let _ = writeln!(out, "## Accuracy and computation time, noise {noise} %\n");
        out.push_str("| Estimator |");
        for net in &networks {
            let _ = write!(out, " {net} ε_F [%] | {net} τ [s] |");
        }
        out.push_str("\n|---|");
        out.push_str(&"---|---|".repeat(networks.len()));
        out.push('\n');
        for &kind in &estimators {
            let _ = write!(out, "| {} |", kind.label());
            for net in &networks {
                let rows: Vec<&&EstimationReport> =
                    at_noise.iter().filter(|r| r.estimator == kind && &r.network == net).collect();
                let eps: Vec<f64> = rows.iter().filter_map(|r| r.epsilon_f).collect();
                let tau: Vec<f64> = rows.iter().filter(|r| r.error.is_none()).map(|r| r.wall_time).collect();
                if eps.is_empty() {
                    out.push_str(" failed | – |");
                } else {
                    let flag = if rows.iter().any(|r| r.error.is_none() && !r.converged) { " (not converged)" } else { "" };
                    let _ = write!(out, " {}{flag} | {} |", pm(&eps, 100.0, 2), pm(&tau, 1.0, 4));
                }
            }
            out.push('\n');
        }
        let _ = writeln!(out, "\n## Condition numbers of inverted matrices, noise {noise} %\n");
        out.push_str("| Network | κ(Σ_V) | κ(Σ_I) | κ(X_VLᴴX_VL) |\n|---|---|---|---|\n");
        for net in &networks {
            let mut seen = Vec::new();
            for r in at_noise.iter().filter(|r| &r.network == net) {
                if !seen.contains(&r.seed) {
                    seen.push(r.seed);
                }
            }
            let rows: Vec<&&EstimationReport> = seen
                .iter()
                .filter_map(|s| at_noise.iter().find(|r| &r.network == net && r.seed == *s))
                .collect();
            let mean = |f: &dyn Fn(&EstimationReport) -> Option<f64>| {
                let v: Vec<f64> = rows.iter().filter_map(|r| f(r)).collect();
                if v.is_empty() { "–".to_string() } else { format!("{:.2e}", mean_std(&v).0) }
            };
            let _ = writeln!(
                out,
                "| {net} | {} | {} | {} |",
                mean(&|r| Some(r.diagnostics.kappa_sigma_v)),
                mean(&|r| Some(r.diagnostics.kappa_sigma_i)),
                mean(&|r| r.diagnostics.kappa_xvl)
            );
        }
        out.push('\n');
    }
    out
}

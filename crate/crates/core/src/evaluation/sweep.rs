use std::fmt::Write;

use rayon::prelude::*;

use super::benchmark::{run_estimator, EstimatorKind, EstimatorSettings};
use super::metrics::{dist_w, relative_frobenius_error, spearman};
use crate::covariance::sample_covariance;
use crate::error::{Error, Result};
use crate::estimators::recover_eigenvectors;
use crate::grid_model::{build_admittance, make_constant_xr, reconstruct, spectral_decompose, NetworkSpec};
use crate::linalg::{self, c, CMat, CVec};
use crate::scenario::{center, simulate, CurrentModel, NoiseLevel, OperatingPoint, SimulationConfig};

/// Default sweep noise. The sweep looks at modelling bias, so noise stays
/// well below the level where it dominates the error on either network.
pub const SWEEP_NOISE_PCT: f64 = 1e-4;

/// Sweep of the current covariance from white, `σ²I`, toward a spatially
/// correlated `S` with the same trace: `Σ_I(t) = (1 − t) σ² I + t S`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSweepConfig {
    pub network: NetworkSpec,
    pub samples: usize,
    pub noise_pct: f64,
    pub points: usize,
    pub current_sigma: f64,
    /// `S_ij = σ² exp(−|i − j| / ℓ)` over bus indices.
    pub correlation_length: f64,
    pub operating_point: OperatingPoint,
    pub settings: EstimatorSettings,
}

impl CovarianceSweepConfig {
    pub fn new(network: NetworkSpec) -> Self {
        Self {
            network,
            samples: 10_080,
            noise_pct: SWEEP_NOISE_PCT,
            points: 9,
            current_sigma: 0.01,
            correlation_length: 2.0,
            operating_point: OperatingPoint::default(),
            settings: EstimatorSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub t: f64,
    /// dist_W of the (balanced) current covariance, with `W` the eigenbasis
    /// of the constant-x/r admittance matrix.
    pub dist_w_sigma_i: f64,
    /// dist_W of the true constant-x/r matrix in the recovered basis.
    pub basis_mismatch: f64,
    /// MAP_λ error on the constant-x/r network.
    pub eps_f_constant_xr: f64,
    /// MAP_λ error on the network as given.
    pub eps_f_original: f64,
    pub converged: bool,
}

fn structured_covariance(n: usize, sigma: f64, length: f64) -> CMat {
    CMat::from_fn(n, n, |i, j| c(sigma * sigma * (-(i.abs_diff(j) as f64) / length).exp(), 0.0))
}

/// Hermitian square root of a positive semidefinite matrix.
fn psd_sqrt(a: &CMat) -> CMat {
    let (values, vectors) = linalg::hermitian_eigen_desc(a);
    let d = CVec::from_iterator(values.len(), values.iter().map(|v| c(v.max(0.0).sqrt(), 0.0)));
    reconstruct(&vectors, &d)
}

pub fn covariance_sweep(cfg: &CovarianceSweepConfig, seed: u64) -> Result<Vec<SweepPoint>> {
    if cfg.points < 2 {
        return Err(Error::InvalidParameter(format!("sweep needs ≥ 2 points, got {}", cfg.points)));
    }
    if !(cfg.current_sigma > 0.0 && cfg.correlation_length > 0.0) {
        return Err(Error::InvalidParameter("sweep needs positive current sigma and correlation length".into()));
    }
    let n = cfg.network.n();
    let constant = make_constant_xr(&cfg.network);
    let y_const = build_admittance(&constant);
    let y_orig = build_admittance(&cfg.network);
    let w = spectral_decompose(&y_const)?.w;
    let balanced = !cfg.network.has_shunts();
    let white = CMat::identity(n, n).scale(cfg.current_sigma.powi(2));
    let s = structured_covariance(n, cfg.current_sigma, cfg.correlation_length);

    let ts: Vec<f64> = (0..cfg.points).map(|k| k as f64 / (cfg.points - 1) as f64).collect();
    ts.par_iter()
        .map(|&t| {
            let sigma_i = white.scale(1.0 - t) + s.scale(t);
            let currents = CurrentModel::colored(psd_sqrt(&sigma_i), balanced)?;
            let dist_w_sigma_i = dist_w(&currents.effective_covariance(n), &w)?;
            let sim = SimulationConfig {
                samples: cfg.samples,
                currents,
                operating_point: cfg.operating_point,
                noise_v: NoiseLevel::PercentOfMean(cfg.noise_pct),
                noise_i: NoiseLevel::PercentOfMean(cfg.noise_pct),
            };
            let ds_const = center(&simulate(&y_const, &sim, seed)?)?;
            let run_const = run_estimator(EstimatorKind::MapLambda, &ds_const, &cfg.settings)?;
            let rec = recover_eigenvectors(&sample_covariance(&ds_const.v_meas)?)?;
            let ds_orig = center(&simulate(&y_orig, &sim, seed)?)?;
            let run_orig = run_estimator(EstimatorKind::MapLambda, &ds_orig, &cfg.settings)?;
            Ok(SweepPoint {
                t,
                dist_w_sigma_i,
                basis_mismatch: dist_w(y_const.matrix(), &rec.basis.w)?,
                eps_f_constant_xr: relative_frobenius_error(&run_const.estimate, y_const.matrix())?,
                eps_f_original: relative_frobenius_error(&run_orig.estimate, y_orig.matrix())?,
                converged: run_const.converged && run_orig.converged,
            })
        })
        .collect()
}

/// Spearman correlation between dist_W(Σ_I) and the constant-x/r error.
pub fn sweep_trend(points: &[SweepPoint]) -> f64 {
    let d: Vec<f64> = points.iter().map(|p| p.dist_w_sigma_i).collect();
    let e: Vec<f64> = points.iter().map(|p| p.eps_f_constant_xr).collect();
    spearman(&d, &e)
}

pub const SWEEP_CSV_HEADER: &str = "t,dist_W_sigma_I,basis_mismatch,eps_F_constant_xr,eps_F_original,converged";

pub fn sweep_to_csv(points: &[SweepPoint]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{:.6},{:.6e},{:.6e},{:.6e},{:.6e},{}",
            p.t, p.dist_w_sigma_i, p.basis_mismatch, p.eps_f_constant_xr, p.eps_f_original, p.converged
        );
    }
    out
}

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid_model::{reconstruct, SpectralBasis};
use crate::linalg::{self, fro, CMat, CVec};
use crate::scenario::PhasorDataset;

const BETA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapLambdaConfig {
    /// Ridge weight on the eigenvalues.
    pub beta: f64,
    pub max_iters: usize,
    /// Stop once ‖λ⁽ᵏ⁾ − λ⁽ᵏ⁻¹⁾‖ ≤ tol·‖λ⁽ᵏ⁾‖.
    pub tol: f64,
    /// Keep the objective after every half-step.
    pub record_trace: bool,
}

impl Default for MapLambdaConfig {
    fn default() -> Self {
        Self {
            beta: BETA_FLOOR,
            // Near a fixed point each sweep contracts the error in mode i by
            // |λ_i|²/(1 + |λ_i|²), so large eigenvalues need many sweeps.
            max_iters: 1_000_000,
            tol: 1e-10,
            record_trace: false,
        }
    }
}

impl MapLambdaConfig {
    /// `β = σ_v² + σ_i²`, floored so the λ-update stays well defined.
    pub fn for_noise(sigma_v: f64, sigma_i: f64) -> Self {
        Self {
            beta: (sigma_v * sigma_v + sigma_i * sigma_i).max(BETA_FLOOR),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be > 0, got {}", self.beta)));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter(format!("tol must be > 0, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be ≥ 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapLambdaOutput {
    pub estimate: CMat,
    pub lambda: CVec,
    pub iterations: usize,
    pub converged: bool,
    pub objective: f64,
    /// Objective after the initial point and after every half-step; empty
    /// unless requested.
    pub objective_trace: Vec<f64>,
}

/// Closed-form minimizer of the objective over λ for fixed ν:
/// `λ_i = Σ_t φ_it ν̄_it / (β + Σ_t |ν_it|²)`.
pub fn lambda_step(nu: &CMat, phi: &CMat, beta: f64) -> CVec {
    CVec::from_iterator(
        nu.nrows(),
        (0..nu.nrows()).map(|i| {
            let mut num = linalg::ZERO;
            let mut den = beta;
            for t in 0..nu.ncols() {
                let v = nu[(i, t)];
                num += phi[(i, t)] * v.conj();
                den += v.norm_sqr();
            }
            num / den
        }),
    )
}

/// Closed-form minimizer over ν for fixed λ:
/// `ν = (I + |Λ|²)⁻¹ (ν̃ + Λ̄ φ)`.
pub fn nu_step(nu_tilde: &CMat, phi: &CMat, lambda: &CVec) -> CMat {
    let mut nu = nu_tilde.clone();
    for (i, mut row) in nu.row_iter_mut().enumerate() {
        let l = lambda[i];
        let scale = 1.0 / (1.0 + l.norm_sqr());
        for (t, z) in row.iter_mut().enumerate() {
            *z = (*z + l.conj() * phi[(i, t)]) * scale;
        }
    }
    nu
}

/// Per-mode sums `a = Σ|ν̃|²`, `b = Σ|φ|²`, `c = Σ φ ν̃*`. Every iterate
/// has the form `ν = p ν̃ + q φ` per mode, so these sums determine both
/// updates and the objective without touching the samples again.
struct ModeStats {
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<Complex64>,
}

impl ModeStats {
    fn new(nu_tilde: &CMat, phi: &CMat) -> Self {
        let n = nu_tilde.nrows();
        let mut st = Self {
            a: vec![0.0; n],
            b: vec![0.0; n],
            c: vec![linalg::ZERO; n],
        };
        for t in 0..nu_tilde.ncols() {
            for i in 0..n {
                let (v, f) = (nu_tilde[(i, t)], phi[(i, t)]);
                st.a[i] += v.norm_sqr();
                st.b[i] += f.norm_sqr();
                st.c[i] += f * v.conj();
            }
        }
        st
    }

    /// λ update for a mode whose latent voltages are `p ν̃ + q φ`.
    fn lambda(&self, i: usize, p: Complex64, q: Complex64, beta: f64) -> Complex64 {
        let num = p.conj() * self.c[i] + q.conj() * self.b[i];
        let energy = p.norm_sqr() * self.a[i] + q.norm_sqr() * self.b[i] + 2.0 * (p * q.conj() * self.c[i].conj()).re;
        num / (beta + energy.max(0.0))
    }

    /// Data-fit part of the objective for one mode.
    fn fit(&self, i: usize, p: Complex64, q: Complex64, l: Complex64) -> f64 {
        let one = Complex64::new(1.0, 0.0);
        let (a, b, c) = (self.a[i], self.b[i], self.c[i]);
        let v_fit = (one - p).norm_sqr() * a + q.norm_sqr() * b - 2.0 * ((one - p) * q.conj() * c.conj()).re;
        let lp = l * p;
        let i_fit = (one - l * q).norm_sqr() * b + lp.norm_sqr() * a - 2.0 * ((one - l * q) * lp.conj() * c).re;
        v_fit.max(0.0) + i_fit.max(0.0)
    }

    fn objective(&self, p: &[Complex64], q: &[Complex64], lambda: &[Complex64], beta: f64) -> f64 {
        let ridge: f64 = lambda.iter().map(|l| l.norm_sqr()).sum();
        (0..lambda.len()).map(|i| self.fit(i, p[i], q[i], lambda[i])).sum::<f64>() + beta * ridge
    }
}

/// MAP objective `‖Ṽ − Wν‖²_F + ‖Ĩ − W diag(λ) ν‖²_F + β‖λ‖²` evaluated in
/// bus coordinates.
pub fn map_lambda_objective(ds: &PhasorDataset, w: &CMat, nu: &CMat, lambda: &CVec, beta: f64) -> f64 {
    let v_fit = w * nu;
    let mut lnu = nu.clone();
    for (i, mut row) in lnu.row_iter_mut().enumerate() {
        row *= lambda[i];
    }
    let i_fit = w * lnu;
    fro(&(&ds.v_meas - v_fit)).powi(2) + fro(&(&ds.i_meas - i_fit)).powi(2) + beta * lambda.norm_squared()
}

/// Block coordinate descent over eigenvalues λ and latent spectral voltages
/// ν for a fixed unitary eigenbasis `W`.
pub fn map_lambda_estimate(ds: &PhasorDataset, w: &CMat, cfg: &MapLambdaConfig) -> Result<MapLambdaOutput> {
    cfg.validate()?;
    let n = ds.n();
    if w.nrows() != n || w.ncols() != n {
        return Err(Error::Dimension(format!("basis is {}×{}, data has n = {n}", w.nrows(), w.ncols())));
    }
    let unitarity = fro(&(w.adjoint() * w - CMat::identity(n, n)));
    if unitarity > 1e-8 * (n as f64).sqrt() {
        return Err(Error::InvalidParameter(format!("basis is not unitary (‖WᴴW − I‖ = {unitarity:.3e})")));
    }
    let wh = w.adjoint();
    let stats = ModeStats::new(&linalg::matmul(&wh, &ds.v_meas), &linalg::matmul(&wh, &ds.i_meas));

    // Start from ν = ν̃ (p = 1, q = 0).
    let mut p = vec![Complex64::new(1.0, 0.0); n];
    let mut q = vec![linalg::ZERO; n];
    let mut lambda = vec![linalg::ZERO; n];
    let mut next = lambda.clone();
    let mut trace = Vec::new();
    if cfg.record_trace {
        trace.push(stats.objective(&p, &q, &lambda, cfg.beta));
    }
    let mut converged = false;
    let mut iterations = 0;
    for k in 1..=cfg.max_iters {
        iterations = k;
        for (i, l) in next.iter_mut().enumerate() {
            *l = stats.lambda(i, p[i], q[i], cfg.beta);
        }
        if cfg.record_trace {
            trace.push(stats.objective(&p, &q, &next, cfg.beta));
        }
        let (mut change, mut size) = (0.0, 0.0);
        for i in 0..n {
            let s = 1.0 / (1.0 + next[i].norm_sqr());
            p[i] = Complex64::new(s, 0.0);
            q[i] = next[i].conj() * s;
            change += (next[i] - lambda[i]).norm_sqr();
            size += next[i].norm_sqr();
        }
        if cfg.record_trace {
            trace.push(stats.objective(&p, &q, &next, cfg.beta));
        }
        std::mem::swap(&mut lambda, &mut next);
        if change.sqrt() <= cfg.tol * size.sqrt().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }
    let objective = stats.objective(&p, &q, &lambda, cfg.beta);
    let lambda = CVec::from_vec(lambda);
    Ok(MapLambdaOutput {
        estimate: reconstruct(w, &lambda),
        objective,
        lambda,
        iterations,
        converged,
        objective_trace: trace,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredEigenvectors {
    /// Eigenvectors only; `lambda` is empty.
    pub basis: SpectralBasis,
    /// Eigenvalues of Σ_V, descending and paired with the basis columns.
    pub sigma_v_eigenvalues: Vec<f64>,
    /// Smallest gap between consecutive eigenvalues relative to the largest.
    /// Small values mean the pairing of columns is ill-determined.
    pub min_relative_gap: f64,
}

/// Eigenvectors of the voltage covariance, which diagonalize `Y` when the
/// currents are stationary with respect to it.
pub fn recover_eigenvectors(sigma_v: &CMat) -> Result<RecoveredEigenvectors> {
    if !sigma_v.is_square() || sigma_v.nrows() == 0 {
        return Err(Error::Dimension("voltage covariance must be square and nonempty".into()));
    }
    let (values, mut w) = linalg::hermitian_eigen_desc(sigma_v);
    linalg::normalize_phases(&mut w);
    let top = values[0].abs().max(f64::MIN_POSITIVE);
    let min_relative_gap = values
        .windows(2)
        .map(|p| (p[0] - p[1]) / top)
        .fold(f64::INFINITY, f64::min);
    Ok(RecoveredEigenvectors {
        basis: SpectralBasis { w, lambda: CVec::zeros(0) },
        sigma_v_eigenvalues: values,
        min_relative_gap,
    })
}

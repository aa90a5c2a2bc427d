use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::scenario::PhasorDataset;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LassoConfig {
    /// ℓ1 weight in `‖Ĩ − YṼ‖²_F + α Σ|Y_ij|`.
    pub alpha: f64,
    pub max_iters: usize,
    /// Relative objective change at which iteration stops.
    pub tol: f64,
}

impl Default for LassoConfig {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            max_iters: 20_000,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoOutput {
    pub estimate: CMat,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Smallest `α` for which the zero matrix is optimal.
pub fn lasso_alpha_max(ds: &PhasorDataset) -> f64 {
    let c = linalg::cross_product(&ds.i_meas, &ds.v_meas);
    2.0 * c.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

struct Quadratic {
    gram: CMat,
    cross: CMat,
    i_energy: f64,
}

impl Quadratic {
    fn smooth(&self, y: &CMat) -> f64 {
        let yg = y * &self.gram;
        let quad: f64 = yg.iter().zip(y.iter()).map(|(a, b)| (a * b.conj()).re).sum();
        let lin: f64 = y.iter().zip(self.cross.iter()).map(|(a, b)| (a * b.conj()).re).sum();
        (self.i_energy - 2.0 * lin + quad).max(0.0)
    }
}

fn l1(y: &CMat) -> f64 {
    y.iter().map(|z| z.norm()).sum()
}

fn soft_threshold(y: &mut CMat, tau: f64) {
    for z in y.iter_mut() {
        let m = z.norm();
        *z = if m <= tau { linalg::ZERO } else { *z * ((m - tau) / m) };
    }
}

/// ℓ1-regularized least squares by accelerated proximal gradient with
/// complex soft-thresholding and objective-based momentum restart.
///
/// Runs on Gram matrices, so the per-iteration cost is independent of `N`.
/// On hitting `max_iters` the best iterate is returned with
/// `converged = false`.
pub fn lasso_estimate(ds: &PhasorDataset, cfg: &LassoConfig) -> Result<LassoOutput> {
    if !(cfg.alpha >= 0.0 && cfg.alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("lasso alpha must be ≥ 0, got {}", cfg.alpha)));
    }
    if cfg.max_iters == 0 || cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(Error::InvalidParameter("lasso needs max_iters ≥ 1 and tol > 0".into()));
    }
    let n = ds.n();
    if ds.samples() < n {
        return Err(Error::RankDeficient {
            what: "voltage sample matrix",
            rank: ds.samples(),
            required: n,
            hint: String::new(),
        });
    }
    let q = Quadratic {
        gram: linalg::cross_product(&ds.v_meas, &ds.v_meas),
        cross: linalg::cross_product(&ds.i_meas, &ds.v_meas),
        i_energy: ds.i_meas.iter().map(|z| z.norm_sqr()).sum(),
    };
    let lipschitz = linalg::hermitian_eigen_desc(&q.gram).0[0];
    if lipschitz.is_nan() || lipschitz <= 0.0 {
        return Err(Error::ZeroMatrix("voltage Gram matrix"));
    }
    // Work with ½‖·‖² + (α/2)‖·‖₁: gradient Y G − C, step 1/‖G‖₂.
    let step = 1.0 / lipschitz;
    let tau = 0.5 * cfg.alpha * step;
    let objective = |y: &CMat| q.smooth(y) + cfg.alpha * l1(y);

    let mut y = CMat::zeros(n, n);
    let mut z = y.clone();
    let mut t = 1.0_f64;
    let mut f = objective(&y);
    let mut best = (y.clone(), f);
    let mut converged = false;
    let mut iterations = 0;
    for k in 1..=cfg.max_iters {
        iterations = k;
        let grad = &z * &q.gram - &q.cross;
        let mut y_next = &z - grad.scale(step);
        soft_threshold(&mut y_next, tau);
        let f_next = objective(&y_next);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        if f_next > f {
            // Restart momentum from the new point.
            t = 1.0;
            z = y_next.clone();
        } else {
            z = &y_next + (&y_next - &y).scale((t - 1.0) / t_next);
            t = t_next;
        }
        let change = (f - f_next).abs();
        y = y_next;
        f = f_next;
        if f < best.1 {
            best = (y.clone(), f);
        }
        if change <= cfg.tol * f.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }
    Ok(LassoOutput {
        estimate: best.0,
        objective: best.1,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::ols_estimate;
    use crate::linalg::fro;
    use crate::scenario::standard_circular_matrix;

    fn instance(n: usize, samples: usize, seed: u64) -> (PhasorDataset, CMat) {
        let v = standard_circular_matrix(n, samples, seed);
        let y = standard_circular_matrix(n, n, seed + 1);
        let noise = standard_circular_matrix(n, samples, seed + 2).scale(0.05);
        let i = &y * &v + noise;
        (PhasorDataset::new(v, i, 0.0, 0.05, seed).unwrap(), y)
    }

    /// Cyclic coordinate descent on each complex entry; an independent
    /// minimizer of the same objective.
    fn coordinate_descent(ds: &PhasorDataset, alpha: f64, sweeps: usize) -> CMat {
        let g = &ds.v_meas * ds.v_meas.adjoint();
        let c = &ds.i_meas * ds.v_meas.adjoint();
        let n = ds.n();
        let mut y = CMat::zeros(n, n);
        for _ in 0..sweeps {
            for i in 0..n {
                for k in 0..n {
                    let mut r = c[(i, k)];
                    for m in 0..n {
                        if m != k {
                            r -= y[(i, m)] * g[(m, k)];
                        }
                    }
                    let mag = r.norm();
                    let shrunk = (mag - alpha / 2.0).max(0.0);
                    y[(i, k)] = if mag == 0.0 { linalg::ZERO } else { r * (shrunk / mag) / g[(k, k)].re };
                }
            }
        }
        y
    }

    fn full_objective(ds: &PhasorDataset, y: &CMat, alpha: f64) -> f64 {
        fro(&(&ds.i_meas - y * &ds.v_meas)).powi(2) + alpha * l1(y)
    }

    #[test]
    fn zero_alpha_matches_ols() {
        let (ds, _) = instance(3, 30, 1);
        let out = lasso_estimate(&ds, &LassoConfig { alpha: 0.0, ..Default::default() }).unwrap();
        let ols = ols_estimate(&ds).unwrap();
        assert!(fro(&(out.estimate - &ols)) / fro(&ols) < 1e-6);
    }

    #[test]
    fn large_alpha_zeroes_everything() {
        let (ds, _) = instance(3, 30, 2);
        let alpha = 1.01 * lasso_alpha_max(&ds);
        let out = lasso_estimate(&ds, &LassoConfig { alpha, ..Default::default() }).unwrap();
        assert!(out.estimate.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn objective_matches_coordinate_descent() {
        for seed in [3, 7, 11] {
            let (ds, _) = instance(3, 20, seed);
            let alpha = 0.1 * lasso_alpha_max(&ds);
            let out = lasso_estimate(&ds, &LassoConfig { alpha, ..Default::default() }).unwrap();
            let oracle = coordinate_descent(&ds, alpha, 5000);
            let f_oracle = full_objective(&ds, &oracle, alpha);
            let f_ours = full_objective(&ds, &out.estimate, alpha);
            assert!((out.objective - f_ours).abs() < 1e-9 * f_ours);
            assert!(f_ours <= f_oracle + 1e-8 * f_oracle.max(1.0), "{f_ours} vs {f_oracle}");
        }
    }

    #[test]
    fn rejects_bad_config() {
        let (ds, _) = instance(3, 20, 5);
        assert!(lasso_estimate(&ds, &LassoConfig { alpha: -1.0, ..Default::default() }).is_err());
        assert!(lasso_estimate(&ds, &LassoConfig { max_iters: 0, ..Default::default() }).is_err());
    }
}

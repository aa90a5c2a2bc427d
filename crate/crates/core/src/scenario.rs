//! Seeded generation of steady-state phasor datasets through the linear
//! network model `I = Y V`.
//!
//! Every random draw is keyed by `(seed, column)`, so results do not depend on
//! how columns are scheduled across threads.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid_model::AdmittanceMatrix;
use crate::linalg::{self, fro, CMat, CVec, ZERO};

/// SplitMix64 finalizer, used to derive independent sub-seeds.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn column_rng(seed: u64, column: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(column as u64);
    rng
}

/// One circular complex Gaussian draw with unit variance (each part 1/2).
fn standard_circular(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows × cols` matrix of i.i.d. unit circular Gaussians, column-seeded.
pub fn standard_circular_matrix(rows: usize, cols: usize, seed: u64) -> CMat {
    let columns: Vec<Vec<Complex64>> = (0..cols)
        .into_par_iter()
        .map(|t| {
            let mut rng = column_rng(seed, t);
            (0..rows).map(|_| standard_circular(&mut rng)).collect()
        })
        .collect();
    CMat::from_iterator(rows, cols, columns.into_iter().flatten())
}

/// Statistical model of the fluctuating part of the current injections.
#[derive(Debug, Clone, PartialEq)]
pub enum CurrentKind {
    /// i.i.d. circular Gaussian entries with standard deviation `sigma`.
    White { sigma: f64 },
    /// `C w` with `w` standard white, giving covariance `C Cᴴ`.
    Colored { factor: CMat },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurrentModel {
    pub kind: CurrentKind,
    /// Project every sample onto `{x : 1ᵀx = 0}`.
    pub balanced: bool,
}

impl CurrentModel {
    pub fn white(sigma: f64, balanced: bool) -> Result<Self> {
        let m = Self {
            kind: CurrentKind::White { sigma },
            balanced,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn colored(factor: CMat, balanced: bool) -> Result<Self> {
        let m = Self {
            kind: CurrentKind::Colored { factor },
            balanced,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            CurrentKind::White { sigma } => {
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "white current sigma must be positive, got {sigma}"
                    )));
                }
            }
            CurrentKind::Colored { factor } => {
                let k = factor.ncols();
                if k == 0 || k > factor.nrows() {
                    return Err(Error::InvalidParameter(format!(
                        "coloring factor must be n×k with 1 ≤ k ≤ n, got {}x{k}",
                        factor.nrows()
                    )));
                }
                let rank = linalg::numerical_rank(factor, 1e-12);
                if rank < k {
                    return Err(Error::RankDeficient {
                        what: "current coloring factor",
                        rank,
                        required: k,
                        hint: String::new(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Covariance of one sample, `σ²I` or `C Cᴴ`, before balancing.
    pub fn covariance(&self, n: usize) -> CMat {
        match &self.kind {
            CurrentKind::White { sigma } => CMat::identity(n, n).scale(sigma * sigma),
            CurrentKind::Colored { factor } => factor * factor.adjoint(),
        }
    }

    /// Covariance of the generated samples, including the balancing projector.
    pub fn effective_covariance(&self, n: usize) -> CMat {
        let cov = self.covariance(n);
        if self.balanced {
            let p = balancing_projector(n);
            &p * cov * &p
        } else {
            cov
        }
    }
}

/// `I − (1/n) 1 1ᵀ`.
pub fn balancing_projector(n: usize) -> CMat {
    let mut p = CMat::from_element(n, n, Complex64::new(-1.0 / n as f64, 0.0));
    for i in 0..n {
        p[(i, i)] += 1.0;
    }
    p
}

fn balance_columns(x: &mut CMat) {
    let n = x.nrows() as f64;
    for mut col in x.column_iter_mut() {
        let mean = col.sum() / n;
        col.add_scalar_mut(-mean);
    }
}

/// Draws `samples` current-injection vectors from `model`.
pub fn sample_currents(model: &CurrentModel, n: usize, samples: usize, seed: u64) -> Result<CMat> {
    model.validate()?;
    if n == 0 || samples == 0 {
        return Err(Error::Dimension(format!(
            "current samples need n ≥ 1 and N ≥ 1, got n={n}, N={samples}"
        )));
    }
    let mut out = match &model.kind {
        CurrentKind::White { sigma } => standard_circular_matrix(n, samples, seed).scale(*sigma),
        CurrentKind::Colored { factor } => {
            if factor.nrows() != n {
                return Err(Error::Dimension(format!(
                    "coloring factor has {} rows for an {n}-bus network",
                    factor.nrows()
                )));
            }
            factor * standard_circular_matrix(factor.ncols(), samples, seed)
        }
    };
    if model.balanced {
        balance_columns(&mut out);
    }
    Ok(out)
}

/// `V = Y† I + α 1` column by column.
///
/// A singular `Y` requires balanced columns; an invertible one requires
/// `α = 0`.
pub fn solve_voltages(y: &AdmittanceMatrix, currents: &CMat, alpha: Option<&[Complex64]>) -> Result<CMat> {
    let n = y.n();
    if currents.nrows() != n {
        return Err(Error::Dimension(format!(
            "{}-row current matrix for an {n}-bus network",
            currents.nrows()
        )));
    }
    if let Some(a) = alpha {
        if a.len() != currents.ncols() {
            return Err(Error::Dimension(format!(
                "{} reference offsets for {} samples",
                a.len(),
                currents.ncols()
            )));
        }
    }
    let singular = y.is_singular();
    let mut v = if singular {
        for (t, col) in currents.column_iter().enumerate() {
            let sum: Complex64 = col.iter().sum();
            let scale = col.norm().max(f64::MIN_POSITIVE);
            if sum.norm() > 1e-10 * scale * (n as f64).sqrt() {
                return Err(Error::Unbalanced(sum.norm(), t));
            }
        }
        let m = y.matrix();
        let pinv = m
            .clone()
            .pseudo_inverse(1e-12 * linalg::singular_values(m)[0])
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        pinv * currents
    } else {
        if alpha.is_some_and(|a| a.iter().any(|z| *z != ZERO)) {
            return Err(Error::InvalidParameter(
                "a voltage reference offset requires a singular admittance matrix".into(),
            ));
        }
        y.matrix()
            .clone()
            .lu()
            .solve(currents)
            .ok_or(Error::SingularBlock { kappa: f64::INFINITY })?
    };
    if let Some(a) = alpha {
        for (t, mut col) in v.column_iter_mut().enumerate() {
            col.add_scalar_mut(a[t]);
        }
    }
    Ok(v)
}

/// Measurement noise magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseLevel {
    /// Per-entry standard deviation.
    Absolute(f64),
    /// Percentage of the mean entry modulus of the clean matrix.
    PercentOfMean(f64),
}

impl NoiseLevel {
    pub fn resolve(self, clean: &CMat) -> f64 {
        match self {
            NoiseLevel::Absolute(s) => s,
            NoiseLevel::PercentOfMean(p) => {
                let count = clean.len().max(1) as f64;
                let mean = clean.iter().map(|z| z.norm()).sum::<f64>() / count;
                p / 100.0 * mean
            }
        }
    }
}

/// Adds i.i.d. circular Gaussian noise. Returns the noisy matrix and the
/// absolute standard deviation that was used.
pub fn add_noise(x: &CMat, level: NoiseLevel, seed: u64) -> Result<(CMat, f64)> {
    let sigma = level.resolve(x);
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise sigma must be ≥ 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok((x.clone(), 0.0));
    }
    let noise = standard_circular_matrix(x.nrows(), x.ncols(), seed).scale(sigma);
    Ok((x + noise, sigma))
}

/// Paired voltage and current samples, one column per operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasorDataset {
    pub v_clean: Option<CMat>,
    pub i_clean: Option<CMat>,
    pub v_meas: CMat,
    pub i_meas: CMat,
    pub sigma_v: f64,
    pub sigma_i: f64,
    pub seed: u64,
    pub centered: bool,
}

impl PhasorDataset {
    pub fn new(v_meas: CMat, i_meas: CMat, sigma_v: f64, sigma_i: f64, seed: u64) -> Result<Self> {
        if v_meas.shape() != i_meas.shape() {
            return Err(Error::Dimension(format!(
                "voltage samples are {:?} but current samples are {:?}",
                v_meas.shape(),
                i_meas.shape()
            )));
        }
        Ok(Self {
            v_clean: None,
            i_clean: None,
            v_meas,
            i_meas,
            sigma_v,
            sigma_i,
            seed,
            centered: false,
        })
    }

    pub fn n(&self) -> usize {
        self.v_meas.nrows()
    }

    pub fn samples(&self) -> usize {
        self.v_meas.ncols()
    }

    /// Drops the clean copies.
    pub fn measurements_only(mut self) -> Self {
        self.v_clean = None;
        self.i_clean = None;
        self
    }
}

/// Subtracts per-row sample means from every matrix in the dataset.
pub fn center(ds: &PhasorDataset) -> Result<PhasorDataset> {
    if ds.samples() < 2 {
        return Err(Error::Dimension(format!(
            "centering needs at least 2 samples, got {}",
            ds.samples()
        )));
    }
    Ok(PhasorDataset {
        v_clean: ds.v_clean.as_ref().map(linalg::center_rows),
        i_clean: ds.i_clean.as_ref().map(linalg::center_rows),
        v_meas: linalg::center_rows(&ds.v_meas),
        i_meas: linalg::center_rows(&ds.i_meas),
        centered: true,
        ..ds.clone()
    })
}

/// Averages consecutive blocks of `block` samples; a trailing partial block
/// is dropped. Noise standard deviations are divided by `√block`, which is
/// only exact for independent noise.
pub fn block_average(ds: &PhasorDataset, block: usize) -> Result<PhasorDataset> {
    if block == 0 || block > ds.samples() {
        return Err(Error::InvalidParameter(format!(
            "block size {block} outside 1..={}",
            ds.samples()
        )));
    }
    let blocks = ds.samples() / block;
    let avg = |m: &CMat| {
        CMat::from_fn(m.nrows(), blocks, |i, b| {
            m.row(i).columns(b * block, block).iter().sum::<Complex64>() / block as f64
        })
    };
    let shrink = (block as f64).sqrt();
    Ok(PhasorDataset {
        v_clean: ds.v_clean.as_ref().map(avg),
        i_clean: ds.i_clean.as_ref().map(avg),
        v_meas: avg(&ds.v_meas),
        i_meas: avg(&ds.i_meas),
        sigma_v: ds.sigma_v / shrink,
        sigma_i: ds.sigma_i / shrink,
        ..ds.clone()
    })
}

/// `Σ_i λ_i* |ν_i|²`, the complex power loss in spectral coordinates.
pub fn complex_power_loss(nu: &CVec, lambda: &CVec) -> Result<Complex64> {
    if nu.len() != lambda.len() {
        return Err(Error::Dimension(format!(
            "{} spectral voltages against {} eigenvalues",
            nu.len(),
            lambda.len()
        )));
    }
    Ok(nu.iter().zip(lambda.iter()).map(|(v, l)| l.conj() * v.norm_sqr()).sum())
}

/// Nominal operating point around which the fluctuations are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    /// Nominal voltage magnitude of the reference.
    pub v_nom: f64,
    /// Mean current drawn at every bus except bus 0, which supplies the sum.
    pub load: f64,
    /// Standard deviation of the common-mode reference-voltage fluctuation.
    pub reference_sigma: f64,
}

impl Default for OperatingPoint {
    fn default() -> Self {
        Self {
            v_nom: 1.0,
            load: 0.02,
            reference_sigma: 0.02,
        }
    }
}

impl OperatingPoint {
    /// Balanced mean load pattern: bus 0 supplies what the others draw.
    pub fn load_vector(&self, n: usize) -> CVec {
        let mut mu = CVec::from_element(n, Complex64::new(-self.load, 0.0));
        mu[0] = Complex64::new(self.load * (n as f64 - 1.0), 0.0);
        mu
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub samples: usize,
    pub currents: CurrentModel,
    pub operating_point: OperatingPoint,
    pub noise_v: NoiseLevel,
    pub noise_i: NoiseLevel,
}

/// Generates a full dataset: currents, exact voltages and noisy copies.
///
/// Columns are `V_t = (v_nom + a_t) 1 + Y†(μ + ξ_t)` and `I_t = Y V_t`, with
/// `ξ_t` drawn from the current model and `a_t` the reference fluctuation.
pub fn simulate(y: &AdmittanceMatrix, cfg: &SimulationConfig, seed: u64) -> Result<PhasorDataset> {
    let n = y.n();
    let samples = cfg.samples;
    let op = cfg.operating_point;
    let fluct = sample_currents(&cfg.currents, n, samples, mix_seed(seed, 1))?;
    let offsets = standard_circular_matrix(1, samples, mix_seed(seed, 2));
    let a: Vec<Complex64> = offsets
        .iter()
        .map(|z| Complex64::new(op.v_nom, 0.0) + z * op.reference_sigma)
        .collect();

    let mu = op.load_vector(n);
    let y_ones = y.matrix() * linalg::ones(n);
    let mut i_clean = fluct;
    for (t, mut col) in i_clean.column_iter_mut().enumerate() {
        col += &mu;
        col.axpy(a[t], &y_ones, Complex64::new(1.0, 0.0));
    }
    let v_clean = if y.is_singular() {
        solve_voltages(y, &i_clean, Some(&a))?
    } else {
        solve_voltages(y, &i_clean, None)?
    };

    let (v_meas, sigma_v) = add_noise(&v_clean, cfg.noise_v, mix_seed(seed, 3))?;
    let (i_meas, sigma_i) = add_noise(&i_clean, cfg.noise_i, mix_seed(seed, 4))?;
    Ok(PhasorDataset {
        v_clean: Some(v_clean),
        i_clean: Some(i_clean),
        v_meas,
        i_meas,
        sigma_v,
        sigma_i,
        seed,
        centered: false,
    })
}

/// ‖YV − I‖_F / ‖I‖_F on the clean copies, if present.
pub fn model_residual(y: &AdmittanceMatrix, ds: &PhasorDataset) -> Option<f64> {
    let (v, i) = (ds.v_clean.as_ref()?, ds.i_clean.as_ref()?);
    Some(fro(&(y.matrix() * v - i)) / fro(i).max(f64::MIN_POSITIVE))
}

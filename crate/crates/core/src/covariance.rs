//! Sample and joint covariances, truncated eigenbases and condition numbers.
//!
//! All covariances use the `1/N` normalization and center their input first.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// `(1/N) X_c X_cᴴ` with `X_c` the row-centered samples.
pub fn sample_covariance(x: &CMat) -> Result<CMat> {
    let samples = x.ncols();
    if samples < 2 {
        return Err(Error::Dimension(format!(
            "covariance needs at least 2 samples, got {samples}"
        )));
    }
    let xc = linalg::center_rows(x);
    let cov = linalg::cross_product(&xc, &xc).unscale(samples as f64);
    Ok(linalg::hermitian_part(&cov))
}

/// Covariance of the stacked vector `Z = (I, V)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointCovariance {
    pub sigma_z: CMat,
}

impl JointCovariance {
    pub fn from_matrix(sigma_z: CMat) -> Result<Self> {
        if !sigma_z.is_square() || !sigma_z.nrows().is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "joint covariance must be 2n×2n, got {}x{}",
                sigma_z.nrows(),
                sigma_z.ncols()
            )));
        }
        Ok(Self { sigma_z })
    }

    pub fn n(&self) -> usize {
        self.sigma_z.nrows() / 2
    }

    pub fn sigma_i(&self) -> CMat {
        let n = self.n();
        self.sigma_z.view((0, 0), (n, n)).into_owned()
    }

    pub fn sigma_v(&self) -> CMat {
        let n = self.n();
        self.sigma_z.view((n, n), (n, n)).into_owned()
    }

    /// `E[I Vᴴ]`, the top-right block.
    pub fn sigma_iv(&self) -> CMat {
        let n = self.n();
        self.sigma_z.view((0, n), (n, n)).into_owned()
    }
}

pub fn joint_covariance(currents: &CMat, voltages: &CMat) -> Result<JointCovariance> {
    if currents.shape() != voltages.shape() {
        return Err(Error::Dimension(format!(
            "currents are {:?} but voltages are {:?}",
            currents.shape(),
            voltages.shape()
        )));
    }
    let (n, samples) = currents.shape();
    let mut z = CMat::zeros(2 * n, samples);
    z.view_mut((0, 0), (n, samples)).copy_from(currents);
    z.view_mut((n, 0), (n, samples)).copy_from(voltages);
    Ok(JointCovariance {
        sigma_z: sample_covariance(&z)?,
    })
}

/// Leading `L` eigenpairs of a joint covariance, split into current and
/// voltage blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedBasis {
    pub l: usize,
    pub x_il: CMat,
    pub x_vl: CMat,
    /// Retained eigenvalues, nonincreasing.
    pub s_zl: Vec<f64>,
    /// Discarded eigenvalue mass `trace(S_Z) − Σ retained`.
    pub rho_l: f64,
    /// The full spectrum, descending.
    pub spectrum: Vec<f64>,
}

/// Keeps the `L` largest eigenpairs of `Σ_Z`. `L` may range over `1..=2n`;
/// filters built from more than `n` columns are rank deficient and rejected
/// downstream.
pub fn truncated_eigenbasis(jc: &JointCovariance, l: usize) -> Result<TruncatedBasis> {
    let n = jc.n();
    if l == 0 || l > 2 * n {
        return Err(Error::InvalidParameter(format!(
            "truncation L = {l} outside 1..={}",
            2 * n
        )));
    }
    let (values, vectors) = linalg::hermitian_eigen_desc(&jc.sigma_z);
    let x_il = vectors.view((0, 0), (n, l)).into_owned();
    let x_vl = vectors.view((n, 0), (n, l)).into_owned();
    let rho_l = values[l..].iter().sum::<f64>().max(0.0);
    Ok(TruncatedBasis {
        l,
        x_il,
        x_vl,
        s_zl: values[..l].to_vec(),
        rho_l,
        spectrum: values,
    })
}

/// `σ_max / σ_min`, or `+∞` when `σ_min ≤ 1e-300`.
pub fn condition_number(a: &CMat) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "condition number of a non-square {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    let s = linalg::singular_values(a);
    let (hi, lo) = match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) => (hi, lo),
        _ => return Err(Error::ZeroMatrix("condition number of an empty matrix")),
    };
    if hi == 0.0 {
        return Err(Error::ZeroMatrix("condition number of the zero matrix"));
    }
    Ok(if lo <= 1e-300 { f64::INFINITY } else { hi / lo })
}

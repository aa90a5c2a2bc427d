use crate::error::Result;
use crate::linalg::{self, CMat};
use crate::scenario::PhasorDataset;

/// Relative singular-value threshold for the rank test on `Ṽ`.
const RANK_TOL: f64 = 1e-13;

/// Unconstrained least squares `argmin ‖Ĩ − Y Ṽ‖_F`, solved through a
/// Householder QR of `Ṽᴴ`.
pub fn ols_estimate(ds: &PhasorDataset) -> Result<CMat> {
    let vh = ds.v_meas.adjoint();
    let ih = ds.i_meas.adjoint();
    let yh = linalg::lstsq_qr(&vh, &ih, "voltage sample matrix", RANK_TOL)?;
    Ok(yh.adjoint())
}

use crate::covariance::{condition_number, JointCovariance, TruncatedBasis};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};

/// Default ceiling on `κ(Σ_V)` above which the Wiener filter refuses to run.
pub const DEFAULT_CONDITION_CEILING: f64 = 1e14;

#[derive(Debug, Clone, PartialEq)]
pub struct WienerOutput {
    /// `Σ_IV Σ_V⁻¹`.
    pub estimate: CMat,
    /// Minimum mean-square-error matrix `Σ_I − Σ_IV Σ_V⁻¹ Σ_IVᴴ`.
    pub mmse: CMat,
    pub kappa_sigma_v: f64,
}

/// LMMSE filter from voltages to currents.
pub fn wiener_filter(jc: &JointCovariance, ceiling: f64) -> Result<WienerOutput> {
    let sigma_v = jc.sigma_v();
    let sigma_iv = jc.sigma_iv();
    let kappa = condition_number(&sigma_v)?;
    if kappa.is_nan() || kappa > ceiling {
        return Err(Error::IllConditioned {
            what: "voltage covariance",
            kappa,
            ceiling,
            hint: "; use the well-conditioned Wiener filter instead",
        });
    }
    // Σ_V Yᴴ = Σ_IVᴴ since Σ_V is Hermitian.
    let yh = sigma_v
        .lu()
        .solve(&sigma_iv.adjoint())
        .ok_or(Error::IllConditioned {
            what: "voltage covariance",
            kappa: f64::INFINITY,
            ceiling,
            hint: "; use the well-conditioned Wiener filter instead",
        })?;
    let estimate = yh.adjoint();
    let mmse = linalg::hermitian_part(&(jc.sigma_i() - &estimate * sigma_iv.adjoint()));
    Ok(WienerOutput {
        estimate,
        mmse,
        kappa_sigma_v: kappa,
    })
}

/// Relative singular-value threshold below which `X_VL` counts as rank
/// deficient.
const WCWF_RANK_TOL: f64 = 1e-12;

/// Well-conditioned Wiener filter `X_IL (X_VLᴴ X_VL)⁻¹ X_VLᴴ`; the only
/// inverse taken is `L×L`.
pub fn wcwf_estimate(tb: &TruncatedBasis) -> Result<CMat> {
    let l = tb.l;
    let rank = linalg::numerical_rank(&tb.x_vl, WCWF_RANK_TOL);
    if rank < l {
        return Err(Error::RankDeficient {
            what: "truncated voltage eigenvector block",
            rank,
            required: l,
            hint: format!("; reduce L to {rank}"),
        });
    }
    let gram = tb.x_vl.adjoint() * &tb.x_vl;
    let rhs = tb.x_vl.adjoint();
    let z = match gram.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => gram.lu().solve(&rhs).ok_or(Error::RankDeficient {
            what: "truncated voltage eigenvector block",
            rank,
            required: l,
            hint: format!("; reduce L to {}", l - 1),
        })?,
    };
    Ok(&tb.x_il * z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariance::{joint_covariance, truncated_eigenbasis};
    use crate::linalg::fro;
    use crate::scenario::standard_circular_matrix;

    #[test]
    fn population_cancellation_returns_y() {
        let n = 4;
        let y = standard_circular_matrix(n, n, 1);
        let a = standard_circular_matrix(n, n, 2);
        let sigma_v = &a * a.adjoint() + CMat::identity(n, n);
        let sigma_iv = &y * &sigma_v;
        let sigma_i = &y * &sigma_v * y.adjoint();
        let mut z = CMat::zeros(2 * n, 2 * n);
        z.view_mut((0, 0), (n, n)).copy_from(&sigma_i);
        z.view_mut((0, n), (n, n)).copy_from(&sigma_iv);
        z.view_mut((n, 0), (n, n)).copy_from(&sigma_iv.adjoint());
        z.view_mut((n, n), (n, n)).copy_from(&sigma_v);
        let out = wiener_filter(&JointCovariance::from_matrix(z).unwrap(), DEFAULT_CONDITION_CEILING).unwrap();
        assert!(fro(&(out.estimate - &y)) / fro(&y) < 1e-12);
        assert!(fro(&out.mmse) < 1e-10 * fro(&sigma_i));
    }

    #[test]
    fn mmse_is_psd_and_ceiling_enforced() {
        let i = standard_circular_matrix(3, 30, 3);
        let v = standard_circular_matrix(3, 30, 4);
        let jc = joint_covariance(&i, &v).unwrap();
        let out = wiener_filter(&jc, DEFAULT_CONDITION_CEILING).unwrap();
        let (vals, _) = linalg::hermitian_eigen_desc(&out.mmse);
        assert!(vals.iter().all(|&e| e >= -1e-12 * vals[0]));
        assert!(matches!(wiener_filter(&jc, 1.0), Err(Error::IllConditioned { .. })));
    }

    #[test]
    fn wcwf_rejects_oversized_truncation() {
        let i = standard_circular_matrix(3, 30, 3);
        let v = standard_circular_matrix(3, 30, 4);
        let jc = joint_covariance(&i, &v).unwrap();
        let tb = truncated_eigenbasis(&jc, 5).unwrap();
        match wcwf_estimate(&tb) {
            Err(Error::RankDeficient { rank, hint, .. }) => {
                assert_eq!(rank, 3);
                assert!(hint.contains("reduce L to 3"));
            }
            other => panic!("{other:?}"),
        }
        assert!(wcwf_estimate(&truncated_eigenbasis(&jc, 3).unwrap()).is_ok());
    }
}

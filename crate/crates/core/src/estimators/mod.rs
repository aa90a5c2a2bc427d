//! Admittance-matrix estimators.

mod lasso;
mod map_lambda;
mod ols;
mod structure;
mod wiener;

pub use lasso::{lasso_estimate, lasso_alpha_max, LassoConfig, LassoOutput};
pub use map_lambda::{
    lambda_step, map_lambda_estimate, map_lambda_objective, nu_step, recover_eigenvectors, MapLambdaConfig, MapLambdaOutput,
    RecoveredEigenvectors,
};
pub use ols::ols_estimate;
pub use structure::{build_structure_maps, constrained_ls, postfilter, vec_of, vech, vech_rs, StructureMaps};
pub use wiener::{wcwf_estimate, wiener_filter, WienerOutput, DEFAULT_CONDITION_CEILING};

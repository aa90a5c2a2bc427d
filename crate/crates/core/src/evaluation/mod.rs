//! Error metrics, experiment scenarios and the benchmark harness.

mod benchmark;
mod metrics;
mod networks;
mod scenarios;
mod suite;
mod sweep;

pub use benchmark::{
    condition_diagnostics, replicate_seed, reports_to_csv, reports_to_markdown, run_benchmark, run_estimator,
    BenchmarkConfig, ConditionDiagnostics, DataSettings, EstimationReport, EstimatorKind, EstimatorRun,
    EstimatorSettings, Truncation, CSV_HEADER,
};
pub use metrics::{dist_w, mean_std, ndiag, relative_frobenius_error, spearman};
pub use networks::{builtin_name, builtin_network, random_radial_network, RadialNetworkConfig, BUILTIN_SIZES, MAX_NAMED_BUSES};
pub use scenarios::{build_illconditioning_scenario, IllConditioningScenario, Loading};
pub use suite::{plan_from_config, Experiment, NetworkSource, SuitePlan, SweepPlan, TablePlan};
pub use sweep::{covariance_sweep, sweep_to_csv, sweep_trend, CovarianceSweepConfig, SweepPoint, SWEEP_CSV_HEADER, SWEEP_NOISE_PCT};

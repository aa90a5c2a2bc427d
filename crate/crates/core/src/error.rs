use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by network construction, simulation, estimation and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("network graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("duplicate branch between buses {0} and {1}")]
    DuplicateBranch(usize, usize),

    #[error("branch ({from},{to}) violates the series-admittance sign convention: y = {y}")]
    SignConvention { from: usize, to: usize, y: Complex64 },

    #[error("matrix is not normal: commutator residual {residual:.3e} (relative)")]
    NotNormal { residual: f64 },

    #[error("eliminated block is singular (condition number {kappa:.3e})")]
    SingularBlock { kappa: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{what} is rank deficient: numerical rank {rank} < {required}{hint}")]
    RankDeficient {
        what: &'static str,
        rank: usize,
        required: usize,
        hint: String,
    },

    #[error("{what} is ill-conditioned: condition number {kappa:.3e} exceeds ceiling {ceiling:.1e}{hint}")]
    IllConditioned {
        what: &'static str,
        kappa: f64,
        ceiling: f64,
        hint: &'static str,
    },

    #[error("unbalanced current injection with singular admittance matrix: |1ᵀI| = {0:.3e} in column {1}")]
    Unbalanced(f64, usize),

    #[error("zero matrix: {0}")]
    ZeroMatrix(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config: {0}")]
    Config(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

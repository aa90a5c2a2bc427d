use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid_model::{Branch, NetworkSpec, Shunt};

/// Bus counts of the built-in networks.
pub const BUILTIN_SIZES: [usize; 3] = [10, 33, 56];
const BUILTIN_SEED: u64 = 0x6772_6964;

/// Parameters of the random radial feeder generator. Impedances are in
/// per unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialNetworkConfig {
    pub n: usize,
    /// Uniform range of branch resistance.
    pub r_range: (f64, f64),
    /// Uniform range of the reactance-to-resistance ratio.
    pub xr_range: (f64, f64),
    /// Probability that bus `k` hangs off bus `k − 1`, giving long laterals.
    pub chain_prob: f64,
    /// Optional shunt admittance placed at bus 0.
    pub source_shunt: Option<Complex64>,
}

impl RadialNetworkConfig {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            r_range: (0.005, 0.05),
            xr_range: (0.5, 2.0),
            chain_prob: 0.7,
            source_shunt: None,
        }
    }
}

/// Random tree rooted at bus 0 with distribution-like line parameters.
pub fn random_radial_network(cfg: &RadialNetworkConfig, seed: u64) -> Result<NetworkSpec> {
    if cfg.n < 2 {
        return Err(Error::InvalidParameter(format!("radial network needs n ≥ 2, got {}", cfg.n)));
    }
    let ordered = |(lo, hi): (f64, f64)| lo > 0.0 && hi >= lo && hi.is_finite();
    if !ordered(cfg.r_range) || !ordered(cfg.xr_range) || !(0.0..=1.0).contains(&cfg.chain_prob) {
        return Err(Error::InvalidParameter("radial generator ranges must be positive and ordered".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut branches = Vec::with_capacity(cfg.n - 1);
    for k in 1..cfg.n {
        let parent = if k == 1 || rng.random::<f64>() < cfg.chain_prob {
            k - 1
        } else {
            rng.random_range(0..k)
        };
        let r = rng.random_range(cfg.r_range.0..=cfg.r_range.1);
        let xr = rng.random_range(cfg.xr_range.0..=cfg.xr_range.1);
        branches.push(Branch {
            from: parent,
            to: k,
            admittance: Complex64::new(1.0, 0.0) / Complex64::new(r, r * xr),
        });
    }
    let shunts = cfg
        .source_shunt
        .map(|y| vec![Shunt { bus: 0, admittance: y }])
        .unwrap_or_default();
    NetworkSpec::new(cfg.n, branches, shunts)
}

/// Built-in network name for a size, e.g. `radial33`.
pub fn builtin_name(n: usize) -> String {
    format!("radial{n}")
}

/// Largest `radial<n>` accepted by name.
pub const MAX_NAMED_BUSES: usize = 4096;

/// Seeded radial feeder named `radial<n>`, `2 ≤ n ≤ MAX_NAMED_BUSES`. The
/// default benchmark sizes are [`BUILTIN_SIZES`].
pub fn builtin_network(name: &str) -> Option<NetworkSpec> {
    let digits = name.strip_prefix("radial")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let n: usize = digits.parse().ok()?;
    if !(2..=MAX_NAMED_BUSES).contains(&n) {
        return None;
    }
    random_radial_network(&RadialNetworkConfig::new(n), BUILTIN_SEED ^ n as u64).ok()
}

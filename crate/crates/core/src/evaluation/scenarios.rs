use num_complex::Complex64;

use crate::grid_model::{Branch, NetworkSpec, Shunt};
use crate::linalg::{c, CMat};
use crate::scenario::{CurrentModel, NoiseLevel, OperatingPoint, SimulationConfig};

/// Loading pattern of the three-bus star.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loading {
    /// Unequal lines, independent loads.
    Baseline,
    /// Equal lines, nearly identical load fluctuations at the two leaves.
    Similar,
    /// Loads so small that voltage drops are of order 1e-6 p.u.
    Light,
}

impl Loading {
    pub fn name(self) -> &'static str {
        match self {
            Loading::Baseline => "baseline",
            Loading::Similar => "similar",
            Loading::Light => "light",
        }
    }
}

const LOAD_SIGMA: f64 = 0.01;
const LIGHT_SIGMA: f64 = 2e-6;
/// `1 − ρ` for the correlated leaves.
const SIMILAR_DECORRELATION: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct IllConditioningScenario {
    pub loading: Loading,
    pub network: NetworkSpec,
    pub currents: CurrentModel,
    pub operating_point: OperatingPoint,
}

impl IllConditioningScenario {
    pub fn simulation_config(&self, samples: usize, noise: NoiseLevel) -> SimulationConfig {
        SimulationConfig {
            samples,
            currents: self.currents.clone(),
            operating_point: self.operating_point,
            noise_v: noise,
            noise_i: noise,
        }
    }
}

/// Three-bus star: bus 0 feeds leaves 1 and 2 and carries a shunt, so `Y`
/// is invertible in every mode.
pub fn build_illconditioning_scenario(loading: Loading) -> IllConditioningScenario {
    let (z1, z2) = match loading {
        Loading::Baseline => (c(0.2, 0.4), c(0.5, 0.3)),
        Loading::Similar | Loading::Light => (c(0.3, 0.3), c(0.3, 0.3)),
    };
    let one = Complex64::new(1.0, 0.0);
    let network = NetworkSpec::new(
        3,
        vec![
            Branch { from: 0, to: 1, admittance: one / z1 },
            Branch { from: 0, to: 2, admittance: one / z2 },
        ],
        vec![Shunt { bus: 0, admittance: c(0.05, 0.1) }],
    )
    .expect("three-bus star is valid");

    let (sigma, rho) = match loading {
        Loading::Baseline => (LOAD_SIGMA, 0.0),
        Loading::Similar => (LOAD_SIGMA, 1.0 - SIMILAR_DECORRELATION),
        Loading::Light => (LIGHT_SIGMA, 0.0),
    };
    // Leaf injections (s w₁, s(ρ w₁ + √(1−ρ²) w₂)), compensated at the source.
    let tail = (1.0 - rho * rho).sqrt();
    let factor = CMat::from_row_slice(
        3,
        2,
        &[
            c(-sigma * (1.0 + rho), 0.0),
            c(-sigma * tail, 0.0),
            c(sigma, 0.0),
            c(0.0, 0.0),
            c(sigma * rho, 0.0),
            c(sigma * tail, 0.0),
        ],
    );
    let currents = CurrentModel::colored(factor, false).expect("coloring factor has full column rank");
    let operating_point = OperatingPoint {
        v_nom: 1.0,
        load: sigma,
        reference_sigma: 0.01,
    };
    IllConditioningScenario {
        loading,
        network,
        currents,
        operating_point,
    }
}

//! Deterministic integration: radial profiles on `[0, inf)`, Monte Carlo over
//! boxes, and finite-difference derivatives.

mod fd;
mod gk;
mod mc;
mod radial;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub use fd::{fd_derivative, try_fd_derivative, FD_RELATIVE_STEP};
pub use mc::{monte_carlo_integral, BoxRegion, CounterRng};
pub use radial::{
    flat_radial_volume_integral, hyperbolic_radial_volume_integral, radial_integral, Decay,
    OriginClass, RadialProfile, Weight,
};

/// Parameters shared by every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    /// Panel budget per initial integration segment.
    pub max_subdivisions: usize,
    pub mc_samples: usize,
    pub mc_seed: u64,
    /// Relative standard error accepted from Monte Carlo volume estimates.
    pub mc_relative_tolerance: f64,
    /// Points per sphere in the lattice used by the uniformity-constant estimator.
    pub sphere_lattice: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-9,
            max_subdivisions: 60,
            mc_samples: 1 << 20,
            mc_seed: 0x5EED,
            mc_relative_tolerance: 5e-3,
            sphere_lattice: 64,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.relative_tolerance > 0.0) {
            return Err(LabError::InvalidArgument(format!(
                "relative tolerance must be positive, got {}",
                self.relative_tolerance
            )));
        }
        if self.mc_samples < 1 << 10 {
            return Err(LabError::InvalidArgument(format!(
                "at least 1024 Monte Carlo samples required, got {}",
                self.mc_samples
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(LabError::InvalidArgument(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        if self.sphere_lattice < 4 {
            return Err(LabError::InvalidArgument(
                "sphere_lattice must be at least 4".into(),
            ));
        }
        if !(self.mc_relative_tolerance > 0.0) {
            return Err(LabError::InvalidArgument(
                "mc_relative_tolerance must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn with_relative_tolerance(mut self, tol: f64) -> Self {
        self.relative_tolerance = tol;
        self
    }

    pub fn with_mc_samples(mut self, samples: usize) -> Self {
        self.mc_samples = samples;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.mc_seed = seed;
        self
    }

    /// Same spec with twice the panel budget, used near the admissibility boundary.
    pub fn doubled_budget(mut self) -> Self {
        self.max_subdivisions *= 2;
        self
    }
}

/// Value of an integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub error: f64,
    pub nodes: usize,
    /// False when the requested tolerance was not reached within the budget.
    pub converged: bool,
}

impl IntegralResult {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            error: 0.0,
            nodes: 0,
            converged: true,
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error: self.error * factor.abs(),
            ..self
        }
    }

    /// Sum of two independent integrals; errors add.
    pub fn plus(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error: self.error + other.error,
            nodes: self.nodes + other.nodes,
            converged: self.converged && other.converged,
        }
    }

    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.error == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.error / self.value.abs()
        }
    }

    /// Turns an unconverged result into [`LabError::ToleranceNotMet`].
    pub fn ensure_converged(self, requested: f64) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(LabError::ToleranceNotMet {
                value: self.value,
                error: self.error,
                requested,
            })
        }
    }
}

//! Numerical tolerances shared by every stage of the pipeline.

use serde::{Deserialize, Serialize};

/// Row sums of P must be within this distance of 1.
pub const TOL_STOCH: f64 = 1e-12;
/// Residuals of linear solves and fixed-point checks.
pub const TOL_SOLVE: f64 = 1e-9;
/// Agreement between independently computed routes.
pub const TOL_CROSS: f64 = 1e-8;
/// Monte Carlo trajectories are aborted after this many steps.
pub const STEP_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub stoch: f64,
    pub solve: f64,
    pub cross: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            stoch: TOL_STOCH,
            solve: TOL_SOLVE,
            cross: TOL_CROSS,
        }
    }
}

impl Tolerances {
    pub fn with_cross(mut self, cross: f64) -> Self {
        self.cross = cross;
        self
    }
}

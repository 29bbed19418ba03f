use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds used throughout the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProfile {
    pub root_converge: f64,
    pub boundary_band: f64,
    pub peak_value_tol: f64,
    pub lp_feas_tol: f64,
    pub max_iterations: usize,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        Self {
            root_converge: 1e-12,
            boundary_band: 1e-8,
            peak_value_tol: 1e-6,
            lp_feas_tol: 1e-9,
            max_iterations: 200,
        }
    }
}

impl ToleranceProfile {
    pub fn validate(&self) -> Result<()> {
        let positive = self.root_converge > 0.0
            && self.boundary_band > 0.0
            && self.peak_value_tol > 0.0
            && self.lp_feas_tol > 0.0
            && self.max_iterations > 0;
        if !positive {
            return Err(Error::InvalidInput("tolerances must be strictly positive".into()));
        }
        if !(self.root_converge < self.boundary_band && self.boundary_band < self.peak_value_tol) {
            return Err(Error::InvalidInput(
                "expected root_converge < boundary_band < peak_value_tol".into(),
            ));
        }
        Ok(())
    }

    /// Same profile with the boundary band and peak tolerance widened by
    /// `levels` bands, used by recursive constructions.
    pub fn widened(&self, levels: usize) -> Self {
        let extra = self.boundary_band * levels as f64;
        Self {
            boundary_band: self.boundary_band + extra,
            peak_value_tol: self.peak_value_tol + extra,
            ..*self
        }
    }
}

//! Closed-form noninteracting solution.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{check_k, AnsatzParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoninteractingSolution {
    pub alpha: f64,
    pub beta: f64,
    pub energy_over_nd: f64,
}

impl NoninteractingSolution {
    pub fn params(&self) -> AnsatzParams {
        AnsatzParams {
            alpha: self.alpha,
            beta: self.beta,
        }
    }
}

/// Stationary point of the `g' = 0` energy: `beta = 1/2`, `alpha = (k-1)/2`.
pub fn noninteracting_solution(k: f64) -> Result<NoninteractingSolution> {
    check_k(k)?;
    Ok(NoninteractingSolution {
        alpha: (k - 1.0) / 2.0,
        beta: 0.5,
        energy_over_nd: exact_morse_ground_energy(k)?,
    })
}

/// Lowest Morse level `-(1 - 1/k)^2` in units of D.
pub fn exact_morse_ground_energy(k: f64) -> Result<f64> {
    check_k(k)?;
    let t = 1.0 - 1.0 / k;
    Ok(-t * t)
}

//! Shared tolerance configuration.

use serde::{Deserialize, Serialize};

/// Absolute tolerances used across the crate. All solvers run to a much
/// tighter internal precision; these are the thresholds at which results
/// are compared or certified.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tolerances {
    /// For pointwise function values and exact identities.
    pub value: f64,
    /// For numerically computed conjugates and norms.
    pub norm: f64,
    /// Stabilization threshold for the Δ2 cutoff-doubling scan.
    pub delta2_stab: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            value: 1e-9,
            norm: 1e-6,
            delta2_stab: 1e-4,
        }
    }
}

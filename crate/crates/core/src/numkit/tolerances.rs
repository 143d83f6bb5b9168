use serde::{Deserialize, Serialize};

/// Every numerical threshold used by the toolkit, in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// A root counts as real when `|Im| <= reality * max(1, |root|)`.
    pub reality: f64,
    /// Relative rank threshold for kernel and Jordan-structure detection.
    pub rank: f64,
    /// Pivots below `singular * ||a||` make a matrix singular.
    pub singular: f64,
    /// Clustering radius (relative to `max(1, |root|)`) for multiplicities.
    pub cluster: f64,
    /// Polished roots must satisfy `|p(z)| <= root_residual * ||p||`.
    pub root_residual: f64,
    pub max_iterations: usize,
    /// Convergence threshold for the multivariate Newton refinement.
    pub newton_residual: f64,
    pub max_oracle_dim: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            reality: 1e-8,
            rank: 1e-8,
            singular: 1e-12,
            cluster: 1e-6,
            root_residual: 1e-9,
            max_iterations: 200,
            newton_residual: 1e-10,
            max_oracle_dim: 16,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> crate::Result<()> {
        let positive = [
            self.reality,
            self.rank,
            self.singular,
            self.cluster,
            self.root_residual,
            self.newton_residual,
        ];
        if positive.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(crate::error::invalid(
                "all tolerances must be positive and finite",
            ));
        }
        if self.max_iterations == 0 {
            return Err(crate::error::invalid("max_iterations must be positive"));
        }
        Ok(())
    }
}

use serde::{Deserialize, Serialize};

use super::field::SpectralField;

/// Norms of a vector field. Squared Sobolev seminorms come from Plancherel;
/// `sup` and `l4` from collocation quadrature on the physical grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NormSuite {
    /// `∫|f|² dx`
    pub l2_sq: f64,
    /// `∫|∇f|² dx`
    pub h1_sq: f64,
    /// `∫|Δf|² dx`
    pub h2_sq: f64,
    /// `max |f|` over collocation points
    pub sup: f64,
    /// `(∫|f|⁴ dx)^{1/4}`
    pub l4: f64,
}

impl NormSuite {
    pub fn of(field: &SpectralField) -> Self {
        let k_sq = field.grid().k_sq();
        let physical = field.to_physical();
        Self {
            l2_sq: field.l2_sq(),
            h1_sq: field.weighted_energy(|i| k_sq[i]),
            h2_sq: field.weighted_energy(|i| k_sq[i] * k_sq[i]),
            sup: physical.sup_norm(),
            l4: physical.lp_norm(4.0),
        }
    }

    /// `‖f‖_{L^m}` for `m ∈ {4, ∞}`.
    pub fn lm(&self, m: f64) -> Option<f64> {
        if m == 4.0 {
            Some(self.l4)
        } else if m.is_infinite() {
            Some(self.sup)
        } else {
            None
        }
    }
}

//! Giga–Kohn similarity variables
//! `y = x/(T−t)^{1/2}`, `τ = −ln(T−t)`, `w(y,τ) = (T−t)^{1/2} u(x,t)`.
//!
//! The `w`-equation is never stepped. Every `w`-functional is obtained from
//! the current `û` in two independent ways:
//!
//! - **scaling route**: evaluate the functional of `u` on the `x`-lattice
//!   (multiplier symbols taken at the rescaled argument `(T−t)^{1/2}k`) and
//!   multiply by `(T−t)^e` with the exponent `e` from [`Functional::exponent`];
//! - **multiplier route**: build `w` on its own `y`-torus of side
//!   `L(T−t)^{−1/2}` with coefficients `(T−t)^{1/2}û` and evaluate the
//!   functional there directly.
//!
//! The two routes share no scaling factors, so their agreement is a check on
//! the exponent table and on the change of variables.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::multipliers::{MultiplierKind, MultiplierSet};
use crate::spectral::{PhysicalField, SpectralField, SpectralGrid};
use crate::{Error, Result};

/// `τ = −ln(T − t)`.
pub fn tau_of_t(t: f64, horizon: f64) -> Result<f64> {
    Ok(SimilarityClock::new(t, horizon)?.tau())
}

/// `t = T − e^{−τ}`.
pub fn t_of_tau(tau: f64, horizon: f64) -> Result<f64> {
    if !tau.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "tau must be finite, got {tau}"
        )));
    }
    check_horizon(horizon)?;
    Ok(horizon - (-tau).exp())
}

fn check_horizon(horizon: f64) -> Result<()> {
    if horizon > 0.0 && horizon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "horizon must be positive and finite, got {horizon}"
        )))
    }
}

/// Physical time `t ∈ [0, T)` paired with its similarity time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityClock {
    horizon: f64,
    t: f64,
}

impl SimilarityClock {
    pub fn new(t: f64, horizon: f64) -> Result<Self> {
        check_horizon(horizon)?;
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "time must be nonnegative, got {t}"
            )));
        }
        if t >= horizon {
            return Err(Error::PastHorizon { t, horizon });
        }
        Ok(Self { horizon, t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `T − t`, the scale `s` of the change of variables.
    pub fn remaining(&self) -> f64 {
        self.horizon - self.t
    }

    pub fn tau(&self) -> f64 {
        -self.remaining().ln()
    }
}

/// One similarity-variable functional.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// `‖w‖²`
    L2Sq,
    /// `‖∇w‖²`
    H1Sq,
    /// `‖Δw‖²`
    H2Sq,
    /// `‖∇Δw‖²`
    H3Sq,
    /// `sup|w|`
    Sup,
    /// `‖Δ̃₋₁w‖²`, weight `χ²`
    ELow,
    /// `‖F⁻¹[√(1−φ²)]∗w‖²`, weight `1 − φ²`
    EHigh,
    /// `‖Δ₋₁w‖²`, weight `φ²`
    ELowPhi,
    /// `‖Δ₋₁w‖_{L⁴}`
    LowL4,
    /// `‖Δ₋₁w‖_{L^∞}`
    LowSup,
    /// `‖∇Δ₀w‖²`
    GradHighSq,
    /// `∫ ∂ⱼwₖ ∂ⱼwₗ ∂ₗwₖ`
    Trilinear,
    /// `∫ |∇w|³`, the size against which the trilinear term is compared
    TrilinearAbs,
    /// `∫ Δw · Δ((w·∇)w)`
    LapCoupling,
    /// `‖Δw‖ ‖Δ((w·∇)w)‖`
    LapCouplingAbs,
}

impl Functional {
    pub const ALL: [Functional; 15] = [
        Functional::L2Sq,
        Functional::H1Sq,
        Functional::H2Sq,
        Functional::H3Sq,
        Functional::Sup,
        Functional::ELow,
        Functional::EHigh,
        Functional::ELowPhi,
        Functional::LowL4,
        Functional::LowSup,
        Functional::GradHighSq,
        Functional::Trilinear,
        Functional::TrilinearAbs,
        Functional::LapCoupling,
        Functional::LapCouplingAbs,
    ];

    /// Power `e` with `F[w](τ) = (T−t)^e · F[u](t)`, the `u`-side functional
    /// taken with multiplier symbols at `(T−t)^{1/2}k`.
    pub fn exponent(self) -> f64 {
        match self {
            Functional::L2Sq | Functional::ELow | Functional::EHigh | Functional::ELowPhi => -0.5,
            Functional::H1Sq | Functional::GradHighSq => 0.5,
            Functional::Sup | Functional::LowSup => 0.5,
            Functional::H2Sq => 1.5,
            Functional::H3Sq => 2.5,
            Functional::LowL4 => 0.125,
            Functional::Trilinear | Functional::TrilinearAbs => 1.5,
            Functional::LapCoupling | Functional::LapCouplingAbs => 2.5,
        }
    }

    /// Functional that bounds this one, used as the reference size when two
    /// evaluations are compared: signed terms by their magnitudes, split
    /// energies by the whole.
    fn magnitude(self) -> Option<Functional> {
        match self {
            Functional::Trilinear => Some(Functional::TrilinearAbs),
            Functional::LapCoupling => Some(Functional::LapCouplingAbs),
            Functional::ELow | Functional::EHigh | Functional::ELowPhi => Some(Functional::L2Sq),
            Functional::GradHighSq => Some(Functional::H1Sq),
            _ => None,
        }
    }
}

/// Every functional of one field (of `w`, or of `u` before rescaling).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WFunctionals {
    pub l2_sq: f64,
    pub h1_sq: f64,
    pub h2_sq: f64,
    pub h3_sq: f64,
    pub sup: f64,
    pub e_low: f64,
    pub e_high: f64,
    pub e_low_phi: f64,
    pub low_l4: f64,
    pub low_sup: f64,
    pub grad_high_sq: f64,
    pub trilinear: f64,
    pub trilinear_abs: f64,
    pub lap_coupling: f64,
    pub lap_coupling_abs: f64,
}

impl WFunctionals {
    pub fn get(&self, f: Functional) -> f64 {
        match f {
            Functional::L2Sq => self.l2_sq,
            Functional::H1Sq => self.h1_sq,
            Functional::H2Sq => self.h2_sq,
            Functional::H3Sq => self.h3_sq,
            Functional::Sup => self.sup,
            Functional::ELow => self.e_low,
            Functional::EHigh => self.e_high,
            Functional::ELowPhi => self.e_low_phi,
            Functional::LowL4 => self.low_l4,
            Functional::LowSup => self.low_sup,
            Functional::GradHighSq => self.grad_high_sq,
            Functional::Trilinear => self.trilinear,
            Functional::TrilinearAbs => self.trilinear_abs,
            Functional::LapCoupling => self.lap_coupling,
            Functional::LapCouplingAbs => self.lap_coupling_abs,
        }
    }

    fn slot(&mut self, f: Functional) -> &mut f64 {
        match f {
            Functional::L2Sq => &mut self.l2_sq,
            Functional::H1Sq => &mut self.h1_sq,
            Functional::H2Sq => &mut self.h2_sq,
            Functional::H3Sq => &mut self.h3_sq,
            Functional::Sup => &mut self.sup,
            Functional::ELow => &mut self.e_low,
            Functional::EHigh => &mut self.e_high,
            Functional::ELowPhi => &mut self.e_low_phi,
            Functional::LowL4 => &mut self.low_l4,
            Functional::LowSup => &mut self.low_sup,
            Functional::GradHighSq => &mut self.grad_high_sq,
            Functional::Trilinear => &mut self.trilinear,
            Functional::TrilinearAbs => &mut self.trilinear_abs,
            Functional::LapCoupling => &mut self.lap_coupling,
            Functional::LapCouplingAbs => &mut self.lap_coupling_abs,
        }
    }

    /// `E = ‖Δ̃₋₁w‖² + ‖F⁻¹[√(1−φ²)]∗w‖²`.
    pub fn energy(&self) -> f64 {
        self.e_low + self.e_high
    }

    /// Multiplies each entry by `s^e` from the exponent table.
    pub fn rescaled(&self, s: f64) -> Self {
        let mut out = *self;
        for f in Functional::ALL {
            *out.slot(f) = self.get(f) * s.powf(f.exponent());
        }
        out
    }

    /// Largest relative difference over all functionals, each measured
    /// against its reference size (see `Functional::magnitude`).
    pub fn relative_gap(&self, other: &WFunctionals) -> f64 {
        Functional::ALL
            .iter()
            .map(|&f| {
                let (a, b) = (self.get(f), other.get(f));
                let mut scale = a.abs().max(b.abs());
                if let Some(m) = f.magnitude() {
                    scale = scale.max(self.get(m).abs()).max(other.get(m).abs());
                }
                if scale == 0.0 {
                    0.0
                } else {
                    (a - b).abs() / scale
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        Functional::ALL.iter().all(|&f| self.get(f).is_finite())
    }
}

fn symbol(
    set: &MultiplierSet,
    kind: MultiplierKind,
    grid: &SpectralGrid,
    scale: f64,
) -> Arc<Vec<f64>> {
    if scale == 1.0 {
        set.symbol(kind, grid)
    } else {
        Arc::new(set.symbol_scaled(kind, grid, scale))
    }
}

/// All functionals of `field` on its own grid, with multiplier symbols
/// evaluated at `symbol_scale·|k|`.
pub fn field_functionals(
    field: &SpectralField,
    set: &MultiplierSet,
    symbol_scale: f64,
) -> WFunctionals {
    let grid = field.grid();
    let k_sq = grid.k_sq();
    let phi = symbol(set, MultiplierKind::Phi, grid, symbol_scale);
    let chi = symbol(set, MultiplierKind::Chi, grid, symbol_scale);

    let physical = field.to_physical();
    let low = field.apply_symbol(|i| phi[i]).to_physical();
    let gradient = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        .map(|beta| field.derivative(beta).expect("first order").to_physical());

    let pointwise = pointwise_terms(&physical, &gradient);
    let cell = grid.cell_volume();
    let convection = PhysicalField::from_components(grid, pointwise.convection)
        .expect("grid-sized components")
        .to_spectral();

    let k4 = |i: usize| k_sq[i] * k_sq[i];
    let mut lap_pair = 0.0;
    for idx in 0..grid.len() {
        let w = k4(idx);
        if w == 0.0 {
            continue;
        }
        let a = field.mode(idx);
        let b = convection.mode(idx);
        lap_pair += w * (0..3).map(|c| (a[c] * b[c].conj()).re).sum::<f64>();
    }
    let h2_sq = field.weighted_energy(k4);

    WFunctionals {
        l2_sq: field.l2_sq(),
        h1_sq: field.weighted_energy(|i| k_sq[i]),
        h2_sq,
        h3_sq: field.weighted_energy(|i| k_sq[i] * k_sq[i] * k_sq[i]),
        sup: physical.sup_norm(),
        e_low: field.weighted_energy(|i| chi[i] * chi[i]),
        e_high: field.weighted_energy(|i| 1.0 - phi[i] * phi[i]),
        e_low_phi: field.weighted_energy(|i| phi[i] * phi[i]),
        low_l4: low.lp_norm(4.0),
        low_sup: low.sup_norm(),
        grad_high_sq: field.weighted_energy(|i| k_sq[i] * (1.0 - phi[i]).powi(2)),
        trilinear: pointwise.trilinear * cell,
        trilinear_abs: pointwise.gradient_cubed * cell,
        lap_coupling: lap_pair * grid.volume(),
        lap_coupling_abs: (h2_sq * convection.weighted_energy(k4)).sqrt(),
    }
}

struct Pointwise {
    trilinear: f64,
    gradient_cubed: f64,
    convection: [Vec<f64>; 3],
}

/// Sums of `∂ⱼwₖ∂ⱼwₗ∂ₗwₖ` and `|∇w|³`, and the field `(w·∇)w`, where
/// `gradient[j].component(k) = ∂ⱼwₖ`.
fn pointwise_terms(w: &PhysicalField, gradient: &[PhysicalField; 3]) -> Pointwise {
    let len = w.grid().len();
    let per_point: Vec<(f64, f64, [f64; 3])> = (0..len)
        .into_par_iter()
        .map(|p| {
            let g = [0, 1, 2].map(|j| [0, 1, 2].map(|k| gradient[j].component(k)[p]));
            let mut tri = 0.0;
            let mut frob = 0.0;
            for j in 0..3 {
                for k in 0..3 {
                    frob += g[j][k] * g[j][k];
                    for l in 0..3 {
                        tri += g[j][k] * g[j][l] * g[l][k];
                    }
                }
            }
            let v = [0, 1, 2].map(|j| w.component(j)[p]);
            let conv = [0, 1, 2].map(|k| (0..3).map(|j| v[j] * g[j][k]).sum::<f64>());
            (tri, frob * frob.sqrt(), conv)
        })
        .collect();
    let mut convection = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
    let mut trilinear = 0.0;
    let mut gradient_cubed = 0.0;
    for (p, (tri, cube, conv)) in per_point.into_iter().enumerate() {
        trilinear += tri;
        gradient_cubed += cube;
        for k in 0..3 {
            convection[k][p] = conv[k];
        }
    }
    Pointwise {
        trilinear,
        gradient_cubed,
        convection,
    }
}

/// Scaling route: `u`-side functionals with symbols at `(T−t)^{1/2}k`,
/// multiplied by the exponent table.
pub fn w_functionals_scaling_route(
    u_hat: &SpectralField,
    clock: &SimilarityClock,
    set: &MultiplierSet,
) -> WFunctionals {
    let s = clock.remaining();
    field_functionals(u_hat, set, s.sqrt()).rescaled(s)
}

/// `w` as a field on the `y`-torus of side `L(T−t)^{−1/2}`.
pub fn similarity_field(u_hat: &SpectralField, clock: &SimilarityClock) -> Result<SpectralField> {
    let s = clock.remaining();
    let grid = u_hat.grid();
    let y_grid = grid.with_box_length(grid.box_length() / s.sqrt())?;
    Ok(u_hat.regrid(&y_grid)?.scaled(s.sqrt()))
}

/// Multiplier route: functionals of `w` evaluated directly in `y`.
pub fn w_functionals_multiplier_route(
    u_hat: &SpectralField,
    clock: &SimilarityClock,
    set: &MultiplierSet,
) -> Result<WFunctionals> {
    let w = similarity_field(u_hat, clock)?;
    Ok(field_functionals(&w, set, 1.0))
}

/// Both routes for one state, plus the unscaled `u`-norms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RouteEvaluation {
    pub u: WFunctionals,
    pub scaling: WFunctionals,
    pub multiplier: WFunctionals,
    pub gap: f64,
}

pub fn evaluate_routes(
    u_hat: &SpectralField,
    clock: &SimilarityClock,
    set: &MultiplierSet,
) -> Result<RouteEvaluation> {
    let s = clock.remaining();
    let u = field_functionals(u_hat, set, s.sqrt());
    let scaling = u.rescaled(s);
    let multiplier = w_functionals_multiplier_route(u_hat, clock, set)?;
    Ok(RouteEvaluation {
        u,
        scaling,
        multiplier,
        gap: scaling.relative_gap(&multiplier),
    })
}

/// `E(0) = ‖Δ̃₋₁w(0)‖² + ‖F⁻¹[√(1−φ²)]∗w(0)‖²`, never above
/// `‖w(0)‖² = T^{−1/2}‖u₀‖²`.
pub fn initial_similarity_energy(
    u0_hat: &SpectralField,
    horizon: f64,
    set: &MultiplierSet,
) -> Result<f64> {
    let clock = SimilarityClock::new(0.0, horizon)?;
    let w = similarity_field(u0_hat, &clock)?;
    let grid = w.grid();
    let phi = set.symbol(MultiplierKind::Phi, grid);
    let chi = set.symbol(MultiplierKind::Chi, grid);
    let energy = w.weighted_energy(|i| chi[i] * chi[i] + 1.0 - phi[i] * phi[i]);
    debug_assert!(energy <= w.l2_sq() * (1.0 + 1e-12));
    Ok(energy)
}

#[cfg(test)]
mod tests;

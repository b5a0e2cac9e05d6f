//! Periodic-box spectral discretization.
//!
//! The box `[0, L)³` stands in for `ℝ³`. On the torus integration by parts is
//! exact and the far-field flux of `y|w|²` vanishes, which only sharpens the
//! energy inequalities checked downstream.
//!
//! Conventions:
//! - forward transform `f̂_k = n⁻³ Σ_x f(x) e^{−ik·x}`, so `F[∂ⱼf] = i kⱼ F[f]`;
//! - physical integrals use the weight `(L/n)³`;
//! - Parseval: `∫|f|² dx = L³ Σ_k |f̂_k|²`.

mod fft;
mod field;
mod grid;
mod norms;

pub use field::{PhysicalField, SpectralField, VectorField, MAX_DERIVATIVE_ORDER};
pub use grid::SpectralGrid;
pub use norms::NormSuite;

pub(crate) use fft::forward_real;
pub(crate) use field::dealias_mask;

use crate::Result;

/// Builds a grid; see [`SpectralGrid::new`].
pub fn make_grid(n: usize, box_length: f64) -> Result<SpectralGrid> {
    SpectralGrid::new(n, box_length)
}

/// Physical → spectral; errors on a spectral input.
pub fn transform(field: &VectorField) -> Result<VectorField> {
    field.transform()
}

/// Spectral → physical; errors on a physical input.
pub fn inverse_transform(field: &VectorField) -> Result<VectorField> {
    field.inverse_transform()
}

pub fn leray_project(field: &SpectralField) -> SpectralField {
    field.leray_project()
}

pub fn spectral_derivative(field: &SpectralField, beta: [u32; 3]) -> Result<SpectralField> {
    field.derivative(beta)
}

pub fn dealias(field: &SpectralField) -> SpectralField {
    field.dealias()
}

pub fn norms(field: &VectorField) -> NormSuite {
    field.norms()
}

/// Real random field with i.i.d. standard normal samples, seeded.
pub fn random_physical_field(grid: &SpectralGrid, seed: u64) -> PhysicalField {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let comps = [0, 1, 2].map(|_| {
        (0..grid.len())
            .map(|_| StandardNormal.sample(&mut rng))
            .collect::<Vec<f64>>()
    });
    PhysicalField::from_components(grid, comps).expect("lengths match the grid")
}

#[cfg(test)]
mod tests;

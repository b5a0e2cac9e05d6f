use rustfft::num_complex::Complex64;

use super::fft::{forward_real, inverse_real};
use super::grid::{derivative_factor, SpectralGrid};
use super::norms::NormSuite;
use crate::{Error, Result};

/// Highest total derivative order accepted by [`SpectralField::derivative`].
pub const MAX_DERIVATIVE_ORDER: u32 = 3;

/// Three real component arrays on the collocation grid.
#[derive(Clone, Debug)]
pub struct PhysicalField {
    grid: SpectralGrid,
    comps: [Vec<f64>; 3],
}

/// Three complex coefficient arrays on the full wavenumber lattice,
/// normalized so that `f(x) = Σ_k f̂_k e^{ik·x}`.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: SpectralGrid,
    comps: [Vec<Complex64>; 3],
}

/// A velocity field tagged with its current representation.
#[derive(Clone, Debug)]
pub enum VectorField {
    Physical(PhysicalField),
    Spectral(SpectralField),
}

impl VectorField {
    pub fn grid(&self) -> &SpectralGrid {
        match self {
            VectorField::Physical(f) => f.grid(),
            VectorField::Spectral(f) => f.grid(),
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            VectorField::Physical(_) => "physical",
            VectorField::Spectral(_) => "spectral",
        }
    }

    /// Physical → spectral.
    pub fn transform(&self) -> Result<VectorField> {
        match self {
            VectorField::Physical(f) => Ok(VectorField::Spectral(f.to_spectral())),
            other => Err(Error::RepresentationMismatch {
                expected: "physical",
                found: other.tag(),
            }),
        }
    }

    /// Spectral → physical.
    pub fn inverse_transform(&self) -> Result<VectorField> {
        match self {
            VectorField::Spectral(f) => Ok(VectorField::Physical(f.to_physical())),
            other => Err(Error::RepresentationMismatch {
                expected: "spectral",
                found: other.tag(),
            }),
        }
    }

    pub fn into_spectral(self) -> Result<SpectralField> {
        match self {
            VectorField::Spectral(f) => Ok(f),
            other => Err(Error::RepresentationMismatch {
                expected: "spectral",
                found: other.tag(),
            }),
        }
    }

    pub fn into_physical(self) -> Result<PhysicalField> {
        match self {
            VectorField::Physical(f) => Ok(f),
            other => Err(Error::RepresentationMismatch {
                expected: "physical",
                found: other.tag(),
            }),
        }
    }

    pub fn norms(&self) -> NormSuite {
        match self {
            VectorField::Physical(f) => f.to_spectral().norms(),
            VectorField::Spectral(f) => f.norms(),
        }
    }
}

impl PhysicalField {
    pub fn zeros(grid: &SpectralGrid) -> Self {
        let len = grid.len();
        Self {
            grid: grid.clone(),
            comps: [vec![0.0; len], vec![0.0; len], vec![0.0; len]],
        }
    }

    pub fn from_components(grid: &SpectralGrid, comps: [Vec<f64>; 3]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::InvalidGrid(format!(
                "component length does not match n³ = {}",
                grid.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            comps,
        })
    }

    /// Samples `f` at every collocation point.
    pub fn from_fn(grid: &SpectralGrid, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut out = Self::zeros(grid);
        for idx in 0..grid.len() {
            let v = f(grid.point(idx));
            for (c, value) in v.into_iter().enumerate() {
                out.comps[c][idx] = value;
            }
        }
        out
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.comps[c]
    }

    pub fn components(&self) -> &[Vec<f64>; 3] {
        &self.comps
    }

    pub fn to_spectral(&self) -> SpectralField {
        SpectralField {
            grid: self.grid.clone(),
            comps: [0, 1, 2].map(|c| forward_real(&self.grid, &self.comps[c])),
        }
    }

    /// Pointwise Euclidean magnitude `|f(x)|`.
    pub fn magnitudes(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| {
                (self.comps[0][i].powi(2) + self.comps[1][i].powi(2) + self.comps[2][i].powi(2))
                    .sqrt()
            })
            .collect()
    }

    /// `max_x |f(x)|` on the collocation grid.
    pub fn sup_norm(&self) -> f64 {
        self.magnitudes().into_iter().fold(0.0, f64::max)
    }

    /// `(∫|f|^m dx)^{1/m}` by collocation quadrature.
    pub fn lp_norm(&self, m: f64) -> f64 {
        let sum: f64 = self.magnitudes().into_iter().map(|v| v.powf(m)).sum();
        (sum * self.grid.cell_volume()).powf(1.0 / m)
    }

    /// `∫|f|² dx` by collocation quadrature.
    pub fn l2_sq_quadrature(&self) -> f64 {
        let sum: f64 = self
            .comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v * v)
            .sum();
        sum * self.grid.cell_volume()
    }

    pub fn max_abs_difference(&self, other: &PhysicalField) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

impl SpectralField {
    pub fn zeros(grid: &SpectralGrid) -> Self {
        let len = grid.len();
        let zero = Complex64::default();
        Self {
            grid: grid.clone(),
            comps: [vec![zero; len], vec![zero; len], vec![zero; len]],
        }
    }

    pub fn from_components(grid: &SpectralGrid, comps: [Vec<Complex64>; 3]) -> Result<Self> {
        if comps.iter().any(|c| c.len() != grid.len()) {
            return Err(Error::InvalidGrid(format!(
                "component length does not match n³ = {}",
                grid.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            comps,
        })
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.comps
    }

    pub fn components_mut(&mut self) -> &mut [Vec<Complex64>; 3] {
        &mut self.comps
    }

    /// Coefficient vector of the mode at flat index `idx`.
    pub fn mode(&self, idx: usize) -> [Complex64; 3] {
        [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]]
    }

    pub fn set_mode(&mut self, idx: usize, value: [Complex64; 3]) {
        for (c, v) in value.into_iter().enumerate() {
            self.comps[c][idx] = v;
        }
    }

    /// Same coefficients reinterpreted on another grid of equal resolution.
    pub fn regrid(&self, grid: &SpectralGrid) -> Result<Self> {
        if grid.n() != self.grid.n() {
            return Err(Error::InvalidGrid(format!(
                "cannot move a {}³ field onto a {}³ grid",
                self.grid.n(),
                grid.n()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            comps: self.comps.clone(),
        })
    }

    pub fn to_physical(&self) -> PhysicalField {
        PhysicalField {
            grid: self.grid.clone(),
            comps: [0, 1, 2].map(|c| inverse_real(&self.grid, &self.comps[c])),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.scale_in_place(factor);
        out
    }

    pub fn scale_in_place(&mut self, factor: f64) {
        for comp in &mut self.comps {
            comp.iter_mut().for_each(|v| *v *= factor);
        }
    }

    /// Multiplies every mode by a real symbol given per flat index.
    pub fn apply_symbol(&self, symbol: impl Fn(usize) -> f64) -> Self {
        let mut out = self.clone();
        for idx in 0..self.grid.len() {
            let s = symbol(idx);
            for comp in &mut out.comps {
                comp[idx] *= s;
            }
        }
        out
    }

    /// `self + factor·other`.
    pub fn axpy(&self, factor: f64, other: &SpectralField) -> Self {
        let mut out = self.clone();
        for (a, b) in out.comps.iter_mut().zip(&other.comps) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += factor * y);
        }
        out
    }

    /// `(I − k kᵀ/|k|²)·f̂(k)` for every `k ≠ 0`; the mean is untouched.
    pub fn leray_project(&self) -> Self {
        let mut out = self.clone();
        out.leray_project_in_place();
        out
    }

    pub fn leray_project_in_place(&mut self) {
        for idx in 0..self.grid.len() {
            let k = self.grid.odd_wavevector(idx);
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            if k2 == 0.0 {
                continue;
            }
            let v = self.mode(idx);
            let dot = (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]) / k2;
            for c in 0..3 {
                self.comps[c][idx] = v[c] - dot * k[c];
            }
        }
    }

    /// `D^β f` with symbol `(ik₁)^{β₁}(ik₂)^{β₂}(ik₃)^{β₃}`; `|β| ≤ 3`.
    pub fn derivative(&self, beta: [u32; 3]) -> Result<Self> {
        let order: u32 = beta.iter().sum();
        if order > MAX_DERIVATIVE_ORDER {
            return Err(Error::DerivativeOrder {
                order,
                max: MAX_DERIVATIVE_ORDER,
            });
        }
        let n = self.grid.n();
        let factors: [Vec<Complex64>; 3] = [0, 1, 2].map(|a| {
            (0..n)
                .map(|p| derivative_factor(&self.grid, p, beta[a]))
                .collect()
        });
        let mut out = self.clone();
        for idx in 0..self.grid.len() {
            let p = self.grid.unflatten(idx);
            let symbol = factors[0][p[0]] * factors[1][p[1]] * factors[2][p[2]];
            for comp in &mut out.comps {
                comp[idx] *= symbol;
            }
        }
        Ok(out)
    }

    /// Two-thirds rule: zero every mode with some `|m_j| > n/3`.
    pub fn dealias(&self) -> Self {
        let mut out = self.clone();
        out.dealias_in_place();
        out
    }

    pub fn dealias_in_place(&mut self) {
        let keep = dealias_mask(&self.grid);
        for comp in &mut self.comps {
            comp.iter_mut()
                .zip(&keep)
                .filter(|(_, &k)| !k)
                .for_each(|(v, _)| *v = Complex64::default());
        }
    }

    /// Spectral divergence `i k·f̂(k)`.
    pub fn divergence(&self) -> Vec<Complex64> {
        (0..self.grid.len())
            .map(|idx| {
                let k = self.grid.odd_wavevector(idx);
                let v = self.mode(idx);
                Complex64::new(0.0, 1.0) * (v[0] * k[0] + v[1] * k[1] + v[2] * k[2])
            })
            .collect()
    }

    /// `max_k |k·f̂(k)|`.
    pub fn max_divergence(&self) -> f64 {
        self.divergence()
            .iter()
            .map(|d| d.norm())
            .fold(0.0, f64::max)
    }

    /// Discrete `L²` inner product `L³ Σ_k Re(f̂·ĝ*)`.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        let sum: f64 = self
            .comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x * y.conj()).re))
            .sum();
        sum * self.grid.volume()
    }

    /// `L³ Σ_k w(k)·|f̂(k)|²` for a real weight per flat index.
    pub fn weighted_energy(&self, weight: impl Fn(usize) -> f64) -> f64 {
        let mut sum = 0.0;
        for idx in 0..self.grid.len() {
            let w = weight(idx);
            if w == 0.0 {
                continue;
            }
            let m = self.comps[0][idx].norm_sqr()
                + self.comps[1][idx].norm_sqr()
                + self.comps[2][idx].norm_sqr();
            sum += w * m;
        }
        sum * self.grid.volume()
    }

    /// `‖f‖²_{L²}` by Plancherel.
    pub fn l2_sq(&self) -> f64 {
        self.weighted_energy(|_| 1.0)
    }

    pub fn norms(&self) -> NormSuite {
        NormSuite::of(self)
    }

    /// `max_k |f̂(−k) − conj f̂(k)|`; zero for coefficients of a real field.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for idx in 0..self.grid.len() {
            let j = self.grid.conjugate_index(idx);
            for comp in &self.comps {
                worst = worst.max((comp[j] - comp[idx].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_difference(&self, other: &SpectralField) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .all(|c| c.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
    }
}

/// `true` for modes kept by the two-thirds rule.
pub(crate) fn dealias_mask(grid: &SpectralGrid) -> Vec<bool> {
    let n = grid.n() as i64;
    (0..grid.len())
        .map(|idx| grid.mode_vector(idx).iter().all(|m| 3 * m.abs() <= n))
        .collect()
}

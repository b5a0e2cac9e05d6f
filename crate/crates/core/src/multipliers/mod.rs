//! Radial Fourier multipliers for the one-cut frequency split.
//!
//! `φ` is a smooth radial cut-off, `1` on `|ξ| ≤ 1` and `0` on `|ξ| ≥ 2`,
//! nonincreasing in `|ξ|`. From it:
//!
//! | symbol        | operator                    | name here                  |
//! |---------------|-----------------------------|----------------------------|
//! | `φ`           | `Δ₋₁` (low part)            | [`MultiplierKind::Phi`]    |
//! | `1 − φ`       | `Δ₀` (high part)            | [`MultiplierKind::OneMinusPhi`] |
//! | `√(1 − φ²)`   | energy-complement high part | [`MultiplierKind::SqrtOneMinusPhiSq`] |
//! | `χ`           | weighted low part `Δ̃₋₁`     | [`MultiplierKind::Chi`]    |
//!
//! with `χ(r) = r^{1/2+2α} φ(r)` below `r_c = 1/2 + α` and `r_c^{1/2+2α} φ(r)`
//! above it, for `α ∈ (0, 1/8)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::spectral::{SpectralField, SpectralGrid};
use crate::{Error, Result};

/// Default weight exponent parameter.
pub const DEFAULT_ALPHA: f64 = 1.0 / 16.0;

/// Minimum number of radial samples for the sign certificates.
pub const MIN_CERTIFICATE_POINTS: usize = 10_000;

/// `α ∈ (0, 1/8)`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 0.125 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidAlpha(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Branch point `r_c = 1/2 + α` of `χ`.
    pub fn branch_radius(self) -> f64 {
        0.5 + self.0
    }

    /// Power `1/2 + 2α` in `χ`.
    pub fn chi_power(self) -> f64 {
        0.5 + 2.0 * self.0
    }

    /// `(1/2 + α)^{1 + 4α}`, the plateau value of `χ²`.
    pub fn plateau_sq(self) -> f64 {
        self.branch_radius().powf(1.0 + 4.0 * self.0)
    }
}

impl Default for Alpha {
    fn default() -> Self {
        Self(DEFAULT_ALPHA)
    }
}

impl TryFrom<f64> for Alpha {
    type Error = Error;
    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl From<Alpha> for f64 {
    fn from(a: Alpha) -> f64 {
        a.0
    }
}

/// Smooth-step cut-off `φ(r) = S(2 − r)` with
/// `S(s) = b(s) / (b(s) + b(1 − s))`, `b(s) = exp(−σ/s)` for `s > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cutoff {
    sharpness: f64,
}

impl Cutoff {
    pub fn new(sharpness: f64) -> Result<Self> {
        if sharpness > 0.0 && sharpness.is_finite() {
            Ok(Self { sharpness })
        } else {
            Err(Error::InvalidParameter(format!(
                "cut-off sharpness must be positive, got {sharpness}"
            )))
        }
    }

    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    /// `(S(s), S'(s))`, written in logistic form so neither end overflows.
    fn step(&self, s: f64) -> (f64, f64) {
        if s <= 0.0 {
            return (0.0, 0.0);
        }
        if s >= 1.0 {
            return (1.0, 0.0);
        }
        let sigma = self.sharpness;
        let g = sigma / s - sigma / (1.0 - s);
        let value = 1.0 / (1.0 + g.exp());
        let slope = value * (1.0 - value) * sigma * (1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s)));
        (value, slope)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.step(2.0 - r).0
    }

    /// `dφ/dr`.
    pub fn derivative(&self, r: f64) -> f64 {
        -self.step(2.0 - r).1
    }
}

impl Default for Cutoff {
    fn default() -> Self {
        Self { sharpness: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MultiplierKind {
    Phi,
    Chi,
    OneMinusPhi,
    SqrtOneMinusPhiSq,
}

impl MultiplierKind {
    pub const ALL: [MultiplierKind; 4] = [
        MultiplierKind::Phi,
        MultiplierKind::Chi,
        MultiplierKind::OneMinusPhi,
        MultiplierKind::SqrtOneMinusPhiSq,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MultiplierKind::Phi => "phi",
            MultiplierKind::Chi => "chi",
            MultiplierKind::OneMinusPhi => "one_minus_phi",
            MultiplierKind::SqrtOneMinusPhiSq => "sqrt_one_minus_phi_sq",
        }
    }
}

/// A radial symbol `r ↦ ψ(r)` built on the shared cut-off.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialMultiplier {
    kind: MultiplierKind,
    cutoff: Cutoff,
    alpha: Option<Alpha>,
}

/// `φ` with the given smooth-step sharpness (`1.0` is the default profile).
pub fn build_phi(transition_sharpness: f64) -> Result<RadialMultiplier> {
    Ok(RadialMultiplier {
        kind: MultiplierKind::Phi,
        cutoff: Cutoff::new(transition_sharpness)?,
        alpha: None,
    })
}

/// `χ` built on the cut-off of `phi`.
pub fn build_chi(phi: &RadialMultiplier, alpha: f64) -> Result<RadialMultiplier> {
    if phi.kind != MultiplierKind::Phi {
        return Err(Error::InvalidParameter(format!(
            "build_chi needs the phi profile, got {}",
            phi.kind.label()
        )));
    }
    Ok(RadialMultiplier {
        kind: MultiplierKind::Chi,
        cutoff: phi.cutoff,
        alpha: Some(Alpha::new(alpha)?),
    })
}

impl RadialMultiplier {
    pub fn with_kind(cutoff: Cutoff, kind: MultiplierKind, alpha: Alpha) -> Self {
        Self {
            kind,
            cutoff,
            alpha: (kind == MultiplierKind::Chi).then_some(alpha),
        }
    }

    pub fn kind(&self) -> MultiplierKind {
        self.kind
    }

    pub fn label(&self) -> &'static str {
        self.kind.label()
    }

    pub fn alpha(&self) -> Option<Alpha> {
        self.alpha
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    pub fn eval(&self, r: f64) -> f64 {
        let phi = self.cutoff.value(r);
        match self.kind {
            MultiplierKind::Phi => phi,
            MultiplierKind::OneMinusPhi => 1.0 - phi,
            MultiplierKind::SqrtOneMinusPhiSq => (1.0 - phi * phi).max(0.0).sqrt(),
            MultiplierKind::Chi => {
                let alpha = self.alpha.expect("chi carries alpha");
                let rc = alpha.branch_radius();
                let a = alpha.chi_power();
                if r <= rc {
                    r.powf(a) * phi
                } else {
                    rc.powf(a) * phi
                }
            }
        }
    }

    /// `d(ψ²)/dr`, in closed form on every branch. At `r = r_c` the left
    /// branch of `χ` is used.
    pub fn sq_derivative(&self, r: f64) -> f64 {
        let phi = self.cutoff.value(r);
        let dphi = self.cutoff.derivative(r);
        match self.kind {
            MultiplierKind::Phi => 2.0 * phi * dphi,
            MultiplierKind::OneMinusPhi => -2.0 * (1.0 - phi) * dphi,
            MultiplierKind::SqrtOneMinusPhiSq => -2.0 * phi * dphi,
            MultiplierKind::Chi => {
                let alpha = self.alpha.expect("chi carries alpha");
                let rc = alpha.branch_radius();
                let a2 = 2.0 * alpha.chi_power();
                if r <= rc {
                    a2 * r.powf(a2 - 1.0) * phi * phi + r.powf(a2) * 2.0 * phi * dphi
                } else {
                    rc.powf(a2) * 2.0 * phi * dphi
                }
            }
        }
    }
}

type CacheKey = (usize, u64, MultiplierKind);

/// The four symbols for one `α`, with per-grid symbol caching.
pub struct MultiplierSet {
    alpha: Alpha,
    phi: RadialMultiplier,
    chi: RadialMultiplier,
    one_minus_phi: RadialMultiplier,
    sqrt_one_minus_phi_sq: RadialMultiplier,
    cache: RwLock<HashMap<CacheKey, Arc<Vec<f64>>>>,
}

impl MultiplierSet {
    pub fn new(alpha: f64) -> Result<Self> {
        Self::with_cutoff(alpha, Cutoff::default())
    }

    pub fn with_cutoff(alpha: f64, cutoff: Cutoff) -> Result<Self> {
        let alpha = Alpha::new(alpha)?;
        let make = |kind| RadialMultiplier::with_kind(cutoff, kind, alpha);
        Ok(Self {
            alpha,
            phi: make(MultiplierKind::Phi),
            chi: make(MultiplierKind::Chi),
            one_minus_phi: make(MultiplierKind::OneMinusPhi),
            sqrt_one_minus_phi_sq: make(MultiplierKind::SqrtOneMinusPhiSq),
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn get(&self, kind: MultiplierKind) -> &RadialMultiplier {
        match kind {
            MultiplierKind::Phi => &self.phi,
            MultiplierKind::Chi => &self.chi,
            MultiplierKind::OneMinusPhi => &self.one_minus_phi,
            MultiplierKind::SqrtOneMinusPhiSq => &self.sqrt_one_minus_phi_sq,
        }
    }

    /// `ψ(|k|)` at every flat index of `grid`, cached per grid.
    pub fn symbol(&self, kind: MultiplierKind, grid: &SpectralGrid) -> Arc<Vec<f64>> {
        let key = (grid.n(), grid.box_length().to_bits(), kind);
        if let Some(hit) = self.cache.read().expect("cache lock").get(&key) {
            return Arc::clone(hit);
        }
        let values = Arc::new(self.symbol_scaled(kind, grid, 1.0));
        self.cache
            .write()
            .expect("cache lock")
            .entry(key)
            .or_insert(values)
            .clone()
    }

    /// `ψ(scale·|k|)` at every flat index; not cached.
    pub fn symbol_scaled(&self, kind: MultiplierKind, grid: &SpectralGrid, scale: f64) -> Vec<f64> {
        let m = self.get(kind);
        grid.k_sq()
            .iter()
            .map(|&k2| m.eval(scale * k2.sqrt()))
            .collect()
    }

    pub fn apply(&self, kind: MultiplierKind, field: &SpectralField) -> SpectralField {
        let symbol = self.symbol(kind, field.grid());
        field.apply_symbol(|i| symbol[i])
    }

    /// Applies the rescaled symbol `ψ(scale·k)`.
    pub fn apply_scaled(
        &self,
        kind: MultiplierKind,
        field: &SpectralField,
        scale: f64,
    ) -> SpectralField {
        if scale == 1.0 {
            return self.apply(kind, field);
        }
        let symbol = self.symbol_scaled(kind, field.grid(), scale);
        field.apply_symbol(|i| symbol[i])
    }

    /// `Δ₋₁f`
    pub fn low(&self, field: &SpectralField) -> SpectralField {
        self.apply(MultiplierKind::Phi, field)
    }

    /// `Δ₀f`
    pub fn high(&self, field: &SpectralField) -> SpectralField {
        self.apply(MultiplierKind::OneMinusPhi, field)
    }

    /// `Δ̃₋₁f`
    pub fn tilde_low(&self, field: &SpectralField) -> SpectralField {
        self.apply(MultiplierKind::Chi, field)
    }

    /// `F⁻¹[√(1−φ²)] ∗ f`
    pub fn tilde_high(&self, field: &SpectralField) -> SpectralField {
        self.apply(MultiplierKind::SqrtOneMinusPhiSq, field)
    }
}

impl Clone for MultiplierSet {
    fn clone(&self) -> Self {
        Self::with_cutoff(self.alpha.value(), self.phi.cutoff).expect("alpha already validated")
    }
}

impl fmt::Debug for MultiplierSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiplierSet")
            .field("alpha", &self.alpha.value())
            .field("sharpness", &self.phi.cutoff.sharpness())
            .finish()
    }
}

/// Lebesgue exponents supported by the low-frequency embedding constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LebesgueExponent {
    Four,
    Infinity,
}

impl LebesgueExponent {
    pub fn value(self) -> f64 {
        match self {
            LebesgueExponent::Four => 4.0,
            LebesgueExponent::Infinity => f64::INFINITY,
        }
    }

    /// Conjugate exponent `m'` with `1/m + 1/m' = 1`.
    pub fn conjugate(self) -> f64 {
        match self {
            LebesgueExponent::Four => 4.0 / 3.0,
            LebesgueExponent::Infinity => 1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LebesgueExponent::Four => "4",
            LebesgueExponent::Infinity => "inf",
        }
    }
}

/// Radial power `p` in `∫_{|ξ|≤2} |ξ|^{−p} dξ` for the given `m`.
pub fn hausdorff_young_power(alpha: f64, m: LebesgueExponent) -> Result<f64> {
    let a = Alpha::new(alpha)?;
    let mc = m.conjugate();
    Ok(a.chi_power() * 2.0 * mc / (2.0 - mc))
}

/// `C(α, m) = (2π)^{3/m'} (∫_{|ξ|≤2} |ξ|^{−p} dξ)^{(2−m')/(2m')}`, the
/// constant in `‖Δ₋₁f‖_{L^m} ≤ C ‖Δ̃₋₁f‖_{L²}`. The radial integral
/// `4π ∫₀² r^{2−p} dr` is evaluated by Gauss–Legendre quadrature after the
/// substitution `r = 2v^q` that removes the endpoint singularity.
pub fn hausdorff_young_constant(alpha: f64, m: LebesgueExponent) -> Result<f64> {
    let p = hausdorff_young_power(alpha, m)?;
    if p >= 3.0 {
        return Err(Error::NonIntegrable { exponent: p });
    }
    let integral = radial_power_integral(2.0 - p, 2.0);
    let mc = m.conjugate();
    Ok((2.0 * PI).powf(3.0 / mc) * integral.powf((2.0 - mc) / (2.0 * mc)))
}

/// `4π ∫₀^R r^e dr` for `e > −1`.
fn radial_power_integral(e: f64, upper: f64) -> f64 {
    // r = R v^q with q(e+1) = 2 leaves a smooth integrand in v.
    let q = 2.0 / (e + 1.0);
    // r^e·dr/dv in log form: r itself underflows near v = 0 when e+1 is small
    let integrand = |v: f64| {
        let ln_v = v.ln();
        let ln_r = upper.ln() + q * ln_v;
        4.0 * PI * upper * q * (e * ln_r + (q - 1.0) * ln_v).exp()
    };
    gauss_legendre(integrand, 0.0, 1.0, 8)
}

/// Composite 16-point Gauss–Legendre on `panels` equal sub-intervals.
pub(crate) fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let (nodes, weights) = legendre_rule(16);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|j| {
            let lo = a + j as f64 * h;
            let mid = lo + 0.5 * h;
            nodes
                .iter()
                .zip(&weights)
                .map(|(x, w)| w * f(mid + 0.5 * h * x))
                .sum::<f64>()
                * 0.5
                * h
        })
        .sum()
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`.
fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// `(‖Δ₋₁f‖_{L^m}, C(α,m)·‖Δ̃₋₁f‖_{L²})` for one field.
pub fn hausdorff_young_sides(
    set: &MultiplierSet,
    field: &SpectralField,
    m: LebesgueExponent,
) -> Result<(f64, f64)> {
    let low = set.low(field).to_physical();
    let lhs = match m {
        LebesgueExponent::Four => low.lp_norm(4.0),
        LebesgueExponent::Infinity => low.sup_norm(),
    };
    let c = hausdorff_young_constant(set.alpha().value(), m)?;
    let rhs = c * set.tilde_low(field).l2_sq().sqrt();
    Ok((lhs, rhs))
}

/// `‖D^β F⁻¹[√(1−φ²)]∗f‖² − ‖D^β Δ₀f‖²`; nonnegative up to roundoff.
pub fn check_bernstein(set: &MultiplierSet, field: &SpectralField, beta: [u32; 3]) -> Result<f64> {
    let order: u32 = beta.iter().sum();
    if order > 2 {
        return Err(Error::DerivativeOrder { order, max: 2 });
    }
    let tilde = set.tilde_high(field).derivative(beta)?.l2_sq();
    let plain = set.high(field).derivative(beta)?.l2_sq();
    Ok(tilde - plain)
}

/// `n` equally spaced points on `[a, b]`, endpoints included.
pub fn radial_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "radial grid needs at least two points");
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Low-frequency bracket `¼ r d(−χ²)/dr − r²χ² + (¼+α)χ²` on `r ≤ 1`.
pub fn bracket_a(chi: &RadialMultiplier, r: f64) -> f64 {
    let alpha = chi.alpha().expect("chi carries alpha").value();
    let chi_sq = chi.eval(r).powi(2);
    -0.25 * r * chi.sq_derivative(r) - r * r * chi_sq + (0.25 + alpha) * chi_sq
}

/// Transition-band bracket
/// `¼(1−c₀) r dφ²/dr − (r² − (¼+α)) c₀ φ²`, `c₀ = (½+α)^{1+4α}`, on `1 ≤ r ≤ 2`.
pub fn bracket_b(phi: &RadialMultiplier, alpha: Alpha, r: f64) -> f64 {
    let c0 = alpha.plateau_sq();
    let phi_sq = phi.eval(r).powi(2);
    0.25 * (1.0 - c0) * r * phi.sq_derivative(r) - (r * r - (0.25 + alpha.value())) * c0 * phi_sq
}

fn check_certificate_grid(r_grid: &[f64], lo: f64, hi: f64) -> Result<()> {
    if r_grid.len() < MIN_CERTIFICATE_POINTS {
        return Err(Error::InvalidParameter(format!(
            "certificate grid needs at least {MIN_CERTIFICATE_POINTS} points, got {}",
            r_grid.len()
        )));
    }
    if let Some(r) = r_grid.iter().find(|&&r| !(lo..=hi).contains(&r)) {
        return Err(Error::InvalidParameter(format!(
            "radius {r} outside [{lo}, {hi}]"
        )));
    }
    Ok(())
}

/// Maximum of [`bracket_a`] over `r_grid ⊂ [0, 1]`.
pub fn sign_certificate_a(alpha: f64, r_grid: &[f64]) -> Result<f64> {
    let chi = build_chi(&build_phi(1.0)?, alpha)?;
    check_certificate_grid(r_grid, 0.0, 1.0)?;
    Ok(r_grid
        .iter()
        .map(|&r| bracket_a(&chi, r))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Maximum of [`bracket_b`] over `r_grid ⊂ [1, 2]`.
pub fn sign_certificate_b(alpha: f64, r_grid: &[f64]) -> Result<f64> {
    let alpha = Alpha::new(alpha)?;
    let phi = build_phi(1.0)?;
    check_certificate_grid(r_grid, 1.0, 2.0)?;
    Ok(r_grid
        .iter()
        .map(|&r| bracket_b(&phi, alpha, r))
        .fold(f64::NEG_INFINITY, f64::max))
}

//! Scalar comparison ODE `h' = Cδ − Bh + h⁵` and exponential envelopes.
//!
//! When `h₋ = (B − √(B² − 4Cδ))/2` lies in `[0, 1)`, the interval `[0, h₋]`
//! is invariant: on `[0, 1]` we have `h⁵ ≤ h²`, so the right side is at most
//! `Cδ − Bh + h²`, which vanishes at `h₋`. [`verify_trap`] integrates the
//! equality case, the worst admissible right side.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default RK4 step for [`verify_trap`].
pub const DEFAULT_DT: f64 = 1e-3;
/// Default integration horizon for [`verify_trap`].
pub const DEFAULT_TAU_MAX: f64 = 50.0;
/// Allowed overshoot of `h₋`.
pub const TRAP_SLACK: f64 = 1e-9;

/// Smaller root of `h² − Bh + Cδ`, in the cancellation-free form
/// `2Cδ / (B + √(B² − 4Cδ))`.
pub fn h_minus(b: f64, c: f64, delta: f64) -> Result<f64> {
    let disc = b * b - 4.0 * c * delta;
    if !(disc >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "B² − 4Cδ = {disc} is negative; no real root"
        )));
    }
    if b <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "B must be positive, got {b}"
        )));
    }
    Ok(2.0 * c * delta / (b + disc.sqrt()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonParams {
    pub b: f64,
    pub c: f64,
    pub delta: f64,
    pub h0: f64,
}

impl ComparisonParams {
    pub fn new(b: f64, c: f64, delta: f64, h0: f64) -> Result<Self> {
        let checks = [
            ("B", b, b > 0.0),
            ("C", c, c > 0.0),
            ("delta", delta, delta >= 0.0),
            ("h0", h0, h0 >= 0.0),
        ];
        for (name, value, ok) in checks {
            if !ok || !value.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {value} out of range"
                )));
            }
        }
        Ok(Self { b, c, delta, h0 })
    }

    pub fn h_minus(&self) -> Result<f64> {
        h_minus(self.b, self.c, self.delta)
    }

    /// `F(h) = Cδ − Bh + h⁵`.
    pub fn rhs(&self, h: f64) -> f64 {
        self.c * self.delta - self.b * h + h.powi(5)
    }
}

/// Outcome of one trap integration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapResult {
    pub h_minus: f64,
    pub min_h: f64,
    pub max_h: f64,
    /// `max(h) − h₋`; at most [`TRAP_SLACK`] when trapped.
    pub max_excess: f64,
    pub final_h: f64,
    /// `F(h₋)`, never positive when `h₋ ∈ [0, 1]`.
    pub f_at_h_minus: f64,
    /// `true` when `h` stayed nonincreasing throughout.
    pub nonincreasing: bool,
    pub steps: u64,
    pub trapped: bool,
}

fn rk4_step(p: &ComparisonParams, h: f64, dt: f64) -> f64 {
    let k1 = p.rhs(h);
    let k2 = p.rhs(h + 0.5 * dt * k1);
    let k3 = p.rhs(h + 0.5 * dt * k2);
    let k4 = p.rhs(h + dt * k3);
    h + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Samples of the RK4 solution at `τ = 0, dt, 2dt, …, τ_max` (the last step
/// shortened to land on `τ_max`).
pub fn integrate_comparison(params: &ComparisonParams, tau_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && tau_max > 0.0 && dt.is_finite() && tau_max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need positive dt and tau_max, got dt = {dt}, tau_max = {tau_max}"
        )));
    }
    let steps = (tau_max / dt).ceil() as u64;
    let mut out = Vec::with_capacity(steps as usize + 1);
    let mut h = params.h0;
    out.push(h);
    for i in 0..steps {
        let step = dt.min(tau_max - i as f64 * dt);
        h = rk4_step(params, h, step);
        if !h.is_finite() {
            return Err(Error::NumericalBlowup {
                step: i + 1,
                t: (i + 1) as f64 * dt,
                what: "comparison ODE".into(),
            });
        }
        out.push(h);
    }
    Ok(out)
}

/// Integrates `h' = F(h)` from `h0` and reports whether `h` stays in
/// `[0, h₋ + TRAP_SLACK]`.
pub fn verify_trap(params: &ComparisonParams, tau_max: f64, dt: f64) -> Result<TrapResult> {
    let hm = params.h_minus()?;
    if !(0.0..1.0).contains(&hm) {
        return Err(Error::InvalidParameter(format!(
            "h₋ = {hm} is not in [0, 1)"
        )));
    }
    if params.h0 > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "h0 = {} exceeds 1, where h⁵ ≤ h² no longer holds",
            params.h0
        )));
    }
    if params.h0 > hm {
        return Err(Error::InvalidParameter(format!(
            "h0 = {} starts above h₋ = {hm}",
            params.h0
        )));
    }
    // RK4 is stable on the negative real axis up to |λ dt| ≈ 2.78.
    let stiffness = params.b + 5.0 * hm.powi(4);
    if dt * stiffness >= 2.5 {
        return Err(Error::TimeStep {
            dt,
            limit: 2.5 / stiffness,
        });
    }
    let path = integrate_comparison(params, tau_max, dt)?;
    let min_h = path.iter().copied().fold(f64::INFINITY, f64::min);
    let max_h = path.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let nonincreasing = path.windows(2).all(|w| w[1] <= w[0]);
    let f_at_h_minus = params.rhs(hm);
    let max_excess = max_h - hm;
    Ok(TrapResult {
        h_minus: hm,
        min_h,
        max_h,
        max_excess,
        final_h: *path.last().expect("at least the initial value"),
        f_at_h_minus,
        nonincreasing,
        steps: path.len() as u64 - 1,
        trapped: min_h >= 0.0 && max_excess <= TRAP_SLACK && f_at_h_minus <= 0.0,
    })
}

/// `e^{−ρ(τ−τ₀)}E₀ + (c/ρ)(1 − e^{−ρ(τ−τ₀)})` at each `τ`, with `τ₀ = taus[0]`.
pub fn envelope_values(taus: &[f64], e0: f64, rate: f64, offset: f64) -> Vec<f64> {
    let tau0 = taus.first().copied().unwrap_or(0.0);
    taus.iter()
        .map(|&tau| {
            let decay = (-rate * (tau - tau0)).exp();
            decay * e0 + offset / rate * (1.0 - decay)
        })
        .collect()
}

/// Largest `E(τ) − envelope(τ)` over the series; positive means the series
/// leaves the Gronwall envelope started from its first value.
pub fn gronwall_envelope(taus: &[f64], series: &[f64], rate: f64, offset: f64) -> Result<f64> {
    if series.is_empty() || taus.len() != series.len() {
        return Err(Error::InvalidParameter(format!(
            "envelope needs matching nonempty series, got {} taus and {} values",
            taus.len(),
            series.len()
        )));
    }
    if !(rate > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rate must be positive, got {rate}"
        )));
    }
    let env = envelope_values(taus, series[0], rate, offset);
    Ok(series
        .iter()
        .zip(&env)
        .map(|(e, b)| e - b)
        .fold(f64::NEG_INFINITY, f64::max))
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::derivative::{d_dtau, derivative_error};
use super::ledger::{EnergyLedger, LedgerRow};
use super::report::{Check, InequalityId, InequalityReport, Status};
use crate::gronwall::envelope_values;
use crate::multipliers::Alpha;
use crate::{Error, Result};

/// Tolerance model shared by the checks.
///
/// A differenced row is allowed `factor · (estimated truncation error)`
/// plus `route_slack` times the size of the terms involved; end rows get the
/// factor multiplied by `end_factor`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabTolerance {
    pub route_slack: f64,
    pub factor: f64,
    pub end_factor: f64,
    /// Tail start, measured from the first logged `τ`.
    pub burn_in: f64,
    /// Relative allowance on the exponential decay envelope.
    pub decay_tol: f64,
    /// Required final/initial ratio for quantities that should vanish.
    pub decay_ratio: f64,
}

impl Default for LabTolerance {
    fn default() -> Self {
        Self {
            route_slack: 1e-10,
            factor: 3.0,
            end_factor: 4.0,
            burn_in: 1.0,
            decay_tol: 0.05,
            decay_ratio: 0.1,
        }
    }
}

struct Differenced {
    value: Vec<f64>,
    error: Vec<f64>,
}

fn differenced(
    ledger: &EnergyLedger,
    tol: &LabTolerance,
    pick: impl Fn(&LedgerRow) -> f64,
) -> Result<Differenced> {
    let taus = ledger.taus();
    let f = ledger.column(pick);
    let value = d_dtau(&taus, &f)?;
    let error = derivative_error(&taus, &f, tol.end_factor)?
        .into_iter()
        .map(|e| tol.factor * e)
        .collect();
    Ok(Differenced { value, error })
}

fn prepared(ledger: &EnergyLedger) -> Result<[f64; 2]> {
    ledger.validate()?;
    if ledger.len() < 3 {
        return Err(Error::InvalidLedger(format!(
            "need at least 3 rows, got {}",
            ledger.len()
        )));
    }
    Ok(tau_range(ledger))
}

fn tau_range(ledger: &EnergyLedger) -> [f64; 2] {
    match (ledger.rows.first(), ledger.rows.last()) {
        (Some(a), Some(b)) => [a.tau, b.tau],
        _ => [f64::NAN, f64::NAN],
    }
}

/// Index of the first row at least `burn_in` past the first logged `τ`.
fn tail_start(ledger: &EnergyLedger, burn_in: f64) -> Option<usize> {
    let tau0 = ledger.rows.first()?.tau;
    ledger.rows.iter().position(|r| r.tau >= tau0 + burn_in)
}

/// `x[i] ≤ x[i−1]` up to `slack·|x[i−1]|`, for rows from `start` on.
fn nonincreasing(
    name: &str,
    ledger: &EnergyLedger,
    x: &[f64],
    start: usize,
    slack: f64,
    on_fail: Status,
) -> Check {
    let from = start.max(1);
    let taus: Vec<f64> = ledger.rows[from.min(x.len())..]
        .iter()
        .map(|r| r.tau)
        .collect();
    let residual: Vec<f64> = (from..x.len()).map(|i| x[i] - x[i - 1]).collect();
    let tolerance: Vec<f64> = (from..x.len()).map(|i| slack * x[i - 1].abs()).collect();
    Check::rowwise(name, &taus, &residual, &tolerance, on_fail)
}

/// `½ d/dτ‖w‖² ≤ −(‖∇w‖² − ¼‖w‖²)` rowwise, and `‖u(t)‖²` nonincreasing.
///
/// On the torus the first is an identity for the semi-discrete dynamics, so
/// the defect measures differencing and time-stepping error; its largest
/// absolute value is reported as `max_abs_defect` and, divided by the local
/// `Δτ²`, as `defect_coefficient`.
pub fn verify_l2_inequality(ledger: &EnergyLedger, tol: &LabTolerance) -> Result<InequalityReport> {
    let range = prepared(ledger)?;
    let taus = ledger.taus();
    let d = differenced(ledger, tol, |r| r.w_l2sq)?;
    let mut residual = Vec::with_capacity(ledger.len());
    let mut tolerance = Vec::with_capacity(ledger.len());
    for (i, r) in ledger.rows.iter().enumerate() {
        let lhs = 0.5 * d.value[i];
        let rhs = -(r.w_h1sq - 0.25 * r.w_l2sq);
        residual.push(lhs - rhs);
        tolerance
            .push(0.5 * d.error[i] + tol.route_slack * (lhs.abs() + r.w_h1sq + 0.25 * r.w_l2sq));
    }
    let identity = Check::rowwise(
        "similarity_energy",
        &taus,
        &residual,
        &tolerance,
        Status::Violated,
    );
    let u = ledger.column(|r| r.u_l2sq);
    let monotone = nonincreasing(
        "physical_energy_nonincreasing",
        ledger,
        &u,
        1,
        tol.route_slack,
        Status::Violated,
    );

    let max_abs_defect = residual.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let defect_coefficient = (0..taus.len())
        .map(|i| {
            let left = if i > 0 { taus[i] - taus[i - 1] } else { 0.0 };
            let right = if i + 1 < taus.len() {
                taus[i + 1] - taus[i]
            } else {
                0.0
            };
            residual[i].abs() / left.max(right).powi(2)
        })
        .fold(0.0, f64::max);
    let measurements = BTreeMap::from([
        ("max_abs_defect".to_string(), max_abs_defect),
        ("defect_coefficient".to_string(), defect_coefficient),
    ]);
    Ok(InequalityReport::from_checks(
        InequalityId::EnergyL2,
        range,
        vec![identity, monotone],
        0.0,
        measurements,
    ))
}

struct GradientCertificate {
    value: f64,
    raw: f64,
}

/// Smallest `c ≥ 0` with `d/dτ‖∇w‖² ≤ −‖Δw‖² − ½‖∇w‖² + c` at every row
/// (within the differencing tolerance).
fn gradient_certificate(
    ledger: &EnergyLedger,
    d: &Differenced,
    tol: &LabTolerance,
) -> GradientCertificate {
    let mut value = 0.0f64;
    let mut raw = f64::NEG_INFINITY;
    for (i, r) in ledger.rows.iter().enumerate() {
        let excess = d.value[i] + r.w_h2sq + 0.5 * r.w_h1sq;
        let slack = d.error[i] + tol.route_slack * (d.value[i].abs() + r.w_h2sq + 0.5 * r.w_h1sq);
        raw = raw.max(excess);
        value = value.max(excess - slack);
    }
    GradientCertificate { value, raw }
}

/// Gradient law, fitted-constant form and its Gronwall envelope:
///
/// 1. `d/dτ‖∇w‖² ≤ −2‖Δw‖² − ½‖∇w‖² − 2∫((w·∇)w)·Δw` rowwise;
/// 2. certificate `c`, the smallest constant with
///    `d/dτ‖∇w‖² ≤ −‖Δw‖² − ½‖∇w‖² + c`;
/// 3. `‖∇w(τ)‖² ≤ e^{−(τ−τ₀)/2}‖∇w(τ₀)‖² + 2c(1 − e^{−(τ−τ₀)/2})` with
///    `τ₀` the first logged time.
pub fn verify_h1_inequality(ledger: &EnergyLedger, tol: &LabTolerance) -> Result<InequalityReport> {
    let range = prepared(ledger)?;
    let taus = ledger.taus();
    let d = differenced(ledger, tol, |r| r.w_h1sq)?;
    let mut residual = Vec::with_capacity(ledger.len());
    let mut tolerance = Vec::with_capacity(ledger.len());
    for (i, r) in ledger.rows.iter().enumerate() {
        let rhs = -2.0 * r.w_h2sq - 0.5 * r.w_h1sq - 2.0 * r.trilinear_w;
        residual.push(d.value[i] - rhs);
        let size = d.value[i].abs() + 2.0 * r.w_h2sq + 0.5 * r.w_h1sq + 2.0 * r.trilinear_w.abs();
        tolerance.push(d.error[i] + tol.route_slack * size);
    }
    let raw = Check::rowwise(
        "gradient_law",
        &taus,
        &residual,
        &tolerance,
        Status::Violated,
    );

    let cert = gradient_certificate(ledger, &d, tol);
    let h1 = ledger.column(|r| r.w_h1sq);
    let envelope = envelope_values(&taus, h1[0], 0.5, cert.value);
    let excess: Vec<f64> = h1.iter().zip(&envelope).map(|(x, e)| x - e).collect();
    let env_tol: Vec<f64> = h1
        .iter()
        .zip(&envelope)
        .map(|(x, e)| tol.route_slack * x.abs().max(e.abs()))
        .collect();
    let envelope_check = Check::rowwise(
        "gradient_envelope",
        &taus,
        &excess,
        &env_tol,
        Status::Violated,
    );

    let measurements = BTreeMap::from([
        ("raw_certificate".to_string(), cert.raw),
        ("delta_1".to_string(), tail_delta_1(ledger, tol)),
    ]);
    Ok(InequalityReport::from_checks(
        InequalityId::GradientH1,
        range,
        vec![raw, envelope_check],
        cert.value,
        measurements,
    ))
}

/// `sup ‖∇Δ₀w‖` over the tail.
fn tail_delta_1(ledger: &EnergyLedger, tol: &LabTolerance) -> f64 {
    let start = tail_start(ledger, tol.burn_in).unwrap_or(0);
    ledger.rows[start..]
        .iter()
        .map(|r| r.grad_high_sq.sqrt())
        .fold(0.0, f64::max)
}

/// Laplacian law rowwise, then the largest `ρ` with
/// `‖Δw(τ)‖² ≤ e^{−ρ(τ−τ₀)}‖Δw(τ₀)‖²` on the tail, compared against
/// `3/2 − c·δ₁` with `c` the gradient certificate and `δ₁` the measured
/// tail size of `‖∇Δ₀w‖`.
///
/// A rate below that target is `inconclusive`: the claim concerns the limit
/// and an unknown constant, so a finite run cannot refute it.
pub fn verify_h2_inequality(ledger: &EnergyLedger, tol: &LabTolerance) -> Result<InequalityReport> {
    let range = prepared(ledger)?;
    let taus = ledger.taus();
    let d = differenced(ledger, tol, |r| r.w_h2sq)?;
    let mut residual = Vec::with_capacity(ledger.len());
    let mut tolerance = Vec::with_capacity(ledger.len());
    for (i, r) in ledger.rows.iter().enumerate() {
        let rhs = -2.0 * r.w_h3sq - 1.5 * r.w_h2sq - 2.0 * r.lap_coupling;
        residual.push(d.value[i] - rhs);
        let size = d.value[i].abs() + 2.0 * r.w_h3sq + 1.5 * r.w_h2sq + 2.0 * r.lap_coupling.abs();
        tolerance.push(d.error[i] + tol.route_slack * size);
    }
    let mut checks = vec![Check::rowwise(
        "laplacian_law",
        &taus,
        &residual,
        &tolerance,
        Status::Violated,
    )];

    let d1 = differenced(ledger, tol, |r| r.w_h1sq)?;
    let certificate = gradient_certificate(ledger, &d1, tol).value;
    let delta_1 = tail_delta_1(ledger, tol);
    let target = 1.5 - certificate * delta_1;
    let mut measurements = BTreeMap::from([
        ("target_rate".to_string(), target),
        ("delta_1".to_string(), delta_1),
        ("gradient_certificate".to_string(), certificate),
    ]);

    match tail_start(ledger, tol.burn_in).filter(|&a| a + 1 < ledger.len()) {
        None => checks.push(Check {
            name: "tail_rate".into(),
            status: Status::Inconclusive,
            max_residual: f64::NAN,
            tolerance: 0.0,
            tau: range[1],
        }),
        Some(a) => {
            let x_a = ledger.rows[a].w_h2sq;
            let tau_a = ledger.rows[a].tau;
            if x_a > 0.0 {
                let rate = ledger.rows[a + 1..]
                    .iter()
                    .filter(|r| r.w_h2sq > 0.0)
                    .map(|r| -(r.w_h2sq / x_a).ln() / (r.tau - tau_a))
                    .fold(f64::INFINITY, f64::min);
                measurements.insert("tail_rate".into(), rate);
                measurements.insert("tau0".into(), tau_a);
                let status = if rate >= target {
                    Status::Holds
                } else {
                    Status::Inconclusive
                };
                checks.push(Check {
                    name: "tail_rate".into(),
                    status,
                    max_residual: target - rate,
                    tolerance: 0.0,
                    tau: tau_a,
                });
            } else {
                checks.push(Check::passed("tail_rate", 0.0, 0.0, tau_a));
            }
        }
    }
    let any_signal = ledger.rows.iter().any(|r| r.w_h2sq > 0.0);
    Ok(InequalityReport::from_checks(
        InequalityId::LaplacianH2,
        range,
        checks,
        if any_signal { certificate } else { 0.0 },
        measurements,
    ))
}

/// Split-energy checks for `E = E_low + E_high`:
///
/// - (a) certificate `C`, the smallest constant with `½E′ ≤ −αE + C·E^{3/2}`;
/// - (b) `E(τ) ≤ E(τ₀)e^{−α(τ−τ₀)}(1 + decay_tol)` on the tail. The smallness
///   condition `E(τ₀) ≤ (α/2C)²` is reported as `condition_active` and the
///   envelope is checked either way;
/// - (c) `E_high`, `‖Δ₋₁w‖_{L⁴}`, `‖Δ₋₁w‖_∞` nonincreasing on the tail
///   (a rise is a violation) and finally below `decay_ratio` times their
///   first value (falling short is inconclusive);
/// - `E ≤ ‖w‖²` at the first row.
pub fn verify_decomposition_decay(
    ledger: &EnergyLedger,
    alpha: f64,
    tol: &LabTolerance,
) -> Result<InequalityReport> {
    let alpha = Alpha::new(alpha)?.value();
    if let Some(logged) = ledger.alpha {
        if logged != alpha {
            return Err(Error::InvalidParameter(format!(
                "ledger was computed with alpha = {logged}, checks asked for {alpha}"
            )));
        }
    }
    let range = prepared(ledger)?;
    let taus = ledger.taus();
    let energy = ledger.column(LedgerRow::energy);
    let d = differenced(ledger, tol, LedgerRow::energy)?;

    let mut c_fit = 0.0f64;
    let mut raw_fit = f64::NEG_INFINITY;
    for (i, &e) in energy.iter().enumerate() {
        if e > 0.0 {
            let excess = 0.5 * d.value[i] + alpha * e;
            let slack = 0.5 * d.error[i] + tol.route_slack * (0.5 * d.value[i].abs() + alpha * e);
            raw_fit = raw_fit.max(excess / e.powf(1.5));
            c_fit = c_fit.max((excess - slack) / e.powf(1.5));
        }
    }
    let mut checks = Vec::new();
    let mut measurements = BTreeMap::from([("c_fit".to_string(), c_fit)]);
    if raw_fit.is_finite() {
        measurements.insert("raw_fit".into(), raw_fit);
    }

    let w0 = ledger.rows[0].w_l2sq;
    checks.push(Check::rowwise(
        "initial_energy_bound",
        &taus[..1],
        &[energy[0] - w0],
        &[1e-12],
        Status::Violated,
    ));

    match tail_start(ledger, tol.burn_in) {
        None => checks.push(Check {
            name: "energy_envelope".into(),
            status: Status::Inconclusive,
            max_residual: f64::NAN,
            tolerance: 0.0,
            tau: range[1],
        }),
        Some(a) => {
            let e_a = energy[a];
            let active = c_fit == 0.0 || e_a <= (alpha / (2.0 * c_fit)).powi(2);
            measurements.insert("condition_active".into(), if active { 1.0 } else { 0.0 });
            measurements.insert("tau0".into(), taus[a]);
            let envelope = envelope_values(&taus[a..], e_a, alpha, 0.0);
            let excess: Vec<f64> = energy[a..]
                .iter()
                .zip(&envelope)
                .map(|(e, b)| e - b)
                .collect();
            let allowance: Vec<f64> = envelope.iter().map(|b| tol.decay_tol * b).collect();
            checks.push(Check::rowwise(
                "energy_envelope",
                &taus[a..],
                &excess,
                &allowance,
                Status::Violated,
            ));
            if e_a > 0.0 {
                let rate = (a + 1..energy.len())
                    .filter(|&i| energy[i] > 0.0)
                    .map(|i| -(energy[i] / e_a).ln() / (taus[i] - taus[a]))
                    .fold(f64::INFINITY, f64::min);
                if rate.is_finite() {
                    measurements.insert("energy_rate".into(), rate);
                }
            }
        }
    }

    let start = tail_start(ledger, tol.burn_in).unwrap_or(ledger.len());
    let vanishing: [(&str, fn(&LedgerRow) -> f64); 3] = [
        ("E_high", |r| r.e_high),
        ("low_l4", |r| r.low_l4),
        ("low_sup", |r| r.low_sup),
    ];
    for (name, pick) in vanishing {
        let x = ledger.column(pick);
        checks.push(nonincreasing(
            &format!("{name}_nonincreasing"),
            ledger,
            &x,
            start,
            tol.route_slack,
            Status::Violated,
        ));
        let (first, last) = (x[0], x[x.len() - 1]);
        let allowed = tol.decay_ratio * first;
        let status = if last <= allowed {
            Status::Holds
        } else {
            Status::Inconclusive
        };
        measurements.insert(
            format!("{name}_final_ratio"),
            if first > 0.0 { last / first } else { 0.0 },
        );
        checks.push(Check {
            name: format!("{name}_decay"),
            status,
            max_residual: last,
            tolerance: allowed,
            tau: range[1],
        });
    }

    let grad = ledger.column(|r| r.grad_high_sq);
    let integral: f64 = (1..taus.len())
        .map(|i| 0.5 * (grad[i] + grad[i - 1]) * (taus[i] - taus[i - 1]))
        .sum();
    measurements.insert("grad_high_integral".into(), integral);

    Ok(InequalityReport::from_checks(
        InequalityId::DecompositionDecay,
        range,
        checks,
        c_fit,
        measurements,
    ))
}

/// Finds the earliest logged `t₀` after which `(T−t)^{1/2}‖u(t)‖_∞ ≤ ε` at
/// every logged time; `inconclusive` when the last row still exceeds `ε`.
/// Also records whether the monitored quantity is nonincreasing over the
/// final third of the rows (a failure there is inconclusive, not a
/// violation).
pub fn verify_blowup_rate(ledger: &EnergyLedger, epsilon: f64) -> InequalityReport {
    let range = tau_range(ledger);
    let mut measurements = BTreeMap::from([("epsilon".to_string(), epsilon)]);
    if ledger.is_empty() {
        let check = Check {
            name: "tail_bound".into(),
            status: Status::Inconclusive,
            max_residual: f64::NAN,
            tolerance: epsilon,
            tau: f64::NAN,
        };
        return InequalityReport::from_checks(
            InequalityId::BlowupRate,
            range,
            vec![check],
            0.0,
            measurements,
        );
    }
    let sup = ledger.column(|r| r.w_sup);
    let last = ledger.len() - 1;
    let mut checks = Vec::new();
    match sup.iter().rposition(|&m| m > epsilon) {
        Some(j) if j == last => checks.push(Check {
            name: "tail_bound".into(),
            status: Status::Inconclusive,
            max_residual: sup[last],
            tolerance: epsilon,
            tau: ledger.rows[last].tau,
        }),
        found => {
            let i0 = found.unwrap_or(0);
            let t0 = ledger.rows[i0].t;
            measurements.insert("t0".into(), t0);
            measurements.insert("tau0".into(), ledger.rows[i0].tau);
            let from = if found.is_some() { i0 + 1 } else { 0 };
            let worst = sup[from..]
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            checks.push(Check::passed(
                "tail_bound",
                worst,
                epsilon,
                ledger.rows[i0].tau,
            ));
        }
    }
    measurements.insert("final_w_sup".into(), sup[last]);
    let third = ledger.len() - ledger.len() / 3;
    let mut tail = nonincreasing(
        "final_third_nonincreasing",
        ledger,
        &sup,
        third.max(1),
        1e-10,
        Status::Inconclusive,
    );
    if ledger.len() < 2 {
        tail.status = Status::Holds;
    }
    checks.push(tail);
    InequalityReport::from_checks(InequalityId::BlowupRate, range, checks, 0.0, measurements)
}

/// Largest relative gap between the two similarity-variable routes.
pub fn two_route_audit(ledger: &EnergyLedger) -> f64 {
    ledger.max_route_gap()
}

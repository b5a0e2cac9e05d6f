use std::sync::OnceLock;

use super::fixtures::Fault;
use super::*;
use crate::dynamics::{run, InitialKind, SimulationConfig};
use crate::similarity::SimilarityClock;

fn uniform(n: usize, h: f64) -> Vec<f64> {
    (0..n).map(|i| i as f64 * h).collect()
}

/// Nonuniform grid with spacing growing by 3% per row.
fn stretched(n: usize, h: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    for i in 1..n {
        out.push(out[i - 1] + h * 1.03f64.powi(i as i32));
    }
    out
}

fn max_error(tau: &[f64], f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> f64 {
    let values: Vec<f64> = tau.iter().map(|&t| f(t)).collect();
    d_dtau(tau, &values)
        .unwrap()
        .iter()
        .zip(tau)
        .map(|(d, &t)| (d - df(t)).abs())
        .fold(0.0, f64::max)
}

#[test]
fn derivative_of_linear_and_constant() {
    let tau = uniform(40, 0.1);
    let lin: Vec<f64> = tau.clone();
    assert!(d_dtau(&tau, &lin)
        .unwrap()
        .iter()
        .all(|d| (d - 1.0).abs() < 1e-12));
    let tau = stretched(40, 0.1);
    assert!(d_dtau(&tau, &vec![2.5; 40])
        .unwrap()
        .iter()
        .all(|d| d.abs() < 1e-12));
    assert!(d_dtau(&[0.0, 1.0], &[1.0, 2.0]).is_err());
}

#[test]
fn derivative_error_is_second_order() {
    for grid in [uniform as fn(usize, f64) -> Vec<f64>, stretched] {
        let coarse = max_error(&grid(21, 0.1), |t| (-t).exp(), |t| -(-t).exp());
        let fine = max_error(&grid(41, 0.05), |t| (-t).exp(), |t| -(-t).exp());
        let order = (coarse / fine).log2();
        assert!((order - 2.0).abs() < 0.3, "order {order}");
    }
}

#[test]
fn error_estimate_covers_the_actual_error() {
    let tau = stretched(30, 0.1);
    let f: Vec<f64> = tau.iter().map(|t| (2.0 * t).sin()).collect();
    let d = d_dtau(&tau, &f).unwrap();
    let est = derivative_error(&tau, &f, 4.0).unwrap();
    for i in 0..tau.len() {
        let actual = (d[i] - 2.0 * (2.0 * tau[i]).cos()).abs();
        assert!(
            actual <= 2.0 * est[i] + 1e-14,
            "row {i}: {actual} vs {}",
            est[i]
        );
    }
}

fn row_at(t: f64, horizon: f64) -> LedgerRow {
    let clock = SimilarityClock::new(t, horizon).unwrap();
    LedgerRow {
        t,
        tau: clock.tau(),
        ..Default::default()
    }
}

fn zero_ledger() -> EnergyLedger {
    EnergyLedger::new((0..30).map(|i| row_at(i as f64 * 0.03, 1.0)).collect())
}

#[test]
fn zero_trajectory_holds_everywhere() {
    let ledger = zero_ledger();
    let tol = LabTolerance::default();
    for report in [
        verify_l2_inequality(&ledger, &tol).unwrap(),
        verify_h1_inequality(&ledger, &tol).unwrap(),
        verify_h2_inequality(&ledger, &tol).unwrap(),
        verify_decomposition_decay(&ledger, 1.0 / 16.0, &tol).unwrap(),
    ] {
        assert_eq!(report.status, Status::Holds, "{report:?}");
        assert_eq!(report.certificate, 0.0);
        assert_eq!(report.max_residual, 0.0);
    }
    let blowup = verify_blowup_rate(&ledger, 0.1);
    assert_eq!(blowup.status, Status::Holds);
    assert_eq!(blowup.measurement("t0"), Some(0.0));
    assert_eq!(two_route_audit(&ledger), 0.0);
}

#[test]
fn invalid_ledgers_are_rejected() {
    let tol = LabTolerance::default();
    let mut ledger = zero_ledger();
    ledger.rows[3].w_h1sq = f64::NAN;
    assert!(matches!(
        verify_l2_inequality(&ledger, &tol),
        Err(crate::Error::InvalidLedger(_))
    ));
    let mut ledger = zero_ledger();
    ledger.rows.swap(4, 5);
    assert!(verify_h1_inequality(&ledger, &tol).is_err());
    let short = EnergyLedger::new(zero_ledger().rows[..2].to_vec());
    assert!(verify_h2_inequality(&short, &tol).is_err());
    let tagged = zero_ledger().with_alpha(1.0 / 32.0);
    assert!(verify_decomposition_decay(&tagged, 1.0 / 16.0, &tol).is_err());
    assert!(verify_decomposition_decay(&zero_ledger(), 0.2, &tol).is_err());
}

fn energy_series(rate: f64) -> EnergyLedger {
    let rows = (0..200)
        .map(|i| {
            let tau = i as f64 * 0.03;
            LedgerRow {
                tau,
                t: 1.0 - (-tau).exp(),
                e_low: 1e-4 * (-rate * tau).exp(),
                w_l2sq: 1e-3,
                ..Default::default()
            }
        })
        .collect();
    EnergyLedger::new(rows)
}

#[test]
fn synthetic_energy_series() {
    let alpha = 1.0 / 16.0;
    let tol = LabTolerance::default();
    let exact = verify_decomposition_decay(&energy_series(alpha), alpha, &tol).unwrap();
    let envelope = exact.check("energy_envelope").unwrap();
    assert_eq!(envelope.status, Status::Holds);
    assert!(envelope.max_residual.abs() < 1e-15);
    // ½E′ + αE = ½αE > 0, so a positive constant is needed
    assert!(exact.certificate > 0.0);

    let slow = verify_decomposition_decay(&energy_series(alpha / 2.0), alpha, &tol).unwrap();
    assert_eq!(
        slow.check("energy_envelope").unwrap().status,
        Status::Violated
    );
    assert_eq!(slow.status, Status::Violated);
    assert!(slow.max_residual > slow.tolerance);
}

#[test]
fn blowup_monitor_examples() {
    let mut ledger = zero_ledger();
    for (i, row) in ledger.rows.iter_mut().enumerate() {
        row.w_sup = 0.3 * (-(i as f64) / 5.0).exp();
    }
    let report = verify_blowup_rate(&ledger, 0.1);
    assert_eq!(report.status, Status::Holds);
    // 0.3 e^{−i/5} ≤ 0.1 from i = 6 on
    assert_eq!(report.measurement("t0"), Some(ledger.rows[5].t));
    assert_eq!(
        report.check("final_third_nonincreasing").unwrap().status,
        Status::Holds
    );
    assert_eq!(
        verify_blowup_rate(&ledger, 0.0).status,
        Status::Inconclusive
    );
}

fn small_data_config() -> SimulationConfig {
    SimulationConfig {
        n: 16,
        stride: 1,
        ..Default::default()
    }
}

fn small_data_ledger() -> &'static EnergyLedger {
    static LEDGER: OnceLock<EnergyLedger> = OnceLock::new();
    LEDGER.get_or_init(|| run(&small_data_config()).unwrap())
}

#[test]
fn small_data_run_passes_every_check() {
    let ledger = small_data_ledger();
    let tol = LabTolerance::default();
    let reports = [
        verify_l2_inequality(ledger, &tol).unwrap(),
        verify_h1_inequality(ledger, &tol).unwrap(),
        verify_h2_inequality(ledger, &tol).unwrap(),
        verify_decomposition_decay(ledger, 1.0 / 16.0, &tol).unwrap(),
        verify_blowup_rate(ledger, 0.1),
    ];
    for r in &reports[..3] {
        assert!(r.status.is_pass(), "{r:?}");
    }
    assert!(reports[2].measurement("tail_rate").unwrap() > 0.0);
    assert!(reports[1]
        .check("gradient_envelope")
        .unwrap()
        .status
        .is_pass());
    let decay = &reports[3];
    assert_eq!(
        decay.check("energy_envelope").unwrap().status,
        Status::Holds
    );
    assert_eq!(decay.measurement("condition_active"), Some(1.0));
    assert_eq!(
        decay.check("initial_energy_bound").unwrap().status,
        Status::Holds
    );
    assert!(reports[4].measurement("t0").is_some());
    assert!(two_route_audit(ledger) <= 1e-10);
}

#[test]
fn halving_the_stride_shrinks_the_energy_defect() {
    let fine = small_data_ledger();
    let coarse = fine.subsample(2);
    let tol = LabTolerance::default();
    let d_fine = verify_l2_inequality(fine, &tol)
        .unwrap()
        .measurement("max_abs_defect")
        .unwrap();
    let d_coarse = verify_l2_inequality(&coarse, &tol)
        .unwrap()
        .measurement("max_abs_defect")
        .unwrap();
    assert!(d_coarse >= 3.0 * d_fine, "{d_coarse} vs {d_fine}");
}

#[test]
fn injected_faults_are_flagged() {
    let ledger = small_data_ledger();
    let tol = LabTolerance::default();
    let alpha = 1.0 / 16.0;
    let bumped = Fault::EnergyBump.apply(ledger, alpha);
    assert_eq!(
        verify_l2_inequality(&bumped, &tol).unwrap().status,
        Status::Violated
    );
    let slow = Fault::SubRate.apply(ledger, alpha);
    assert_eq!(
        verify_decomposition_decay(&slow, alpha, &tol)
            .unwrap()
            .status,
        Status::Violated
    );
}

/// Taylor–Green data has a negative trilinear term throughout, so reversing
/// its sign tightens the right side past the true derivative. Small data
/// would not do: there the term is far below the differencing error.
#[test]
fn trilinear_sign_flip_is_flagged_on_order_one_data() {
    let cfg = SimulationConfig {
        n: 16,
        stride: 1,
        t_min: Some(0.5),
        dtau_max: 0.002,
        initial: crate::dynamics::InitialDataSpec {
            kind: InitialKind::TaylorGreen,
            delta: Some(4.0),
            ..Default::default()
        },
        ..Default::default()
    };
    let ledger = run(&cfg).unwrap();
    assert!(ledger.rows[1..].iter().all(|r| r.trilinear_w < 0.0));
    let tol = LabTolerance::default();
    assert!(verify_h1_inequality(&ledger, &tol)
        .unwrap()
        .status
        .is_pass());
    let flipped = verify_h1_inequality(&Fault::TrilinearFlip.apply(&ledger, 0.0625), &tol).unwrap();
    assert_eq!(flipped.status, Status::Violated);
    assert!(flipped.max_residual > 3.0 * flipped.tolerance);
}

#[test]
fn viscous_taylor_green_matches_closed_form_rates() {
    let mut cfg = small_data_config();
    cfg.nonlinear = false;
    cfg.initial.kind = InitialKind::TaylorGreen;
    let ledger = run(&cfg).unwrap();
    let tol = LabTolerance::default();
    let h1 = verify_h1_inequality(&ledger, &tol).unwrap();
    assert_eq!(h1.status, Status::Holds, "{h1:?}");
    let h2 = verify_h2_inequality(&ledger, &tol).unwrap();
    assert!(h2.status.is_pass());

    // ‖Δw‖² = (T−t)^{3/2}‖Δu₀‖²e^{−2|k|²t} with |k|² = 3
    let a = ledger.rows.iter().position(|r| r.tau >= 1.0).unwrap();
    let ra = ledger.rows[a];
    let expected = ledger.rows[a + 1..]
        .iter()
        .map(|r| 1.5 + 6.0 * (r.t - ra.t) / (r.tau - ra.tau))
        .fold(f64::INFINITY, f64::min);
    let fitted = h2.measurement("tail_rate").unwrap();
    assert!((fitted - expected).abs() < 1e-8, "{fitted} vs {expected}");
}

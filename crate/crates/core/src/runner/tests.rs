use proptest::prelude::*;

use super::*;
use crate::dynamics::InitialKind;
use crate::lab::fixtures::Fault;
use crate::lab::LedgerRow;

#[test]
fn parse_examples() {
    let cfg = parse_config("alpha = 0.0625\nn = 32").unwrap();
    assert_eq!(cfg.simulation.alpha, 0.0625);
    assert_eq!(cfg.simulation.n, 32);
    assert_eq!(cfg.epsilon, RunConfig::default().epsilon);

    assert_eq!(parse_config("").unwrap(), RunConfig::default());
    assert_eq!(
        parse_config("# only a comment\n\n   \n").unwrap(),
        RunConfig::default()
    );

    let cfg = parse_config(
        "delta = none # keep the raw amplitude\nkind = taylor_green\nsweep_n = 16, 32",
    )
    .unwrap();
    assert_eq!(cfg.simulation.initial.delta, None);
    assert_eq!(cfg.simulation.initial.kind, InitialKind::TaylorGreen);
    assert_eq!(cfg.sweep.n, vec![16, 32]);
}

#[test]
fn parse_errors_carry_line_numbers() {
    let line_of = |text: &str| match parse_config(text) {
        Err(Error::Config { line, .. }) => line,
        other => panic!("expected a config error, got {other:?}"),
    };
    assert_eq!(line_of("n = 16\n\nbogus = 1"), 3);
    assert_eq!(line_of("n = 16\nalpha 0.1"), 2);
    assert_eq!(line_of("alpha = 0.2"), 1);
    assert_eq!(line_of("n = 16\nn = 32"), 2);
    assert_eq!(line_of("nonlinear = maybe"), 1);
    assert_eq!(line_of("inject_fault = gremlins"), 1);
    assert!(parse_config("alpha = 0.125").is_err());
    assert!(parse_config("n = 7").is_err());
    assert!(parse_config("t_min = 3").is_err());
    assert!(parse_config("sweep_alpha = 0.05, 0.13").is_err());
}

fn config_strategy() -> impl Strategy<Value = RunConfig> {
    (
        (
            prop::sample::select(vec![8usize, 12, 16, 32]),
            0.5f64..10.0,
            0.1f64..5.0,
            any::<bool>(),
            any::<u64>(),
        ),
        (
            prop::option::of(0.0f64..3.0),
            1.0f64..6.0,
            0.05f64..1.0,
            1e-4f64..0.1249,
            prop::option::of(1e-4f64..0.05),
        ),
        (
            1usize..10,
            1e-3f64..0.1,
            any::<bool>(),
            0.0f64..1.0,
            any::<[bool; 6]>(),
        ),
        (
            prop::collection::vec(1e-3f64..0.124, 0..3),
            prop::collection::vec(0.0f64..1.0, 0..3),
            prop::collection::vec(prop::sample::select(vec![8usize, 16, 24]), 0..3),
            prop::option::of(prop::sample::select(Fault::ALL.to_vec())),
            "[a-z][a-z0-9_/.-]{0,12}",
        ),
    )
        .prop_map(|(a, b, c, d)| {
            let mut cfg = RunConfig::default();
            let sim = &mut cfg.simulation;
            (
                sim.n,
                sim.box_length,
                sim.horizon,
                sim.nonlinear,
                sim.initial.seed,
            ) = a;
            sim.initial.kind = if a.3 {
                InitialKind::TaylorGreen
            } else {
                InitialKind::RandomLowMode
            };
            (
                sim.initial.delta,
                sim.initial.k_max,
                sim.c_cfl,
                sim.alpha,
                sim.t_min,
            ) = b;
            sim.t_min = sim.t_min.map(|t| t * sim.horizon);
            let toggles;
            (sim.stride, sim.dtau_max, cfg.strict, cfg.epsilon, toggles) = c;
            cfg.checks = CheckToggles {
                l2: toggles[0],
                h1: toggles[1],
                h2: toggles[2],
                decay: toggles[3],
                blowup: toggles[4],
            };
            cfg.tolerance.burn_in = if toggles[5] { 0.5 } else { 1.0 / 3.0 };
            (
                cfg.sweep.alpha,
                cfg.sweep.delta,
                cfg.sweep.n,
                cfg.inject_fault,
            ) = (d.0, d.1, d.2, d.3);
            cfg.output = d.4.into();
            cfg
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn config_round_trips(cfg in config_strategy()) {
        cfg.validate().unwrap();
        let text = cfg.to_text();
        let back = parse_config(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(config_hash(&back), config_hash(&cfg));
    }
}

fn sample_ledger() -> EnergyLedger {
    let rows = (0..7)
        .map(|i| {
            let x = i as f64;
            let mut row = LedgerRow {
                t: 0.1 * x,
                tau: -(1.0 - 0.1 * x).ln(),
                ..Default::default()
            };
            // fill the remaining columns with awkward values
            let v = [
                1.0 / 3.0,
                std::f64::consts::PI * x,
                1e-300 * x,
                -2.5e-17,
                6.02e23 / (x + 1.0),
            ];
            row.u_l2sq = v[0];
            row.w_h1sq = v[1];
            row.e_high = v[2];
            row.trilinear_w = v[3];
            row.lap_coupling = v[4];
            row.route_gap = 1e-16 * x;
            row
        })
        .collect();
    EnergyLedger::new(rows)
}

#[test]
fn ledger_csv_round_trip_is_bit_exact() {
    let ledger = sample_ledger();
    let mut buf = Vec::new();
    write_ledger(&ledger, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with(
        "t,tau,dt,u_l2sq,u_h1sq,u_h2sq,u_sup,w_l2sq,w_h1sq,w_h2sq,w_sup,E_low,E_high,low_l4,low_sup,grad_high_sq,trilinear_w,lap_coupling,route_gap,w_h3sq\n"
    ));
    let back = read_ledger(buf.as_slice()).unwrap();
    for (a, b) in back.rows.iter().zip(&ledger.rows) {
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
}

#[test]
fn malformed_ledgers_are_rejected() {
    let mut buf = Vec::new();
    write_ledger(&sample_ledger(), &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let renamed = text.replacen("E_low", "e_low", 1);
    assert!(matches!(
        read_ledger(renamed.as_bytes()),
        Err(Error::InvalidLedger(_))
    ));
    let garbage = text.replacen("3.3333333333333331e-1", "one third", 1);
    assert!(matches!(
        read_ledger(garbage.as_bytes()),
        Err(Error::InvalidLedger(_))
    ));
    let truncated: String = text
        .lines()
        .take(3)
        .map(|l| format!("{l}\n"))
        .collect::<String>()
        + "1,2\n";
    assert!(read_ledger(truncated.as_bytes()).is_err());
}

#[test]
fn sweep_points_cover_the_cross_product() {
    let mut cfg = RunConfig::default();
    cfg.sweep.delta = vec![0.005, 0.01, 0.02];
    cfg.sweep.n = vec![16, 32];
    let points = sweep_points(&cfg).unwrap();
    assert_eq!(points.len(), 6);
    let mut dirs: Vec<_> = points.iter().map(|p| p.output.clone()).collect();
    dirs.dedup();
    assert_eq!(dirs.len(), 6);
    assert!(points.iter().all(|p| p.sweep.is_empty()));
    assert!(sweep_points(&RunConfig::default()).is_err());
}

#[test]
fn signcheck_default_alphas_pass() {
    let (exit, rows) = cmd_signcheck(&DEFAULT_SIGNCHECK_ALPHAS);
    assert_eq!(exit, Exit::Success);
    assert_eq!(rows.unwrap().len(), 4);
    let (exit, rows) = cmd_signcheck(&[0.13]);
    assert_eq!(exit, Exit::Config);
    assert!(rows.is_err());
}

#[test]
fn constants_table_rows() {
    let table = constants_table(&[1.0 / 16.0]).unwrap();
    assert_eq!(table.len(), 1);
    assert!(table[0].1 > 0.0 && table[0].2 > 0.0);
}

#[test]
fn exit_codes_are_stable() {
    assert_eq!(Exit::Success.code(), 0);
    assert_eq!(Exit::Config.code(), 1);
    assert_eq!(Exit::Violated.code(), 2);
    assert_eq!(Exit::Numerical.code(), 3);
    assert_eq!(Exit::Io.code(), 4);
    let io = Error::Io(std::io::Error::other("disk"));
    assert_eq!(Exit::from_error(&io), Exit::Io);
    let blowup = Error::NumericalBlowup {
        step: 3,
        t: 0.1,
        what: "u".into(),
    };
    assert_eq!(Exit::from_error(&blowup), Exit::Numerical);
}

#[test]
fn quick_run_writes_ledger_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = parse_config("n = 8\nt_min = 0.5\nstride = 1\nstrict = true").unwrap();
    cfg.output = dir.path().join("out");
    let (exit, bundle) = cmd_run(&cfg);
    assert_eq!(exit, Exit::Success);
    let bundle = bundle.unwrap();
    assert_eq!(bundle.schema, REPORT_SCHEMA);
    assert_eq!(bundle.reports.len(), 5);
    let ledger = read_ledger_file(&cfg.output.join(LEDGER_FILE)).unwrap();
    assert_eq!(ledger.len(), bundle.metadata.rows);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(cfg.output.join(REPORT_FILE)).unwrap()).unwrap();
    assert_eq!(json["schema"], 1);
    assert_eq!(json["metadata"]["config_hash"].as_str().unwrap().len(), 64);

    cfg.checks.h2 = false;
    cfg.inject_fault = Some(Fault::EnergyBump);
    let (exit, bundle) = cmd_verify(&cfg.output.join(LEDGER_FILE), &cfg);
    assert_eq!(exit, Exit::Violated);
    assert_eq!(bundle.unwrap().reports.len(), 4);
}

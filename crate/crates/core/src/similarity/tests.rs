use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use super::*;
use crate::spectral::random_physical_field;

const TWO_PI: f64 = 2.0 * PI;

fn set() -> MultiplierSet {
    MultiplierSet::new(1.0 / 16.0).unwrap()
}

fn solenoidal(n: usize, seed: u64) -> SpectralField {
    let g = SpectralGrid::new(n, TWO_PI).unwrap();
    let mut f = random_physical_field(&g, seed)
        .to_spectral()
        .leray_project()
        .dealias();
    f.set_mode(0, [Complex64::new(0.0, 0.0); 3]);
    f
}

#[test]
fn clock_examples() {
    assert_eq!(tau_of_t(0.0, 1.0).unwrap(), 0.0);
    let t = 1.0 - (-1.0f64).exp();
    assert!((tau_of_t(t, 1.0).unwrap() - 1.0).abs() < 1e-14);
    assert!((tau_of_t(0.0, 2.0).unwrap() + 2f64.ln()).abs() < 1e-15);
    assert!(matches!(tau_of_t(1.0, 1.0), Err(Error::PastHorizon { .. })));
    assert!(tau_of_t(-0.1, 1.0).is_err());
    assert!(tau_of_t(0.1, 0.0).is_err());
}

#[test]
fn clock_round_trip_and_monotone() {
    let horizon = 1.7;
    let mut last = f64::NEG_INFINITY;
    for i in 0..1000 {
        let t = horizon * i as f64 / 1000.0 * 0.9999;
        let tau = tau_of_t(t, horizon).unwrap();
        assert!(tau > last);
        last = tau;
        let back = t_of_tau(tau, horizon).unwrap();
        assert!((back - t).abs() <= 1e-14 * t.max(1e-300) + 1e-15);
        let clock = SimilarityClock::new(t, horizon).unwrap();
        assert!((clock.tau() + (horizon - t).ln()).abs() <= 1e-14);
    }
}

/// Homogeneity count: a functional built from `p` factors of `w`, `d`
/// derivatives in total and one `dy` integral scales as
/// `s^{(p+d)/2 − 3/2}`; a root of order `r` divides that by `r`; a pointwise
/// supremum drops the `−3/2`.
fn homogeneity(f: Functional) -> f64 {
    let (p, d, integral, root) = match f {
        Functional::L2Sq | Functional::ELow | Functional::EHigh | Functional::ELowPhi => {
            (2, 0, true, 1)
        }
        Functional::H1Sq | Functional::GradHighSq => (2, 2, true, 1),
        Functional::H2Sq => (2, 4, true, 1),
        Functional::H3Sq => (2, 6, true, 1),
        Functional::Sup | Functional::LowSup => (1, 0, false, 1),
        Functional::LowL4 => (4, 0, true, 4),
        Functional::Trilinear | Functional::TrilinearAbs => (3, 3, true, 1),
        Functional::LapCoupling | Functional::LapCouplingAbs => (3, 5, true, 1),
    };
    let base = (p + d) as f64 / 2.0 - if integral { 1.5 } else { 0.0 };
    base / root as f64
}

#[test]
fn exponent_table_matches_homogeneity_count() {
    for f in Functional::ALL {
        assert_eq!(f.exponent(), homogeneity(f), "{f:?}");
    }
}

#[test]
fn rescaling_examples() {
    let base = WFunctionals {
        l2_sq: 4.0,
        sup: 10.0,
        h1_sq: 3.0,
        trilinear: -2.0,
        ..Default::default()
    };
    assert_eq!(base.rescaled(1.0), base);
    assert!((base.rescaled(0.25).l2_sq - 8.0).abs() < 1e-14);
    assert!((base.rescaled(0.01).sup - 1.0).abs() < 1e-14);
    assert!((base.rescaled(0.01).trilinear + 2e-3).abs() < 1e-17);
}

#[test]
fn exponent_table_matches_direct_change_of_variables() {
    // w(y) = s^{1/2} u(s^{1/2} y) sampled on the y-grid, for a smooth u
    let u_of = |x: [f64; 3]| {
        [
            x[0].sin() * x[1].cos() * x[2].cos() + 0.3 * (2.0 * x[2]).sin(),
            -x[0].cos() * x[1].sin() * x[2].cos(),
            0.2 * (x[0] + x[1]).cos(),
        ]
    };
    let set = set();
    let g = SpectralGrid::new(16, TWO_PI).unwrap();
    let u = PhysicalField::from_fn(&g, u_of).to_spectral();
    for s in [1.0, 0.5, 0.1, 0.01] {
        let root = f64::sqrt(s);
        let y_grid = g.with_box_length(TWO_PI / root).unwrap();
        let w = PhysicalField::from_fn(&y_grid, |y| u_of(y.map(|c| root * c)).map(|c| root * c))
            .to_spectral();
        let direct = field_functionals(&w, &set, 1.0);
        let scaled = field_functionals(&u, &set, root).rescaled(s);
        assert!(direct.relative_gap(&scaled) < 1e-10, "s = {s}");
    }
}

#[test]
fn multiplier_route_at_unit_scale_is_plain_evaluation() {
    let set = set();
    let u = solenoidal(16, 3);
    let clock = SimilarityClock::new(0.0, 1.0).unwrap();
    let direct = field_functionals(&u, &set, 1.0);
    let routed = w_functionals_multiplier_route(&u, &clock, &set).unwrap();
    assert_eq!(direct, routed);
    assert!(w_functionals_scaling_route(&u, &clock, &set).relative_gap(&direct) <= 1e-15);
}

#[test]
fn routes_agree_across_the_horizon() {
    let set = set();
    let u = solenoidal(16, 9);
    for t in [0.0, 0.3, 0.9, 0.999] {
        let clock = SimilarityClock::new(t, 1.0).unwrap();
        let eval = evaluate_routes(&u, &clock, &set).unwrap();
        assert!(eval.gap <= 1e-10, "t = {t}: gap {}", eval.gap);
        assert!(eval.multiplier.is_finite());
    }
}

#[test]
fn phi_split_recovers_total_energy() {
    let set = set();
    let u = solenoidal(16, 5);
    for t in [0.0, 0.5, 0.99] {
        let clock = SimilarityClock::new(t, 1.0).unwrap();
        let w = w_functionals_multiplier_route(&u, &clock, &set).unwrap();
        assert!((w.e_low_phi + w.e_high - w.l2_sq).abs() <= 1e-12 * w.l2_sq);
        assert!(w.e_low <= w.e_low_phi * (1.0 + 1e-12));
        for f in [
            w.l2_sq,
            w.h1_sq,
            w.h2_sq,
            w.h3_sq,
            w.e_low,
            w.e_high,
            w.grad_high_sq,
        ] {
            assert!(f >= 0.0);
        }
    }
}

#[test]
fn trilinear_matches_integration_by_parts() {
    // for div-free u: ∫∂ⱼuₖ∂ⱼuₗ∂ₗuₖ = −∫Δu·(u·∇)u
    let set = set();
    let u = solenoidal(16, 12);
    let f = field_functionals(&u, &set, 1.0);
    let physical = u.to_physical();
    let gradient =
        [[1, 0, 0], [0, 1, 0], [0, 0, 1]].map(|b| u.derivative(b).unwrap().to_physical());
    let conv: [Vec<f64>; 3] = [0, 1, 2].map(|k| {
        (0..u.grid().len())
            .map(|p| {
                (0..3)
                    .map(|j| physical.component(j)[p] * gradient[j].component(k)[p])
                    .sum()
            })
            .collect()
    });
    let conv = PhysicalField::from_components(u.grid(), conv)
        .unwrap()
        .to_spectral();
    let k_sq = u.grid().k_sq();
    let oracle = u.apply_symbol(|i| k_sq[i]).inner(&conv);
    assert!((f.trilinear - oracle).abs() <= 1e-10 * f.trilinear_abs);
    assert!(f.trilinear.abs() <= f.trilinear_abs);
}

#[test]
fn lap_coupling_matches_divergence_form() {
    // (u·∇)uₖ = ∂ⱼ(uⱼuₖ) for div-free u
    let set = set();
    let u = solenoidal(16, 14);
    let f = field_functionals(&u, &set, 1.0);
    let g = u.grid();
    let physical = u.to_physical();
    let mut conv = SpectralField::zeros(g);
    for j in 0..3 {
        let products: [Vec<f64>; 3] = [0, 1, 2].map(|k| {
            physical
                .component(j)
                .iter()
                .zip(physical.component(k))
                .map(|(a, b)| a * b)
                .collect()
        });
        let mut beta = [0, 0, 0];
        beta[j] = 1;
        let flux = PhysicalField::from_components(g, products)
            .unwrap()
            .to_spectral();
        conv = conv.axpy(1.0, &flux.derivative(beta).unwrap());
    }
    let k_sq = g.k_sq();
    let oracle = u.apply_symbol(|i| k_sq[i] * k_sq[i]).inner(&conv);
    assert!((f.lap_coupling - oracle).abs() <= 1e-10 * f.lap_coupling_abs);
}

#[test]
fn initial_energy_examples() {
    let set = set();
    let g = SpectralGrid::new(16, TWO_PI).unwrap();
    assert_eq!(
        initial_similarity_energy(&SpectralField::zeros(&g), 1.0, &set).unwrap(),
        0.0
    );

    for horizon in [1.0, 2.0, 0.5] {
        let u = solenoidal(16, 21);
        let e0 = initial_similarity_energy(&u, horizon, &set).unwrap();
        let w0 = u.l2_sq() / horizon.sqrt();
        assert!(e0 <= w0 * (1.0 + 1e-12));
    }

    // modes with |k| ≥ 2 at T = 1: χ = φ = 0 there
    let mut high = SpectralField::zeros(&g);
    for m in [[2, 0, 0], [1, 2, 2], [0, 3, 1]] {
        let v = [
            Complex64::new(0.0, 0.2),
            Complex64::new(0.1, 0.0),
            Complex64::new(0.0, -0.3),
        ];
        high.set_mode(g.index_of_mode(m), v);
        high.set_mode(g.index_of_mode(m.map(|c| -c)), v.map(|c| c.conj()));
    }
    let e0 = initial_similarity_energy(&high, 1.0, &set).unwrap();
    assert_eq!(e0, high.l2_sq());
}

use std::f64::consts::PI;

use proptest::prelude::*;
use rustfft::num_complex::Complex64;

use super::*;

const TWO_PI: f64 = 2.0 * PI;

fn grid(n: usize) -> SpectralGrid {
    SpectralGrid::new(n, TWO_PI).unwrap()
}

fn nonzero_modes(f: &SpectralField, tol: f64) -> Vec<(usize, [i64; 3])> {
    (0..f.grid().len())
        .filter(|&i| f.mode(i).iter().any(|c| c.norm() > tol))
        .map(|i| (i, f.grid().mode_vector(i)))
        .collect()
}

#[test]
fn constant_field_lives_in_mean_mode() {
    let g = grid(8);
    let f = PhysicalField::from_fn(&g, |_| [2.5, -1.0, 0.0]).to_spectral();
    let modes = nonzero_modes(&f, 1e-14);
    assert_eq!(modes.len(), 1);
    assert_eq!(modes[0].1, [0, 0, 0]);
    assert!((f.mode(0)[0].re - 2.5).abs() < 1e-15);
}

#[test]
fn sine_has_two_modes() {
    let g = grid(8);
    let f = PhysicalField::from_fn(&g, |x| [x[0].sin(), 0.0, 0.0]).to_spectral();
    let mut modes: Vec<[i64; 3]> = nonzero_modes(&f, 1e-14).into_iter().map(|m| m.1).collect();
    modes.sort();
    assert_eq!(modes, vec![[-1, 0, 0], [1, 0, 0]]);
    // sin x = (e^{ix} − e^{−ix}) / 2i
    let plus = f.mode(g.index_of_mode([1, 0, 0]))[0];
    assert!((plus - Complex64::new(0.0, -0.5)).norm() < 1e-15);
}

#[test]
fn parseval_matches_quadrature_oracle() {
    let g = grid(16);
    let f = random_physical_field(&g, 11);
    // direct collocation quadrature of |f|²
    let oracle: f64 = f
        .components()
        .iter()
        .flat_map(|c| c.iter())
        .map(|v| v * v)
        .sum::<f64>()
        * (TWO_PI / 16.0).powi(3);
    let plancherel = f.to_spectral().l2_sq();
    assert!((plancherel - oracle).abs() <= 1e-12 * oracle);
    assert!((f.l2_sq_quadrature() - oracle).abs() <= 1e-12 * oracle);
}

#[test]
fn representation_mismatch_is_an_error() {
    let g = grid(8);
    let spectral = VectorField::Spectral(SpectralField::zeros(&g));
    let physical = VectorField::Physical(PhysicalField::zeros(&g));
    assert!(matches!(
        transform(&spectral),
        Err(crate::Error::RepresentationMismatch { .. })
    ));
    assert!(inverse_transform(&physical).is_err());
    let back = inverse_transform(&transform(&physical).unwrap()).unwrap();
    assert!(matches!(back, VectorField::Physical(_)));
}

#[test]
fn random_real_field_is_hermitian() {
    let g = grid(8);
    let f = random_physical_field(&g, 3).to_spectral();
    assert!(f.hermitian_defect() < 1e-15);
}

#[test]
fn gradient_field_projects_to_zero() {
    let g = grid(16);
    // ∇g for g = sin(x₁)cos(2x₂) + cos(3x₃), plus a constant mean
    let grad = PhysicalField::from_fn(&g, |x| {
        [
            x[0].cos() * (2.0 * x[1]).cos() + 0.7,
            -2.0 * x[0].sin() * (2.0 * x[1]).sin(),
            -3.0 * (3.0 * x[2]).sin(),
        ]
    })
    .to_spectral();
    let p = grad.leray_project();
    for idx in 1..g.len() {
        assert!(p.mode(idx).iter().all(|c| c.norm() < 1e-15));
    }
    assert!((p.mode(0)[0].re - 0.7).abs() < 1e-15);
}

#[test]
fn divergence_free_field_is_unchanged() {
    let g = grid(16);
    let tg = PhysicalField::from_fn(&g, |x| {
        [
            x[0].sin() * x[1].cos() * x[2].cos(),
            -x[0].cos() * x[1].sin() * x[2].cos(),
            0.0,
        ]
    })
    .to_spectral();
    let p = tg.leray_project();
    assert!(p.max_abs_difference(&tg) <= 1e-14);
}

/// Projector assembled as an explicit 3×3 matrix per mode.
fn projector_oracle(f: &SpectralField) -> SpectralField {
    let g = f.grid();
    let mut out = f.clone();
    for idx in 0..g.len() {
        let k = g.odd_wavevector(idx);
        let k2: f64 = k.iter().map(|v| v * v).sum();
        if k2 == 0.0 {
            continue;
        }
        let mut matrix = [[0.0; 3]; 3];
        for (i, row) in matrix.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = if i == j { 1.0 } else { 0.0 } - k[i] * k[j] / k2;
            }
        }
        let v = f.mode(idx);
        let projected = [0, 1, 2].map(|i| (0..3).map(|j| v[j] * matrix[i][j]).sum::<Complex64>());
        out.set_mode(idx, projected);
    }
    out
}

#[test]
fn projection_of_random_field_is_solenoidal() {
    let g = grid(16);
    let f = random_physical_field(&g, 5).to_spectral();
    let p = f.leray_project();
    let oracle = projector_oracle(&f);
    assert!(p.max_abs_difference(&oracle) < 1e-15);
    let norm = f.l2_sq().sqrt();
    assert!(p.max_divergence() / norm <= 1e-12);
    assert!(oracle.max_divergence() / norm <= 1e-12);
}

#[test]
fn projector_is_idempotent_and_self_adjoint() {
    let g = grid(16);
    let f = random_physical_field(&g, 21).to_spectral();
    let h = random_physical_field(&g, 22).to_spectral();
    let pf = f.leray_project();
    let ppf = pf.leray_project();
    let scale = f.mode(1).iter().map(|c| c.norm()).fold(1e-300, f64::max);
    assert!(ppf.max_abs_difference(&pf) <= 1e-12 * scale.max(1.0));
    let lhs = pf.inner(&h);
    let rhs = f.inner(&h.leray_project());
    let size = f.l2_sq().sqrt() * h.l2_sq().sqrt();
    assert!((lhs - rhs).abs() <= 1e-12 * size);
}

#[test]
fn derivative_examples() {
    let g = grid(16);
    let s = PhysicalField::from_fn(&g, |x| [x[0].sin(), (2.0 * x[1]).sin(), 0.0]).to_spectral();
    let d1 = s.derivative([1, 0, 0]).unwrap().to_physical();
    let expected = PhysicalField::from_fn(&g, |x| [x[0].cos(), 0.0, 0.0]);
    assert!(d1.max_abs_difference(&expected) < 1e-13);

    let d2 = s.derivative([0, 2, 0]).unwrap().to_physical();
    let expected = PhysicalField::from_fn(&g, |x| [0.0, -4.0 * (2.0 * x[1]).sin(), 0.0]);
    assert!(d2.max_abs_difference(&expected) < 1e-12);

    let id = s.derivative([0, 0, 0]).unwrap();
    assert_eq!(id.max_abs_difference(&s), 0.0);

    assert!(matches!(
        s.derivative([2, 1, 1]),
        Err(crate::Error::DerivativeOrder { order: 4, .. })
    ));
    assert!(s.derivative([1, 1, 1]).is_ok());
}

#[test]
fn derivative_commutes_with_projection() {
    let g = grid(16);
    let f = random_physical_field(&g, 8).to_spectral();
    for beta in [[1, 0, 0], [0, 1, 1], [1, 1, 1], [0, 0, 2]] {
        let a = f.derivative(beta).unwrap().leray_project();
        let b = f.leray_project().derivative(beta).unwrap();
        let scale = f.derivative(beta).unwrap().l2_sq().sqrt() / g.volume().sqrt();
        assert!(a.max_abs_difference(&b) <= 1e-12 * scale);
    }
}

#[test]
fn dealias_examples() {
    let g = SpectralGrid::new(32, TWO_PI).unwrap();
    let mut low = SpectralField::zeros(&g);
    for m in [[10, 0, 0], [-10, 3, 7], [1, -10, 10]] {
        let idx = g.index_of_mode(m);
        low.set_mode(idx, [Complex64::new(1.0, 0.5); 3]);
    }
    assert_eq!(low.dealias().max_abs_difference(&low), 0.0);

    let mut high = SpectralField::zeros(&g);
    high.set_mode(g.index_of_mode([12, 0, 0]), [Complex64::new(1.0, 0.0); 3]);
    assert_eq!(high.dealias().l2_sq(), 0.0);

    let f = random_physical_field(&g, 4).to_spectral();
    assert!(f.dealias().l2_sq() <= f.l2_sq());
}

#[test]
fn sine_norms_are_exact() {
    let g = grid(16);
    let f = VectorField::Physical(PhysicalField::from_fn(&g, |x| [x[0].sin(), 0.0, 0.0]));
    let suite = norms(&f);
    let exact = TWO_PI.powi(3) / 2.0;
    assert!((suite.l2_sq - exact).abs() < 1e-12 * exact);
    assert!((suite.h1_sq - exact).abs() < 1e-12 * exact);
    assert!((suite.h2_sq - exact).abs() < 1e-12 * exact);
    assert!((suite.sup - 1.0).abs() < 1e-12);
    // ∫ sin⁴ = (2π)³·3/8
    let l4_exact = (TWO_PI.powi(3) * 3.0 / 8.0).powf(0.25);
    assert!((suite.l4 - l4_exact).abs() < 1e-12 * l4_exact);
    assert_eq!(suite.lm(4.0), Some(suite.l4));
    assert_eq!(suite.lm(f64::INFINITY), Some(suite.sup));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn round_trip_recovers_field(seed in any::<u64>(), half_n in 4usize..=8) {
        let g = grid(2 * half_n);
        let f = random_physical_field(&g, seed);
        let back = f.to_spectral().to_physical();
        let scale = f.sup_norm().max(f.components().iter().flatten().fold(0.0f64, |a, v| a.max(v.abs())));
        prop_assert!(back.max_abs_difference(&f) <= 1e-12 * scale);
    }

    #[test]
    fn quadrature_and_plancherel_agree(seed in any::<u64>()) {
        let g = grid(8);
        let f = random_physical_field(&g, seed);
        let q = f.l2_sq_quadrature();
        let p = f.to_spectral().l2_sq();
        prop_assert!((q - p).abs() <= 1e-12 * q);
        let suite = f.to_spectral().norms();
        prop_assert!(suite.l2_sq >= 0.0 && suite.h1_sq >= 0.0 && suite.h2_sq >= 0.0);
        prop_assert!(suite.sup >= 0.0 && suite.l4 >= 0.0);
    }
}

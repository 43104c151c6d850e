use std::f64::consts::PI;

use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;
use oscillab_core::lab::mixed_modes;
use oscillab_core::nls::{
    energy, evolve, linear_propagator, modified_energy, nonlinear_phase_step, strang_step, SolverConfig,
};
use oscillab_core::random::{gaussian_field, trial_rng};
use oscillab_core::{HermiteBasis, IOperatorSpec, MultiIndex, SpectralField, SpectralShape};
use proptest::prelude::*;

fn ground(b: &HermiteBasis, a: f64) -> SpectralField {
    SpectralField::mode(&b.shape(), &MultiIndex::new(vec![0; b.dim()]).unwrap(), a.into()).unwrap()
}

#[test]
fn linear_flow_identity_at_zero_and_unitary() {
    let shape = SpectralShape::uniform(2, 8).unwrap();
    let u = gaussian_field(&shape, &mut trial_rng(1, 0));
    assert_eq!(linear_propagator(&u, 0.0), u);
    for t in [0.3, 1.7, 12.5] {
        let v = linear_propagator(&u, t);
        for (a, b) in u.coeffs().iter().zip(v.coeffs().iter()) {
            assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
    }
}

#[test]
fn phase_step_keeps_modulus() {
    let v = ArrayD::from_shape_fn(IxDyn(&[5, 4]), |ix| Complex64::new(ix[0] as f64 - 2.0, 0.3 * ix[1] as f64));
    let w = nonlinear_phase_step(&v, 0.37, 1.0);
    for (a, b) in v.iter().zip(w.iter()) {
        assert!((a.norm() - b.norm()).abs() < 1e-15);
    }
}

#[test]
fn strang_steps_are_reversible() {
    let b = HermiteBasis::new(2, 24).unwrap();
    let u = mixed_modes(&b.shape(), 0.2).unwrap();
    let fwd = strang_step(&b, &u, 0.01, 1.0).unwrap().field;
    let back = strang_step(&b, &fwd, -0.01, 1.0).unwrap().field;
    let err = back.max_abs_diff(&u).unwrap();
    assert!(err < 1e-10, "{err}");
}

#[test]
fn time_reversal_of_a_run() {
    let b = HermiteBasis::new(1, 32).unwrap();
    let u0 = mixed_modes(&b.shape(), 0.5).unwrap();
    let mut u = u0.clone();
    for _ in 0..200 {
        u = strang_step(&b, &u, 0.01, 1.0).unwrap().field;
    }
    for _ in 0..200 {
        u = strang_step(&b, &u, -0.01, 1.0).unwrap().field;
    }
    let err = u.max_abs_diff(&u0).unwrap();
    assert!(err < 1e-7, "{err}");
}

#[test]
fn small_data_energy_is_constant() {
    let b = HermiteBasis::new(1, 8).unwrap();
    let u0 = ground(&b, 0.01);
    let cfg = SolverConfig { dt: 0.01, t_final: 10.0, record_every: 50, ..Default::default() };
    let ev = evolve(&b, &u0, &cfg, &IOperatorSpec::new(100.0, 2.0).unwrap()).unwrap();
    let e0 = ev.reports[0].energy;
    for r in &ev.reports {
        assert!((r.energy - e0).abs() < 1e-9);
        assert!((r.mass / ev.reports[0].mass - 1.0).abs() < 1e-8);
    }
    assert!(!ev.tainted);
}

#[test]
fn mass_after_ten_thousand_steps() {
    // At K = 24 this data spills about 2e-11 per step and the loss adds up
    // past the bound; K = 32 resolves it.
    let b = HermiteBasis::new(1, 32).unwrap();
    let u0 = mixed_modes(&b.shape(), 0.5).unwrap();
    let cfg = SolverConfig { dt: 0.005, t_final: 50.0, record_every: 2500, ..Default::default() };
    assert_eq!(cfg.steps(), 10_000);
    let ev = evolve(&b, &u0, &cfg, &IOperatorSpec::new(100.0, 2.0).unwrap()).unwrap();
    let m0 = ev.reports[0].mass;
    let drift = ev.reports.iter().map(|r| (r.mass / m0 - 1.0).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-8, "{drift} spill {}", ev.max_spillage);
    assert!(!ev.tainted, "spill {}", ev.max_spillage);
}

#[test]
fn energy_drift_is_second_order() {
    let b = HermiteBasis::new(1, 32).unwrap();
    let u0 = mixed_modes(&b.shape(), 1.0).unwrap();
    let spec = IOperatorSpec::new(100.0, 2.0).unwrap();
    let drift = |dt: f64| {
        let cfg = SolverConfig { dt, t_final: 5.0, record_every: 5, ..Default::default() };
        let ev = evolve(&b, &u0, &cfg, &spec).unwrap();
        let e0 = ev.reports[0].energy;
        ev.reports.iter().map(|r| (r.energy - e0).abs()).fold(0.0, f64::max)
    };
    let r = drift(0.02) / drift(0.01);
    assert!((r / 4.0 - 1.0).abs() < 0.2, "{r}");
}

#[test]
fn reports_are_evenly_spaced() {
    let b = HermiteBasis::new(2, 12).unwrap();
    let cfg = SolverConfig { dt: 0.05, t_final: 2.0, record_every: 4, ..Default::default() };
    let ev = evolve(&b, &ground(&b, 0.3), &cfg, &IOperatorSpec::new(4.0, 2.0).unwrap()).unwrap();
    assert_eq!(ev.reports.len(), 11);
    for (i, r) in ev.reports.iter().enumerate() {
        assert!((r.t - 0.2 * i as f64).abs() < 1e-12);
    }
}

#[test]
fn modified_energy_examples() {
    let b = HermiteBasis::new(1, 10).unwrap();
    let spec = IOperatorSpec::new(2.0, 1.5).unwrap();
    assert_eq!(modified_energy(&b, &SpectralField::zeros(&b.shape()), &spec).unwrap(), 0.0);
    let e = modified_energy(&b, &ground(&b, 1.0), &spec).unwrap();
    assert!((e - (0.5 + 0.25 / (2.0 * PI).sqrt())).abs() < 1e-14);
    let u = gaussian_field(&b.shape(), &mut trial_rng(3, 0)).scaled(0.2.into());
    let wide = IOperatorSpec::new(5.0, 1.5).unwrap();
    assert!(((2 * 10 + 1) as f64).sqrt() <= 5.0);
    assert_eq!(modified_energy(&b, &u, &wide).unwrap(), energy(&b, &u, 1.0).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn revival_at_pi(d in 1usize..=3, k in 1usize..=8, seed in 0u64..1000) {
        let shape = SpectralShape::uniform(d, k).unwrap();
        let u = gaussian_field(&shape, &mut trial_rng(seed, 0));
        let phase = Complex64::from_polar(1.0, -(d as f64) * PI);
        prop_assert!(linear_propagator(&u, PI).max_abs_diff(&u.scaled(phase)).unwrap() < 1e-12);
    }

    #[test]
    fn zero_coupling_matches_linear(d in 1usize..=2, seed in 0u64..1000, dt in 0.001f64..0.5) {
        let b = HermiteBasis::new(d, 6).unwrap();
        let u = gaussian_field(&b.shape(), &mut trial_rng(seed, 0));
        let s = strang_step(&b, &u, dt, 0.0).unwrap();
        prop_assert!(s.field.max_abs_diff(&linear_propagator(&u, dt)).unwrap() < 1e-14);
        prop_assert_eq!(s.spillage, 0.0);
    }
}

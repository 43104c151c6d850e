use std::f64::consts::PI;

use oscillab_core::lab::{
    bilinear_strichartz_ratio, derivative_bilinear_ratio, exhaustive_identity_scan_1d, quad_l0,
    random_identity_checks, verify_identity_k1, BilinearConfig, Ensemble, QuadTuple, ScalingFit,
};
use oscillab_core::{Error, HermiteBasis, MultiIndex, PWord};
use proptest::prelude::*;

fn mi(m: usize) -> MultiIndex {
    MultiIndex::new(vec![m]).unwrap()
}

#[test]
fn identity_on_small_eigenvalues_exhaustively() {
    // λ ≤ 8 in 1D means degree ≤ 31; the acceptance suite covers ≤ 16 on
    // the full sweep, this covers the low corner at tight tolerance.
    let scan = exhaustive_identity_scan_1d(6).unwrap();
    assert_eq!(scan.checked + scan.resonant, 7usize.pow(4));
    assert!(scan.max_residual < 1e-10, "{}", scan.max_residual);
}

#[test]
fn ground_quadruple_identity() {
    let b = HermiteBasis::new(1, 4).unwrap();
    let t = QuadTuple::from_modes([&mi(0), &mi(0), &mi(0), &mi(0)]).unwrap();
    assert_eq!(t.denominator(), -2);
    assert!(verify_identity_k1(&b, &t).unwrap().residual < 1e-10);
}

#[test]
fn resonant_tuple_is_reported() {
    // μ² = (7, 3, 3, 1) from degrees (3, 1, 1, 0).
    let b = HermiteBasis::new(1, 4).unwrap();
    let t = QuadTuple::from_modes([&mi(3), &mi(1), &mi(1), &mi(0)]).unwrap();
    assert_eq!(t.mu_sq(), [7, 3, 3, 1]);
    assert_eq!(verify_identity_k1(&b, &t), Err(Error::Resonant([7, 3, 3, 1])));
}

#[test]
fn random_2d_quadruples() {
    // λᵢ ≤ 8 means μ² ≤ 64.
    let rows = random_identity_checks(2, 64, 24, 5).unwrap();
    let checked: Vec<f64> = rows.iter().filter_map(|r| r.1.map(|c| c.residual)).collect();
    assert!(!checked.is_empty());
    assert!(checked.iter().all(|&r| r < 1e-8), "{checked:?}");
}

#[test]
fn fit_recovers_pure_powers() {
    for p in [-19.0, -0.5, 0.0, 2.25] {
        let xs: Vec<f64> = (1..=8).map(|i| 2f64.powi(i)).collect();
        let ys: Vec<f64> = xs.iter().map(|x: &f64| x.powf(p)).collect();
        let f = ScalingFit::fit(&xs, &ys).unwrap();
        assert!((f.slope - p).abs() < 1e-10);
    }
}

#[test]
fn ground_bilinear_closed_form() {
    // ∫₀ᵀ ∫ h₀⁴ dx dt = T/√(2π); both factors are h₀ at N = M = 1 in 1D.
    let cfg = BilinearConfig { d: 1, n: 1, m: 1, t_final: PI, trials: 1, seed: 0, ensemble: Ensemble::default() };
    let r = bilinear_strichartz_ratio(&cfg).unwrap();
    assert!((r.raw - (PI / (2.0 * PI).sqrt()).sqrt()).abs() < 1e-12, "{}", r.raw);
    assert_eq!(r.normalizer, 1.0);
}

#[test]
fn bilinear_validation() {
    let base = BilinearConfig { d: 2, n: 4, m: 2, t_final: PI, trials: 2, seed: 0, ensemble: Ensemble::default() };
    assert!(bilinear_strichartz_ratio(&BilinearConfig { m: 8, ..base }).is_err());
    assert!(bilinear_strichartz_ratio(&BilinearConfig { t_final: 4.0, ..base }).is_err());
    let long: PWord = "D1 D1 D1 D1 D1".parse().unwrap();
    let also: PWord = "X1 X1 X1 X1".parse().unwrap();
    assert!(matches!(derivative_bilinear_ratio(&long, &also, &base), Err(Error::WordTooLong { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn l0_permutation_symmetry(a in 0usize..12, b in 0usize..12, c in 0usize..12, d in 0usize..12) {
        let basis = HermiteBasis::new(1, 12).unwrap();
        let m = [mi(a), mi(b), mi(c), mi(d)];
        let l = |p: [usize; 4]| {
            quad_l0(&basis, &QuadTuple::from_modes([&m[p[0]], &m[p[1]], &m[p[2]], &m[p[3]]]).unwrap()).unwrap()
        };
        let base = l([0, 1, 2, 3]);
        for p in [[1, 0, 2, 3], [3, 2, 1, 0], [2, 3, 0, 1], [0, 2, 3, 1]] {
            prop_assert!((l(p) - base).abs() < 1e-13);
        }
        if (a + b + c + d) % 2 == 1 {
            prop_assert_eq!(base, 0.0);
        }
    }

    #[test]
    fn bilinear_is_deterministic(seed in 0u64..100) {
        let cfg = BilinearConfig { d: 2, n: 4, m: 2, t_final: 1.0, trials: 2, seed, ensemble: Ensemble::Isotropic };
        prop_assert_eq!(bilinear_strichartz_ratio(&cfg).unwrap(), bilinear_strichartz_ratio(&cfg).unwrap());
    }
}

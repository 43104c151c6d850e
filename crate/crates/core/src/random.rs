//! Seeded random coefficient fields.
//!
//! Each trial draws from its own ChaCha stream keyed by `(seed, trial)`, so a
//! trial's data does not depend on how many trials run or in which order.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::hermite::{SpectralField, SpectralShape};
use crate::spectral::LpProfile;

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Standard complex Gaussian, `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Independent complex Gaussian coefficients, drawn in row-major order.
pub fn gaussian_field<R: Rng + ?Sized>(shape: &SpectralShape, rng: &mut R) -> SpectralField {
    let mut u = SpectralField::zeros(shape);
    for c in u.coeffs_mut().iter_mut() {
        *c = complex_gaussian(rng);
    }
    u
}

/// Smallest uniform truncation holding every mode on which `Δ_N` is
/// nonzero, i.e. all `m` with `2|m|+d < 2N²`.
pub fn window_shape(d: usize, n: u64) -> Result<SpectralShape> {
    let top = 2 * n * n;
    if n == 0 || top <= d as u64 {
        return Err(invalid("N", format!("block {n} holds no eigenvalue in dimension {d}")));
    }
    let k = (top - d as u64 - 1) / 2;
    SpectralShape::uniform(d, k as usize)
}

/// Gaussian coefficients shaped by `ψ(λ²/N²)` and normalized to unit `L²`
/// norm: a random function frequency-localized at `√H ~ N`.
pub fn dyadic_localized<R: Rng + ?Sized>(
    shape: &SpectralShape,
    n: u64,
    profile: &LpProfile,
    rng: &mut R,
) -> Result<SpectralField> {
    let g = gaussian_field(shape, rng);
    let u = g.map_eigenvalue(|l| profile.block_symbol(l, n).into());
    let norm = u.norm_l2();
    if norm == 0.0 {
        return Err(invalid("N", format!("block {n} has no modes inside the truncation")));
    }
    Ok(u.scaled((1.0 / norm).into()))
}

/// Gaussian coefficients damped like `λ^{−p}`, `λ = √(2|m|+d)`, scaled to
/// `L²` norm `amplitude`: rough data whose `ℋˢ` norms are finite only for
/// `s` below about `p − d/2`.
pub fn power_law_field<R: Rng + ?Sized>(
    shape: &SpectralShape,
    p: f64,
    amplitude: f64,
    rng: &mut R,
) -> SpectralField {
    let g = gaussian_field(shape, rng).map_eigenvalue(|l| l.powf(-0.5 * p).into());
    let norm = g.norm_l2();
    g.scaled((amplitude / norm).into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = trial_rng(7, 3).gen();
        let b: f64 = trial_rng(7, 3).gen();
        let c: f64 = trial_rng(7, 4).gen();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn power_law_amplitude() {
        let shape = SpectralShape::uniform(2, 6).unwrap();
        let u = power_law_field(&shape, 3.0, 0.7, &mut trial_rng(2, 0));
        assert!((u.norm_l2() - 0.7).abs() < 1e-14);
    }

    #[test]
    fn window_shape_covers_support() {
        let s = window_shape(1, 8).unwrap();
        assert_eq!(s.max_degree(), &[63]);
        assert!(LpProfile.block_symbol(s.max_eigenvalue() as f64, 8) > 0.0);
        assert_eq!(LpProfile.block_symbol(s.max_eigenvalue() as f64 + 2.0, 8), 0.0);
        assert!(window_shape(3, 1).is_err());
    }

    #[test]
    fn localized_field_is_normalized_and_supported() {
        let shape = window_shape(2, 4).unwrap();
        let u = dyadic_localized(&shape, 4, &LpProfile, &mut trial_rng(1, 0)).unwrap();
        assert!((u.norm_l2() - 1.0).abs() < 1e-14);
        let outside = u.map_eigenvalue(|l| if l <= 4.0 || l >= 32.0 { 1.0.into() } else { 0.0.into() });
        assert_eq!(outside.norm_l2(), 0.0);
    }
}

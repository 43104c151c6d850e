use ndarray::Dimension;

use crate::error::{invalid, Result};
use crate::hermite::SpectralField;

/// Smooth dyadic cutoff used for the Littlewood–Paley blocks.
///
/// ```text
/// f(t) = e^{−1/t} (t > 0), 0 otherwise
/// η(x) = f(2 − x) / (f(2 − x) + f(x − 1))
/// ψ(x) = η(x) − η(4x)
/// ```
///
/// `η` is 1 on `(−∞, 1]`, 0 on `[2, ∞)` and smooth in between, so `ψ` is
/// supported in `(1/4, 2)` and equals 1 on `[1/2, 1]`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LpProfile;

fn bump(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

impl LpProfile {
    pub fn eta(&self, x: f64) -> f64 {
        if x <= 1.0 {
            return 1.0;
        }
        if x >= 2.0 {
            return 0.0;
        }
        let a = bump(2.0 - x);
        a / (a + bump(x - 1.0))
    }

    pub fn psi(&self, x: f64) -> f64 {
        self.eta(x) - self.eta(4.0 * x)
    }

    /// Symbol of `Δ_N` at eigenvalue `lam_sq`.
    pub fn block_symbol(&self, lam_sq: f64, n: u64) -> f64 {
        let nn = (n as f64) * (n as f64);
        self.psi(lam_sq / nn)
    }

    /// Symbol of the block below `N = 1`, `η(4H)`. It vanishes on the whole
    /// spectrum since `λ² ≥ 1`; it is kept so the partition reads in full.
    pub fn low_symbol(&self, lam_sq: f64) -> f64 {
        self.eta(4.0 * lam_sq)
    }
}

fn check_dyadic(n: u64) -> Result<()> {
    if n == 0 || !n.is_power_of_two() {
        return Err(invalid("N", format!("{n} is not a power of two")));
    }
    Ok(())
}

/// `Δ_N u = ψ(H/N²) u` for dyadic `N ≥ 1`.
pub fn littlewood_paley(u: &SpectralField, n: u64, profile: &LpProfile) -> Result<SpectralField> {
    check_dyadic(n)?;
    Ok(u.map_eigenvalue(|l| profile.block_symbol(l, n).into()))
}

/// `η(4H) u`, the block complementing `Σ_{N ≥ 1} Δ_N`.
pub fn littlewood_paley_low(u: &SpectralField, profile: &LpProfile) -> SpectralField {
    u.map_eigenvalue(|l| profile.low_symbol(l).into())
}

/// Dyadic `N` whose blocks are needed to cover every eigenvalue of `u`'s
/// truncation.
pub fn dyadic_cover(u: &SpectralField) -> Vec<u64> {
    let top = u.shape().max_eigenvalue() as f64;
    let mut out = vec![1u64];
    while ((*out.last().unwrap() as f64).powi(2)) < top {
        out.push(out.last().unwrap() * 2);
    }
    out
}

/// `‖u‖_{ℋˢ} = (Σ (2|m|+d)^s |c_m|²)^{1/2}`.
pub fn sobolev_norm(u: &SpectralField, s: f64) -> f64 {
    let d = u.dim() as f64;
    let mut acc = 0.0;
    for (ix, c) in u.coeffs().indexed_iter() {
        let lam_sq = 2.0 * ix.slice().iter().sum::<usize>() as f64 + d;
        acc += lam_sq.powf(s) * c.norm_sqr();
    }
    acc.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::{MultiIndex, SpectralShape};
    use num_complex::Complex64;

    #[test]
    fn eta_plateaus_and_monotone() {
        let p = LpProfile;
        assert_eq!(p.eta(-3.0), 1.0);
        assert_eq!(p.eta(1.0), 1.0);
        assert_eq!(p.eta(2.0), 0.0);
        assert!((p.eta(1.5) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 1..100 {
            let v = p.eta(1.0 + i as f64 / 100.0);
            assert!(v <= prev);
            if (10..90).contains(&i) {
                assert!(v < prev && v > 0.0);
            }
            prev = v;
        }
    }

    #[test]
    fn psi_support() {
        let p = LpProfile;
        assert_eq!(p.psi(0.25), 0.0);
        assert_eq!(p.psi(2.0), 0.0);
        assert_eq!(p.psi(0.5), 1.0);
        assert_eq!(p.psi(1.0), 1.0);
        assert!(p.psi(0.3) > 0.0 && p.psi(1.9) > 0.0);
    }

    #[test]
    fn block_outside_window_vanishes() {
        let shape = SpectralShape::uniform(1, 10).unwrap();
        let u = SpectralField::mode(&shape, &MultiIndex::new(vec![7]).unwrap(), 1.0.into()).unwrap();
        let out = littlewood_paley(&u, 2, &LpProfile).unwrap();
        assert_eq!(out.coeff(&[7]), Complex64::new(0.0, 0.0));
        assert!(littlewood_paley(&u, 3, &LpProfile).is_err());
    }

    #[test]
    fn sobolev_norm_single_modes() {
        let shape = SpectralShape::uniform(2, 3).unwrap();
        let h0 = SpectralField::mode(&shape, &MultiIndex::new(vec![0, 0]).unwrap(), 1.0.into()).unwrap();
        assert_eq!(sobolev_norm(&h0, 1.0), 2f64.sqrt());
        let c = Complex64::new(3.0, -4.0);
        let u = SpectralField::mode(&shape, &MultiIndex::new(vec![2, 1]).unwrap(), c).unwrap();
        assert_eq!(sobolev_norm(&u, 0.0), 5.0);
    }
}

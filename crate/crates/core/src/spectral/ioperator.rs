use std::f64::consts::LN_2;

use crate::error::{invalid, Result};
use crate::hermite::SpectralField;

/// Smoothing operator `I = m(√H)` that damps frequencies above `N`.
///
/// ```text
/// m(λ) = 1                 λ ≤ N
/// m(λ) = (λ/N)^{s−1}       λ ≥ 2N
/// ```
///
/// On `(N, 2N)` the bridge is cubic in log–log coordinates: with
/// `t = log₂(λ/N)`, `log m = (s−1)·ln 2·t²(2 − t)`. It matches value and slope
/// at both ends and is increasing, so `m` is C¹ and nondecreasing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IOperatorSpec {
    n: f64,
    s: f64,
}

impl IOperatorSpec {
    pub fn new(n: f64, s: f64) -> Result<Self> {
        if !(n.is_finite() && n > 0.0) {
            return Err(invalid("N", format!("{n} must be positive and finite")));
        }
        if !(s.is_finite() && s > 1.0) {
            return Err(invalid("s", format!("{s} must exceed 1")));
        }
        Ok(IOperatorSpec { n, s })
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// `m(λ)` for `λ ≥ 0`.
    pub fn multiplier(&self, lambda: f64) -> f64 {
        if lambda <= self.n {
            return 1.0;
        }
        if lambda >= 2.0 * self.n {
            return (lambda / self.n).powf(self.s - 1.0);
        }
        let t = (lambda / self.n).log2();
        ((self.s - 1.0) * LN_2 * t * t * (2.0 - t)).exp()
    }

    /// `I u`: `c_m ↦ m(√(2|m|+d)) c_m`.
    pub fn apply(&self, u: &SpectralField) -> SpectralField {
        u.map_eigenvalue(|l| self.multiplier(l.sqrt()).into())
    }

    /// `I⁻¹ u`; every multiplier value is at least 1.
    pub fn apply_inverse(&self, u: &SpectralField) -> SpectralField {
        u.map_eigenvalue(|l| (1.0 / self.multiplier(l.sqrt())).into())
    }
}

/// `I u` for the given spec.
pub fn apply_i(u: &SpectralField, spec: &IOperatorSpec) -> SpectralField {
    spec.apply(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_parameters() {
        assert!(IOperatorSpec::new(0.0, 2.0).is_err());
        assert!(IOperatorSpec::new(4.0, 1.0).is_err());
        assert!(IOperatorSpec::new(4.0, f64::NAN).is_err());
    }

    #[test]
    fn plateau_and_power_law() {
        let m = IOperatorSpec::new(4.0, 2.0).unwrap();
        assert_eq!(m.multiplier(1.0), 1.0);
        assert_eq!(m.multiplier(4.0), 1.0);
        assert_eq!(m.multiplier(16.0), 4.0);
        assert_eq!(m.multiplier(8.0), 2.0);
    }

    #[test]
    fn bridge_is_c1_and_monotone() {
        let spec = IOperatorSpec::new(3.0, 1.7).unwrap();
        let n = spec.n();
        let lm = |l: f64| spec.multiplier(l).ln();
        let h = 1e-6;
        for &edge in &[n, 2.0 * n] {
            let left = (lm(edge) - lm(edge - h)) / h;
            let right = (lm(edge + h) - lm(edge)) / h;
            assert!((left - right).abs() < 1e-4, "slope jump at {edge}: {left} vs {right}");
            assert!((lm(edge + h) - lm(edge - h)).abs() < 1e-5);
        }
        let mut prev = 1.0;
        for i in 0..=1000 {
            let v = spec.multiplier(n + n * i as f64 / 1000.0);
            assert!(v >= prev);
            prev = v;
        }
    }
}

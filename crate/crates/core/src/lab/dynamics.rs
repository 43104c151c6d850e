use super::fit::ScalingFit;
use crate::error::{invalid, Error, Result};
use num_complex::Complex64;

use crate::hermite::{HermiteBasis, MultiIndex, SpectralField, SpectralShape};
use crate::nls::{energy, evolve, evolve_observed, SolverConfig};
use crate::spectral::{sobolev_norm, IOperatorSpec};

/// Fixed four-mode initial state of unit scale used by the dynamics
/// experiments, with complex coefficients on low modes of every axis:
///
/// ```text
/// d = 1:  h₀ + 0.5i h₁ + 0.3 h₂ + (0.2 − 0.1i) h₃
/// d = 2:  h₀₀ + 0.5i h₁₀ + 0.3 h₀₂ + (0.2 − 0.1i) h₂₁
/// d = 3:  h₀₀₀ + 0.5i h₁₀₀ + 0.3 h₀₂₀ + (0.2 − 0.1i) h₂₁₁
/// ```
pub fn mixed_modes(shape: &SpectralShape, amplitude: f64) -> Result<SpectralField> {
    let modes: [(&[usize], Complex64); 4] = match shape.dim() {
        1 => [(&[0], 1.0.into()), (&[1], Complex64::new(0.0, 0.5)), (&[2], 0.3.into()), (&[3], Complex64::new(0.2, -0.1))],
        2 => [
            (&[0, 0], 1.0.into()),
            (&[1, 0], Complex64::new(0.0, 0.5)),
            (&[0, 2], 0.3.into()),
            (&[2, 1], Complex64::new(0.2, -0.1)),
        ],
        _ => [
            (&[0, 0, 0], 1.0.into()),
            (&[1, 0, 0], Complex64::new(0.0, 0.5)),
            (&[0, 2, 0], 0.3.into()),
            (&[2, 1, 1], Complex64::new(0.2, -0.1)),
        ],
    };
    let mut u = SpectralField::zeros(shape);
    for (m, c) in modes {
        u = u.add(&SpectralField::mode(shape, &MultiIndex::new(m.to_vec())?, c * amplitude)?)?;
    }
    Ok(u)
}

/// Local existence window `δ = min(1, ‖I u₀‖_{ℋ¹}^{−2})`.
pub fn horizon(u0: &SpectralField, spec: &IOperatorSpec) -> f64 {
    let h1 = sobolev_norm(&spec.apply(u0), 1.0);
    if h1 == 0.0 {
        1.0
    } else {
        (h1 * h1).recip().min(1.0)
    }
}

/// Increment of `E(I_N u)` over `[0, δ_N]` for one `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncrementRow {
    pub n: f64,
    pub delta: f64,
    /// `E(I_N u₀)`.
    pub initial_energy: f64,
    /// `max_{t ≤ δ_N} |E(I_N u(t)) − E(I_N u₀)|`.
    pub increment: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IncrementScan {
    pub s: f64,
    pub rows: Vec<IncrementRow>,
    /// Fit of `increment` against `N`; `α` is minus the slope.
    pub fit: Option<ScalingFit>,
    /// `increment` strictly decreasing along the `N` list.
    pub strictly_decreasing: bool,
    /// The trajectory exceeded the spill tolerance; no fit is reported.
    pub tainted: bool,
    pub max_spillage: f64,
}

impl IncrementScan {
    /// Fitted decay exponent `α = −slope`.
    pub fn alpha(&self) -> Option<f64> {
        self.fit.as_ref().map(|f| -f.slope)
    }
}

/// One trajectory from `u0` observed through `I_N` for every `N`.
///
/// The flow is integrated up to the largest `δ_N`; each `N` only sees the
/// states with `t ≤ δ_N`. `cfg.t_final` is ignored.
pub fn energy_increment_scan(
    basis: &HermiteBasis,
    u0: &SpectralField,
    s: f64,
    n_list: &[f64],
    cfg: &SolverConfig,
) -> Result<IncrementScan> {
    if n_list.is_empty() {
        return Err(invalid("N_list", "at least one N is required"));
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("N_list", "values must be strictly increasing"));
    }
    let specs = n_list.iter().map(|&n| IOperatorSpec::new(n, s)).collect::<Result<Vec<_>>>()?;
    let deltas: Vec<f64> = specs.iter().map(|sp| horizon(u0, sp)).collect();
    let t_end = deltas.iter().cloned().fold(0.0, f64::max);
    let run = SolverConfig { t_final: t_end.max(cfg.dt), record_every: usize::MAX, ..cfg.clone() };
    let e0 = specs
        .iter()
        .map(|sp| energy(basis, &sp.apply(u0), cfg.coupling))
        .collect::<Result<Vec<_>>>()?;
    let mut inc = vec![0.0f64; specs.len()];
    let tol = 1e-9 * cfg.dt;
    let ev = evolve_observed(basis, u0, &run, &specs[0], |k, t, u| {
        if k == 0 {
            return Ok(());
        }
        for (i, sp) in specs.iter().enumerate() {
            if t <= deltas[i] + tol {
                let e = energy(basis, &sp.apply(u), cfg.coupling)?;
                inc[i] = inc[i].max((e - e0[i]).abs());
            }
        }
        Ok(())
    })?;
    let rows: Vec<IncrementRow> = n_list
        .iter()
        .enumerate()
        .map(|(i, &n)| IncrementRow { n, delta: deltas[i], initial_energy: e0[i], increment: inc[i] })
        .collect();
    let strictly_decreasing = rows.windows(2).all(|w| w[1].increment < w[0].increment);
    let fit = if ev.tainted || rows.len() < 2 || rows.iter().any(|r| r.increment <= 0.0) {
        None
    } else {
        let xs: Vec<f64> = rows.iter().map(|r| r.n).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.increment).collect();
        Some(ScalingFit::fit(&xs, &ys)?)
    };
    Ok(IncrementScan {
        s,
        rows,
        fit,
        strictly_decreasing,
        tainted: ev.tainted,
        max_spillage: ev.max_spillage,
    })
}

/// Growth exponent bound `s̃₀(s − 1)` with `s̃₀ = 2/3` for `d = 2` and `1` for
/// `d = 3`; no bound is available for `d = 1`.
pub fn growth_exponent_bound(d: usize, s: f64) -> Option<f64> {
    match d {
        2 => Some(2.0 / 3.0 * (s - 1.0)),
        3 => Some(s - 1.0),
        _ => None,
    }
}

/// Slack added to the bound when judging consistency.
pub const GROWTH_SLACK: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRun {
    pub s: f64,
    /// `(t, ‖u(t)‖_{ℋˢ}, running max)` at every recorded time.
    pub samples: Vec<(f64, f64, f64)>,
    /// Fit of the running maximum against `1 + t`.
    pub fit: ScalingFit,
    /// `s̃₀(s−1) + 0.2`, when defined for the dimension.
    pub bound: Option<f64>,
    /// Fitted exponent at or below the bound.
    pub consistent: Option<bool>,
    pub tainted: bool,
    pub max_spillage: f64,
}

impl GrowthRun {
    pub fn exponent(&self) -> f64 {
        self.fit.slope
    }
}

/// Tracks the running maximum of `‖u(t)‖_{ℋˢ}` over a long run and fits its
/// power of `1 + t`.
pub fn norm_growth_experiment(
    basis: &HermiteBasis,
    u0: &SpectralField,
    s: f64,
    cfg: &SolverConfig,
) -> Result<GrowthRun> {
    cfg.validate()?;
    if cfg.steps() < 100 {
        return Err(Error::Precondition(format!(
            "T = {} spans {} steps; at least 100 are needed",
            cfg.t_final,
            cfg.steps()
        )));
    }
    let run = SolverConfig { hs_exponents: vec![s], ..cfg.clone() };
    let spec = IOperatorSpec::new(f64::MAX, 2.0)?;
    let ev = evolve(basis, u0, &run, &spec)?;
    let mut running: f64 = 0.0;
    let samples: Vec<(f64, f64, f64)> = ev
        .reports
        .iter()
        .map(|r| {
            let v = r.hs_norms[0].1;
            running = running.max(v);
            (r.t, v, running)
        })
        .collect();
    let xs: Vec<f64> = samples.iter().map(|p| 1.0 + p.0).collect();
    let ys: Vec<f64> = samples.iter().map(|p| p.2).collect();
    let fit = ScalingFit::fit(&xs, &ys)?;
    let bound = growth_exponent_bound(basis.dim(), s).map(|b| b + GROWTH_SLACK);
    let consistent = bound.map(|b| fit.slope <= b);
    Ok(GrowthRun { s, samples, fit, bound, consistent, tainted: ev.tainted, max_spillage: ev.max_spillage })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::MultiIndex;

    #[test]
    fn horizon_rule() {
        let b = HermiteBasis::new(1, 8).unwrap();
        let u = SpectralField::mode(&b.shape(), &MultiIndex::new(vec![3]).unwrap(), 0.5.into()).unwrap();
        let spec = IOperatorSpec::new(100.0, 1.5).unwrap();
        assert!((horizon(&u, &spec) - 1.0 / 1.75).abs() < 1e-15);
        let small = u.scaled(0.1.into());
        assert_eq!(horizon(&small, &spec), 1.0);
    }

    #[test]
    fn identity_limit_has_tiny_increment() {
        let b = HermiteBasis::new(2, 16).unwrap();
        let mut u = SpectralField::mode(&b.shape(), &MultiIndex::new(vec![0, 0]).unwrap(), 0.05.into()).unwrap();
        u = u.add(&SpectralField::mode(&b.shape(), &MultiIndex::new(vec![1, 2]).unwrap(), num_complex::Complex64::new(0.0, 0.03)).unwrap()).unwrap();
        let cfg = SolverConfig { dt: 0.01, ..Default::default() };
        let scan = energy_increment_scan(&b, &u, 1.5, &[64.0], &cfg).unwrap();
        assert!(scan.rows[0].increment < 1e-9, "{}", scan.rows[0].increment);
        assert!(!scan.tainted);
    }

    #[test]
    fn linear_flow_has_zero_growth() {
        let b = HermiteBasis::new(2, 8).unwrap();
        let mut u = SpectralField::mode(&b.shape(), &MultiIndex::new(vec![0, 1]).unwrap(), 1.0.into()).unwrap();
        u = u.add(&SpectralField::mode(&b.shape(), &MultiIndex::new(vec![3, 0]).unwrap(), 0.5.into()).unwrap()).unwrap();
        let cfg = SolverConfig { dt: 0.05, t_final: 10.0, coupling: 0.0, record_every: 10, ..Default::default() };
        let g = norm_growth_experiment(&b, &u, 2.0, &cfg).unwrap();
        assert!(g.exponent().abs() < 1e-12);
        assert_eq!(g.consistent, Some(true));
        let short = SolverConfig { t_final: 1.0, ..cfg };
        assert!(norm_growth_experiment(&b, &u, 2.0, &short).is_err());
    }

    #[test]
    fn bound_by_dimension() {
        assert_eq!(growth_exponent_bound(2, 2.0), Some(2.0 / 3.0));
        assert_eq!(growth_exponent_bound(3, 1.5), Some(0.5));
        assert_eq!(growth_exponent_bound(1, 2.0), None);
    }
}

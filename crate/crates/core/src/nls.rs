//! Split-step integration of the defocusing cubic equation
//!
//! ```text
//! i ∂ₜu = H u + g |u|² u      (g = 1 by default)
//! ```
//!
//! The linear part is the diagonal phase `c_m ↦ e^{−iλ²t} c_m`; the cubic part
//! is the pointwise phase `v ↦ v e^{−ig|v|²t}` on the product grid followed by
//! Galerkin projection back onto the truncation.

use ndarray::{ArrayD, Zip};
use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::hermite::{GridKind, HermiteBasis, SpectralField};
use crate::spectral::{sobolev_norm, IOperatorSpec};

/// Operator splitting used by [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// `L(dt/2) N(dt) L(dt/2)`, second order.
    Strang,
    /// `L(dt) N(dt)`, first order.
    Lie,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    /// Record a report every this many steps (and always at `t = 0` and at
    /// the final step).
    pub record_every: usize,
    /// Coefficient `g` of the cubic term.
    pub coupling: f64,
    /// Largest relative mass change a single nonlinear projection may cause
    /// before the run is marked tainted.
    pub spill_tolerance: f64,
    /// Exponents `s` of the `ℋˢ` norms to record.
    pub hs_exponents: Vec<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 0.01,
            t_final: 1.0,
            scheme: Scheme::Strang,
            record_every: 1,
            coupling: 1.0,
            spill_tolerance: 1e-10,
            hs_exponents: vec![1.0],
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt", format!("{} must be positive", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final >= self.dt) {
            return Err(invalid("t_final", format!("{} must be at least dt = {}", self.t_final, self.dt)));
        }
        if self.record_every == 0 {
            return Err(invalid("record_every", "must be at least 1"));
        }
        if !self.coupling.is_finite() {
            return Err(invalid("coupling", "must be finite"));
        }
        if !(self.spill_tolerance >= 0.0) {
            return Err(invalid("spill_tolerance", "must be nonnegative"));
        }
        if self.hs_exponents.iter().any(|s| !s.is_finite()) {
            return Err(invalid("hs_exponents", "must be finite"));
        }
        Ok(())
    }

    /// Number of steps, `round(t_final / dt)`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }
}

/// Diagnostics at one recorded time.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub modified_energy: f64,
    /// `(s, ‖u(t)‖_{ℋˢ})` in the order of the config's exponents.
    pub hs_norms: Vec<(f64, f64)>,
}

/// One split step together with its projection loss.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub field: SpectralField,
    /// Relative mass change caused by projecting the nonlinear phase back
    /// onto the truncation.
    pub spillage: f64,
}

/// `e^{−itH} u`.
pub fn linear_propagator(u: &SpectralField, t: f64) -> SpectralField {
    u.map_eigenvalue(|l| Complex64::from_polar(1.0, -l * t))
}

/// Pointwise `v ↦ v e^{−ig|v|²dt}`.
pub fn nonlinear_phase_step(values: &ArrayD<Complex64>, dt: f64, coupling: f64) -> ArrayD<Complex64> {
    values.mapv(|v| v * Complex64::from_polar(1.0, -coupling * v.norm_sqr() * dt))
}

/// Cubic substep in coefficient space. The projection is accumulated as
/// `c + Π[v (e^{−ig|v|²dt} − 1)]`, which leaves `c` untouched when the phase
/// is trivial.
pub fn nonlinear_step(basis: &HermiteBasis, u: &SpectralField, dt: f64, coupling: f64) -> Result<StepOutcome> {
    if coupling == 0.0 || dt == 0.0 {
        return Ok(StepOutcome { field: u.clone(), spillage: 0.0 });
    }
    let v = basis.synthesize_on(u, GridKind::Product)?;
    let mut delta = ArrayD::<Complex64>::zeros(v.raw_dim());
    Zip::from(&mut delta).and(&v).for_each(|o, &x| {
        let phase = -coupling * x.norm_sqr() * dt;
        let em1 = Complex64::new(-2.0 * (0.5 * phase).sin().powi(2), phase.sin());
        *o = x * em1;
    });
    let correction = basis.analyze_on(&delta, GridKind::Product)?;
    let field = u.add(&correction)?;
    let m0 = u.mass();
    let spillage = if m0 > 0.0 { (field.mass() - m0).abs() / m0 } else { 0.0 };
    Ok(StepOutcome { field, spillage })
}

/// One Strang step `L(dt/2) N(dt) L(dt/2)`.
pub fn strang_step(basis: &HermiteBasis, u: &SpectralField, dt: f64, coupling: f64) -> Result<StepOutcome> {
    let half = linear_propagator(u, 0.5 * dt);
    let mut out = nonlinear_step(basis, &half, dt, coupling)?;
    out.field = linear_propagator(&out.field, 0.5 * dt);
    Ok(out)
}

/// One Lie step `L(dt) N(dt)`.
pub fn lie_step(basis: &HermiteBasis, u: &SpectralField, dt: f64, coupling: f64) -> Result<StepOutcome> {
    let mut out = nonlinear_step(basis, u, dt, coupling)?;
    out.field = linear_propagator(&out.field, dt);
    Ok(out)
}

pub fn step(basis: &HermiteBasis, u: &SpectralField, dt: f64, coupling: f64, scheme: Scheme) -> Result<StepOutcome> {
    match scheme {
        Scheme::Strang => strang_step(basis, u, dt, coupling),
        Scheme::Lie => lie_step(basis, u, dt, coupling),
    }
}

/// `∫|u|⁴ dx`, exact for fields inside the basis truncation.
pub fn quartic_integral(basis: &HermiteBasis, u: &SpectralField) -> Result<f64> {
    let v = basis.synthesize_on(u, GridKind::Product)?;
    let q = v.mapv(|z| z.norm_sqr() * z.norm_sqr());
    basis.integrate(&q, GridKind::Product)
}

/// `E(u) = ½‖u‖²_{ℋ¹} + (g/4)∫|u|⁴`.
pub fn energy(basis: &HermiteBasis, u: &SpectralField, coupling: f64) -> Result<f64> {
    let h1 = sobolev_norm(u, 1.0);
    Ok(0.5 * h1 * h1 + 0.25 * coupling * quartic_integral(basis, u)?)
}

/// `E(Iu)` with unit coupling.
pub fn modified_energy(basis: &HermiteBasis, u: &SpectralField, spec: &IOperatorSpec) -> Result<f64> {
    energy(basis, &spec.apply(u), 1.0)
}

/// Trajectory diagnostics returned by [`evolve`].
#[derive(Debug, Clone)]
pub struct Evolution {
    pub reports: Vec<EnergyReport>,
    pub final_state: SpectralField,
    /// Largest per-step projection loss seen.
    pub max_spillage: f64,
    /// Set when some step exceeded the spill tolerance.
    pub tainted: bool,
}

fn report(
    basis: &HermiteBasis,
    u: &SpectralField,
    t: f64,
    cfg: &SolverConfig,
    spec: &IOperatorSpec,
) -> Result<EnergyReport> {
    Ok(EnergyReport {
        t,
        mass: u.mass(),
        energy: energy(basis, u, cfg.coupling)?,
        modified_energy: energy(basis, &spec.apply(u), cfg.coupling)?,
        hs_norms: cfg.hs_exponents.iter().map(|&s| (s, sobolev_norm(u, s))).collect(),
    })
}

/// Integrates from `u0` to `t_final`, recording diagnostics.
pub fn evolve(
    basis: &HermiteBasis,
    u0: &SpectralField,
    cfg: &SolverConfig,
    spec: &IOperatorSpec,
) -> Result<Evolution> {
    evolve_observed(basis, u0, cfg, spec, |_, _, _| Ok(()))
}

/// [`evolve`] that also hands every state, including the initial one, to
/// `observer(step, t, u)`.
pub fn evolve_observed(
    basis: &HermiteBasis,
    u0: &SpectralField,
    cfg: &SolverConfig,
    spec: &IOperatorSpec,
    mut observer: impl FnMut(usize, f64, &SpectralField) -> Result<()>,
) -> Result<Evolution> {
    cfg.validate()?;
    if u0.shape() != &basis.shape() {
        return Err(crate::Error::ShapeMismatch {
            expected: basis.shape().extents(),
            found: u0.shape().extents(),
        });
    }
    let steps = cfg.steps();
    let mut u = u0.clone();
    let mut reports = vec![report(basis, &u, 0.0, cfg, spec)?];
    observer(0, 0.0, &u)?;
    let mut max_spillage: f64 = 0.0;
    for k in 1..=steps {
        let out = step(basis, &u, cfg.dt, cfg.coupling, cfg.scheme)?;
        max_spillage = max_spillage.max(out.spillage);
        u = out.field;
        let t = k as f64 * cfg.dt;
        observer(k, t, &u)?;
        if k % cfg.record_every == 0 || k == steps {
            reports.push(report(basis, &u, t, cfg, spec)?);
        }
    }
    Ok(Evolution {
        reports,
        final_state: u,
        tainted: max_spillage > cfg.spill_tolerance,
        max_spillage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::MultiIndex;
    use std::f64::consts::PI;

    fn ground(d: usize, k: usize, a: f64) -> (HermiteBasis, SpectralField) {
        let b = HermiteBasis::new(d, k).unwrap();
        let u = SpectralField::mode(&b.shape(), &MultiIndex::new(vec![0; d]).unwrap(), a.into()).unwrap();
        (b, u)
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig { dt: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SolverConfig { record_every: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = SolverConfig { t_final: 0.001, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn phase_step_examples() {
        let v = ArrayD::from_elem(ndarray::IxDyn(&[3]), Complex64::new(1.0, 0.0));
        let out = nonlinear_phase_step(&v, PI, 1.0);
        assert!((out[[0]] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(nonlinear_phase_step(&v, 0.0, 1.0), v);
    }

    #[test]
    fn ground_state_energy() {
        let (b, u) = ground(1, 6, 1.0);
        let e = energy(&b, &u, 1.0).unwrap();
        let expected = 0.5 + 0.25 / (2.0 * PI).sqrt();
        assert!((e - expected).abs() < 1e-14, "{e} vs {expected}");
        assert_eq!(energy(&b, &SpectralField::zeros(&b.shape()), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn zero_coupling_is_linear_flow() {
        let (b, u) = ground(2, 4, 1.0);
        let u = u.add(&SpectralField::mode(&b.shape(), &MultiIndex::new(vec![1, 2]).unwrap(), Complex64::new(0.0, 0.5)).unwrap()).unwrap();
        let out = strang_step(&b, &u, 0.1, 0.0).unwrap();
        assert!(out.field.max_abs_diff(&linear_propagator(&u, 0.1)).unwrap() < 1e-14);
    }

    #[test]
    fn report_schedule() {
        let (b, u) = ground(1, 32, 0.5);
        let cfg = SolverConfig { dt: 0.1, t_final: 1.0, record_every: 3, ..Default::default() };
        let spec = IOperatorSpec::new(100.0, 2.0).unwrap();
        let ev = evolve(&b, &u, &cfg, &spec).unwrap();
        let t: Vec<f64> = ev.reports.iter().map(|r| (r.t * 10.0).round() / 10.0).collect();
        assert_eq!(t, [0.0, 0.3, 0.6, 0.9, 1.0]);
        assert!(!ev.tainted);
    }
}

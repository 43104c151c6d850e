use ndarray::{Array2, ArrayD, Zip};
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::hermite::tensor::{contract_all, integrate_real};
use crate::hermite::{gauss_legendre, hermite_values_1d, SpectralShape};
use crate::nls::linear_propagator;
use crate::random::{dyadic_localized, trial_rng, window_shape};
use crate::spectral::{apply_p_extended, LpProfile, PWord};

/// Time nodes per revival period.
pub const TIME_NODES: usize = 32;

/// Distribution of the high-frequency factor `u_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    /// Gaussian coefficients on the `Δ_N` window restricted to modes whose
    /// degrees on axes `1..d` are at most `transverse_cap`: data
    /// concentrated along the first axis.
    Beam { transverse_cap: usize },
    /// Gaussian coefficients on the whole `Δ_N` window.
    Isotropic,
}

impl Default for Ensemble {
    fn default() -> Self {
        Ensemble::Beam { transverse_cap: 0 }
    }
}

/// Parameters shared by the bilinear measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearConfig {
    pub d: usize,
    pub n: u64,
    pub m: u64,
    /// Length of the time window, `0 < T ≤ π`.
    pub t_final: f64,
    pub trials: usize,
    pub seed: u64,
    pub ensemble: Ensemble,
}

/// Largest sample of one bilinear measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearMeasurement {
    /// `max ‖P(α)u_N · P(β)v_M‖_{L²([0,T]×ℝᵈ)} / (norm · ‖u_N‖‖v_M‖)`.
    pub ratio: f64,
    /// Largest unnormalized space-time norm.
    pub raw: f64,
    /// `N^{k₁} M^{k₂} M^{(d−1)/2} N^{−1/2}`.
    pub normalizer: f64,
}

/// Gauss–Legendre grid on one axis with Hermite tables for both factors.
struct AxisRule {
    weights: Vec<f64>,
    u_table: Array2<f64>,
    v_table: Array2<f64>,
}

/// Both factors decay like Gaussians past their turning points `√(2k+1)`, so
/// the product lives in a box set by the smaller one. The node count
/// resolves the summed oscillation frequency across that box.
fn axis_rule(ku: usize, kv: usize) -> Result<AxisRule> {
    let tu = (2.0 * ku as f64 + 1.0).sqrt();
    let tv = (2.0 * kv as f64 + 1.0).sqrt();
    let half = tu.min(tv) + 6.0;
    let p = (1.2 * (tu + tv) * half).ceil() as usize + 40;
    let (nodes, weights) = gauss_legendre(p, -half, half)?;
    let table = |k: usize| -> Result<Array2<f64>> {
        let h = hermite_values_1d(k, &nodes)?;
        Ok(h.t().as_standard_layout().into_owned())
    };
    Ok(AxisRule { weights, u_table: table(ku)?, v_table: table(kv)? })
}

fn u_shape(d: usize, n: u64, ensemble: Ensemble) -> Result<SpectralShape> {
    let full = window_shape(d, n)?;
    match ensemble {
        Ensemble::Isotropic => Ok(full),
        Ensemble::Beam { transverse_cap } => {
            let k = full.max_degree()[0];
            let mut deg = vec![k; d];
            for x in deg.iter_mut().skip(1) {
                *x = transverse_cap.min(k);
            }
            SpectralShape::new(deg)
        }
    }
}

fn check(cfg: &BilinearConfig, word_a: &PWord, word_b: &PWord) -> Result<()> {
    if cfg.m > cfg.n {
        return Err(invalid("M", format!("M = {} exceeds N = {}", cfg.m, cfg.n)));
    }
    if !(cfg.t_final > 0.0 && cfg.t_final <= std::f64::consts::PI) {
        return Err(invalid("T", format!("{} must lie in (0, π]", cfg.t_final)));
    }
    if cfg.trials == 0 {
        return Err(invalid("trials", "at least one trial is required"));
    }
    let order = word_a.order() + word_b.order();
    if order > PWord::MAX_ORDER {
        return Err(Error::WordTooLong { order, headroom: PWord::MAX_ORDER });
    }
    word_a.check_axes(cfg.d)?;
    word_b.check_axes(cfg.d)
}

/// `‖e^{−itH}u_N · e^{−itH}v_M‖_{L²([0,T]×ℝᵈ)}` normalized by
/// `M^{(d−1)/2} N^{−1/2} ‖u_N‖‖v_M‖`, maximized over random data.
pub fn bilinear_strichartz_ratio(cfg: &BilinearConfig) -> Result<BilinearMeasurement> {
    derivative_bilinear_ratio(&PWord::identity(), &PWord::identity(), cfg)
}

/// Same measurement for `P(α)e^{−itH}u_N · P(β)e^{−itH}v_M`, normalized by
/// an extra `N^{ord α} M^{ord β}`.
///
/// Each sample is propagated exactly to the nodes of a 32-point
/// Gauss–Legendre rule in time. Trial `t` draws `u_N` then `v_M` from
/// stream `t` of the seed.
pub fn derivative_bilinear_ratio(
    word_a: &PWord,
    word_b: &PWord,
    cfg: &BilinearConfig,
) -> Result<BilinearMeasurement> {
    check(cfg, word_a, word_b)?;
    let d = cfg.d;
    let us = u_shape(d, cfg.n, cfg.ensemble)?;
    let vs = window_shape(d, cfg.m)?;
    let ra = word_a.reach(d);
    let rb = word_b.reach(d);
    let axes = (0..d)
        .map(|j| axis_rule(us.max_degree()[j] + ra[j], vs.max_degree()[j] + rb[j]))
        .collect::<Result<Vec<_>>>()?;
    let u_tables: Vec<&Array2<f64>> = axes.iter().map(|a| &a.u_table).collect();
    let v_tables: Vec<&Array2<f64>> = axes.iter().map(|a| &a.v_table).collect();
    let weights: Vec<&[f64]> = axes.iter().map(|a| a.weights.as_slice()).collect();
    let (t_nodes, t_weights) = gauss_legendre(TIME_NODES, 0.0, cfg.t_final)?;

    let (n, m) = (cfg.n as f64, cfg.m as f64);
    let normalizer = n.powi(word_a.order() as i32)
        * m.powi(word_b.order() as i32)
        * m.powf((d as f64 - 1.0) / 2.0)
        * n.powf(-0.5);

    let samples = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(cfg.seed, trial as u64);
            let u = dyadic_localized(&us, cfg.n, &LpProfile, &mut rng)?;
            let v = dyadic_localized(&vs, cfg.m, &LpProfile, &mut rng)?;
            let mut total = 0.0;
            for (&t, &wt) in t_nodes.iter().zip(&t_weights) {
                let pu = apply_p_extended(word_a, &linear_propagator(&u, t))?;
                let pv = apply_p_extended(word_b, &linear_propagator(&v, t))?;
                let uu = contract_all(pu.coeffs(), &u_tables);
                let vv = contract_all(pv.coeffs(), &v_tables);
                let mut f = ArrayD::<f64>::zeros(uu.raw_dim());
                Zip::from(&mut f).and(&uu).and(&vv).for_each(|o, a, b| *o = (a * b).norm_sqr());
                total += wt * integrate_real(&f, &weights);
            }
            let raw = total.sqrt();
            Ok((raw / (normalizer * u.norm_l2() * v.norm_l2()), raw))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let ratio = samples.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let raw = samples.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(BilinearMeasurement { ratio, raw, normalizer })
}

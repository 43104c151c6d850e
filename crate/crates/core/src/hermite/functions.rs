//! Orthonormal Hermite functions `h_k(x) = (2^k k! √π)^{-1/2} H_k(x) e^{-x²/2}`.
//!
//! Evaluated with the normalised three-term recurrence
//! `h_{k+1} = x √(2/(k+1)) h_k − √(k/(k+1)) h_{k−1}`, seeded by
//! `h_0 = π^{-1/4} e^{-x²/2}`. The Gaussian factor is carried as a separate
//! log-scale so that neither the seed underflows nor the recurrence overflows
//! far from the origin.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Largest degree any table or rule will be built for unless a caller passes
/// its own cap.
pub const DEFAULT_DEGREE_CAP: usize = 8192;

const RESCALE_ABOVE: f64 = 1e150;
const RESCALE_BY: f64 = 1e-150;

fn pi_quarter() -> f64 {
    std::f64::consts::PI.powf(-0.25)
}

#[inline]
fn descale(mantissa: f64, log_scale: f64) -> f64 {
    if mantissa == 0.0 {
        return 0.0;
    }
    if log_scale > -700.0 && log_scale < 700.0 {
        mantissa * log_scale.exp()
    } else {
        mantissa.signum() * (mantissa.abs().ln() + log_scale).exp()
    }
}

/// Table of `h_k(x)` with row `k` for `0 ≤ k ≤ k_eval` and one column per node.
pub fn hermite_values_1d(k_eval: usize, nodes: &[f64]) -> Result<Array2<f64>> {
    hermite_values_1d_capped(k_eval, nodes, DEFAULT_DEGREE_CAP)
}

pub fn hermite_values_1d_capped(k_eval: usize, nodes: &[f64], cap: usize) -> Result<Array2<f64>> {
    if k_eval > cap {
        return Err(Error::DegreeCap { requested: k_eval, cap });
    }
    if let Some(x) = nodes.iter().find(|x| !x.is_finite()) {
        return Err(crate::error::invalid("nodes", format!("non-finite node {x}")));
    }
    let mut table = Array2::zeros((k_eval + 1, nodes.len()));
    for (j, &x) in nodes.iter().enumerate() {
        let mut log_scale = -0.5 * x * x;
        let mut cur = pi_quarter();
        let mut prev = 0.0;
        table[[0, j]] = descale(cur, log_scale);
        for k in 0..k_eval {
            let kf = k as f64;
            let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
            if cur.abs() > RESCALE_ABOVE {
                cur *= RESCALE_BY;
                prev *= RESCALE_BY;
                log_scale -= RESCALE_BY.ln();
            }
            table[[k + 1, j]] = descale(cur, log_scale);
        }
    }
    Ok(table)
}

/// `(h_{n−1}(x), h_n(x))` as mantissas sharing the returned log-scale.
pub(crate) fn hermite_pair_scaled(n: usize, x: f64) -> (f64, f64, f64) {
    let mut log_scale = -0.5 * x * x;
    let mut cur = pi_quarter();
    let mut prev = 0.0;
    for k in 0..n {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            cur *= RESCALE_BY;
            prev *= RESCALE_BY;
            log_scale -= RESCALE_BY.ln();
        }
    }
    (prev, cur, log_scale)
}

/// Single Hermite function value.
pub fn hermite_function(k: usize, x: f64) -> f64 {
    let (_, cur, log_scale) = hermite_pair_scaled(k, x);
    descale(cur, log_scale)
}

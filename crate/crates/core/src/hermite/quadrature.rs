//! Gauss–Hermite and Gauss–Legendre rules.
//!
//! Gauss–Hermite nodes come from the symmetric tridiagonal Jacobi matrix of the
//! Hermite recurrence (Golub–Welsch), each node is then polished by Newton
//! iteration on the orthonormal Hermite function. Weights use the
//! Christoffel–Darboux form `W_j e^{y_j^2} = 1 / (Q h_{Q-1}(y_j)^2)`, which
//! stays representable long after the raw weight underflows.

use std::f64::consts::PI;

use super::functions::hermite_pair_scaled;
use crate::error::{invalid, Result};

/// Gaussian weight `e^{-w y^2}` a rule integrates against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightExponent {
    One,
    Two,
}

impl WeightExponent {
    pub fn value(self) -> f64 {
        match self {
            WeightExponent::One => 1.0,
            WeightExponent::Two => 2.0,
        }
    }

    pub fn from_value(w: f64) -> Result<Self> {
        if w == 1.0 {
            Ok(WeightExponent::One)
        } else if w == 2.0 {
            Ok(WeightExponent::Two)
        } else {
            Err(invalid("weight_exponent", format!("{w} is not 1 or 2")))
        }
    }
}

/// Nodes and weights of a Gauss rule for the weight `e^{-w y^2}`.
///
/// `weights[j]` is the classical weight and may underflow to zero for very
/// large rules; `scaled_weights[j] = weights[j] * e^{w y_j^2}` is always
/// representable and is the weight to use for plain `dx` integrals.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub scaled_weights: Vec<f64>,
    pub weight_exponent: WeightExponent,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫ f(y) e^{-w y^2} dy` by the rule.
    pub fn integrate_weighted(&self, f: impl Fn(f64) -> f64) -> f64 {
        symmetric_sum(&self.weights, |j| f(self.nodes[j]))
    }

    /// `∫ f(y) dy`, treating `f` as `(f e^{w y^2}) · e^{-w y^2}`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        symmetric_sum(&self.scaled_weights, |j| f(self.nodes[j]))
    }
}

/// Weighted sum over a symmetric rule, pairing node `j` with its mirror so
/// that odd integrands cancel exactly.
pub(crate) fn symmetric_sum(weights: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    let q = weights.len();
    let mut acc = 0.0;
    for j in 0..q / 2 {
        acc += weights[j] * (f(j) + f(q - 1 - j));
    }
    if q % 2 == 1 {
        acc += weights[q / 2] * f(q / 2);
    }
    acc
}

/// Q-node Gauss–Hermite rule for `e^{-w y^2}`, exact for polynomials of degree `≤ 2Q-1`.
pub fn gauss_hermite_rule(q: usize, weight_exponent: WeightExponent) -> Result<QuadratureRule> {
    if q == 0 {
        return Err(invalid("Q", "a rule needs at least one node"));
    }
    if q > super::functions::DEFAULT_DEGREE_CAP + 1 {
        return Err(crate::Error::DegreeCap {
            requested: q,
            cap: super::functions::DEFAULT_DEGREE_CAP + 1,
        });
    }

    // Jacobi matrix of the physicists' Hermite weight: zero diagonal,
    // off-diagonal sqrt(k/2).
    let mut diag = vec![0.0; q];
    let mut off: Vec<f64> = (1..q).map(|k| (k as f64 / 2.0).sqrt()).collect();
    off.push(0.0);
    tridiagonal_eigenvalues(&mut diag, &mut off);
    diag.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut nodes: Vec<f64> = diag.into_iter().map(|y| newton_polish(q, y)).collect();
    symmetrize_nodes(&mut nodes);

    let scaled: Vec<f64> = nodes
        .iter()
        .map(|&y| {
            let (prev, _, log_scale) = hermite_pair_scaled(q, y);
            // 1 / (Q h_{Q-1}^2), with h = prev * e^{log_scale}
            (-2.0 * (prev.abs().ln() + log_scale)).exp() / q as f64
        })
        .collect();
    let mut scaled = scaled;
    symmetrize_weights(&mut scaled);

    let (nodes, scaled) = match weight_exponent {
        WeightExponent::One => (nodes, scaled),
        WeightExponent::Two => {
            let r = std::f64::consts::FRAC_1_SQRT_2;
            (
                nodes.into_iter().map(|y| y * r).collect(),
                scaled.into_iter().map(|w| w * r).collect(),
            )
        }
    };
    let w = weight_exponent.value();
    let weights = nodes
        .iter()
        .zip(&scaled)
        .map(|(&y, &s)| s * (-w * y * y).exp())
        .collect();

    Ok(QuadratureRule { nodes, weights, scaled_weights: scaled, weight_exponent })
}

fn newton_polish(q: usize, mut y: f64) -> f64 {
    let qf = q as f64;
    for _ in 0..12 {
        // h_q / h_q' with h_q' = sqrt(2q) h_{q-1} - y h_q; the common scale cancels.
        let (prev, cur, _) = hermite_pair_scaled(q, y);
        let deriv = (2.0 * qf).sqrt() * prev - y * cur;
        if deriv == 0.0 {
            break;
        }
        let step = cur / deriv;
        y -= step;
        if step.abs() <= 1e-15 * y.abs().max(1.0) {
            break;
        }
    }
    y
}

fn symmetrize_nodes(nodes: &mut [f64]) {
    let q = nodes.len();
    for j in 0..q / 2 {
        let m = 0.5 * (nodes[q - 1 - j] - nodes[j]);
        nodes[j] = -m;
        nodes[q - 1 - j] = m;
    }
    if q % 2 == 1 {
        nodes[q / 2] = 0.0;
    }
}

fn symmetrize_weights(w: &mut [f64]) {
    let q = w.len();
    for j in 0..q / 2 {
        let m = 0.5 * (w[j] + w[q - 1 - j]);
        w[j] = m;
        w[q - 1 - j] = m;
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix by the implicit QL method.
/// `diag` is overwritten with the eigenvalues; `off[i]` couples `i` and `i+1`.
fn tridiagonal_eigenvalues(diag: &mut [f64], off: &mut [f64]) {
    let n = diag.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
}

/// n-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(invalid("n", "a rule needs at least one node"));
    }
    let nf = n as f64;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Ok((
        nodes.into_iter().map(|x| mid + half * x).collect(),
        weights.into_iter().map(|w| w * half).collect(),
    ))
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    (p1, nf * (x * p1 - p0) / (x * x - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_moment(k: u32, w: f64) -> f64 {
        // ∫ y^{2k} e^{-w y^2} dy = Γ(k+1/2) / w^{k+1/2}
        let mut g = PI.sqrt();
        for j in 0..k {
            g *= j as f64 + 0.5;
        }
        g / w.powf(k as f64 + 0.5)
    }

    #[test]
    fn one_node_rule() {
        let r = gauss_hermite_rule(1, WeightExponent::One).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert!((r.weights[0] - PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn second_moment_two_nodes() {
        let r = gauss_hermite_rule(2, WeightExponent::One).unwrap();
        let v = r.integrate_weighted(|y| y * y);
        assert!((v - PI.sqrt() / 2.0).abs() < 1e-14, "{v}");
    }

    #[test]
    fn fourth_moment_w2() {
        let r = gauss_hermite_rule(3, WeightExponent::Two).unwrap();
        let v = r.integrate_weighted(|y| y.powi(4));
        let exact = 3.0 * (PI / 2.0).sqrt() / 16.0;
        assert!((v - exact).abs() < 1e-13, "{v} vs {exact}");
        assert!((gaussian_moment(2, 2.0) - exact).abs() < 1e-15);
    }

    #[test]
    fn exactness_up_to_2q_minus_1() {
        for q in [5usize, 12, 40] {
            for w in [WeightExponent::One, WeightExponent::Two] {
                let r = gauss_hermite_rule(q, w).unwrap();
                for k in 0..q as u32 {
                    let v = r.integrate_weighted(|y| y.powi(2 * k as i32));
                    let exact = gaussian_moment(k, w.value());
                    assert!(((v - exact) / exact).abs() < 1e-12, "q={q} k={k}: {v} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn nodes_sorted_symmetric_and_weights_positive() {
        let r = gauss_hermite_rule(31, WeightExponent::One).unwrap();
        assert!(r.nodes.windows(2).all(|p| p[0] < p[1]));
        assert!(r.weights.iter().all(|&w| w > 0.0));
        for j in 0..31 {
            assert_eq!(r.nodes[j], -r.nodes[30 - j]);
        }
    }

    #[test]
    fn w2_rule_is_scaled_w1_rule() {
        let a = gauss_hermite_rule(9, WeightExponent::One).unwrap();
        let b = gauss_hermite_rule(9, WeightExponent::Two).unwrap();
        for j in 0..9 {
            assert!((b.nodes[j] - a.nodes[j] / 2f64.sqrt()).abs() < 1e-15);
            assert!((b.weights[j] - a.weights[j] / 2f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn large_rule_scaled_weights_are_finite() {
        let r = gauss_hermite_rule(600, WeightExponent::One).unwrap();
        assert!(r.scaled_weights.iter().all(|w| w.is_finite() && *w > 0.0));
        // ∫ e^{-y^2} dy via scaled weights
        let v = r.integrate(|y| (-y * y).exp());
        assert!((v - PI.sqrt()).abs() < 1e-12, "{v}");
    }

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7, -2.0, 3.0).unwrap();
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(13)).sum();
        let exact = (3f64.powi(14) - 2f64.powi(14)) / 14.0;
        assert!(((v - exact) / exact).abs() < 1e-13);
    }
}

use ndarray::{s, Array2, ArrayD, IxDyn};
use num_complex::Complex64;

use super::field::{check_dimension, SpectralField, SpectralShape};
use super::functions::{hermite_values_1d, DEFAULT_DEGREE_CAP};
use super::quadrature::{gauss_hermite_rule, QuadratureRule, WeightExponent};
use super::tensor::{contract_all, integrate_real};
use crate::error::{Error, Result};

/// Extra degrees tabulated beyond `K` so that ladder words of up to this
/// length can be evaluated on the grids.
pub const HEADROOM: usize = 8;

/// Which collocation grid a grid tensor lives on.
///
/// A product of `n` Hermite functions of degree `≤ K` is a polynomial of
/// degree `≤ nK` times `e^{-n x²/2}`. `Transform` is the `w = 1` rule with
/// `K + 1` nodes (exact for pair products, so synthesis and analysis are exact
/// inverses on the truncated space). `Product` is the `w = 2` rule with
/// `2K + 2` nodes, exact for four-fold products with an extra quadratic
/// factor; it carries the cubic nonlinearity and the quadrilinear integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridKind {
    Transform,
    Product,
}

/// One-dimensional rule plus the Hermite tables evaluated on its nodes.
#[derive(Debug, Clone)]
pub struct Grid {
    pub kind: GridKind,
    pub rule: QuadratureRule,
    /// `h_k(x_j)` for `0 ≤ k ≤ K + HEADROOM`.
    pub values: Array2<f64>,
    synth: Array2<f64>,
    analysis: Array2<f64>,
}

impl Grid {
    fn new(kind: GridKind, k: usize) -> Result<Self> {
        let (q, w) = match kind {
            GridKind::Transform => (k + 1, WeightExponent::One),
            GridKind::Product => (2 * k + 2, WeightExponent::Two),
        };
        let rule = gauss_hermite_rule(q, w)?;
        let values = hermite_values_1d(k + HEADROOM, &rule.nodes)?;
        let synth = values.slice(s![..=k, ..]).t().to_owned();
        let mut analysis = values.slice(s![..=k, ..]).to_owned();
        for (mut col, &om) in analysis.columns_mut().into_iter().zip(&rule.scaled_weights) {
            col *= om;
        }
        Ok(Grid { kind, rule, values, synth, analysis })
    }

    pub fn len(&self) -> usize {
        self.rule.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rule.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.rule.nodes
    }

    /// Weights for plain `dx` integrals on this grid.
    pub fn dx_weights(&self) -> &[f64] {
        &self.rule.scaled_weights
    }

    fn synth_matrix(&self, k_axis: usize) -> Array2<f64> {
        if k_axis + 1 == self.synth.ncols() {
            self.synth.clone()
        } else {
            self.values.slice(s![..=k_axis, ..]).t().to_owned()
        }
    }
}

/// Tensor-product Hermite basis of dimension `d` truncated at degree `K` per axis.
#[derive(Debug, Clone)]
pub struct HermiteBasis {
    d: usize,
    k: usize,
    transform: Grid,
    product: Grid,
}

impl HermiteBasis {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        check_dimension(d)?;
        if k < 1 {
            return Err(Error::InvalidTruncation(k));
        }
        if k + HEADROOM > DEFAULT_DEGREE_CAP {
            return Err(Error::DegreeCap { requested: k + HEADROOM, cap: DEFAULT_DEGREE_CAP });
        }
        Ok(HermiteBasis {
            d,
            k,
            transform: Grid::new(GridKind::Transform, k)?,
            product: Grid::new(GridKind::Product, k)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn truncation(&self) -> usize {
        self.k
    }

    /// Largest tabulated degree, `K + HEADROOM`.
    pub fn k_eval(&self) -> usize {
        self.k + HEADROOM
    }

    pub fn shape(&self) -> SpectralShape {
        SpectralShape::uniform(self.d, self.k).expect("validated at construction")
    }

    pub fn grid(&self, kind: GridKind) -> &Grid {
        match kind {
            GridKind::Transform => &self.transform,
            GridKind::Product => &self.product,
        }
    }

    /// Shape of a grid tensor, `[Q; d]`.
    pub fn grid_shape(&self, kind: GridKind) -> Vec<usize> {
        vec![self.grid(kind).len(); self.d]
    }

    /// Values of `u` on the transform grid.
    pub fn synthesize(&self, u: &SpectralField) -> Result<ArrayD<Complex64>> {
        self.synthesize_on(u, GridKind::Transform)
    }

    /// Point values `Σ c_m Π h_{m_j}(x_j)` on the chosen grid, contracted one
    /// axis at a time. Fields may carry up to `K + HEADROOM` degrees per axis.
    pub fn synthesize_on(&self, u: &SpectralField, kind: GridKind) -> Result<ArrayD<Complex64>> {
        if u.dim() != self.d {
            return Err(Error::ShapeMismatch { expected: vec![self.d], found: vec![u.dim()] });
        }
        if let Some(&k) = u.shape().max_degree().iter().find(|&&k| k > self.k_eval()) {
            return Err(Error::DegreeCap { requested: k, cap: self.k_eval() });
        }
        let grid = self.grid(kind);
        let mats: Vec<Array2<f64>> =
            u.shape().max_degree().iter().map(|&k| grid.synth_matrix(k)).collect();
        let refs: Vec<&Array2<f64>> = mats.iter().collect();
        Ok(contract_all(u.coeffs(), &refs))
    }

    /// Coefficients from transform-grid values.
    pub fn analyze(&self, values: &ArrayD<Complex64>) -> Result<SpectralField> {
        self.analyze_on(values, GridKind::Transform)
    }

    /// Quadrature approximation of `c_m = ⟨u, h_m⟩`, `m_j ≤ K`.
    ///
    /// Exact whenever `u · h_m` is a product of Hermite functions the grid
    /// integrates exactly: band-limited `u` on the transform grid, cubic
    /// expressions in band-limited fields on the product grid. Content of `u`
    /// above what the rule resolves aliases into the result; keeping it small
    /// is the caller's job.
    pub fn analyze_on(&self, values: &ArrayD<Complex64>, kind: GridKind) -> Result<SpectralField> {
        let expected = self.grid_shape(kind);
        if values.shape() != expected.as_slice() {
            return Err(Error::ShapeMismatch { expected, found: values.shape().to_vec() });
        }
        let a = &self.grid(kind).analysis;
        let refs = vec![a; self.d];
        Ok(SpectralField::with_coeffs(self.shape(), contract_all(values, &refs)))
    }

    /// `∫ f dx` of a real grid tensor.
    pub fn integrate(&self, values: &ArrayD<f64>, kind: GridKind) -> Result<f64> {
        let expected = self.grid_shape(kind);
        if values.shape() != expected.as_slice() {
            return Err(Error::ShapeMismatch { expected, found: values.shape().to_vec() });
        }
        let w = self.grid(kind).dx_weights();
        let refs = vec![w; self.d];
        Ok(integrate_real(values, &refs))
    }

    /// Coordinate `x_axis` at every point of a grid tensor.
    pub fn coordinate(&self, kind: GridKind, axis: usize) -> ArrayD<f64> {
        let nodes = self.grid(kind).nodes();
        ArrayD::from_shape_fn(IxDyn(&self.grid_shape(kind)), |ix| nodes[ix[axis]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::MultiIndex;

    #[test]
    fn rejects_bad_construction() {
        assert_eq!(HermiteBasis::new(4, 8).unwrap_err(), Error::InvalidDimension(4));
        assert_eq!(HermiteBasis::new(2, 0).unwrap_err(), Error::InvalidTruncation(0));
    }

    #[test]
    fn single_mode_synthesizes_to_ground_state() {
        let b = HermiteBasis::new(2, 4).unwrap();
        let u = SpectralField::mode(&b.shape(), &MultiIndex::new(vec![0, 0]).unwrap(), 1.0.into())
            .unwrap();
        let v = b.synthesize(&u).unwrap();
        let g = b.grid(GridKind::Transform);
        for i in 0..g.len() {
            for j in 0..g.len() {
                let e = g.values[[0, i]] * g.values[[0, j]];
                assert!((v[[i, j]].re - e).abs() < 1e-15 && v[[i, j]].im == 0.0);
            }
        }
        let z = b.synthesize(&SpectralField::zeros(&b.shape())).unwrap();
        assert!(z.iter().all(|c| *c == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn analyze_recovers_h2_and_x_h0() {
        let b = HermiteBasis::new(1, 6).unwrap();
        let g = b.grid(GridKind::Transform);
        let vals = ArrayD::from_shape_fn(IxDyn(&[g.len()]), |ix| Complex64::from(g.values[[2, ix[0]]]));
        let c = b.analyze(&vals).unwrap();
        for k in 0..=6 {
            let e = if k == 2 { 1.0 } else { 0.0 };
            assert!((c.coeff(&[k]).re - e).abs() < 1e-12);
        }
        let vals = ArrayD::from_shape_fn(IxDyn(&[g.len()]), |ix| {
            Complex64::from(g.nodes()[ix[0]] * g.values[[0, ix[0]]])
        });
        let c = b.analyze(&vals).unwrap();
        assert!((c.coeff(&[1]).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        assert!(c.coeff(&[0]).norm() < 1e-14 && c.coeff(&[2]).norm() < 1e-14);
    }

    #[test]
    fn analyze_rejects_wrong_grid_shape() {
        let b = HermiteBasis::new(2, 3).unwrap();
        let bad = ArrayD::zeros(IxDyn(&[3, 4]));
        assert!(matches!(b.analyze(&bad), Err(Error::ShapeMismatch { .. })));
    }
}

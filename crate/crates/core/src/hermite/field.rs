use ndarray::{ArrayD, Dimension, IxDyn};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Degrees `(m_1, …, m_d)` of a tensor-product Hermite function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(degrees: Vec<usize>) -> Result<Self> {
        check_dimension(degrees.len())?;
        Ok(MultiIndex(degrees))
    }

    pub fn degrees(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|m| = Σ m_j`.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

/// Eigenvalue `2|m| + d` of `H = −Δ + |x|²` on `h_m`.
pub fn eigenvalue(m: &MultiIndex, d: usize) -> Result<u64> {
    if m.dim() != d {
        return Err(Error::ShapeMismatch { expected: vec![d], found: vec![m.dim()] });
    }
    Ok(2 * m.total() as u64 + d as u64)
}

pub(crate) fn check_dimension(d: usize) -> Result<()> {
    if (1..=3).contains(&d) {
        Ok(())
    } else {
        Err(Error::InvalidDimension(d))
    }
}

/// Truncation of a coefficient tensor: the largest degree kept on each axis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpectralShape {
    max_degree: Vec<usize>,
}

impl SpectralShape {
    pub fn new(max_degree: Vec<usize>) -> Result<Self> {
        check_dimension(max_degree.len())?;
        Ok(SpectralShape { max_degree })
    }

    /// Same truncation `K` on every axis.
    pub fn uniform(d: usize, k: usize) -> Result<Self> {
        Self::new(vec![k; d])
    }

    pub fn dim(&self) -> usize {
        self.max_degree.len()
    }

    pub fn max_degree(&self) -> &[usize] {
        &self.max_degree
    }

    /// Tensor extents, `K_j + 1` per axis.
    pub fn extents(&self) -> Vec<usize> {
        self.max_degree.iter().map(|k| k + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.extents().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest eigenvalue `2|m|+d` present in the truncation.
    pub fn max_eigenvalue(&self) -> u64 {
        2 * self.max_degree.iter().sum::<usize>() as u64 + self.dim() as u64
    }

    /// `2|m|+d` at every coefficient position.
    pub fn eigenvalues(&self) -> ArrayD<f64> {
        let d = self.dim() as f64;
        ArrayD::from_shape_fn(IxDyn(&self.extents()), |ix| {
            2.0 * ix.as_array_view().iter().sum::<usize>() as f64 + d
        })
    }
}

/// Function represented by its Hermite coefficients `c_m`, `u = Σ c_m h_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    shape: SpectralShape,
    coeffs: ArrayD<Complex64>,
}

impl SpectralField {
    pub fn zeros(shape: &SpectralShape) -> Self {
        SpectralField { coeffs: ArrayD::zeros(IxDyn(&shape.extents())), shape: shape.clone() }
    }

    pub fn from_coeffs(shape: &SpectralShape, coeffs: ArrayD<Complex64>) -> Result<Self> {
        let extents = shape.extents();
        if coeffs.shape() != extents.as_slice() {
            return Err(Error::ShapeMismatch { expected: extents, found: coeffs.shape().to_vec() });
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(invalid("coeffs", "non-finite coefficient"));
        }
        Ok(SpectralField { shape: shape.clone(), coeffs: coeffs.as_standard_layout().to_owned() })
    }

    /// Single Hermite mode `value · h_m`.
    pub fn mode(shape: &SpectralShape, m: &MultiIndex, value: Complex64) -> Result<Self> {
        if m.dim() != shape.dim() {
            return Err(Error::ShapeMismatch { expected: vec![shape.dim()], found: vec![m.dim()] });
        }
        if m.degrees().iter().zip(shape.max_degree()).any(|(a, k)| a > k) {
            return Err(Error::DegreeOverflow(format!("{:?} outside {:?}", m.degrees(), shape.max_degree())));
        }
        let mut f = Self::zeros(shape);
        f.coeffs[IxDyn(m.degrees())] = value;
        Ok(f)
    }

    pub fn shape(&self) -> &SpectralShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn coeffs(&self) -> &ArrayD<Complex64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut ArrayD<Complex64> {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> ArrayD<Complex64> {
        self.coeffs
    }

    pub fn coeff(&self, m: &[usize]) -> Complex64 {
        self.coeffs[IxDyn(m)]
    }

    /// `Σ |c_m|²`, equal to `‖u‖²_{L²}` by orthonormality.
    pub fn mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm_l2(&self) -> f64 {
        self.mass().sqrt()
    }

    /// `⟨self, other⟩ = Σ conj(a_m) b_m`.
    pub fn inner(&self, other: &SpectralField) -> Complex64 {
        self.coeffs.iter().zip(other.coeffs.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn scaled(&self, factor: Complex64) -> SpectralField {
        SpectralField { shape: self.shape.clone(), coeffs: self.coeffs.mapv(|c| c * factor) }
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        self.check_same_shape(other)?;
        Ok(SpectralField { shape: self.shape.clone(), coeffs: &self.coeffs + &other.coeffs })
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        self.check_same_shape(other)?;
        Ok(SpectralField { shape: self.shape.clone(), coeffs: &self.coeffs - &other.coeffs })
    }

    /// Largest coefficient modulus difference.
    pub fn max_abs_diff(&self, other: &SpectralField) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self.coeffs.iter().zip(other.coeffs.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Multiply `c_m` by `f(2|m|+d)`.
    pub fn map_eigenvalue(&self, f: impl Fn(f64) -> Complex64) -> SpectralField {
        let d = self.dim() as f64;
        let mut coeffs = self.coeffs.clone();
        for (ix, c) in coeffs.indexed_iter_mut() {
            let lam_sq = 2.0 * ix.as_array_view().iter().sum::<usize>() as f64 + d;
            *c *= f(lam_sq);
        }
        SpectralField { shape: self.shape.clone(), coeffs }
    }

    /// Copy into another truncation of the same dimension; returns the field
    /// and the ℓ² norm of the coefficients that did not fit.
    pub fn resized(&self, shape: &SpectralShape) -> Result<(SpectralField, f64)> {
        if shape.dim() != self.dim() {
            return Err(Error::ShapeMismatch { expected: vec![shape.dim()], found: vec![self.dim()] });
        }
        let mut out = SpectralField::zeros(shape);
        let mut dropped = 0.0;
        for (ix, c) in self.coeffs.indexed_iter() {
            let ix = ix.as_array_view();
            if ix.iter().zip(shape.max_degree()).all(|(a, k)| a <= k) {
                out.coeffs[IxDyn(ix.as_slice().unwrap())] = *c;
            } else {
                dropped += c.norm_sqr();
            }
        }
        Ok((out, dropped.sqrt()))
    }

    /// True when every coefficient is real (imaginary part exactly zero).
    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    pub(crate) fn check_same_shape(&self, other: &SpectralField) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch {
                expected: self.shape.extents(),
                found: other.shape.extents(),
            });
        }
        Ok(())
    }

    pub(crate) fn with_coeffs(shape: SpectralShape, coeffs: ArrayD<Complex64>) -> SpectralField {
        SpectralField { shape, coeffs }
    }
}

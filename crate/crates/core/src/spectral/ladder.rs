use ndarray::{ArrayD, Axis, IxDyn, Zip};
use num_complex::Complex64;

use super::word::{Letter, LetterKind, PWord};
use crate::error::Result;
use crate::hermite::{SpectralField, SpectralShape};

/// Result of applying an operator word inside a fixed truncation.
#[derive(Debug, Clone)]
pub struct PApplied {
    pub field: SpectralField,
    /// ℓ² norm of the components pushed above the truncation and dropped.
    pub spillage: f64,
}

/// `H u`, i.e. `c_m ↦ (2|m|+d) c_m`.
pub fn apply_h(u: &SpectralField) -> SpectralField {
    u.map_eigenvalue(|lam_sq| lam_sq.into())
}

/// One letter on a coefficient tensor. The acted-on axis grows by one so
/// nothing is lost:
///
/// ```text
/// x h_k = √(k/2) h_{k−1} + √((k+1)/2) h_{k+1}
/// ∂ h_k = √(k/2) h_{k−1} − √((k+1)/2) h_{k+1}
/// ```
fn apply_letter(c: &ArrayD<Complex64>, letter: Letter) -> ArrayD<Complex64> {
    let axis = Axis(letter.axis);
    let n = c.len_of(axis);
    let mut ext = c.shape().to_vec();
    ext[letter.axis] += 1;
    let mut out = ArrayD::<Complex64>::zeros(IxDyn(&ext));
    let sign = match letter.kind {
        LetterKind::Grad => -1.0,
        LetterKind::X => 1.0,
    };
    let r: Vec<f64> = (0..=n).map(|k| (k as f64 / 2.0).sqrt()).collect();
    Zip::from(out.lanes_mut(axis)).and(c.lanes(axis)).for_each(|mut o, i| {
        for j in 0..=n {
            let mut acc = Complex64::new(0.0, 0.0);
            if j + 1 < n {
                acc += i[j + 1] * r[j + 1];
            }
            if j >= 1 {
                acc += i[j - 1] * (sign * r[j]);
            }
            o[j] = acc;
        }
    });
    out
}

/// `P(word) u` with every generated component kept; the result's truncation
/// grows by the word's reach on each axis.
pub fn apply_p_extended(word: &PWord, u: &SpectralField) -> Result<SpectralField> {
    word.check_axes(u.dim())?;
    let mut c = u.coeffs().clone();
    for &letter in word.letters().iter().rev() {
        c = apply_letter(&c, letter);
    }
    let max_degree = c.shape().iter().map(|e| e - 1).collect();
    Ok(SpectralField::with_coeffs(SpectralShape::new(max_degree)?, c))
}

/// `P(word) u` truncated back to the shape of `u`.
pub fn apply_p(word: &PWord, u: &SpectralField) -> Result<PApplied> {
    let ext = apply_p_extended(word, u)?;
    let (field, spillage) = ext.resized(u.shape())?;
    Ok(PApplied { field, spillage })
}

/// `[H, P(word)] u` evaluated two independent ways.
#[derive(Debug, Clone)]
pub struct Commutator {
    /// `H P u − P H u` from direct composition.
    pub direct: SpectralField,
    /// Leibniz expansion `Σ_i A_1⋯[H, A_i]⋯A_k u` using `[H, ∂_j] = −2x_j`
    /// and `[H, x_j] = −2∂_j`.
    pub expansion: SpectralField,
    /// Largest coefficient difference between the two.
    pub discrepancy: f64,
    /// Components dropped when returning to the shape of `u`.
    pub spillage: f64,
}

pub fn commutator_h_p(word: &PWord, u: &SpectralField) -> Result<Commutator> {
    let hpu = apply_h(&apply_p_extended(word, u)?);
    let phu = apply_p_extended(word, &apply_h(u))?;
    let direct_ext = hpu.sub(&phu)?;

    let mut expansion_ext = SpectralField::zeros(direct_ext.shape());
    for i in 0..word.order() {
        let mut letters = word.letters().to_vec();
        let l = letters[i];
        letters[i] = match l.kind {
            LetterKind::Grad => Letter::x(l.axis),
            LetterKind::X => Letter::grad(l.axis),
        };
        let term = apply_p_extended(&PWord::new(letters)?, u)?;
        expansion_ext = expansion_ext.add(&term.scaled((-2.0).into()))?;
    }

    let discrepancy = direct_ext.max_abs_diff(&expansion_ext)?;
    let (direct, spillage) = direct_ext.resized(u.shape())?;
    let (expansion, _) = expansion_ext.resized(u.shape())?;
    Ok(Commutator { direct, expansion, discrepancy, spillage })
}

/// Projection onto one eigenspace of `H`.
#[derive(Debug, Clone)]
pub struct Projection {
    pub field: SpectralField,
    /// Set when `mu_sq` is not an eigenvalue (`< d` or wrong parity); the
    /// field is then zero.
    pub invalid: bool,
}

/// `π_μ u`: keeps the coefficients with `2|m|+d = mu_sq`.
pub fn project_pi_mu(u: &SpectralField, mu_sq: u64) -> Projection {
    let d = u.dim() as u64;
    let invalid = mu_sq < d || (mu_sq - d) % 2 != 0;
    let target = mu_sq as f64;
    let field = u.map_eigenvalue(|l| if !invalid && l == target { 1.0.into() } else { 0.0.into() });
    Projection { field, invalid }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::hermite::MultiIndex;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn mode(d: usize, k: usize, m: &[usize]) -> SpectralField {
        let shape = SpectralShape::uniform(d, k).unwrap();
        SpectralField::mode(&shape, &MultiIndex::new(m.to_vec()).unwrap(), 1.0.into()).unwrap()
    }

    #[test]
    fn h_scales_single_mode() {
        let u = mode(2, 3, &[1, 0]);
        assert_eq!(apply_h(&u).coeff(&[1, 0]), Complex64::new(4.0, 0.0));
    }

    #[test]
    fn x_on_ground_state() {
        let out = apply_p(&"X1".parse().unwrap(), &mode(1, 4, &[0])).unwrap();
        assert_eq!(out.field.coeff(&[1]).re, FRAC_1_SQRT_2);
        assert_eq!(out.spillage, 0.0);
        assert!((out.field.mass() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn grad_sign_and_spillage() {
        let out = apply_p(&"D1".parse().unwrap(), &mode(1, 2, &[2])).unwrap();
        assert_eq!(out.field.coeff(&[1]).re, 1.0);
        assert!((out.spillage - 1.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn empty_word_is_identity() {
        let u = mode(3, 2, &[1, 2, 0]).scaled(Complex64::new(0.3, -2.0));
        let out = apply_p(&PWord::identity(), &u).unwrap();
        assert_eq!(out.field, u);
    }

    #[test]
    fn axis_out_of_range() {
        let err = apply_p(&"X3".parse().unwrap(), &mode(2, 2, &[0, 0])).unwrap_err();
        assert_eq!(err, Error::AxisOutOfRange { axis: 2, d: 2 });
    }

    #[test]
    fn projector_parity() {
        let u = mode(2, 2, &[1, 0]);
        assert!(project_pi_mu(&u, 5).invalid);
        assert!(project_pi_mu(&u, 0).invalid);
        let p = project_pi_mu(&u, 4);
        assert!(!p.invalid);
        assert_eq!(p.field, u);
    }
}

use ndarray::{ArrayD, Zip};
use rand::Rng;
use rayon::prelude::*;

use super::fit::ScalingFit;
use crate::error::{invalid, Error, Result};
use crate::hermite::{GridKind, HermiteBasis, MultiIndex, SpectralField, SpectralShape};
use crate::random::trial_rng;
use crate::spectral::{apply_p_extended, project_pi_mu, Letter, PWord};

/// Four real eigenfunctions `e_i` of `H` with eigenvalues `μ_i²`.
#[derive(Debug, Clone)]
pub struct QuadTuple {
    fields: [SpectralField; 4],
    mu_sq: [u64; 4],
}

impl QuadTuple {
    /// Checks that each field is real, shares one dimension, and lies in
    /// the eigenspace it is paired with.
    pub fn new(fields: [SpectralField; 4], mu_sq: [u64; 4]) -> Result<Self> {
        let d = fields[0].dim();
        for (i, (e, &mu)) in fields.iter().zip(&mu_sq).enumerate() {
            if e.dim() != d {
                return Err(Error::ShapeMismatch { expected: vec![d], found: vec![e.dim()] });
            }
            if !e.is_real() {
                return Err(Error::Precondition(format!("e{} has complex coefficients", i + 1)));
            }
            let p = project_pi_mu(e, mu);
            if p.invalid || &p.field != e {
                return Err(Error::Precondition(format!("e{} is not in the eigenspace {mu}", i + 1)));
            }
        }
        Ok(QuadTuple { fields, mu_sq })
    }

    /// Tuple of single Hermite modes, each in the smallest shape holding all
    /// four.
    pub fn from_modes(modes: [&MultiIndex; 4]) -> Result<Self> {
        let d = modes[0].dim();
        let mut k = vec![0; d];
        for m in &modes {
            if m.dim() != d {
                return Err(Error::ShapeMismatch { expected: vec![d], found: vec![m.dim()] });
            }
            for (a, &b) in k.iter_mut().zip(m.degrees()) {
                *a = (*a).max(b);
            }
        }
        let shape = SpectralShape::new(k)?;
        let mut fields = Vec::with_capacity(4);
        let mut mu_sq = [0; 4];
        for (i, m) in modes.iter().enumerate() {
            fields.push(SpectralField::mode(&shape, m, 1.0.into())?);
            mu_sq[i] = crate::hermite::eigenvalue(m, d)?;
        }
        let fields: [SpectralField; 4] = fields.try_into().expect("four fields");
        Self::new(fields, mu_sq)
    }

    pub fn fields(&self) -> &[SpectralField; 4] {
        &self.fields
    }

    pub fn mu_sq(&self) -> [u64; 4] {
        self.mu_sq
    }

    pub fn dim(&self) -> usize {
        self.fields[0].dim()
    }

    /// `μ₁² − μ₂² − μ₃² − μ₄²`.
    pub fn denominator(&self) -> i64 {
        let [a, b, c, d] = self.mu_sq.map(|m| m as i64);
        a - b - c - d
    }
}

/// A real field and its gradient sampled on the product grid.
struct Sampled {
    val: ArrayD<f64>,
    grad: Vec<ArrayD<f64>>,
}

fn check_fits(basis: &HermiteBasis, e: &SpectralField) -> Result<()> {
    if e.dim() != basis.dim() {
        return Err(Error::ShapeMismatch { expected: vec![basis.dim()], found: vec![e.dim()] });
    }
    if let Some(k) = e.shape().max_degree().iter().find(|&&k| k > basis.truncation()) {
        return Err(Error::DegreeOverflow(format!(
            "degree {k} exceeds the basis truncation {}",
            basis.truncation()
        )));
    }
    Ok(())
}

fn sample(basis: &HermiteBasis, e: &SpectralField, with_grad: bool) -> Result<Sampled> {
    check_fits(basis, e)?;
    let val = basis.synthesize_on(e, GridKind::Product)?.mapv(|z| z.re);
    let mut grad = Vec::new();
    if with_grad {
        for axis in 0..e.dim() {
            let g = apply_p_extended(&PWord::new(vec![Letter::grad(axis)])?, e)?;
            grad.push(basis.synthesize_on(&g, GridKind::Product)?.mapv(|z| z.re));
        }
    }
    Ok(Sampled { val, grad })
}

fn product(factors: &[&ArrayD<f64>]) -> ArrayD<f64> {
    let mut out = factors[0].clone();
    for f in &factors[1..] {
        Zip::from(&mut out).and(*f).for_each(|o, &v| *o *= v);
    }
    out
}

fn l0_from(basis: &HermiteBasis, s: [&Sampled; 4]) -> Result<f64> {
    basis.integrate(&product(&[&s[0].val, &s[1].val, &s[2].val, &s[3].val]), GridKind::Product)
}

fn l1_plus_weight_from(basis: &HermiteBasis, s: [&Sampled; 4]) -> Result<f64> {
    let d = basis.dim();
    let mut integrand = ArrayD::<f64>::zeros(s[0].val.raw_dim());
    for (a, b, p, q) in [(1, 2, 0, 3), (1, 3, 0, 2), (2, 3, 0, 1)] {
        for j in 0..d {
            let t = product(&[&s[a].grad[j], &s[b].grad[j], &s[p].val, &s[q].val]);
            integrand += &t;
        }
    }
    let mut r2 = ArrayD::<f64>::zeros(s[0].val.raw_dim());
    for j in 0..d {
        let x = basis.coordinate(GridKind::Product, j);
        r2 += &x.mapv(|v| v * v);
    }
    integrand += &product(&[&r2, &s[0].val, &s[1].val, &s[2].val, &s[3].val]);
    basis.integrate(&integrand, GridKind::Product)
}

/// `L₀ = ∫ e₁e₂e₃e₄ dx` on the product grid (exact for fields inside the
/// basis truncation).
pub fn quad_l0(basis: &HermiteBasis, t: &QuadTuple) -> Result<f64> {
    let s = t.fields.iter().map(|e| sample(basis, e, false)).collect::<Result<Vec<_>>>()?;
    l0_from(basis, [&s[0], &s[1], &s[2], &s[3]])
}

/// `L₁ + L₀^{|x|²}` where
///
/// ```text
/// L₁ = ∫ ∇e₂·∇e₃ e₁e₄ + ∇e₂·∇e₄ e₁e₃ + ∇e₃·∇e₄ e₁e₂ dx
/// L₀^{|x|²} = ∫ |x|² e₁e₂e₃e₄ dx
/// ```
///
/// Gradients come from the ladder relations, so both terms are exact on the
/// product grid.
pub fn quad_l1_plus_weight(basis: &HermiteBasis, t: &QuadTuple) -> Result<f64> {
    let s = t.fields.iter().map(|e| sample(basis, e, true)).collect::<Result<Vec<_>>>()?;
    l1_plus_weight_from(basis, [&s[0], &s[1], &s[2], &s[3]])
}

/// Both sides of the first-order interaction identity
/// `L₀ = −2 (L₁ + L₀^{|x|²}) / (μ₁² − μ₂² − μ₃² − μ₄²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub l0: f64,
    pub rhs: f64,
    /// `|L₀ − rhs| / (|L₀| + IDENTITY_EPS)`.
    pub residual: f64,
}

/// Floor in the relative residual's denominator.
pub const IDENTITY_EPS: f64 = 1e-14;

fn identity_check(l0: f64, l1w: f64, denom: i64) -> IdentityCheck {
    let rhs = -2.0 / denom as f64 * l1w;
    IdentityCheck { l0, rhs, residual: (l0 - rhs).abs() / (l0.abs() + IDENTITY_EPS) }
}

/// Evaluates both sides; resonant tuples are reported as errors, never
/// divided through.
pub fn verify_identity_k1(basis: &HermiteBasis, t: &QuadTuple) -> Result<IdentityCheck> {
    let denom = t.denominator();
    if denom == 0 {
        return Err(Error::Resonant(t.mu_sq));
    }
    let s = t.fields.iter().map(|e| sample(basis, e, true)).collect::<Result<Vec<_>>>()?;
    let s = [&s[0], &s[1], &s[2], &s[3]];
    Ok(identity_check(l0_from(basis, s)?, l1_plus_weight_from(basis, s)?, denom))
}

/// Outcome of checking every quadruple of 1D modes up to a degree.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityScan {
    pub max_degree: usize,
    pub checked: usize,
    pub resonant: usize,
    pub max_residual: f64,
    /// Degrees `(m₁, m₂, m₃, m₄)` of the worst tuple.
    pub worst: [usize; 4],
    /// Per-tuple records in lexicographic order of the degrees; resonant
    /// tuples carry `None`.
    pub rows: Vec<([usize; 4], Option<IdentityCheck>)>,
}

/// Exhaustive 1D scan over `0 ≤ m_i ≤ max_degree`. In one dimension every
/// eigenspace is a single Hermite function.
pub fn exhaustive_identity_scan_1d(max_degree: usize) -> Result<IdentityScan> {
    let basis = HermiteBasis::new(1, max_degree.max(1))?;
    let shape = basis.shape();
    let sampled = (0..=max_degree)
        .map(|m| {
            let e = SpectralField::mode(&shape, &MultiIndex::new(vec![m])?, 1.0.into())?;
            sample(&basis, &e, true)
        })
        .collect::<Result<Vec<_>>>()?;
    let n = max_degree + 1;
    let per_m1 = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut rows = Vec::with_capacity(n * n * n);
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let denom = 2 * (a as i64 - b as i64 - c as i64 - d as i64) - 2;
                        let s = [&sampled[a], &sampled[b], &sampled[c], &sampled[d]];
                        let check = if denom == 0 {
                            None
                        } else {
                            Some(identity_check(l0_from(&basis, s)?, l1_plus_weight_from(&basis, s)?, denom))
                        };
                        rows.push(([a, b, c, d], check));
                    }
                }
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<_> = per_m1.into_iter().flatten().collect();
    let mut scan = IdentityScan {
        max_degree,
        checked: 0,
        resonant: 0,
        max_residual: 0.0,
        worst: [0; 4],
        rows: Vec::new(),
    };
    for (m, check) in &rows {
        match check {
            None => scan.resonant += 1,
            Some(c) => {
                scan.checked += 1;
                if c.residual > scan.max_residual {
                    scan.max_residual = c.residual;
                    scan.worst = *m;
                }
            }
        }
    }
    scan.rows = rows;
    Ok(scan)
}

/// Sweep of `max |L₀|` against the dominant eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalityScan {
    /// `(μ₁², max |L₀|)` per scanned eigenvalue.
    pub rows: Vec<(u64, f64)>,
    /// Log–log fit of `max |L₀|` against `μ₁`, over the nonzero rows.
    pub fit: Option<ScalingFit>,
    /// Set when fewer than three rows were nonzero (parity selection), so
    /// no fit was attempted.
    pub skipped: bool,
}

/// Random unit-norm real element of the eigenspace `mu_sq` within `shape`.
fn random_eigenfunction<R: rand::Rng + ?Sized>(shape: &SpectralShape, mu_sq: u64, rng: &mut R) -> Result<SpectralField> {
    use rand_distr::StandardNormal;
    let mut u = SpectralField::zeros(shape);
    for c in u.coeffs_mut().iter_mut() {
        let x: f64 = rng.sample(StandardNormal);
        *c = x.into();
    }
    let p = project_pi_mu(&u, mu_sq);
    let norm = p.field.norm_l2();
    if p.invalid || norm == 0.0 {
        return Err(invalid("mu1_sq", format!("{mu_sq} is not an eigenvalue inside the truncation")));
    }
    Ok(p.field.scaled((1.0 / norm).into()))
}

/// Identity checks on random eigenspace quadruples in dimension `d`: each
/// trial picks four eigenvalues uniformly from `d, d+2, …, max_mu_sq` and a
/// random real unit element of each eigenspace. Resonant draws are kept
/// as `None`.
pub fn random_identity_checks(
    d: usize,
    max_mu_sq: u64,
    trials: usize,
    seed: u64,
) -> Result<Vec<([u64; 4], Option<IdentityCheck>)>> {
    if max_mu_sq < d as u64 {
        return Err(invalid("K", format!("no eigenvalue of dimension {d} is at most {max_mu_sq}")));
    }
    let top = ((max_mu_sq - d as u64) / 2) as usize;
    let basis = HermiteBasis::new(d, top.max(1))?;
    let shape = SpectralShape::uniform(d, top)?;
    (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial as u64);
            let mut mu = [0u64; 4];
            for m in mu.iter_mut() {
                *m = d as u64 + 2 * rng.gen_range(0..=top as u64);
            }
            let fields = mu
                .iter()
                .map(|&m| random_eigenfunction(&shape, m, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            let t = QuadTuple::new(fields.try_into().expect("four fields"), mu)?;
            match verify_identity_k1(&basis, &t) {
                Ok(c) => Ok((mu, Some(c))),
                Err(Error::Resonant(_)) => Ok((mu, None)),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// `max |L₀(e₁, e₂, e₃, e₄)|` over random `e₁` in each eigenspace of
/// `mu1_sq_list`, with `e₂, e₃, e₄` fixed. Each `μ₁²` must satisfy
/// `μ₁² ≥ c0 (μ₂² + μ₃² + μ₄²)`. The basis truncation must hold every
/// eigenspace that is scanned.
pub fn almost_orthogonality_scan(
    basis: &HermiteBasis,
    mu1_sq_list: &[u64],
    others: [&SpectralField; 3],
    others_mu_sq: [u64; 3],
    c0: f64,
    trials: usize,
    seed: u64,
) -> Result<OrthogonalityScan> {
    if mu1_sq_list.len() < 3 {
        return Err(invalid("mu1_sq_list", "the scan window needs at least three points"));
    }
    if mu1_sq_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("mu1_sq_list", "eigenvalues must be strictly increasing"));
    }
    if trials == 0 {
        return Err(invalid("trials", "at least one trial is required"));
    }
    let rest: u64 = others_mu_sq.iter().sum();
    if let Some(&bad) = mu1_sq_list.iter().find(|&&m| (m as f64) < c0 * rest as f64) {
        return Err(Error::Precondition(format!(
            "mu1^2 = {bad} is below {c0} * (mu2^2 + mu3^2 + mu4^2) = {}",
            c0 * rest as f64
        )));
    }
    let fixed = others
        .iter()
        .zip(&others_mu_sq)
        .map(|(e, &mu)| {
            let p = project_pi_mu(e, mu);
            if p.invalid || &p.field != *e || !e.is_real() {
                return Err(Error::Precondition(format!("fixed factor is not a real element of eigenspace {mu}")));
            }
            sample(basis, e, false)
        })
        .collect::<Result<Vec<_>>>()?;
    let shape = basis.shape();
    let rows = mu1_sq_list
        .par_iter()
        .map(|&mu1| {
            let mut best: f64 = 0.0;
            for trial in 0..trials {
                let e1 = random_eigenfunction(&shape, mu1, &mut trial_rng(seed, trial as u64))?;
                let s1 = sample(basis, &e1, false)?;
                let l0 = l0_from(basis, [&s1, &fixed[0], &fixed[1], &fixed[2]])?;
                best = best.max(l0.abs());
            }
            Ok((mu1, best))
        })
        .collect::<Result<Vec<_>>>()?;
    let nonzero: Vec<&(u64, f64)> = rows.iter().filter(|r| r.1 > 0.0).collect();
    let (fit, skipped) = if nonzero.len() >= 3 {
        let xs: Vec<f64> = nonzero.iter().map(|r| (r.0 as f64).sqrt()).collect();
        let ys: Vec<f64> = nonzero.iter().map(|r| r.1).collect();
        (Some(ScalingFit::fit(&xs, &ys)?), false)
    } else {
        (None, true)
    };
    Ok(OrthogonalityScan { rows, fit, skipped })
}

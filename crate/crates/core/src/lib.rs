//! Hermite-spectral laboratory for the defocusing cubic Schrödinger equation
//! with harmonic potential,
//!
//! ```text
//! i ∂ₜu = H u + |u|² u,     H = −Δ + |x|²,
//! ```
//!
//! in dimension `d ∈ {1, 2, 3}`. Functions are stored as Hermite coefficient
//! tensors ([`SpectralField`]); `H` and every operator built from it act
//! diagonally on the eigenvalues `λ² = 2|m| + d`.

pub mod error;
pub mod hermite;
pub mod lab;
pub mod nls;
pub mod random;
pub mod spectral;

pub use error::{Error, Result};
pub use hermite::{GridKind, HermiteBasis, MultiIndex, SpectralField, SpectralShape};
pub use spectral::{IOperatorSpec, LpProfile, PWord};

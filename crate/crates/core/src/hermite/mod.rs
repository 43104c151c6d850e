//! Hermite functions, Gauss rules, and transforms between coefficients and
//! collocation values.

mod basis;
mod field;
mod functions;
mod quadrature;
pub mod tensor;

pub use basis::{Grid, GridKind, HermiteBasis, HEADROOM};
pub use field::{eigenvalue, MultiIndex, SpectralField, SpectralShape};
pub use functions::{
    hermite_function, hermite_values_1d, hermite_values_1d_capped, DEFAULT_DEGREE_CAP,
};
pub use quadrature::{gauss_hermite_rule, gauss_legendre, QuadratureRule, WeightExponent};

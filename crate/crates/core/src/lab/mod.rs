//! Numerical checks of the interaction identities and of the scaling laws
//! for bilinear products, modified energy and Sobolev norm growth.

mod bilinear;
mod dynamics;
mod fit;
mod quadrilinear;

pub use bilinear::{
    bilinear_strichartz_ratio, derivative_bilinear_ratio, BilinearConfig, BilinearMeasurement, Ensemble,
    TIME_NODES,
};
pub use dynamics::{
    energy_increment_scan, growth_exponent_bound, horizon, mixed_modes, norm_growth_experiment, GrowthRun, IncrementRow,
    IncrementScan, GROWTH_SLACK,
};
pub use fit::{last_step_change, ScalingFit};
pub use quadrilinear::{
    almost_orthogonality_scan, exhaustive_identity_scan_1d, quad_l0, random_identity_checks, quad_l1_plus_weight, verify_identity_k1,
    IdentityCheck, IdentityScan, OrthogonalityScan, QuadTuple, IDENTITY_EPS,
};

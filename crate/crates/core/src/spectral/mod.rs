//! Operator calculus in coefficient space: `H`, eigenspace projections,
//! Littlewood–Paley blocks, Sobolev norms, words in `∇` and `x`, and the
//! smoothing operator `I`.

mod bernstein;
mod ioperator;
mod ladder;
mod lp;
mod word;

pub use bernstein::bernstein_ratio;
pub use ioperator::{apply_i, IOperatorSpec};
pub use ladder::{apply_h, apply_p, apply_p_extended, commutator_h_p, project_pi_mu, Commutator, PApplied, Projection};
pub use lp::{dyadic_cover, littlewood_paley, littlewood_paley_low, sobolev_norm, LpProfile};
pub use word::{Letter, LetterKind, PWord};

use rayon::prelude::*;

use super::ladder::apply_p_extended;
use super::lp::LpProfile;
use super::word::PWord;
use crate::error::{invalid, Result};
use crate::random::{dyadic_localized, trial_rng, window_shape};

/// Largest observed `‖P(word) u_N‖ / (N^ord ‖u_N‖)` over `trials` random
/// fields localized by `Δ_N` in dimension `d`.
///
/// The word acts without truncation, on a basis sized to the block's support,
/// so the ratio is exact for each sample. Trial `t` uses stream `t` of
/// `seed`, which makes the result independent of thread count.
pub fn bernstein_ratio(word: &PWord, n: u64, d: usize, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(invalid("trials", "at least one trial is required"));
    }
    word.check_axes(d)?;
    let shape = window_shape(d, n)?;
    let scale = (n as f64).powi(word.order() as i32);
    let ratios = (0..trials)
        .into_par_iter()
        .map(|t| {
            let u = dyadic_localized(&shape, n, &LpProfile, &mut trial_rng(seed, t as u64))?;
            let pu = apply_p_extended(word, &u)?;
            Ok(pu.norm_l2() / (scale * u.norm_l2()))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ratios.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_word_gives_one() {
        assert_eq!(bernstein_ratio(&PWord::identity(), 8, 2, 3, 11).unwrap(), 1.0);
    }

    #[test]
    fn deterministic_and_monotone_in_trials() {
        let w: PWord = "D1 X1".parse().unwrap();
        let a = bernstein_ratio(&w, 8, 1, 4, 5).unwrap();
        assert_eq!(a, bernstein_ratio(&w, 8, 1, 4, 5).unwrap());
        assert!(bernstein_ratio(&w, 8, 1, 8, 5).unwrap() >= a);
        assert!(bernstein_ratio(&w, 8, 1, 0, 5).is_err());
    }
}

use crate::error::{invalid, Result};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Fitted exponent `p` in `y ≈ C x^p`.
    pub slope: f64,
    /// `ln C`.
    pub intercept: f64,
    /// RMS of the log residuals.
    pub residual: f64,
}

impl ScalingFit {
    /// Requires at least two points, strictly increasing positive `xs` and
    /// positive `ys`.
    pub fn fit(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(invalid("ys", format!("{} values for {} abscissae", ys.len(), xs.len())));
        }
        if xs.len() < 2 {
            return Err(invalid("xs", "a fit needs at least two points"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("xs", "abscissae must be strictly increasing"));
        }
        if xs.iter().chain(ys).any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(invalid("ys", "log-log fit needs finite positive values"));
        }
        let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
        let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
        let n = lx.len() as f64;
        let mx = lx.iter().sum::<f64>() / n;
        let my = ly.iter().sum::<f64>() / n;
        let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
        let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let ss: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        Ok(ScalingFit {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            slope,
            intercept,
            residual: (ss / n).sqrt(),
        })
    }
}

/// Relative change between the last two entries, `|r_last / r_prev − 1|`.
/// A sweep counts as bounded when this is at most `band`.
pub fn last_step_change(values: &[f64]) -> Option<f64> {
    match values {
        [.., prev, last] => Some((last / prev - 1.0).abs()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_pure_power() {
        let xs = [4.0, 8.0, 16.0, 32.0, 64.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.5 * x.powf(-1.37)).collect();
        let f = ScalingFit::fit(&xs, &ys).unwrap();
        assert!((f.slope + 1.37).abs() < 1e-10);
        assert!((f.intercept - 3.5f64.ln()).abs() < 1e-10);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ScalingFit::fit(&[1.0], &[1.0]).is_err());
        assert!(ScalingFit::fit(&[2.0, 1.0], &[1.0, 1.0]).is_err());
        assert!(ScalingFit::fit(&[1.0, 2.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn last_step() {
        assert_eq!(last_step_change(&[1.0]), None);
        assert_eq!(last_step_change(&[3.0, 2.0, 2.5]), Some(0.25));
    }
}

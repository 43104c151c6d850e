//! Axis-by-axis tensor contractions on standard-layout arrays.

use ndarray::{Array2, ArrayD, IxDyn};
use num_complex::Complex64;

use super::quadrature::symmetric_sum;

fn split_at_axis(shape: &[usize], axis: usize) -> (usize, usize, usize) {
    let outer = shape[..axis].iter().product();
    let inner = shape[axis + 1..].iter().product();
    (outer, shape[axis], inner)
}

/// `out[.., j, ..] = Σ_k m[j, k] · t[.., k, ..]` along `axis`.
pub fn contract_axis(t: &ArrayD<Complex64>, axis: usize, m: &Array2<f64>) -> ArrayD<Complex64> {
    let shape = t.shape().to_vec();
    let (outer, n, inner) = split_at_axis(&shape, axis);
    assert_eq!(m.ncols(), n, "contraction length mismatch on axis {axis}");
    let rows = m.nrows();
    let src = t.as_standard_layout();
    let src = src.as_slice().expect("standard layout");
    let mut out_shape = shape.clone();
    out_shape[axis] = rows;
    let mut out = vec![Complex64::new(0.0, 0.0); outer * rows * inner];
    let m = m.as_standard_layout();
    let ms = m.as_slice().expect("standard layout");
    for o in 0..outer {
        let s_block = &src[o * n * inner..(o + 1) * n * inner];
        let d_block = &mut out[o * rows * inner..(o + 1) * rows * inner];
        for j in 0..rows {
            let mrow = &ms[j * n..(j + 1) * n];
            let dst = &mut d_block[j * inner..(j + 1) * inner];
            for (k, &c) in mrow.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let s = &s_block[k * inner..(k + 1) * inner];
                for (d, v) in dst.iter_mut().zip(s) {
                    d.re += c * v.re;
                    d.im += c * v.im;
                }
            }
        }
    }
    ArrayD::from_shape_vec(IxDyn(&out_shape), out).expect("shape")
}

/// Apply one matrix per axis (axis 0 first).
pub fn contract_all(t: &ArrayD<Complex64>, mats: &[&Array2<f64>]) -> ArrayD<Complex64> {
    let mut cur = t.to_owned();
    for (axis, m) in mats.iter().enumerate() {
        cur = contract_axis(&cur, axis, m);
    }
    cur
}

/// `∫ f dx` of a real grid function with per-axis symmetric weights. The last
/// axis is reduced first, each reduction pairing mirror nodes.
pub fn integrate_real(values: &ArrayD<f64>, weights: &[&[f64]]) -> f64 {
    assert_eq!(values.ndim(), weights.len());
    let mut data: Vec<f64> = values.as_standard_layout().iter().copied().collect();
    let mut shape = values.shape().to_vec();
    while let Some(&last) = shape.last() {
        let w = weights[shape.len() - 1];
        assert_eq!(w.len(), last);
        let outer = data.len() / last;
        let reduced: Vec<f64> = (0..outer)
            .map(|o| {
                let row = &data[o * last..(o + 1) * last];
                symmetric_sum(w, |j| row[j])
            })
            .collect();
        data = reduced;
        shape.pop();
    }
    data[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn contraction_matches_dense_product() {
        let t = ArrayD::from_shape_fn(IxDyn(&[2, 3]), |ix| {
            Complex64::new((ix[0] * 3 + ix[1]) as f64, ix[1] as f64)
        });
        let m = array![[1.0, 0.0], [2.0, -1.0], [0.5, 0.5]];
        let out = contract_axis(&t, 0, &m);
        assert_eq!(out.shape(), &[3, 3]);
        for j in 0..3 {
            for i in 0..3 {
                let expected = m[[j, 0]] * t[[0, i]] + m[[j, 1]] * t[[1, i]];
                assert_eq!(out[[j, i]], expected);
            }
        }
    }

    #[test]
    fn odd_function_integrates_to_zero_exactly() {
        let w = [0.3, 0.7, 0.9, 0.7, 0.3];
        let x: [f64; 5] = [-2.0, -0.9, 0.0, 0.9, 2.0];
        let vals = ArrayD::from_shape_fn(IxDyn(&[5, 5]), |ix| x[ix[0]].powi(3) * (x[ix[1]] + 1.1));
        assert_eq!(integrate_real(&vals, &[&w, &w]), 0.0);
    }
}

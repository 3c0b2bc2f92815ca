//! Discrete Fourier utilities: in-place N-dimensional FFT (axis by axis via
//! rustfft), the zero-extended periodic supergrid transform used by the
//! negative-order semiclassical norms, and the semidiscrete Fourier transform
//! `∫_Q u(y) e^{-i ξ·y} dy` evaluated at arbitrary continuous frequencies.

use crate::field::{Field, Scalar};
use crate::grid::SpaceTimeGrid;
use crate::reduce::indexed_sum;
use crate::C64;
use rustfft::FftPlanner;
use std::sync::Arc;

/// In-place nd FFT over a dense array with the given shape (row-major,
/// last axis contiguous). `inverse` applies the unscaled inverse transform.
pub fn fft_nd(data: &mut [C64], shape: &[usize], inverse: bool) {
    let total: usize = shape.iter().product();
    assert_eq!(data.len(), total);
    let mut planner = FftPlanner::new();
    let dims = shape.len();
    // strides
    let mut strides = vec![1usize; dims];
    for k in (0..dims - 1).rev() {
        strides[k] = strides[k + 1] * shape[k + 1];
    }
    for axis in 0..dims {
        let m = shape[axis];
        let fft = if inverse { planner.plan_fft_inverse(m) } else { planner.plan_fft_forward(m) };
        let stride = strides[axis];
        let lines = total / m;
        let mut buf = vec![C64::new(0.0, 0.0); m];
        for line in 0..lines {
            // compute the base offset of this line
            let mut rem = line;
            let mut base = 0usize;
            for k in 0..dims {
                if k == axis {
                    continue;
                }
                let extent = shape[k];
                let coord = rem % extent;
                rem /= extent;
                base += coord * strides[k];
            }
            for j in 0..m {
                buf[j] = data[base + j * stride];
            }
            fft.process(&mut buf);
            for j in 0..m {
                data[base + j * stride] = buf[j];
            }
        }
    }
}

/// Zero-extension of a scalar field to a periodic supergrid of double extent
/// per axis, plus the supergrid shape. The field occupies the leading block.
pub fn zero_extend_double<T: Scalar>(u: &Field<T>, to_c64: impl Fn(T) -> C64) -> (Vec<C64>, Vec<usize>) {
    let grid = u.grid();
    let dims = grid.dims();
    let shape: Vec<usize> = (0..dims).map(|k| 2 * grid.shape(k)).collect();
    let total: usize = shape.iter().product();
    let mut out = vec![C64::new(0.0, 0.0); total];
    let mut strides = vec![1usize; dims];
    for k in (0..dims - 1).rev() {
        strides[k] = strides[k + 1] * shape[k + 1];
    }
    let vals = u.component(0);
    for f in 0..grid.total_nodes() {
        let idx = grid.decode(f);
        let mut g = 0usize;
        for k in 0..dims {
            g += idx[k] * strides[k];
        }
        out[g] = to_c64(vals[f]);
    }
    (out, shape)
}

/// Angular frequency of DFT bin `j` on an axis with `m` nodes and spacing `d`
/// (signed wrap-around convention).
#[inline]
pub fn bin_frequency(j: usize, m: usize, d: f64) -> f64 {
    let js = if j <= m / 2 { j as isize } else { j as isize - m as isize };
    2.0 * std::f64::consts::PI * js as f64 / (m as f64 * d)
}

/// Semidiscrete Fourier transform of a compactly supported scalar field at an
/// arbitrary frequency: `∫ u(y) e^{-i ξ·y} dy` by trapezoid over the grid
/// (zero extension outside). Deterministic parallel reduction.
pub fn dft_at<T: Scalar>(u: &Field<T>, xi: &[f64]) -> C64 {
    let grid = u.grid().clone();
    let vals = u.component(0);
    let dims = grid.dims();
    let xiv: Vec<f64> = xi.to_vec();
    indexed_sum(grid.total_nodes(), move |f| {
        let idx = grid.decode(f);
        let p = grid.point(&idx);
        let w = crate::quadrature::node_weight_q(&grid, &idx);
        let mut phase = 0.0;
        for k in 0..dims {
            phase -= xiv[k] * p[k];
        }
        let v = vals[f];
        C64::new(v.re(), v.im()) * C64::new(phase.cos(), phase.sin()) * w
    })
}

/// Inverse accumulation: evaluates `Σ_s coeff_s e^{+i ξ_s·y}` at every node of
/// the target grid (the adjoint of `dft_at` sampling w.r.t. the L² pairing,
/// up to the quadrature weight). Used by the least-squares inverters.
pub fn accumulate_modes(
    grid: &Arc<SpaceTimeGrid>,
    freqs: &[Vec<f64>],
    coeffs: &[C64],
) -> Vec<C64> {
    let dims = grid.dims();
    let nn = grid.total_nodes();
    use rayon::prelude::*;
    (0..nn)
        .into_par_iter()
        .map(|f| {
            let idx = grid.decode(f);
            let p = grid.point(&idx);
            let mut acc = C64::new(0.0, 0.0);
            for (xi, c) in freqs.iter().zip(coeffs) {
                let mut phase = 0.0;
                for k in 0..dims {
                    phase += xi[k] * p[k];
                }
                acc += c * C64::new(phase.cos(), phase.sin());
            }
            acc
        })
        .collect()
}

/// Parseval-normalized squared L² norm from supergrid DFT data:
/// `(Π d_k / Π N_k) Σ |û|²` equals `Σ_nodes |u|² Π d_k`.
pub fn spectral_l2_sq(dft: &[C64], shape: &[usize], spacings: &[f64]) -> f64 {
    let nf: f64 = shape.iter().map(|&m| m as f64).product();
    let vol: f64 = spacings.iter().product();
    let s: f64 = indexed_sum(dft.len(), |i| dft[i].norm_sqr());
    s * vol / nf
}

/// Iterate (flat index, signed angular frequency vector) of a supergrid.
pub fn for_each_bin(shape: &[usize], spacings: &[f64], mut body: impl FnMut(usize, &[f64])) {
    let dims = shape.len();
    let total: usize = shape.iter().product();
    let mut strides = vec![1usize; dims];
    for k in (0..dims - 1).rev() {
        strides[k] = strides[k + 1] * shape[k + 1];
    }
    let mut xi = vec![0.0; dims];
    for f in 0..total {
        let mut rem = f;
        for k in 0..dims {
            let j = rem / strides[k];
            rem %= strides[k];
            xi[k] = bin_frequency(j, shape[k], spacings[k]);
        }
        body(f, &xi);
    }
}

/// Convenience: spacings of all axes of a grid.
pub fn grid_spacings(grid: &SpaceTimeGrid) -> Vec<f64> {
    (0..grid.dims()).map(|k| grid.spacing(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ComplexField;

    #[test]
    fn fft_roundtrip() {
        let shape = [4usize, 6, 5];
        let total: usize = shape.iter().product();
        let orig: Vec<C64> = (0..total)
            .map(|i| C64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let mut data = orig.clone();
        fft_nd(&mut data, &shape, false);
        fft_nd(&mut data, &shape, true);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a / total as f64 - b).norm() < 1e-12);
        }
    }

    #[test]
    fn dft_at_matches_known_integral() {
        // ∫_0^1∫_0^1 e^{-i ξ·y} dy with ξ = 0 equals the area
        let g = SpaceTimeGrid::new(1.0, &[(0.0, 1.0)], 33, &[33]).unwrap();
        let u = ComplexField::from_fn(&g, |_| C64::new(1.0, 0.0));
        let v = dft_at(&u, &[0.0, 0.0]);
        assert!((v - C64::new(1.0, 0.0)).norm() < 1e-12);
    }
}

//! Semiclassical Sobolev norms. Non-negative orders follow the definition
//! `‖u‖²_{H^m_scl} = Σ_{|α|≤m} ‖(hD)^α u‖²_{L²(Q)}` with `D = ∇_{t,x}` and
//! discrete derivatives; negative orders go through the Fourier multiplier
//! `(1+|hξ|²)^{s/2}` on the zero extension of `u` to a periodic supergrid of
//! double extent (faithful for fields supported inside Q).

use crate::error::{CoreError, Result};
use crate::field::{Field, Scalar};
use crate::fourier;
use crate::quadrature::l2_norm_q;
use crate::stencil::derivative;

/// Enumerate all multi-indices over `dims` axes with `1 ≤ |α| ≤ max_order`.
fn multi_indices(dims: usize, max_order: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack = vec![vec![0usize; dims]];
    // breadth-first by total order
    for _ in 0..max_order {
        let mut next = Vec::new();
        for alpha in &stack {
            for k in 0..dims {
                let mut beta = alpha.clone();
                beta[k] += 1;
                // keep canonical (non-decreasing growth) to avoid duplicates:
                // accept only if no earlier axis could have been incremented later;
                // simpler: dedup below.
                next.push(beta);
            }
        }
        next.sort();
        next.dedup();
        out.extend(next.iter().cloned());
        stack = next;
    }
    out.sort();
    out.dedup();
    out
}

/// ∂^α u by repeated axis derivatives (second order, one-sided at ends).
fn apply_multi<T: Scalar>(u: &Field<T>, alpha: &[usize]) -> Result<Field<T>> {
    let mut cur = u.clone();
    for (k, &times) in alpha.iter().enumerate() {
        for _ in 0..times {
            cur = derivative(&cur, k)?;
        }
    }
    Ok(cur)
}

/// Semiclassical Sobolev norm of integer order `s` (|s| ≤ 4 supported).
///
/// Requires `h > 0`. For `s < 0` the field is zero-extended; the caller is
/// expected to pass a field supported in the interior of Q.
pub fn semiclassical_norm<T: Scalar>(u: &Field<T>, s: i32, h: f64) -> Result<f64> {
    if h <= 0.0 {
        return Err(CoreError::NonPositiveH(h));
    }
    u.ensure_scalar()?;
    if s >= 0 {
        let mut total = l2_norm_q(u).powi(2);
        for alpha in multi_indices(u.grid().dims(), s as usize) {
            let order: usize = alpha.iter().sum();
            let d = apply_multi(u, &alpha)?;
            total += h.powi(2 * order as i32) * l2_norm_q(&d).powi(2);
        }
        Ok(total.sqrt())
    } else {
        Ok(multiplier_norm(u, s as f64, h))
    }
}

/// Fourier-multiplier norm `‖(1+|hξ|²)^{s/2} û‖` on the doubled supergrid;
/// valid for any real s, used directly for negative orders.
pub fn multiplier_norm<T: Scalar>(u: &Field<T>, s: f64, h: f64) -> f64 {
    let (mut data, shape) = fourier::zero_extend_double(u, |v| crate::C64::new(v.re(), v.im()));
    let spacings = fourier::grid_spacings(u.grid());
    fourier::fft_nd(&mut data, &shape, false);
    let mut total = Vec::with_capacity(data.len() / crate::reduce::CHUNK + 1);
    let mut acc = 0.0;
    let mut count = 0usize;
    fourier::for_each_bin(&shape, &spacings, |f, xi| {
        let xi2: f64 = xi.iter().map(|x| x * x).sum();
        let mult = (1.0 + h * h * xi2).powf(s);
        acc += mult * data[f].norm_sqr();
        count += 1;
        if count == crate::reduce::CHUNK {
            total.push(acc);
            acc = 0.0;
            count = 0;
        }
    });
    if count > 0 {
        total.push(acc);
    }
    let sum = crate::reduce::pairwise_fold(total);
    let nf: f64 = shape.iter().map(|&m| m as f64).product();
    let vol: f64 = spacings.iter().product();
    (sum * vol / nf).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ComplexField, RealField};
    use crate::grid::SpaceTimeGrid;
    use crate::synth;
    use crate::C64;

    #[test]
    fn order_zero_is_l2() {
        let g = SpaceTimeGrid::new(1.0, &[(0.0, 1.0)], 17, &[17]).unwrap();
        let f = synth::centered_bump(&g, 0.7);
        let u = RealField::from_fn(&g, |p| f(p));
        let a = semiclassical_norm(&u, 0, 0.3).unwrap();
        let b = l2_norm_q(&u);
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn h1_norm_decreases_to_l2_as_h_shrinks() {
        let g = SpaceTimeGrid::new(1.0, &[(0.0, 1.0)], 17, &[17]).unwrap();
        let f = synth::centered_bump(&g, 0.7);
        let u = RealField::from_fn(&g, |p| f(p));
        let l2 = l2_norm_q(&u);
        let mut prev = f64::INFINITY;
        for &h in &[0.8, 0.4, 0.2, 0.1, 0.05, 0.02, 0.01] {
            let v = semiclassical_norm(&u, 1, h).unwrap();
            assert!(v >= l2 - 1e-14);
            assert!(v <= prev + 1e-14, "monotone in h");
            prev = v;
        }
        assert!((prev - l2) / l2 < 0.02);
    }

    #[test]
    fn negative_order_matches_windowed_mode_multiplier() {
        // u = e^{i ξ0·y}·window ⇒ ‖u‖_{H^{-2}} ≈ (1+|hξ0|²)^{-1}‖window‖
        // the carrier must sit far above the window's spectral spread,
        // otherwise the multiplier varies across the spectrum
        let g = SpaceTimeGrid::new(1.0, &[(0.0, 1.0)], 129, &[129], ).unwrap();
        let w = synth::centered_bump(&g, 0.7);
        let xi0 = [80.0, -60.0];
        let u = ComplexField::from_fn(&g, |p| {
            let ph = xi0[0] * p[0] + xi0[1] * p[1];
            C64::new(ph.cos(), ph.sin()) * w(p)
        });
        let win = RealField::from_fn(&g, |p| w(p));
        let h = 0.1;
        let got = semiclassical_norm(&u, -2, h).unwrap();
        let xi_sq = xi0.iter().map(|x| x * x).sum::<f64>();
        let expect = (1.0 + h * h * xi_sq).powi(-1) * l2_norm_q(&win);
        assert!(
            (got - expect).abs() / expect < 0.05,
            "got {got}, expect {expect}"
        );
    }

    #[test]
    fn rejects_bad_h() {
        let g = SpaceTimeGrid::new(1.0, &[(0.0, 1.0)], 9, &[9]).unwrap();
        let u = RealField::zeros(&g, 1);
        assert!(semiclassical_norm(&u, 0, 0.0).is_err());
        assert!(semiclassical_norm(&u, -2, -1.0).is_err());
    }

    #[test]
    fn norm_axioms_hold() {
        let g = SpaceTimeGrid::new(1.0, &[(0.0, 1.0)], 17, &[17]).unwrap();
        let f1 = synth::band_limited_random(&g, 3, 2, 1.0);
        let f2 = synth::band_limited_random(&g, 4, 2, 1.0);
        let u = RealField::from_fn(&g, |p| f1(p));
        let v = RealField::from_fn(&g, |p| f2(p));
        for &s in &[1i32, 2, -1, -2] {
            let h = 0.25;
            let nu = semiclassical_norm(&u, s, h).unwrap();
            let nv = semiclassical_norm(&v, s, h).unwrap();
            let scaled = semiclassical_norm(&u.scaled(-2.5), s, h).unwrap();
            assert!((scaled - 2.5 * nu).abs() < 1e-10 * (1.0 + nu), "homogeneity s={s}");
            let sum = semiclassical_norm(&u.add_field(&v).unwrap(), s, h).unwrap();
            assert!(sum <= nu + nv + 1e-10, "triangle s={s}");
        }
    }
}

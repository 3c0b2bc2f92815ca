//! Energy diagnostics mirroring the a-priori estimate: the max-in-time of
//! `Σ_{j,k} ‖∂t^j(□^k u)(t)‖_{H^{2-k}}`-type norms against the data norm,
//! reported as a time series plus the left/right ratio.

use crate::data::IbvpData;
use crate::error::Result;
use crate::ibvp::SystemState;
use bwlab_core::field::{Field, Scalar};
use bwlab_core::grid::{Face, SpaceTimeGrid};
use bwlab_core::quadrature::integrate_omega_slice;
use bwlab_core::stencil::derivative;
use std::sync::Arc;

#[derive(Debug, Clone)]
pub struct EnergyReport {
    pub times: Vec<f64>,
    /// ‖u(t)‖_{H²(Ω)}, ‖∂t u(t)‖_{H¹(Ω)}, ‖∂t² u(t)‖_{L²(Ω)}
    pub u_norms: [Vec<f64>; 3],
    /// same three norms for w = □u
    pub w_norms: [Vec<f64>; 3],
    /// the data norm on the right of the energy estimate
    pub data_norm: f64,
    /// max-in-time of the summed left side divided by the data norm
    pub ratio: f64,
}

/// L²(Ω) norms per time slice of |field|² accumulated over a derivative list.
fn slice_norms_sq<T: Scalar>(fields: &[Field<T>]) -> Result<Vec<f64>> {
    let grid = fields[0].grid().clone();
    let mut out = vec![0.0; grid.nt()];
    for fld in fields {
        let sq = Field::<f64>::from_fn(&grid, |_| 0.0);
        let mut sq = sq;
        for f in 0..grid.total_nodes() {
            sq.set(0, f, fld.at(0, f).abs_sq());
        }
        for (it, slot) in out.iter_mut().enumerate() {
            *slot += integrate_omega_slice(&sq, it)?;
        }
    }
    Ok(out)
}

/// Spatial derivative fields of all orders `1..=order` (mixed included).
fn spatial_derivatives<T: Scalar>(u: &Field<T>, order: usize) -> Result<Vec<Field<T>>> {
    let n = u.grid().n();
    let mut всего = vec![u.clone()];
    let mut out = Vec::new();
    for _ in 0..order {
        let mut next = Vec::new();
        for f in &всего {
            for ax in 0..n {
                next.push(derivative(f, 1 + ax)?);
            }
        }
        out.extend(next.iter().cloned());
        всего = next;
    }
    out.push(u.clone());
    Ok(out)
}

/// `‖u(t)‖_{H^s(Ω)}²` per slice.
fn sobolev_slices<T: Scalar>(u: &Field<T>, order: usize) -> Result<Vec<f64>> {
    let fields = spatial_derivatives(u, order)?;
    slice_norms_sq(&fields)
}

/// Sobolev norm of a Dirichlet trace over one face of Σ (derivatives along
/// time and the in-face axes, total order ≤ `order`), trapezoid in all
/// varying axes. The trace is read off a full-shape field.
fn face_sobolev_sq<T: Scalar>(trace: &Field<T>, face: &Face, order: usize) -> f64 {
    let grid = trace.grid().clone();
    let fixed_axis = 1 + face.axis;
    let fixed_idx = match face.side {
        bwlab_core::grid::Side::Lo => 0,
        bwlab_core::grid::Side::Hi => grid.nx()[face.axis] - 1,
    };
    let varying: Vec<usize> = (0..grid.dims()).filter(|&k| k != fixed_axis).collect();
    let counts: Vec<usize> = varying.iter().map(|&k| grid.shape(k)).collect();
    let total: usize = counts.iter().product();
    // pack the face into a dense buffer
    let mut buf = vec![T::zero(); total];
    let mut strides = vec![1usize; varying.len()];
    for k in (0..varying.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * counts[k + 1];
    }
    let vals = trace.component(0);
    for (pos, slot) in buf.iter_mut().enumerate() {
        let mut idx = [0usize; 4];
        idx[fixed_axis] = fixed_idx;
        let mut r = pos;
        for (vi, &k) in varying.iter().enumerate() {
            idx[k] = r / strides[vi];
            r %= strides[vi];
        }
        *slot = vals[grid.flat(&idx)];
    }
    // 1D second-order derivative along one packed axis
    let deriv_axis = |src: &[T], vi: usize| -> Vec<T> {
        let m = counts[vi];
        let st = strides[vi];
        let d = grid.spacing(varying[vi]);
        let mut dst = vec![T::zero(); total];
        for (pos, slot) in dst.iter_mut().enumerate() {
            let i = (pos / st) % m;
            *slot = if i == 0 {
                (src[pos].scale(-3.0) + src[pos + st].scale(4.0) - src[pos + 2 * st])
                    .scale(0.5 / d)
            } else if i == m - 1 {
                (src[pos].scale(3.0) - src[pos - st].scale(4.0) + src[pos - 2 * st])
                    .scale(0.5 / d)
            } else {
                (src[pos + st] - src[pos - st]).scale(0.5 / d)
            };
        }
        dst
    };
    // accumulate Σ_{|α|≤order} ‖∂^α trace‖²_{L²(face)}
    let weight = |pos: usize| -> f64 {
        let mut w = 1.0;
        for (vi, &k) in varying.iter().enumerate() {
            let i = (pos / strides[vi]) % counts[vi];
            let edge = i == 0 || i == counts[vi] - 1;
            w *= grid.spacing(k) * if edge { 0.5 } else { 1.0 };
        }
        w
    };
    let l2_sq = |arr: &[T]| -> f64 {
        let mut acc = 0.0;
        for (pos, v) in arr.iter().enumerate() {
            acc += v.abs_sq() * weight(pos);
        }
        acc
    };
    let mut level = vec![buf.clone()];
    let mut acc = l2_sq(&buf);
    for _ in 0..order {
        let mut next = Vec::new();
        for arr in &level {
            for vi in 0..varying.len() {
                next.push(deriv_axis(arr, vi));
            }
        }
        for arr in &next {
            acc += l2_sq(arr);
        }
        level = next;
    }
    acc
}

/// Data norm of the right side of the energy estimate:
/// `Σ_k ‖ψ_k‖_{H^{4-k}(Ω)} + Σ_k ‖ψ_{2+k}-Δψ_k‖_{H^{1-k}(Ω)} + ‖f‖_{H⁴(Σ)} + ‖g‖_{H²(Σ)}`.
pub fn data_norm<T: Scalar>(data: &IbvpData<T>) -> Result<f64> {
    let grid = data.grid().clone();
    let spatial = data.spatial_len();
    let mut total = 0.0;
    // ψ_k packed into slice 0 of a working field
    let as_field = |src: &[T]| {
        let mut f = Field::<T>::zeros(&grid, 1);
        for s in 0..spatial {
            f.set(0, s, src[s]);
        }
        f
    };
    for k in 0..2 {
        let f = as_field(&data.psi[k]);
        total += sobolev_slices(&f, 4 - k)?[0];
    }
    for k in 0..2 {
        let psi_k = as_field(&data.psi[k]);
        let lap = bwlab_core::stencil::laplacian(&psi_k)?;
        let mut diff = as_field(&data.psi[2 + k]);
        for s in 0..spatial {
            let v = diff.at(0, s) - lap.at(0, s);
            diff.set(0, s, v);
        }
        total += sobolev_slices(&diff, 1 - k)?[0];
    }
    for face in grid.faces() {
        total += face_sobolev_sq(&data.f, &face, 4);
        total += face_sobolev_sq(&data.g, &face, 2);
    }
    Ok(total.sqrt())
}

/// Time series of the solution norms and the ratio against the data norm.
pub fn energy_report<T: Scalar>(state: &SystemState<T>, data: &IbvpData<T>) -> Result<EnergyReport> {
    let grid: Arc<SpaceTimeGrid> = state.grid().clone();
    let nt = grid.nt();
    let times: Vec<f64> = (0..nt).map(|it| grid.coord(0, it)).collect();

    let component_norms = |f: &Field<T>| -> Result<[Vec<f64>; 3]> {
        let h2 = sobolev_slices(f, 2)?;
        let ft = derivative(f, 0)?;
        let h1t = sobolev_slices(&ft, 1)?;
        let ftt = derivative(&ft, 0)?;
        let l2tt = slice_norms_sq(&[ftt])?;
        Ok([h2, h1t, l2tt])
    };
    let u_sq = component_norms(&state.u)?;
    let w_sq = component_norms(&state.w)?;
    let sqrt_all = |v: &[f64]| v.iter().map(|x| x.sqrt()).collect::<Vec<_>>();

    let dnorm = data_norm(data)?;
    let mut left_max: f64 = 0.0;
    for it in 0..nt {
        let mut s = 0.0;
        for group in [&u_sq, &w_sq] {
            for series in group.iter() {
                s += series[it].sqrt();
            }
        }
        left_max = left_max.max(s);
    }
    Ok(EnergyReport {
        times,
        u_norms: [sqrt_all(&u_sq[0]), sqrt_all(&u_sq[1]), sqrt_all(&u_sq[2])],
        w_norms: [sqrt_all(&w_sq[0]), sqrt_all(&w_sq[1]), sqrt_all(&w_sq[2])],
        data_norm: dnorm,
        ratio: if dnorm > 0.0 { left_max / dnorm } else { 0.0 },
    })
}

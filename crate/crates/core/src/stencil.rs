//! Second-order finite-difference kernels on space-time grids: first and
//! second derivatives (centered inside, one-sided 3/4-point at the ends),
//! the d'Alembertian `□ = ∂t² - Δ`, the characteristic derivative
//! `T = ∂t - ω·∇`, and application of the full perturbed bi-wave operator
//! `𝓛 = □² + A□ + B∂t + C·∇ + q`.

use crate::coeffs::CoefficientSet;
use crate::direction::Direction;
use crate::error::{CoreError, Result};
use crate::field::{Field, Scalar};
use crate::grid::{Face, Side};

/// First derivative along full axis `k` (0 = time). Centered in the
/// interior, one-sided 3-point second-order at the two ends.
pub fn derivative<T: Scalar>(u: &Field<T>, k: usize) -> Result<Field<T>> {
    u.ensure_scalar()?;
    let grid = u.grid().clone();
    let s = grid.strides()[k];
    let m = grid.shape(k);
    let d = grid.spacing(k);
    let vals = u.component(0);
    let mut out = Field::zeros(&grid, 1);
    let dst = out.component_mut(0);
    for f in 0..grid.total_nodes() {
        let i = grid.decode(f)[k];
        dst[f] = if i == 0 {
            (vals[f].scale(-3.0) + vals[f + s].scale(4.0) - vals[f + 2 * s]).scale(1.0 / (2.0 * d))
        } else if i == m - 1 {
            (vals[f].scale(3.0) - vals[f - s].scale(4.0) + vals[f - 2 * s]).scale(1.0 / (2.0 * d))
        } else {
            (vals[f + s] - vals[f - s]).scale(1.0 / (2.0 * d))
        };
    }
    Ok(out)
}

/// Second derivative along full axis `k`. Centered inside, one-sided
/// 4-point second-order at the two ends.
pub fn second_derivative<T: Scalar>(u: &Field<T>, k: usize) -> Result<Field<T>> {
    u.ensure_scalar()?;
    let grid = u.grid().clone();
    let s = grid.strides()[k];
    let m = grid.shape(k);
    if m < 4 {
        return Err(CoreError::GridTooSmall { axis: format!("axis {k}"), nodes: m, min: 4 });
    }
    let d2 = grid.spacing(k) * grid.spacing(k);
    let vals = u.component(0);
    let mut out = Field::zeros(&grid, 1);
    let dst = out.component_mut(0);
    for f in 0..grid.total_nodes() {
        let i = grid.decode(f)[k];
        dst[f] = if i == 0 {
            (vals[f].scale(2.0) - vals[f + s].scale(5.0) + vals[f + 2 * s].scale(4.0)
                - vals[f + 3 * s])
            .scale(1.0 / d2)
        } else if i == m - 1 {
            (vals[f].scale(2.0) - vals[f - s].scale(5.0) + vals[f - 2 * s].scale(4.0)
                - vals[f - 3 * s])
            .scale(1.0 / d2)
        } else {
            (vals[f + s] - vals[f].scale(2.0) + vals[f - s]).scale(1.0 / d2)
        };
    }
    Ok(out)
}

/// Spatial Laplacian (one-sided at boundaries).
pub fn laplacian<T: Scalar>(u: &Field<T>) -> Result<Field<T>> {
    let grid = u.grid().clone();
    let mut acc = second_derivative(u, 1)?;
    for a in 2..grid.dims() {
        acc = acc.add_field(&second_derivative(u, a)?)?;
    }
    Ok(acc)
}

/// `□u = ∂t²u - Δu` with one-sided stencils at all boundaries.
pub fn dalembertian_full<T: Scalar>(u: &Field<T>) -> Result<Field<T>> {
    let dtt = second_derivative(u, 0)?;
    let lap = laplacian(u)?;
    dtt.sub_field(&lap)
}

/// Centered `□u` on interior nodes only; boundary nodes are flagged as
/// undefined (NaN).
pub fn apply_dalembertian<T: Scalar>(u: &Field<T>) -> Result<Field<T>> {
    u.ensure_scalar()?;
    let grid = u.grid().clone();
    for k in 0..grid.dims() {
        if grid.shape(k) < 3 {
            return Err(CoreError::GridTooSmall { axis: format!("axis {k}"), nodes: grid.shape(k), min: 3 });
        }
    }
    let vals = u.component(0);
    let nan = T::from_f64(f64::NAN);
    let mut out = Field::zeros(&grid, 1);
    let dst = out.component_mut(0);
    let dt2 = grid.dt() * grid.dt();
    for f in 0..grid.total_nodes() {
        let idx = grid.decode(f);
        if !grid.is_interior(&idx) {
            dst[f] = nan;
            continue;
        }
        let st = grid.strides()[0];
        let mut acc = (vals[f + st] - vals[f].scale(2.0) + vals[f - st]).scale(1.0 / dt2);
        for a in 0..grid.n() {
            let s = grid.strides()[1 + a];
            let d2 = grid.dx()[a] * grid.dx()[a];
            acc = acc - (vals[f + s] - vals[f].scale(2.0) + vals[f - s]).scale(1.0 / d2);
        }
        dst[f] = acc;
    }
    Ok(out)
}

/// `Tu = ∂t u - ω·∇u` on interior nodes; boundary flagged NaN.
pub fn directional_derivative_t<T: Scalar>(u: &Field<T>, dir: &Direction) -> Result<Field<T>> {
    u.ensure_scalar()?;
    let grid = u.grid().clone();
    let vals = u.component(0);
    let nan = T::from_f64(f64::NAN);
    let mut out = Field::zeros(&grid, 1);
    let dst = out.component_mut(0);
    for f in 0..grid.total_nodes() {
        let idx = grid.decode(f);
        if !grid.is_interior(&idx) {
            dst[f] = nan;
            continue;
        }
        let st = grid.strides()[0];
        let mut acc = (vals[f + st] - vals[f - st]).scale(0.5 / grid.dt());
        for a in 0..grid.n() {
            let s = grid.strides()[1 + a];
            acc = acc - (vals[f + s] - vals[f - s]).scale(0.5 * dir.omega()[a] / grid.dx()[a]);
        }
        dst[f] = acc;
    }
    Ok(out)
}

/// `Tu` everywhere, one-sided at the ends.
pub fn directional_derivative_t_full<T: Scalar>(u: &Field<T>, dir: &Direction) -> Result<Field<T>> {
    let mut acc = derivative(u, 0)?;
    for a in 0..u.grid().n() {
        acc = acc.sub_field(&derivative(u, 1 + a)?.scaled(dir.omega()[a]))?;
    }
    Ok(acc)
}

/// Space-time gradient as a (1+n)-component vector field (one-sided at ends).
pub fn gradient_spacetime<T: Scalar>(u: &Field<T>) -> Result<Field<T>> {
    u.ensure_scalar()?;
    let grid = u.grid().clone();
    let mut out = Field::zeros(&grid, grid.dims());
    for k in 0..grid.dims() {
        let d = derivative(u, k)?;
        out.component_mut(k).copy_from_slice(d.component(0));
    }
    Ok(out)
}

/// Lower-order part `A□u + B∂t u + C·∇u + q u` of the perturbed operator.
pub fn apply_lower_order<T: Scalar>(coeffs: &CoefficientSet, u: &Field<T>) -> Result<Field<T>> {
    u.ensure_scalar()?;
    coeffs.ensure_grid(u.grid())?;
    let grid = u.grid().clone();
    let nn = grid.total_nodes();
    let box_u = dalembertian_full(u)?;
    let dt_u = derivative(u, 0)?;
    let mut out = Field::zeros(&grid, 1);
    {
        let dst = out.component_mut(0);
        let a = coeffs.a().component(0);
        let b = coeffs.b().component(0);
        let q = coeffs.q().component(0);
        let bu = box_u.component(0);
        let du = dt_u.component(0);
        let uu = u.component(0);
        for f in 0..nn {
            dst[f] = bu[f].scale(a[f]) + du[f].scale(b[f]) + uu[f].scale(q[f]);
        }
    }
    for ax in 0..grid.n() {
        let dxu = derivative(u, 1 + ax)?;
        let dst = out.component_mut(0);
        let c = coeffs.c(ax).component(0);
        let dv = dxu.component(0);
        for f in 0..nn {
            dst[f] = dst[f] + dv[f].scale(c[f]);
        }
    }
    Ok(out)
}

/// Full operator `𝓛u = □²u + A□u + B∂t u + C·∇u + q u`. `□²` is applied as
/// two sweeps of the one-sided-at-boundary d'Alembertian, so values within
/// two cells of ∂Q use downwind stencils (still second order).
pub fn apply_biwave<T: Scalar>(coeffs: &CoefficientSet, u: &Field<T>) -> Result<Field<T>> {
    let box_u = dalembertian_full(u)?;
    let boxbox = dalembertian_full(&box_u)?;
    let low = apply_lower_order(coeffs, u)?;
    boxbox.add_field(&low)
}

/// Outward normal derivative trace on one face, 3-point one-sided,
/// written onto the face nodes of a full-shape field (zeros elsewhere).
pub fn face_normal_derivative<T: Scalar>(u: &Field<T>, face: &Face) -> Result<Field<T>> {
    u.ensure_scalar()?;
    let grid = u.grid().clone();
    let vals = u.component(0);
    let mut out = Field::zeros(&grid, 1);
    let dst = out.component_mut(0);
    let k = 1 + face.axis;
    let s = grid.strides()[k];
    let d = grid.spacing(k);
    crate::quadrature::for_each_face_node(&grid, face, |f, _w| {
        // one-sided difference pointing into the domain, then oriented outward
        let v = match face.side {
            Side::Lo => (vals[f].scale(-3.0) + vals[f + s].scale(4.0) - vals[f + 2 * s])
                .scale(-1.0 / (2.0 * d)),
            Side::Hi => (vals[f].scale(3.0) - vals[f - s].scale(4.0) + vals[f - 2 * s])
                .scale(1.0 / (2.0 * d)),
        };
        dst[f] = v;
    });
    Ok(out)
}

/// Normal derivative on every face (sum of per-face trace fields).
pub fn normal_derivative_sigma<T: Scalar>(u: &Field<T>) -> Result<Field<T>> {
    let grid = u.grid().clone();
    let mut out = Field::zeros(&grid, 1);
    for face in grid.faces() {
        let tr = face_normal_derivative(u, &face)?;
        // copy only the face values; corner nodes take the last face written,
        // consistent with the dominant-face convention for box corners
        let dst = out.component_mut(0);
        crate::quadrature::for_each_face_node(&grid, &face, |f, _w| {
            dst[f] = tr.component(0)[f];
        });
    }
    Ok(out)
}

/// One-sided time derivative of given order (1 or 2) at the final slice,
/// returned as a function over one Ω-slice stored in a full-shape field at
/// `it = nt-1`.
pub fn final_time_derivative<T: Scalar>(u: &Field<T>, order: usize) -> Result<Field<T>> {
    u.ensure_scalar()?;
    let grid = u.grid().clone();
    let st = grid.strides()[0];
    let nt = grid.nt();
    if nt < 4 {
        return Err(CoreError::GridTooSmall { axis: "t".into(), nodes: nt, min: 4 });
    }
    let vals = u.component(0);
    let dt = grid.dt();
    let mut out = Field::zeros(&grid, 1);
    let dst = out.component_mut(0);
    let spatial: usize = grid.nx().iter().product();
    for sidx in 0..spatial {
        let f = (nt - 1) * st + sidx;
        dst[f] = match order {
            1 => (vals[f].scale(3.0) - vals[f - st].scale(4.0) + vals[f - 2 * st])
                .scale(1.0 / (2.0 * dt)),
            2 => (vals[f].scale(2.0) - vals[f - st].scale(5.0) + vals[f - 2 * st].scale(4.0)
                - vals[f - 3 * st])
            .scale(1.0 / (dt * dt)),
            _ => return Err(CoreError::InvalidGrid(format!("unsupported trace order {order}"))),
        };
    }
    Ok(out)
}

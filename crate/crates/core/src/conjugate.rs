//! Conjugated semiclassical operators `e^{-w/h} · Op · e^{w/h}` with the
//! exponentials fused into the stencil coefficients.
//!
//! For every elementary finite-difference operator `D u(y) = Σ_s c_s u(y+s)`
//! the conjugation is exact node-wise:
//! `e^{-w(y)/h} D(e^{w/h}u)(y) = Σ_s c_s e^{(w(y+s)-w(y))/h} u(y+s)`,
//! and compositions of fused operators equal the fused composition. The
//! offsets are single grid cells, so the fused exponents are `O(dx/h)` and
//! never overflow — unlike literal multiplication by `e^{±w/h}`, which also
//! loses the leading-order cancellations to rounding.
//!
//! Weights: the linear Carleman phase `φ = t + x·ω` and its convexified
//! variant `φ_ε = φ - h t²/(2ε)`. Reads outside the field's grid are zero
//! (the inputs are either compactly supported in Q or extended-grid fields
//! whose restriction to Q is what the caller uses).

use crate::coeffs::CoefficientSet;
use crate::direction::Direction;
use crate::error::{CoreError, Result};
use crate::field::{Field, Scalar};
use crate::grid::NodeClass;

/// Scale-separation guard shared by every semiclassical sweep:
/// `h ≥ SCALE_SEPARATION · max(dt, dx)`.
pub const SCALE_SEPARATION: f64 = 10.0;

/// Smallest admissible h on a grid.
pub fn min_admissible_h(grid: &crate::grid::SpaceTimeGrid) -> f64 {
    SCALE_SEPARATION * grid.max_spacing()
}

/// Carleman weight selector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CarlemanWeight {
    /// `φ(t,x) = t + x·ω`.
    Linear,
    /// `φ_ε(t,x) = φ(t,x) - h t²/(2ε)`, `ε ∈ (0,1)`.
    Convexified { eps: f64 },
}

impl CarlemanWeight {
    /// Weight increment `w(y + d·e_axis) - w(y)` for a one-cell move.
    /// Depends only on the axis, the step sign, and (for φ_ε) the time.
    #[inline]
    fn increment(&self, dir: &Direction, h: f64, axis: usize, d: f64, t: f64) -> f64 {
        let linear = if axis == 0 { d } else { dir.omega()[axis - 1] * d };
        match self {
            CarlemanWeight::Linear => linear,
            CarlemanWeight::Convexified { eps } => {
                if axis == 0 {
                    linear - h * (2.0 * t * d + d * d) / (2.0 * eps)
                } else {
                    linear
                }
            }
        }
    }

    /// Analytic zero-order symbol `(∂_t w)² - |∇w|² + h □w` of
    /// `e^{-w/h} h²□ e^{w/h}` at time `t`. Vanishes identically for the
    /// linear weight with |ω| = 1.
    pub fn zero_order_symbol(&self, dir: &Direction, h: f64, t: f64) -> f64 {
        let om2: f64 = dir.omega().iter().map(|w| w * w).sum();
        match self {
            CarlemanWeight::Linear => 1.0 - om2,
            CarlemanWeight::Convexified { eps } => {
                let wt = 1.0 - h * t / eps;
                wt * wt - om2 - h * h / eps
            }
        }
    }

    pub fn value(&self, dir: &Direction, h: f64, p: &[f64]) -> f64 {
        let phi = dir.phi(p);
        match self {
            CarlemanWeight::Linear => phi,
            CarlemanWeight::Convexified { eps } => phi - h * p[0] * p[0] / (2.0 * eps),
        }
    }
}

/// A conjugated-operator context: direction, semiclassical parameter, the
/// sign of the inner exponential, and the weight.
#[derive(Debug, Clone)]
pub struct Conjugation {
    pub dir: Direction,
    pub h: f64,
    /// +1 conjugates with `e^{+w/h}` inside (growing side), -1 with `e^{-w/h}`.
    pub sigma: f64,
    pub weight: CarlemanWeight,
}

impl Conjugation {
    pub fn growing(dir: Direction, h: f64, weight: CarlemanWeight) -> Result<Self> {
        if h <= 0.0 {
            return Err(CoreError::NonPositiveH(h));
        }
        Ok(Self { dir, h, sigma: 1.0, weight })
    }

    pub fn decaying(dir: Direction, h: f64, weight: CarlemanWeight) -> Result<Self> {
        if h <= 0.0 {
            return Err(CoreError::NonPositiveH(h));
        }
        Ok(Self { dir, h, sigma: -1.0, weight })
    }

    #[inline]
    fn factor(&self, axis: usize, d: f64, t: f64) -> f64 {
        (self.sigma * self.weight.increment(&self.dir, self.h, axis, d, t) / self.h).exp()
    }

    /// Fused `h² e^{-σw/h} □ (e^{σw/h} u)`. Reads outside the grid are zero.
    pub fn wave_apply<T: Scalar>(&self, u: &Field<T>) -> Result<Field<T>> {
        u.ensure_scalar()?;
        let grid = u.grid().clone();
        let vals = u.component(0);
        let mut out = Field::zeros(&grid, 1);
        let dst = out.component_mut(0);
        let h2 = self.h * self.h;
        let dt = grid.dt();
        let time_varying = matches!(self.weight, CarlemanWeight::Convexified { .. });
        // per-axis constant factors for the linear weight
        let mut fplus = [0.0f64; 4];
        let mut fminus = [0.0f64; 4];
        for k in 0..grid.dims() {
            fplus[k] = self.factor(k, grid.spacing(k), 0.0);
            fminus[k] = self.factor(k, -grid.spacing(k), 0.0);
        }
        for f in 0..grid.total_nodes() {
            let idx = grid.decode(f);
            let t = grid.coord(0, idx[0]);
            let (gp, gm) = if time_varying {
                (self.factor(0, dt, t), self.factor(0, -dt, t))
            } else {
                (fplus[0], fminus[0])
            };
            let up = if idx[0] + 1 < grid.nt() { vals[f + grid.strides()[0]] } else { T::zero() };
            let um = if idx[0] > 0 { vals[f - grid.strides()[0]] } else { T::zero() };
            let mut acc =
                (up.scale(gp) - vals[f].scale(2.0) + um.scale(gm)).scale(h2 / (dt * dt));
            for a in 0..grid.n() {
                let k = 1 + a;
                let s = grid.strides()[k];
                let d = grid.dx()[a];
                let vp = if idx[k] + 1 < grid.shape(k) { vals[f + s] } else { T::zero() };
                let vm = if idx[k] > 0 { vals[f - s] } else { T::zero() };
                acc = acc
                    - (vp.scale(fplus[k]) - vals[f].scale(2.0) + vm.scale(fminus[k]))
                        .scale(h2 / (d * d));
            }
            dst[f] = acc;
        }
        Ok(out)
    }

    /// Fused `e^{-σw/h} ∂_axis (e^{σw/h} u)` (centered), times nothing.
    pub fn derivative_apply<T: Scalar>(&self, u: &Field<T>, axis: usize) -> Result<Field<T>> {
        u.ensure_scalar()?;
        let grid = u.grid().clone();
        let vals = u.component(0);
        let mut out = Field::zeros(&grid, 1);
        let dst = out.component_mut(0);
        let d = grid.spacing(axis);
        let s = grid.strides()[axis];
        let time_varying = axis == 0 && matches!(self.weight, CarlemanWeight::Convexified { .. });
        let fp0 = self.factor(axis, d, 0.0);
        let fm0 = self.factor(axis, -d, 0.0);
        for f in 0..grid.total_nodes() {
            let idx = grid.decode(f);
            let (fp, fm) = if time_varying {
                let t = grid.coord(0, idx[0]);
                (self.factor(axis, d, t), self.factor(axis, -d, t))
            } else {
                (fp0, fm0)
            };
            let vp = if idx[axis] + 1 < grid.shape(axis) { vals[f + s] } else { T::zero() };
            let vm = if idx[axis] > 0 { vals[f - s] } else { T::zero() };
            dst[f] = (vp.scale(fp) - vm.scale(fm)).scale(0.5 / d);
        }
        Ok(out)
    }

    /// Fused `h⁴ e^{-σw/h} 𝓛_{A,B,C,q} (e^{σw/h} u)`:
    /// `(h²□_w)²u + h²A(h²□_w u) + h⁴(B ∂t_w u + C·∇_w u + q u)`.
    pub fn biwave_apply<T: Scalar>(&self, coeffs: &CoefficientSet, u: &Field<T>) -> Result<Field<T>> {
        u.ensure_scalar()?;
        coeffs.ensure_grid(u.grid())?;
        let grid = u.grid().clone();
        let nn = grid.total_nodes();
        let pw = self.wave_apply(u)?;
        let pww = self.wave_apply(&pw)?;
        let h2 = self.h * self.h;
        let h4 = h2 * h2;
        let mut out = pww;
        {
            let dst = out.values_mut();
            let a = coeffs.a().component(0);
            let q = coeffs.q().component(0);
            let pwv = pw.component(0);
            let uv = u.component(0);
            for f in 0..nn {
                dst[f] = dst[f] + pwv[f].scale(h2 * a[f]) + uv[f].scale(h4 * q[f]);
            }
        }
        let dt_w = self.derivative_apply(u, 0)?;
        {
            let dst = out.values_mut();
            let b = coeffs.b().component(0);
            let dv = dt_w.component(0);
            for f in 0..nn {
                dst[f] = dst[f] + dv[f].scale(h4 * b[f]);
            }
        }
        for ax in 0..grid.n() {
            let dx_w = self.derivative_apply(u, 1 + ax)?;
            let dst = out.values_mut();
            let c = coeffs.c(ax).component(0);
            let dv = dx_w.component(0);
            for f in 0..nn {
                dst[f] = dst[f] + dv[f].scale(h4 * c[f]);
            }
        }
        Ok(out)
    }

    /// Guard used by the Carleman probes: compactly-supported inputs must
    /// vanish on the boundary layer of the grid, otherwise the implicit zero
    /// extension misrepresents the function.
    pub fn ensure_compact_support<T: Scalar>(&self, u: &Field<T>, tol: f64) -> Result<()> {
        let grid = u.grid();
        for f in 0..grid.total_nodes() {
            let idx = grid.decode(f);
            if grid.classify(&idx) != NodeClass::Interior && u.at(0, f).abs_sq().sqrt() > tol {
                return Err(CoreError::SupportTouchesBoundary(idx[..grid.dims()].to_vec()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::RealField;
    use crate::grid::SpaceTimeGrid;
    use crate::synth;

    #[test]
    fn zero_order_symbol_vanishes_for_linear_unit_weight() {
        let dir = Direction::new(&[0.6, 0.8]).unwrap();
        let w = CarlemanWeight::Linear;
        for t in [0.0, 0.3, 1.0] {
            assert_eq!(w.zero_order_symbol(&dir, 0.2, t), 0.0);
        }
        let we = CarlemanWeight::Convexified { eps: 0.25 };
        assert!(we.zero_order_symbol(&dir, 0.2, 0.5) != 0.0);
    }

    #[test]
    fn fused_equals_unwound_definition() {
        // conjugate_apply(e^{-φ/h}·bump) = e^{-φ/h}·(h²□ bump) node-wise:
        // feed v = e^{-σφ/h} w, compare against e^{-σφ/h}·h²□w.
        let g = SpaceTimeGrid::new(1.0, &[(0.0, 1.0)], 21, &[21]).unwrap();
        let dir = Direction::new(&[1.0]).unwrap();
        let h = 0.5;
        let conj = Conjugation::growing(dir.clone(), h, CarlemanWeight::Linear).unwrap();
        let bump = synth::centered_bump(&g, 0.6);
        let w = RealField::from_fn(&g, |p| bump(p));
        let v = RealField::from_fn(&g, |p| (-dir.phi(p) / h).exp() * bump(p));
        let lhs = conj.wave_apply(&v).unwrap();
        // h²□w with the same zero-extension reads: interior of support only
        let boxw = crate::stencil::apply_dalembertian(&w).unwrap();
        for f in 0..g.total_nodes() {
            let idx = g.decode(f);
            if !g.is_interior(&idx) {
                continue;
            }
            let p = g.point(&idx);
            let expect = (-dir.phi(&p) / h).exp() * h * h * boxw.component(0)[f];
            let got = lhs.component(0)[f];
            let scale = expect.abs().max(1e-30);
            assert!(
                (got - expect).abs() <= 1e-10 * scale.max(1.0),
                "node {idx:?}: got {got}, expect {expect}"
            );
        }
    }

    #[test]
    fn support_guard_fires() {
        let g = SpaceTimeGrid::new(1.0, &[(0.0, 1.0)], 9, &[9]).unwrap();
        let u = RealField::from_fn(&g, |_| 1.0);
        let conj = Conjugation::growing(Direction::new(&[1.0]).unwrap(), 0.3, CarlemanWeight::Linear)
            .unwrap();
        assert!(conj.ensure_compact_support(&u, 1e-12).is_err());
    }
}

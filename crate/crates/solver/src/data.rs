//! Input tuple of the IBVP: Dirichlet pair `(f, g)` on Σ held as full-shape
//! trace fields, and the four initial traces `ψ₀..ψ₃` as spatial slices.

use crate::error::{Result, SolverError};
use bwlab_core::field::{Field, Scalar};
use bwlab_core::grid::{NodeClass, SpaceTimeGrid};
use bwlab_core::stencil;
use std::sync::Arc;

/// Tolerance multiplier for the discrete compatibility checks.
pub const COMPAT_TOL_FACTOR: f64 = 200.0;

#[derive(Debug, Clone)]
pub struct IbvpData<T: Scalar> {
    grid: Arc<SpaceTimeGrid>,
    /// Dirichlet trace of `u` on Σ (values read on lateral nodes only).
    pub f: Field<T>,
    /// Dirichlet trace of `□u` on Σ.
    pub g: Field<T>,
    /// Initial traces `∂t^k u|_{t=0}`, k = 0..3, as spatial arrays.
    pub psi: [Vec<T>; 4],
}

impl<T: Scalar> IbvpData<T> {
    pub fn zeros(grid: &Arc<SpaceTimeGrid>) -> Self {
        let spatial: usize = grid.nx().iter().product();
        Self {
            grid: grid.clone(),
            f: Field::zeros(grid, 1),
            g: Field::zeros(grid, 1),
            psi: std::array::from_fn(|_| vec![T::zero(); spatial]),
        }
    }

    pub fn grid(&self) -> &Arc<SpaceTimeGrid> {
        &self.grid
    }

    pub fn spatial_len(&self) -> usize {
        self.grid.nx().iter().product()
    }

    /// Build the tuple from closures for `u`, `∂t^k u` and `□u` traces.
    pub fn from_closures(
        grid: &Arc<SpaceTimeGrid>,
        u: impl Fn(&[f64]) -> T,
        dtk_u: impl Fn(usize, &[f64]) -> T,
        box_u: impl Fn(&[f64]) -> T,
    ) -> Self {
        let mut data = Self::zeros(grid);
        data.f = Field::from_fn(grid, &u);
        data.g = Field::from_fn(grid, &box_u);
        let spatial = data.spatial_len();
        for k in 0..4 {
            for s in 0..spatial {
                let idx = grid.decode(s); // it = 0 block is the leading slab
                let p = grid.point(&idx);
                data.psi[k][s] = dtk_u(k, &p[..grid.dims()]);
            }
        }
        data
    }

    /// Extract the tuple from a field given on an extension of `q_grid`
    /// (halo ≥ 2), using centered stencils for the time derivatives and the
    /// d'Alembertian trace.
    pub fn extract_from_extended(u_ext: &Field<T>, q_grid: &Arc<SpaceTimeGrid>) -> Result<Self> {
        u_ext.ensure_scalar()?;
        let ext = u_ext.grid().clone();
        let off = ext.embed_offsets(q_grid)?;
        let mut data = Self::zeros(q_grid);
        let w_ext = stencil::apply_dalembertian(u_ext)?;
        let vals = u_ext.component(0);
        let wvals = w_ext.component(0);
        let st = ext.strides()[0];
        let dt = ext.dt();

        // Dirichlet traces over all of Q (only lateral nodes are consumed)
        for flat in 0..q_grid.total_nodes() {
            let idx = q_grid.decode(flat);
            let mut eidx = idx;
            for k in 0..q_grid.dims() {
                eidx[k] += off[k];
            }
            let ef = ext.flat(&eidx);
            data.f.set(0, flat, vals[ef]);
            data.g.set(0, flat, wvals[ef]);
        }
        // initial traces via centered time stencils on the extension
        let spatial = data.spatial_len();
        for s in 0..spatial {
            let idx = q_grid.decode(s);
            let mut eidx = idx;
            eidx[0] = off[0];
            for a in 0..q_grid.n() {
                eidx[1 + a] += off[1 + a];
            }
            let ef = ext.flat(&eidx);
            let um2 = vals[ef - 2 * st];
            let um1 = vals[ef - st];
            let u0 = vals[ef];
            let up1 = vals[ef + st];
            let up2 = vals[ef + 2 * st];
            data.psi[0][s] = u0;
            data.psi[1][s] = (up1 - um1).scale(0.5 / dt);
            data.psi[2][s] = (up1 - u0.scale(2.0) + um1).scale(1.0 / (dt * dt));
            data.psi[3][s] =
                (up2 - up1.scale(2.0) + um1.scale(2.0) - um2).scale(0.5 / (dt * dt * dt));
        }
        Ok(data)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            f: self.f.scaled(s),
            g: self.g.scaled(s),
            psi: std::array::from_fn(|k| self.psi[k].iter().map(|v| v.scale(s)).collect()),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.f.ensure_same_grid(&other.f).map_err(SolverError::Core)?;
        Ok(Self {
            grid: self.grid.clone(),
            f: self.f.add_field(&other.f)?,
            g: self.g.add_field(&other.g)?,
            psi: std::array::from_fn(|k| {
                self.psi[k].iter().zip(&other.psi[k]).map(|(a, b)| *a + *b).collect()
            }),
        })
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = self.f.linf().max(self.g.linf());
        for psi in &self.psi {
            for v in psi {
                m = m.max(v.abs_sq().sqrt());
            }
        }
        m
    }

    /// Check the discrete compatibility conditions
    /// `(ψ₀, ψ₂-Δψ₀)|∂Ω = (f,g)|t=0` and `(ψ₁, ψ₃-Δψ₁)|∂Ω = ∂t(f,g)|t=0`.
    pub fn check_compatibility(&self) -> Result<()> {
        let grid = &self.grid;
        let scale = self.max_abs().max(1.0);
        let tol = COMPAT_TOL_FACTOR * grid.truncation_scale() * scale;
        // spatial fields for the Laplacians
        let mut psi0 = Field::zeros(grid, 1);
        let mut psi1 = Field::zeros(grid, 1);
        let spatial = self.spatial_len();
        for s in 0..spatial {
            psi0.set(0, s, self.psi[0][s]);
            psi1.set(0, s, self.psi[1][s]);
        }
        // first-order-in-time differences of the boundary data
        let st = grid.strides()[0];
        let dt = grid.dt();
        let mut worst: (f64, &str) = (0.0, "");
        for s in 0..spatial {
            let idx = grid.decode(s);
            if grid.classify(&idx) != NodeClass::Lateral {
                continue;
            }
            let fv = self.f.component(0);
            let gv = self.g.component(0);
            let d0 = (self.psi[0][s] - fv[s]).abs_sq().sqrt();
            if d0 > worst.0 {
                worst = (d0, "psi0 vs f(0)");
            }
            // ∂t f|0 by one-sided stencil
            let dtf = (fv[s].scale(-3.0) + fv[s + st].scale(4.0) - fv[s + 2 * st])
                .scale(1.0 / (2.0 * dt));
            let d1 = (self.psi[1][s] - dtf).abs_sq().sqrt();
            if d1 > worst.0 {
                worst = (d1, "psi1 vs dt f(0)");
            }
            let dtg = (gv[s].scale(-3.0) + gv[s + st].scale(4.0) - gv[s + 2 * st])
                .scale(1.0 / (2.0 * dt));
            // Laplacians of ψ₀/ψ₁ at lateral nodes need one-sided stencils;
            // compare the pair (ψ₂-Δψ₀, ψ₃-Δψ₁) against (g, ∂t g) there.
            let lap0 = one_sided_spatial_laplacian(&psi0, s);
            let lap1 = one_sided_spatial_laplacian(&psi1, s);
            let d2 = ((self.psi[2][s] - lap0) - gv[s]).abs_sq().sqrt();
            if d2 > worst.0 {
                worst = (d2, "psi2 - lap psi0 vs g(0)");
            }
            let d3 = ((self.psi[3][s] - lap1) - dtg).abs_sq().sqrt();
            if d3 > worst.0 {
                worst = (d3, "psi3 - lap psi1 vs dt g(0)");
            }
        }
        if worst.0 > tol {
            return Err(SolverError::Compatibility {
                which: worst.1.to_string(),
                defect: worst.0,
                tol,
            });
        }
        Ok(())
    }
}

fn one_sided_spatial_laplacian<T: Scalar>(field: &Field<T>, flat: usize) -> T {
    let grid = field.grid();
    let idx = grid.decode(flat);
    let vals = field.component(0);
    let mut acc = T::zero();
    for a in 0..grid.n() {
        let k = 1 + a;
        let s = grid.strides()[k];
        let m = grid.shape(k);
        let d2 = grid.dx()[a] * grid.dx()[a];
        let i = idx[k];
        let v = if i == 0 {
            (vals[flat].scale(2.0) - vals[flat + s].scale(5.0) + vals[flat + 2 * s].scale(4.0)
                - vals[flat + 3 * s])
            .scale(1.0 / d2)
        } else if i == m - 1 {
            (vals[flat].scale(2.0) - vals[flat - s].scale(5.0) + vals[flat - 2 * s].scale(4.0)
                - vals[flat - 3 * s])
            .scale(1.0 / d2)
        } else {
            (vals[flat + s] - vals[flat].scale(2.0) + vals[flat - s]).scale(1.0 / d2)
        };
        acc = acc + v;
    }
    acc
}

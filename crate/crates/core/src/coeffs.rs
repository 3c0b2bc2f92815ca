//! The coefficient quadruple `(A, B, C, q)` of the perturbed bi-wave operator,
//! sampled on one grid. `C` is a spatial n-vector field stored per component.

use crate::error::{CoreError, Result};
use crate::field::RealField;
use crate::grid::SpaceTimeGrid;
use crate::quadrature::{for_each_face_node, BoundaryRegion};
use std::sync::Arc;

/// Smoothness class actually sampled (informational tag).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegularityTag {
    Smooth,
    W3,
    W2,
    LInfty,
}

/// Whether the traces needed by the uniqueness theorem vanish on Σ:
/// `∂ν^k A (k=0,1)`, `B`, `C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCompatibility {
    pub a_vanishes: bool,
    pub a_normal_vanishes: bool,
    pub b_vanishes: bool,
    pub c_vanishes: bool,
}

#[derive(Debug, Clone)]
pub struct CoefficientSet {
    grid: Arc<SpaceTimeGrid>,
    a: RealField,
    b: RealField,
    c: Vec<RealField>,
    q: RealField,
    pub regularity: RegularityTag,
}

impl CoefficientSet {
    pub fn new(a: RealField, b: RealField, c: Vec<RealField>, q: RealField) -> Result<Self> {
        let grid = a.grid().clone();
        for f in [&b, &q].into_iter().chain(c.iter()) {
            if !f.grid().same_as(&grid) {
                return Err(CoreError::GridMismatch("coefficient fields on different grids".into()));
            }
            f.ensure_scalar()?;
        }
        a.ensure_scalar()?;
        if c.len() != grid.n() {
            return Err(CoreError::RankMismatch { expected: grid.n(), actual: c.len() });
        }
        Ok(Self { grid, a, b, c, q, regularity: RegularityTag::Smooth })
    }

    pub fn zeros(grid: &Arc<SpaceTimeGrid>) -> Self {
        Self {
            grid: grid.clone(),
            a: RealField::zeros(grid, 1),
            b: RealField::zeros(grid, 1),
            c: (0..grid.n()).map(|_| RealField::zeros(grid, 1)).collect(),
            q: RealField::zeros(grid, 1),
            regularity: RegularityTag::Smooth,
        }
    }

    /// Sample from closures of the space-time point.
    pub fn from_fns(
        grid: &Arc<SpaceTimeGrid>,
        fa: impl Fn(&[f64]) -> f64,
        fb: impl Fn(&[f64]) -> f64,
        fc: impl Fn(usize, &[f64]) -> f64,
        fq: impl Fn(&[f64]) -> f64,
    ) -> Self {
        Self {
            grid: grid.clone(),
            a: RealField::from_fn(grid, &fa),
            b: RealField::from_fn(grid, &fb),
            c: (0..grid.n()).map(|ax| RealField::from_fn(grid, |p| fc(ax, p))).collect(),
            q: RealField::from_fn(grid, &fq),
            regularity: RegularityTag::Smooth,
        }
    }

    pub fn grid(&self) -> &Arc<SpaceTimeGrid> {
        &self.grid
    }

    pub fn a(&self) -> &RealField {
        &self.a
    }

    pub fn b(&self) -> &RealField {
        &self.b
    }

    pub fn c(&self, axis: usize) -> &RealField {
        &self.c[axis]
    }

    pub fn c_all(&self) -> &[RealField] {
        &self.c
    }

    pub fn q(&self) -> &RealField {
        &self.q
    }

    pub fn ensure_grid(&self, grid: &Arc<SpaceTimeGrid>) -> Result<()> {
        if !self.grid.same_as(grid) {
            return Err(CoreError::GridMismatch("coefficients sampled on a different grid".into()));
        }
        Ok(())
    }

    /// Pointwise difference `other - self`, the object the inverse problem sees.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.ensure_grid(&other.grid)?;
        Ok(Self {
            grid: self.grid.clone(),
            a: other.a.sub_field(&self.a)?,
            b: other.b.sub_field(&self.b)?,
            c: self
                .c
                .iter()
                .zip(&other.c)
                .map(|(x, y)| y.sub_field(x))
                .collect::<Result<Vec<_>>>()?,
            q: other.q.sub_field(&self.q)?,
            regularity: self.regularity,
        })
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = self.a.linf().max(self.b.linf()).max(self.q.linf());
        for cf in &self.c {
            m = m.max(cf.linf());
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    /// Check the boundary-compatibility traces to tolerance `tol`.
    pub fn boundary_compatibility(&self, tol: f64) -> Result<BoundaryCompatibility> {
        let mut max_a: f64 = 0.0;
        let mut max_b: f64 = 0.0;
        let mut max_c: f64 = 0.0;
        for face in self.grid.faces() {
            for_each_face_node(&self.grid, &face, |f, _| {
                max_a = max_a.max(self.a.component(0)[f].abs());
                max_b = max_b.max(self.b.component(0)[f].abs());
                for cf in &self.c {
                    max_c = max_c.max(cf.component(0)[f].abs());
                }
            });
        }
        let dn_a = crate::stencil::normal_derivative_sigma(&self.a)?;
        let mut max_dna: f64 = 0.0;
        for face in self.grid.faces() {
            for_each_face_node(&self.grid, &face, |f, _| {
                max_dna = max_dna.max(dn_a.component(0)[f].abs());
            });
        }
        Ok(BoundaryCompatibility {
            a_vanishes: max_a <= tol,
            a_normal_vanishes: max_dna <= tol,
            b_vanishes: max_b <= tol,
            c_vanishes: max_c <= tol,
        })
    }

    /// Largest |coefficient| on a boundary region (used by hypothesis checks).
    pub fn max_on_region(&self, region: &BoundaryRegion) -> f64 {
        let mut m: f64 = 0.0;
        for face in region.faces(&self.grid) {
            for_each_face_node(&self.grid, &face, |f, _| {
                m = m.max(self.a.component(0)[f].abs());
                m = m.max(self.b.component(0)[f].abs());
                m = m.max(self.q.component(0)[f].abs());
                for cf in &self.c {
                    m = m.max(cf.component(0)[f].abs());
                }
            });
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compat_flags_for_compact_coefficients() {
        // support must stay ≥ 2 cells away from Σ so the one-sided normal
        // stencil never reaches into it
        let g = SpaceTimeGrid::new(1.0, &[(0.0, 1.0), (0.0, 1.0)], 17, &[17, 17]).unwrap();
        let bump = |s: f64| if s.abs() < 1.0 { (1.0 - 1.0 / (1.0 - s * s)).exp() } else { 0.0 };
        let cs = CoefficientSet::from_fns(
            &g,
            |p| bump((p[1] - 0.5) * 4.0) * bump((p[2] - 0.5) * 4.0),
            |_| 0.0,
            |_, _| 0.0,
            |_| 0.0,
        );
        let compat = cs.boundary_compatibility(1e-10).unwrap();
        assert!(compat.a_vanishes && compat.a_normal_vanishes && compat.b_vanishes && compat.c_vanishes);

        let bad = CoefficientSet::from_fns(&g, |p| p[1], |_| 0.0, |_, _| 0.0, |_| 0.0);
        let compat = bad.boundary_compatibility(1e-10).unwrap();
        assert!(!compat.a_vanishes);
    }
}

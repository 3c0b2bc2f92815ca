//! Trapezoidal quadrature over `Q`, the lateral boundary `Σ` (face by face),
//! `Ω`-slices at a fixed time, and direction-dependent boundary subsets
//! (`Σ±,ω`, the measured patch `G` and its complement). Weights are exact for
//! constants. All reductions use the fixed-tree deterministic sum.

use crate::direction::Direction;
use crate::error::{CoreError, Result};
use crate::field::{Field, Scalar};
use crate::grid::{Face, NodeIndex, SpaceTimeGrid, MAX_DIMS};
use crate::reduce::indexed_sum;
use std::sync::Arc;

/// Subsets of the lateral boundary, decided per box face by its normal.
#[derive(Debug, Clone)]
pub enum BoundaryRegion {
    /// All of Σ.
    All,
    /// `G = {x ∈ ∂Ω : ν(x)·ω₀ < margin}` — an open neighborhood of the
    /// ω₀-illuminated face; `margin` defaults to 0.1.
    G { omega0: Direction, margin: f64 },
    /// Σ \ G.
    Complement { omega0: Direction, margin: f64 },
    /// Shadowed part `Σ₊,ω` (ν·ω ≥ 0).
    Plus(Direction),
    /// Illuminated part `Σ₋,ω` (ν·ω < 0).
    Minus(Direction),
    /// Strictly shadowed `Σ₊,ε,ω` (ν·ω > ε).
    PlusStrict { dir: Direction, eps: f64 },
}

pub const DEFAULT_G_MARGIN: f64 = 0.1;

impl BoundaryRegion {
    pub fn contains_face(&self, face: &Face) -> bool {
        match self {
            BoundaryRegion::All => true,
            BoundaryRegion::G { omega0, margin } => face.normal_dot(omega0.omega()) < *margin,
            BoundaryRegion::Complement { omega0, margin } => {
                face.normal_dot(omega0.omega()) >= *margin
            }
            BoundaryRegion::Plus(d) => face.normal_dot(d.omega()) >= 0.0,
            BoundaryRegion::Minus(d) => face.normal_dot(d.omega()) < 0.0,
            BoundaryRegion::PlusStrict { dir, eps } => face.normal_dot(dir.omega()) > *eps,
        }
    }

    pub fn faces(&self, grid: &SpaceTimeGrid) -> Vec<Face> {
        grid.faces().into_iter().filter(|f| self.contains_face(f)).collect()
    }
}

/// Integration region for the generic `quadrature` entry point.
#[derive(Debug, Clone)]
pub enum Region {
    Q,
    Sigma(BoundaryRegion),
    /// Ω × {t_index}.
    OmegaSlice(usize),
}

#[inline]
fn axis_weight(grid: &SpaceTimeGrid, k: usize, i: usize) -> f64 {
    let w = if i == 0 || i == grid.shape(k) - 1 { 0.5 } else { 1.0 };
    w * grid.spacing(k)
}

/// Trapezoid weight of a node for the full space-time measure.
#[inline]
pub fn node_weight_q(grid: &SpaceTimeGrid, idx: &NodeIndex) -> f64 {
    let mut w = 1.0;
    for k in 0..grid.dims() {
        w *= axis_weight(grid, k, idx[k]);
    }
    w
}

/// ∫_Q u dx dt.
pub fn integrate_q<T: Scalar>(u: &Field<T>) -> Result<T> {
    u.ensure_scalar()?;
    let grid = u.grid().clone();
    let vals = u.component(0);
    Ok(indexed_sum(grid.total_nodes(), |f| {
        let idx = grid.decode(f);
        vals[f].scale(node_weight_q(&grid, &idx))
    }))
}

/// ∫_Q u(y) conj(v(y)) dy.
pub fn inner_q<T: Scalar>(u: &Field<T>, v: &Field<T>) -> Result<T> {
    u.ensure_scalar()?;
    v.ensure_scalar()?;
    u.ensure_same_grid(v)?;
    let grid = u.grid().clone();
    let a = u.component(0);
    let b = v.component(0);
    Ok(indexed_sum(grid.total_nodes(), |f| {
        let idx = grid.decode(f);
        (a[f] * b[f].conj()).scale(node_weight_q(&grid, &idx))
    }))
}

/// sqrt(∫_Q |u|²) over all components.
pub fn l2_norm_q<T: Scalar>(u: &Field<T>) -> f64 {
    let grid = u.grid().clone();
    let nn = grid.total_nodes();
    let mut total = 0.0;
    for c in 0..u.ncomp() {
        let vals = u.component(c);
        total += indexed_sum(nn, |f| {
            let idx = grid.decode(f);
            vals[f].abs_sq() * node_weight_q(&grid, &idx)
        });
    }
    total.sqrt()
}

/// ∫_Ω u(t_i, ·) dx at a fixed time index.
pub fn integrate_omega_slice<T: Scalar>(u: &Field<T>, it: usize) -> Result<T> {
    u.ensure_scalar()?;
    let grid = u.grid().clone();
    if it >= grid.nt() {
        return Err(CoreError::EmptyRegion(format!("slice index {it} out of range")));
    }
    let vals = u.component(0);
    let spatial_nodes: usize = grid.nx().iter().product();
    Ok(indexed_sum(spatial_nodes, |s| {
        // decode spatial index
        let mut idx: NodeIndex = [0; MAX_DIMS];
        idx[0] = it;
        let mut r = s;
        for a in (0..grid.n()).rev() {
            idx[1 + a] = r % grid.nx()[a];
            r /= grid.nx()[a];
        }
        let mut w = 1.0;
        for a in 0..grid.n() {
            w *= axis_weight(&grid, 1 + a, idx[1 + a]);
        }
        vals[grid.flat(&idx)].scale(w)
    }))
}

/// Iterate the nodes of one lateral face at all times; `body(flat, weight)`.
/// The weight is the surface measure `dS_x dt` (time and in-face axes).
pub fn for_each_face_node<F>(grid: &SpaceTimeGrid, face: &Face, mut body: F)
where
    F: FnMut(usize, f64),
{
    let fixed_axis = 1 + face.axis;
    let fixed_idx = match face.side {
        crate::grid::Side::Lo => 0,
        crate::grid::Side::Hi => grid.nx()[face.axis] - 1,
    };
    // varying axes = all except fixed_axis
    let varying: Vec<usize> = (0..grid.dims()).filter(|&k| k != fixed_axis).collect();
    let counts: Vec<usize> = varying.iter().map(|&k| grid.shape(k)).collect();
    let total: usize = counts.iter().product();
    let mut idx: NodeIndex = [0; MAX_DIMS];
    idx[fixed_axis] = fixed_idx;
    for flat_face in 0..total {
        let mut r = flat_face;
        for (vi, &k) in varying.iter().enumerate().rev() {
            idx[k] = r % counts[vi];
            r /= counts[vi];
        }
        let mut w = 1.0;
        for &k in &varying {
            w *= axis_weight(grid, k, idx[k]);
        }
        body(grid.flat(&idx), w);
    }
}

/// ∫ over a boundary region of u (face-by-face trapezoid).
pub fn integrate_sigma<T: Scalar>(u: &Field<T>, region: &BoundaryRegion) -> Result<T> {
    u.ensure_scalar()?;
    let grid = u.grid().clone();
    let faces = region.faces(&grid);
    if faces.is_empty() {
        return Err(CoreError::EmptyRegion("boundary region selects no face".into()));
    }
    let vals = u.component(0);
    let mut acc = T::zero();
    for face in &faces {
        let mut partial = Vec::new();
        for_each_face_node(&grid, face, |flat, w| partial.push(vals[flat].scale(w)));
        acc = acc + crate::reduce::pairwise_fold(partial);
    }
    Ok(acc)
}

/// ∫ over a boundary region of u·conj(v).
pub fn inner_sigma<T: Scalar>(u: &Field<T>, v: &Field<T>, region: &BoundaryRegion) -> Result<T> {
    u.ensure_scalar()?;
    v.ensure_scalar()?;
    u.ensure_same_grid(v)?;
    let grid = u.grid().clone();
    let faces = region.faces(&grid);
    if faces.is_empty() {
        return Err(CoreError::EmptyRegion("boundary region selects no face".into()));
    }
    let a = u.component(0);
    let b = v.component(0);
    let mut acc = T::zero();
    for face in &faces {
        let mut partial = Vec::new();
        for_each_face_node(&grid, face, |flat, w| partial.push((a[flat] * b[flat].conj()).scale(w)));
        acc = acc + crate::reduce::pairwise_fold(partial);
    }
    Ok(acc)
}

/// ∫_Ω u(T_index)·conj(v(T_index)) dx.
pub fn inner_omega_slice<T: Scalar>(u: &Field<T>, v: &Field<T>, it: usize) -> Result<T> {
    u.ensure_scalar()?;
    v.ensure_scalar()?;
    u.ensure_same_grid(v)?;
    let grid = u.grid().clone();
    if it >= grid.nt() {
        return Err(CoreError::EmptyRegion(format!("slice index {it} out of range")));
    }
    let a = u.component(0);
    let b = v.component(0);
    let spatial_nodes: usize = grid.nx().iter().product();
    Ok(indexed_sum(spatial_nodes, |s| {
        let mut idx: NodeIndex = [0; MAX_DIMS];
        idx[0] = it;
        let mut r = s;
        for ax in (0..grid.n()).rev() {
            idx[1 + ax] = r % grid.nx()[ax];
            r /= grid.nx()[ax];
        }
        let mut w = 1.0;
        for ax in 0..grid.n() {
            w *= axis_weight(&grid, 1 + ax, idx[1 + ax]);
        }
        let f = grid.flat(&idx);
        (a[f] * b[f].conj()).scale(w)
    }))
}

/// Generic entry point mirroring the region menu.
pub fn quadrature<T: Scalar>(u: &Field<T>, region: &Region) -> Result<T> {
    match region {
        Region::Q => integrate_q(u),
        Region::Sigma(r) => integrate_sigma(u, r),
        Region::OmegaSlice(it) => integrate_omega_slice(u, *it),
    }
}

/// Surface area (measure) of a boundary region — handy for diagnostics.
pub fn region_measure(grid: &Arc<SpaceTimeGrid>, region: &BoundaryRegion) -> Result<f64> {
    let one = Field::<f64>::from_fn(grid, |_| 1.0);
    integrate_sigma(&one, region)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::RealField;

    fn grid2() -> Arc<SpaceTimeGrid> {
        SpaceTimeGrid::new(1.0, &[(0.0, 1.0), (0.0, 1.0)], 9, &[9, 9]).unwrap()
    }

    #[test]
    fn constants_are_exact_on_q() {
        let g = grid2();
        let one = RealField::from_fn(&g, |_| 1.0);
        let v = integrate_q(&one).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sigma_perimeter_times_t() {
        let g = grid2();
        let one = RealField::from_fn(&g, |_| 1.0);
        let v = integrate_sigma(&one, &BoundaryRegion::All).unwrap();
        assert!((v - 4.0).abs() < 1e-13, "got {v}");
    }

    #[test]
    fn omega_slice_of_constant() {
        let g = grid2();
        let one = RealField::from_fn(&g, |_| 1.0);
        let v = integrate_omega_slice(&one, 3).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bump_against_refined_oracle() {
        // smooth compactly supported bump on a coarse grid vs 4x refinement
        let f = |p: &[f64]| {
            crate::synth::bump1((p[0] - 0.5) * 2.2)
                * crate::synth::bump1((p[1] - 0.5) * 2.2)
                * crate::synth::bump1((p[2] - 0.5) * 2.2)
        };
        let coarse = SpaceTimeGrid::new(1.0, &[(0.0, 1.0), (0.0, 1.0)], 33, &[33, 33]).unwrap();
        let fine = SpaceTimeGrid::new(1.0, &[(0.0, 1.0), (0.0, 1.0)], 129, &[129, 129]).unwrap();
        let a = integrate_q(&RealField::from_fn(&coarse, f)).unwrap();
        let b = integrate_q(&RealField::from_fn(&fine, f)).unwrap();
        assert!((a - b).abs() / b.abs() < 1e-4, "rel err {}", (a - b).abs() / b.abs());
    }

    #[test]
    fn product_with_conjugate_is_real_nonnegative() {
        use crate::C64;
        let g = grid2();
        let u = Field::<C64>::from_fn(&g, |p| C64::new((3.0 * p[0]).sin(), (2.0 * p[1]).cos()));
        let v = inner_q(&u, &u).unwrap();
        assert!(v.im.abs() < 1e-14 * v.re.abs());
        assert!(v.re >= 0.0);
    }

    #[test]
    fn g_region_faces() {
        let g = grid2();
        let d = Direction::new(&[1.0, 0.0]).unwrap();
        let region = BoundaryRegion::G { omega0: d.clone(), margin: 0.1 };
        let faces = region.faces(&g);
        // illuminated face x1=lo (ν·ω=-1) plus tangential faces (ν·ω=0 < 0.1)
        assert_eq!(faces.len(), 3);
        let comp = BoundaryRegion::Complement { omega0: d, margin: 0.1 };
        assert_eq!(comp.faces(&g).len(), 1);
    }
}

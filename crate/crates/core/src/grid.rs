//! Uniform space-time grids on `Q = (t_lo, t_hi) × Ω`, `Ω` an axis-aligned box.
//!
//! Nodes include both endpoints on every axis. Storage is time-major:
//! the flat index of `(it, i1, .., in)` is `((it*nx1 + i1)*nx2 + i2)...`.
//! Each node is classified exactly once as interior, lateral (on `Σ`),
//! initial (`t = t_lo`) or final (`t = t_hi`); a node on the spatial
//! boundary is lateral regardless of its time index.

use crate::error::{CoreError, Result};
use std::sync::Arc;

/// Maximum of 1 time + 3 space axes.
pub const MAX_DIMS: usize = 4;

/// Fixed-size multi-index; only the first `dims()` entries are meaningful.
pub type NodeIndex = [usize; MAX_DIMS];
/// Fixed-size coordinate tuple `(t, x1, .., xn)`.
pub type Point = [f64; MAX_DIMS];

/// Classification of a grid node. Exactly one class per node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Interior,
    /// On the spatial boundary (lateral boundary Σ), any time level.
    Lateral,
    /// t = t_lo, spatial interior.
    Initial,
    /// t = t_hi, spatial interior.
    Final,
}

/// Which side of an axis a box face sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Lo,
    Hi,
}

/// One face of the spatial box: spatial axis index (0-based) and side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    pub axis: usize,
    pub side: Side,
}

impl Face {
    /// Outward unit normal of this face as a spatial n-vector (padded with 0).
    pub fn normal(&self, n: usize) -> [f64; 3] {
        debug_assert!(self.axis < n);
        let mut nu = [0.0; 3];
        nu[self.axis] = match self.side {
            Side::Lo => -1.0,
            Side::Hi => 1.0,
        };
        nu
    }

    /// `ν · ω` for this face.
    pub fn normal_dot(&self, omega: &[f64]) -> f64 {
        let s = match self.side {
            Side::Lo => -1.0,
            Side::Hi => 1.0,
        };
        s * omega[self.axis]
    }
}

/// Uniform discretization of a space-time box.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeGrid {
    n: usize,
    t_lo: f64,
    t_hi: f64,
    x_lo: Vec<f64>,
    x_hi: Vec<f64>,
    nt: usize,
    nx: Vec<usize>,
    dt: f64,
    dx: Vec<f64>,
    strides: [usize; MAX_DIMS],
    cfl: f64,
}

impl SpaceTimeGrid {
    /// Grid on `(0,T) × Ω` with `nt` time nodes and `nx[i]` nodes per spatial axis.
    pub fn new(t_final: f64, omega_box: &[(f64, f64)], nt: usize, nx: &[usize]) -> Result<Arc<Self>> {
        Self::with_origin(0.0, t_final, omega_box, nt, nx)
    }

    /// Grid on `(t_lo, t_hi) × Ω`; used directly for extended grids.
    pub fn with_origin(
        t_lo: f64,
        t_hi: f64,
        omega_box: &[(f64, f64)],
        nt: usize,
        nx: &[usize],
    ) -> Result<Arc<Self>> {
        let n = omega_box.len();
        if n == 0 || n > 3 {
            return Err(CoreError::InvalidGrid(format!("spatial dimension {n} not in 1..=3")));
        }
        if nx.len() != n {
            return Err(CoreError::InvalidGrid("nx length does not match omega_box".into()));
        }
        if nt < 3 {
            return Err(CoreError::GridTooSmall { axis: "t".into(), nodes: nt, min: 3 });
        }
        for (i, &m) in nx.iter().enumerate() {
            if m < 3 {
                return Err(CoreError::GridTooSmall { axis: format!("x{}", i + 1), nodes: m, min: 3 });
            }
        }
        if !(t_hi > t_lo) {
            return Err(CoreError::InvalidGrid(format!("empty time interval [{t_lo}, {t_hi}]")));
        }
        for (i, &(lo, hi)) in omega_box.iter().enumerate() {
            if !(hi > lo) {
                return Err(CoreError::InvalidGrid(format!("empty extent on axis x{}", i + 1)));
            }
        }
        let dt = (t_hi - t_lo) / (nt - 1) as f64;
        let dx: Vec<f64> = omega_box
            .iter()
            .zip(nx)
            .map(|(&(lo, hi), &m)| (hi - lo) / (m - 1) as f64)
            .collect();
        let cfl = dt * dx.iter().map(|&d| 1.0 / (d * d)).sum::<f64>().sqrt();

        let mut strides = [0usize; MAX_DIMS];
        let dims = 1 + n;
        strides[dims - 1] = 1;
        let shape = |k: usize| if k == 0 { nt } else { nx[k - 1] };
        for k in (0..dims - 1).rev() {
            strides[k] = strides[k + 1] * shape(k + 1);
        }

        Ok(Arc::new(Self {
            n,
            t_lo,
            t_hi,
            x_lo: omega_box.iter().map(|b| b.0).collect(),
            x_hi: omega_box.iter().map(|b| b.1).collect(),
            nt,
            nx: nx.to_vec(),
            dt,
            dx,
            strides,
            cfl,
        }))
    }

    /// Same box enlarged by `halo` cells on every side of every axis.
    /// Spacings are preserved exactly, so nodes of `self` coincide with
    /// nodes of the extension shifted by `halo`.
    pub fn extended(&self, halo: usize) -> Arc<Self> {
        let h = halo as f64;
        let omega_box: Vec<(f64, f64)> = (0..self.n)
            .map(|i| (self.x_lo[i] - h * self.dx[i], self.x_hi[i] + h * self.dx[i]))
            .collect();
        let mut g = Self::with_origin(
            self.t_lo - h * self.dt,
            self.t_hi + h * self.dt,
            &omega_box,
            self.nt + 2 * halo,
            &self.nx.iter().map(|&m| m + 2 * halo).collect::<Vec<_>>(),
        )
        .expect("extension of a valid grid is valid");
        // Guard against drift in the derived spacings.
        Arc::get_mut(&mut g).unwrap().dt = self.dt;
        Arc::get_mut(&mut g).unwrap().dx = self.dx.clone();
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of axes (1 + n).
    pub fn dims(&self) -> usize {
        1 + self.n
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn nx(&self) -> &[usize] {
        &self.nx
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dx(&self) -> &[f64] {
        &self.dx
    }

    pub fn t_lo(&self) -> f64 {
        self.t_lo
    }

    pub fn t_hi(&self) -> f64 {
        self.t_hi
    }

    pub fn t_extent(&self) -> f64 {
        self.t_hi - self.t_lo
    }

    pub fn x_lo(&self) -> &[f64] {
        &self.x_lo
    }

    pub fn x_hi(&self) -> &[f64] {
        &self.x_hi
    }

    /// Node count along full axis `k` (0 = time).
    pub fn shape(&self, k: usize) -> usize {
        if k == 0 {
            self.nt
        } else {
            self.nx[k - 1]
        }
    }

    /// Grid spacing along full axis `k` (0 = time).
    pub fn spacing(&self, k: usize) -> f64 {
        if k == 0 {
            self.dt
        } else {
            self.dx[k - 1]
        }
    }

    /// Lower coordinate of full axis `k`.
    pub fn origin(&self, k: usize) -> f64 {
        if k == 0 {
            self.t_lo
        } else {
            self.x_lo[k - 1]
        }
    }

    pub fn total_nodes(&self) -> usize {
        self.strides[0] * self.nt
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides[..self.dims()]
    }

    /// CFL number `dt * sqrt(Σ 1/dx_i²)`; must be < 1 for explicit stepping.
    pub fn cfl_number(&self) -> f64 {
        self.cfl
    }

    /// Largest spacing over all axes.
    pub fn max_spacing(&self) -> f64 {
        self.dx.iter().fold(self.dt, |a, &b| a.max(b))
    }

    /// Squared-truncation scale `dt² + Σ dx_i²` used in tolerance bounds.
    pub fn truncation_scale(&self) -> f64 {
        self.dt * self.dt + self.dx.iter().map(|d| d * d).sum::<f64>()
    }

    #[inline]
    pub fn flat(&self, idx: &NodeIndex) -> usize {
        let dims = self.dims();
        let mut f = 0usize;
        for k in 0..dims {
            debug_assert!(idx[k] < self.shape(k));
            f += idx[k] * self.strides[k];
        }
        f
    }

    #[inline]
    pub fn decode(&self, flat: usize) -> NodeIndex {
        let mut idx = [0usize; MAX_DIMS];
        let mut r = flat;
        for k in 0..self.dims() {
            idx[k] = r / self.strides[k];
            r %= self.strides[k];
        }
        idx
    }

    #[inline]
    pub fn coord(&self, k: usize, i: usize) -> f64 {
        self.origin(k) + i as f64 * self.spacing(k)
    }

    /// Coordinates `(t, x1, .., xn)` of a node.
    #[inline]
    pub fn point(&self, idx: &NodeIndex) -> Point {
        let mut p = [0.0; MAX_DIMS];
        for k in 0..self.dims() {
            p[k] = self.coord(k, idx[k]);
        }
        p
    }

    /// Exactly-once node classification.
    pub fn classify(&self, idx: &NodeIndex) -> NodeClass {
        for a in 0..self.n {
            let i = idx[1 + a];
            if i == 0 || i == self.nx[a] - 1 {
                return NodeClass::Lateral;
            }
        }
        if idx[0] == 0 {
            NodeClass::Initial
        } else if idx[0] == self.nt - 1 {
            NodeClass::Final
        } else {
            NodeClass::Interior
        }
    }

    /// True when the node is interior along every axis (one-node halo available).
    #[inline]
    pub fn is_interior(&self, idx: &NodeIndex) -> bool {
        for k in 0..self.dims() {
            if idx[k] == 0 || idx[k] == self.shape(k) - 1 {
                return false;
            }
        }
        true
    }

    /// All 2n spatial faces.
    pub fn faces(&self) -> Vec<Face> {
        let mut v = Vec::with_capacity(2 * self.n);
        for axis in 0..self.n {
            v.push(Face { axis, side: Side::Lo });
            v.push(Face { axis, side: Side::Hi });
        }
        v
    }

    /// Grids are compatible when all defining parameters agree.
    pub fn same_as(&self, other: &Self) -> bool {
        self == other
    }

    /// Node offset of `inner` within `self`, or an error if `inner` is not
    /// node-aligned inside `self` with identical spacings.
    pub fn embed_offsets(&self, inner: &Self) -> Result<NodeIndex> {
        if inner.n != self.n {
            return Err(CoreError::GridMismatch("different spatial dimension".into()));
        }
        let mut off = [0usize; MAX_DIMS];
        for k in 0..self.dims() {
            let ds = self.spacing(k);
            if (inner.spacing(k) - ds).abs() > 1e-12 * ds {
                return Err(CoreError::GridMismatch(format!("spacing differs on axis {k}")));
            }
            let shift = (inner.origin(k) - self.origin(k)) / ds;
            let r = shift.round();
            if (shift - r).abs() > 1e-8 || r < 0.0 {
                return Err(CoreError::GridMismatch(format!("origin not node-aligned on axis {k}")));
            }
            let o = r as usize;
            if o + inner.shape(k) > self.shape(k) {
                return Err(CoreError::GridMismatch(format!("inner grid exceeds outer on axis {k}")));
            }
            off[k] = o;
        }
        Ok(off)
    }

    /// Linear interpolation weights for an arbitrary point; returns `None`
    /// if the point lies outside the grid box (zero extension).
    #[inline]
    pub fn locate(&self, p: &[f64]) -> Option<(NodeIndex, [f64; MAX_DIMS])> {
        let mut base = [0usize; MAX_DIMS];
        let mut frac = [0.0; MAX_DIMS];
        for k in 0..self.dims() {
            let s = (p[k] - self.origin(k)) / self.spacing(k);
            // tolerate boundary round-off
            let eps = 1e-9;
            if s < -eps || s > (self.shape(k) - 1) as f64 + eps {
                return None;
            }
            let sc = s.clamp(0.0, (self.shape(k) - 1) as f64);
            let mut i = sc.floor() as usize;
            if i >= self.shape(k) - 1 {
                i = self.shape(k) - 2;
            }
            base[k] = i;
            frac[k] = sc - i as f64;
        }
        Some((base, frac))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_is_exactly_once() {
        let g = SpaceTimeGrid::new(1.0, &[(0.0, 1.0), (0.0, 1.0)], 4, &[4, 5]).unwrap();
        let mut counts = [0usize; 4];
        for f in 0..g.total_nodes() {
            let idx = g.decode(f);
            match g.classify(&idx) {
                NodeClass::Interior => counts[0] += 1,
                NodeClass::Lateral => counts[1] += 1,
                NodeClass::Initial => counts[2] += 1,
                NodeClass::Final => counts[3] += 1,
            }
        }
        assert_eq!(counts.iter().sum::<usize>(), g.total_nodes());
        // lateral = all nodes with a spatial-boundary index
        let lateral = 4 * (4 * 5 - 2 * 3);
        assert_eq!(counts[1], lateral);
        assert_eq!(counts[2], 2 * 3);
        assert_eq!(counts[3], 2 * 3);
    }

    #[test]
    fn cfl_recorded() {
        let g = SpaceTimeGrid::new(1.0, &[(0.0, 1.0)], 11, &[11]).unwrap();
        let expect = 0.1 * (1.0_f64 / 0.01).sqrt();
        assert!((g.cfl_number() - expect).abs() < 1e-12);
    }

    #[test]
    fn extension_aligns() {
        let g = SpaceTimeGrid::new(1.0, &[(0.0, 2.0), (-1.0, 1.0)], 11, &[21, 9]).unwrap();
        let e = g.extended(3);
        let off = e.embed_offsets(&g).unwrap();
        assert_eq!(&off[..3], &[3, 3, 3]);
        assert_eq!(e.nt(), 17);
        assert!((e.dt() - g.dt()).abs() == 0.0);
    }

    #[test]
    fn rejects_small_grids() {
        assert!(SpaceTimeGrid::new(1.0, &[(0.0, 1.0)], 2, &[5]).is_err());
        assert!(SpaceTimeGrid::new(1.0, &[(0.0, 1.0)], 5, &[2]).is_err());
    }
}

//! Grid functions: scalar or space-time-vector valued samples over all nodes
//! of a [`SpaceTimeGrid`]. Storage is time-major per component, components
//! stored one block after another; complex values are interleaved `(re, im)`
//! pairs in memory (the `Complex64` layout).

use crate::error::{CoreError, Result};
use crate::grid::{NodeIndex, SpaceTimeGrid, MAX_DIMS};
use crate::C64;
use num_traits::Zero;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

/// Element types a field can hold (f64 or Complex64).
pub trait Scalar:
    Copy
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + std::fmt::Debug
{
    fn from_f64(x: f64) -> Self;
    fn scale(self, s: f64) -> Self;
    fn conj(self) -> Self;
    fn abs_sq(self) -> f64;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn is_finite_value(self) -> bool;
}

impl Scalar for f64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn abs_sq(self) -> f64 {
        self * self
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn im(self) -> f64 {
        0.0
    }
    #[inline]
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for C64 {
    #[inline]
    fn from_f64(x: f64) -> Self {
        C64::new(x, 0.0)
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
    #[inline]
    fn conj(self) -> Self {
        C64::new(self.re, -self.im)
    }
    #[inline]
    fn abs_sq(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn im(self) -> f64 {
        self.im
    }
    #[inline]
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// A grid function: `ncomp = 1` for scalars, `1 + n` for space-time vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T: Scalar> {
    grid: Arc<SpaceTimeGrid>,
    ncomp: usize,
    data: Vec<T>,
    /// For complex fields: marks spectra that are conjugate-symmetric
    /// (the field is real in space). Metadata only.
    pub conjugate_symmetric: bool,
}

pub type RealField = Field<f64>;
pub type ComplexField = Field<C64>;

impl<T: Scalar> Field<T> {
    pub fn zeros(grid: &Arc<SpaceTimeGrid>, ncomp: usize) -> Self {
        assert!(ncomp == 1 || ncomp == 1 + grid.n(), "rank must be scalar or 1+n vector");
        Self {
            grid: grid.clone(),
            ncomp,
            data: vec![T::zero(); ncomp * grid.total_nodes()],
            conjugate_symmetric: false,
        }
    }

    /// Scalar field sampled from a closure of the node coordinates.
    pub fn from_fn(grid: &Arc<SpaceTimeGrid>, f: impl Fn(&[f64]) -> T) -> Self {
        let mut out = Self::zeros(grid, 1);
        for flat in 0..grid.total_nodes() {
            let idx = grid.decode(flat);
            let p = grid.point(&idx);
            out.data[flat] = f(&p[..grid.dims()]);
        }
        out
    }

    /// Space-time-vector field sampled componentwise.
    pub fn from_fn_vec(grid: &Arc<SpaceTimeGrid>, f: impl Fn(usize, &[f64]) -> T) -> Self {
        let mut out = Self::zeros(grid, 1 + grid.n());
        let nn = grid.total_nodes();
        for c in 0..out.ncomp {
            for flat in 0..nn {
                let idx = grid.decode(flat);
                let p = grid.point(&idx);
                out.data[c * nn + flat] = f(c, &p[..grid.dims()]);
            }
        }
        out
    }

    pub fn grid(&self) -> &Arc<SpaceTimeGrid> {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn is_scalar(&self) -> bool {
        self.ncomp == 1
    }

    pub fn ensure_scalar(&self) -> Result<()> {
        if self.ncomp != 1 {
            return Err(CoreError::RankMismatch { expected: 1, actual: self.ncomp });
        }
        Ok(())
    }

    pub fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if !self.grid.same_as(&other.grid) {
            return Err(CoreError::GridMismatch("field grids differ".into()));
        }
        Ok(())
    }

    /// Raw component slice (time-major).
    pub fn component(&self, c: usize) -> &[T] {
        let nn = self.grid.total_nodes();
        &self.data[c * nn..(c + 1) * nn]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [T] {
        let nn = self.grid.total_nodes();
        &mut self.data[c * nn..(c + 1) * nn]
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    #[inline]
    pub fn at(&self, c: usize, flat: usize) -> T {
        self.data[c * self.grid.total_nodes() + flat]
    }

    #[inline]
    pub fn set(&mut self, c: usize, flat: usize, v: T) {
        let nn = self.grid.total_nodes();
        self.data[c * nn + flat] = v;
    }

    /// New scalar field holding one component of a vector field.
    pub fn extract_component(&self, c: usize) -> Self {
        Self {
            grid: self.grid.clone(),
            ncomp: 1,
            data: self.component(c).to_vec(),
            conjugate_symmetric: self.conjugate_symmetric,
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T + Sync) -> Self {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v = f(*v);
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| v.scale(s))
    }

    pub fn add_field(&self, other: &Self) -> Result<Self> {
        self.ensure_same_grid(other)?;
        if self.ncomp != other.ncomp {
            return Err(CoreError::RankMismatch { expected: self.ncomp, actual: other.ncomp });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a = *a + *b;
        }
        Ok(out)
    }

    pub fn sub_field(&self, other: &Self) -> Result<Self> {
        self.ensure_same_grid(other)?;
        if self.ncomp != other.ncomp {
            return Err(CoreError::RankMismatch { expected: self.ncomp, actual: other.ncomp });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a = *a - *b;
        }
        Ok(out)
    }

    /// Pointwise product with a scalar field (broadcast over components).
    pub fn mul_scalar_field(&self, other: &Field<T>) -> Result<Self> {
        self.ensure_same_grid(other)?;
        other.ensure_scalar()?;
        let nn = self.grid.total_nodes();
        let mut out = self.clone();
        for c in 0..self.ncomp {
            for i in 0..nn {
                out.data[c * nn + i] = out.data[c * nn + i] * other.data[i];
            }
        }
        Ok(out)
    }

    pub fn linf(&self) -> f64 {
        self.data.iter().map(|v| v.abs_sq().sqrt()).fold(0.0, f64::max)
    }

    /// Restriction onto a node-aligned inner grid.
    pub fn restrict(&self, inner: &Arc<SpaceTimeGrid>) -> Result<Self> {
        let off = self.grid.embed_offsets(inner)?;
        let mut out = Self::zeros(inner, self.ncomp);
        let dims = inner.dims();
        let nn_in = inner.total_nodes();
        for c in 0..self.ncomp {
            for flat in 0..nn_in {
                let idx = inner.decode(flat);
                let mut oidx: NodeIndex = [0; MAX_DIMS];
                for k in 0..dims {
                    oidx[k] = idx[k] + off[k];
                }
                out.data[c * nn_in + flat] = self.at(c, self.grid.flat(&oidx));
            }
        }
        out.conjugate_symmetric = self.conjugate_symmetric;
        Ok(out)
    }

    /// Multilinear interpolation at an arbitrary point, zero outside the box.
    pub fn sample_zero_ext(&self, c: usize, p: &[f64]) -> T {
        let Some((base, frac)) = self.grid.locate(p) else {
            return T::zero();
        };
        let dims = self.grid.dims();
        let comp = self.component(c);
        let mut acc = T::zero();
        let corners = 1usize << dims;
        for m in 0..corners {
            let mut w = 1.0;
            let mut idx: NodeIndex = [0; MAX_DIMS];
            for k in 0..dims {
                if (m >> k) & 1 == 1 {
                    w *= frac[k];
                    idx[k] = base[k] + 1;
                } else {
                    w *= 1.0 - frac[k];
                    idx[k] = base[k];
                }
            }
            if w != 0.0 {
                acc = acc + comp[self.grid.flat(&idx)].scale(w);
            }
        }
        acc
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite_value())
    }
}

impl RealField {
    pub fn to_complex(&self) -> ComplexField {
        ComplexField {
            grid: self.grid.clone(),
            ncomp: self.ncomp,
            data: self.data.iter().map(|&x| C64::new(x, 0.0)).collect(),
            conjugate_symmetric: true,
        }
    }
}

impl ComplexField {
    pub fn real_part(&self) -> RealField {
        RealField {
            grid: self.grid.clone(),
            ncomp: self.ncomp,
            data: self.data.iter().map(|z| z.re).collect(),
            conjugate_symmetric: false,
        }
    }

    pub fn conj_field(&self) -> ComplexField {
        self.map(|z| z.conj())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid2() -> Arc<SpaceTimeGrid> {
        SpaceTimeGrid::new(1.0, &[(0.0, 1.0), (0.0, 2.0)], 5, &[5, 9]).unwrap()
    }

    #[test]
    fn extent_matches_rank() {
        let g = grid2();
        let f = RealField::zeros(&g, 3);
        assert_eq!(f.values().len(), 3 * g.total_nodes());
    }

    #[test]
    fn interpolation_reproduces_linear_fields() {
        let g = grid2();
        let f = RealField::from_fn(&g, |p| 1.0 + 2.0 * p[0] - 0.5 * p[1] + 0.25 * p[2]);
        let v = f.sample_zero_ext(0, &[0.33, 0.47, 1.21]);
        assert!((v - (1.0 + 2.0 * 0.33 - 0.5 * 0.47 + 0.25 * 1.21)).abs() < 1e-12);
        // zero extension outside
        assert_eq!(f.sample_zero_ext(0, &[-0.5, 0.5, 0.5]), 0.0);
    }

    #[test]
    fn restriction_roundtrip() {
        let g = grid2();
        let e = g.extended(2);
        let fe = RealField::from_fn(&e, |p| p[0] * p[1] + p[2]);
        let f = fe.restrict(&g).unwrap();
        let direct = RealField::from_fn(&g, |p| p[0] * p[1] + p[2]);
        for (a, b) in f.values().iter().zip(direct.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

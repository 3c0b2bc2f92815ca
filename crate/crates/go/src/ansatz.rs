//! The assembled GO ansatz `e^{±φ/h}(a₀ + h a₁)` and closed-form evaluators
//! for the canonical leading amplitudes used by the reconstruction pairings.

use crate::amplitudes::{build_amplitudes, AmplitudeWeight};
use crate::error::{GoError, Result};
use bwlab_core::coeffs::CoefficientSet;
use bwlab_core::direction::{Direction, FrequencyVector};
use bwlab_core::error::CoreError;
use bwlab_core::field::ComplexField;
use bwlab_core::grid::SpaceTimeGrid;
use bwlab_core::C64;
use std::sync::Arc;

/// Exponential sign of the ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GoSign {
    /// `e^{+φ/h}` — solution family of 𝓛.
    Growing,
    /// `e^{-φ/h}` — solution family of 𝓛*.
    Decaying,
}

impl GoSign {
    pub fn sigma(self) -> f64 {
        match self {
            GoSign::Growing => 1.0,
            GoSign::Decaying => -1.0,
        }
    }
}

/// A geometric-optics ansatz: direction, semiclassical parameter, sign,
/// modulation, amplitude weight and the two amplitude fields (remainder
/// excluded by design — its effect is captured by the residual order).
#[derive(Debug, Clone)]
pub struct GOAnsatz {
    pub dir: Direction,
    pub h: f64,
    pub sign: GoSign,
    pub xi: Option<FrequencyVector>,
    pub weight: AmplitudeWeight,
    pub a0: ComplexField,
    pub a1: ComplexField,
}

impl GOAnsatz {
    /// Build amplitudes for the operator with the given coefficients
    /// (pass adjoint coefficients together with `Decaying`).
    pub fn build(
        coeffs: &CoefficientSet,
        dir: &Direction,
        h: f64,
        sign: GoSign,
        xi: Option<FrequencyVector>,
        weight: AmplitudeWeight,
    ) -> Result<Self> {
        if h <= 0.0 {
            return Err(GoError::Core(CoreError::NonPositiveH(h)));
        }
        let (a0, a1) = build_amplitudes(coeffs, dir, xi.as_ref(), weight, sign.sigma())?;
        Ok(Self { dir: dir.clone(), h, sign, xi, weight, a0, a1 })
    }

    pub fn grid(&self) -> &Arc<SpaceTimeGrid> {
        self.a0.grid()
    }

    /// `a₀ + h a₁` as one complex field.
    pub fn amplitude_sum(&self) -> ComplexField {
        self.a0.add_field(&self.a1.scaled(self.h)).expect("amplitudes share a grid")
    }

    /// Closed-form description of the leading amplitude.
    pub fn a0_form(&self) -> A0Form {
        A0Form { dir: self.dir.clone(), xi: self.xi.clone(), weight: self.weight }
    }
}

/// Assemble `e^{±φ/h}(a₀ + h a₁)` node-wise, guarding the exponent range.
pub fn assemble_go_field(ansatz: &GOAnsatz) -> Result<ComplexField> {
    let grid = ansatz.grid().clone();
    let sigma = ansatz.sign.sigma();
    // overflow guard over the grid corners (φ is linear in (t,x))
    let mut max_abs_phi: f64 = 0.0;
    for corner in 0..(1usize << grid.dims()) {
        let mut p = [0.0f64; 4];
        for k in 0..grid.dims() {
            let hi = grid.origin(k) + (grid.shape(k) - 1) as f64 * grid.spacing(k);
            p[k] = if (corner >> k) & 1 == 1 { hi } else { grid.origin(k) };
        }
        max_abs_phi = max_abs_phi.max(ansatz.dir.phi(&p[..grid.dims()]).abs());
    }
    let limit = 700.0;
    let exponent = max_abs_phi / ansatz.h;
    if exponent > limit {
        return Err(GoError::Core(CoreError::ExponentOverflow {
            exponent,
            limit,
            hint: max_abs_phi / limit,
        }));
    }
    let amp = ansatz.amplitude_sum();
    let mut out = ComplexField::zeros(&grid, 1);
    for f in 0..grid.total_nodes() {
        let p = grid.point(&grid.decode(f));
        let e = (sigma * ansatz.dir.phi(&p[..grid.dims()]) / ansatz.h).exp();
        out.set(0, f, amp.at(0, f) * e);
    }
    Ok(out)
}

/// Closed forms of the canonical `a₀` families and the derivative fields the
/// reconstruction integrands need. With `ξ·(1,-ω) = 0`:
///
/// - unweighted: `T a₀ = 0`, `□ a₀ = (|ξ'|²-ξ₀²) a₀`
/// - linear weight `ℓ = (1,-ω)·(t,x)`: `T a₀ = 2 e^{-iξ·y}`,
///   `□ a₀ = (|ξ'|²-ξ₀²) a₀ - 4iξ₀ e^{-iξ·y}`
#[derive(Debug, Clone)]
pub struct A0Form {
    pub dir: Direction,
    pub xi: Option<FrequencyVector>,
    pub weight: AmplitudeWeight,
}

impl A0Form {
    #[inline]
    fn phase(&self, p: &[f64]) -> C64 {
        let ph = self.xi.as_ref().map(|x| -x.dot(p)).unwrap_or(0.0);
        C64::new(ph.cos(), ph.sin())
    }

    #[inline]
    pub fn value(&self, p: &[f64]) -> C64 {
        match self.weight {
            AmplitudeWeight::One => self.phase(p),
            AmplitudeWeight::Linear => self.phase(p) * self.dir.ell(p),
        }
    }

    /// `T a₀` (exact).
    #[inline]
    pub fn t_value(&self, p: &[f64]) -> C64 {
        match self.weight {
            AmplitudeWeight::One => C64::new(0.0, 0.0),
            AmplitudeWeight::Linear => self.phase(p) * 2.0,
        }
    }

    /// `□ a₀` (exact).
    #[inline]
    pub fn box_value(&self, p: &[f64]) -> C64 {
        let (xi0, sp2) = match &self.xi {
            Some(x) => (x.temporal(), x.spatial().iter().map(|v| v * v).sum::<f64>()),
            None => (0.0, 0.0),
        };
        let lam = sp2 - xi0 * xi0;
        match self.weight {
            AmplitudeWeight::One => self.phase(p) * lam,
            AmplitudeWeight::Linear => {
                self.phase(p) * lam * self.dir.ell(p) + self.phase(p) * C64::new(0.0, -4.0 * xi0)
            }
        }
    }

    /// `∂t a₀` (exact).
    #[inline]
    pub fn dt_value(&self, p: &[f64]) -> C64 {
        let xi0 = self.xi.as_ref().map(|x| x.temporal()).unwrap_or(0.0);
        let i_xi0 = C64::new(0.0, -xi0);
        match self.weight {
            AmplitudeWeight::One => self.phase(p) * i_xi0,
            AmplitudeWeight::Linear => {
                self.phase(p) * i_xi0 * self.dir.ell(p) + self.phase(p)
            }
        }
    }

    /// `∂_{x_a} a₀` (exact).
    #[inline]
    pub fn dx_value(&self, p: &[f64], axis: usize) -> C64 {
        let xia = self.xi.as_ref().map(|x| x.spatial()[axis]).unwrap_or(0.0);
        let i_xia = C64::new(0.0, -xia);
        match self.weight {
            AmplitudeWeight::One => self.phase(p) * i_xia,
            AmplitudeWeight::Linear => {
                self.phase(p) * i_xia * self.dir.ell(p)
                    - self.phase(p) * self.dir.omega()[axis]
            }
        }
    }
}

/// Extension of Q by one characteristic length (the time extent) on every
/// spatial side plus a stencil halo, so characteristic integrals launched
/// from Q̄ stay inside and derivatives at ∂Q are centered.
pub fn characteristic_extension(grid: &Arc<SpaceTimeGrid>, stencil_halo: usize) -> Arc<SpaceTimeGrid> {
    let t_span = grid.t_extent();
    let halo_t = stencil_halo;
    let mut omega_box = Vec::with_capacity(grid.n());
    let mut nx = Vec::with_capacity(grid.n());
    for a in 0..grid.n() {
        let cells = (t_span / grid.dx()[a]).ceil() as usize + stencil_halo;
        omega_box.push((
            grid.x_lo()[a] - cells as f64 * grid.dx()[a],
            grid.x_hi()[a] + cells as f64 * grid.dx()[a],
        ));
        nx.push(grid.nx()[a] + 2 * cells);
    }
    SpaceTimeGrid::with_origin(
        grid.t_lo() - halo_t as f64 * grid.dt(),
        grid.t_hi() + halo_t as f64 * grid.dt(),
        &omega_box,
        grid.nt() + 2 * halo_t,
        &nx,
    )
    .expect("extension of a valid grid is valid")
}

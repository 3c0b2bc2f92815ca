//! Amplitude hierarchy of the GO ansatz `e^{±φ/h}(a₀ + h a₁)` and the formal
//! L² adjoint coefficients.
//!
//! The leading amplitude solves `T²a₀ = 0`; the corrector solves
//!
//! ```text
//! growing:  T²a₁ = ( -½(□T + T□) - ½AT - ¼(B + C·ω) ) a₀
//! decaying: T²b₁ = ( +½(□T + T□) + ½ÃT + ¼(B̃ + C̃·ω) ) b₀
//! ```
//!
//! The decaying-side signs come from expanding `(h²□ - 2hT)²`: every odd
//! power of h flips sign relative to the growing side. With the canonical
//! choices `b₀ = 1` or `b₀ = (1,-ω)·(t,x)` both `(□T + T□)b₀` and the
//! unweighted `T b₀` vanish, so only the zeroth-order coefficient couplings
//! survive there.

use crate::error::{GoError, Result};
use crate::transport::transport_integrate;
use bwlab_core::coeffs::CoefficientSet;
use bwlab_core::direction::{Direction, FrequencyVector};
use bwlab_core::field::ComplexField;
use bwlab_core::quadrature::l2_norm_q;
use bwlab_core::stencil;
use bwlab_core::C64;

/// Scalar weight multiplying the modulated exponential in `a₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeWeight {
    /// `a₀ = e^{-iξ·(t,x)}`.
    One,
    /// `a₀ = e^{-iξ·(t,x)} (1,-ω)·(t,x)`.
    Linear,
}

/// Formal L² adjoint coefficients:
/// `Ã = A`, `B̃ = -B + 2∂tA`, `C̃ = -C - 2∇ₓA`, `q̃ = □A - ∂tB - ∇·C + q`.
///
/// First-order terms flip sign under the adjoint (∂t is skew-adjoint); with
/// these signs the quadruple is a true involution, `(𝓛*)* = 𝓛`, and the
/// pairing identity `⟨𝓛u,v⟩ = ⟨u,𝓛*v⟩` closes at second order — the
/// adjoint-identity test below pins this down.
pub fn adjoint_coefficients(coeffs: &CoefficientSet) -> Result<CoefficientSet> {
    let a = coeffs.a().clone();
    let dt_a = stencil::derivative(coeffs.a(), 0)?;
    let b = dt_a.scaled(2.0).sub_field(coeffs.b())?;
    let mut c = Vec::with_capacity(coeffs.grid().n());
    for ax in 0..coeffs.grid().n() {
        let da = stencil::derivative(coeffs.a(), 1 + ax)?;
        c.push(coeffs.c(ax).add_field(&da.scaled(2.0))?.scaled(-1.0));
    }
    let box_a = stencil::dalembertian_full(coeffs.a())?;
    let dt_b = stencil::derivative(coeffs.b(), 0)?;
    let mut q = box_a.sub_field(&dt_b)?.add_field(coeffs.q())?;
    for ax in 0..coeffs.grid().n() {
        q = q.sub_field(&stencil::derivative(coeffs.c(ax), 1 + ax)?)?;
    }
    Ok(CoefficientSet::new(a, b, c, q)?)
}

/// Sample `a₀` on the coefficient grid.
pub fn sample_a0(
    grid: &std::sync::Arc<bwlab_core::grid::SpaceTimeGrid>,
    dir: &Direction,
    xi: Option<&FrequencyVector>,
    weight: AmplitudeWeight,
) -> ComplexField {
    ComplexField::from_fn(grid, |p| {
        let phase = xi.map(|x| -x.dot(p)).unwrap_or(0.0);
        let base = C64::new(phase.cos(), phase.sin());
        match weight {
            AmplitudeWeight::One => base,
            AmplitudeWeight::Linear => base * dir.ell(p),
        }
    })
}

/// Right side of the corrector transport equation. `sign = +1` growing,
/// `-1` decaying (pass the adjoint coefficient set on the decaying side).
/// For the unweighted modulated `a₀` the analytic simplification
/// `RHS = -σ/4 (B + C·ω) a₀` is used (valid because `Ta₀ = 0`); the weighted
/// case evaluates the full expression with discrete derivatives.
pub fn transport_rhs(
    coeffs: &CoefficientSet,
    dir: &Direction,
    sign: f64,
    a0: &ComplexField,
    weight: AmplitudeWeight,
) -> Result<ComplexField> {
    coeffs.ensure_grid(a0.grid())?;
    let grid = a0.grid().clone();
    let nn = grid.total_nodes();
    // ¼(B + C·ω) a₀ appears in both branches
    let mut bc = ComplexField::zeros(&grid, 1);
    {
        let dst = bc.values_mut();
        let b = coeffs.b().component(0);
        let av = a0.component(0);
        for f in 0..nn {
            let mut w = b[f];
            for ax in 0..grid.n() {
                w += coeffs.c(ax).component(0)[f] * dir.omega()[ax];
            }
            dst[f] = av[f] * (w * 0.25);
        }
    }
    match weight {
        AmplitudeWeight::One => Ok(bc.scaled(-sign)),
        AmplitudeWeight::Linear => {
            let t_a0 = stencil::directional_derivative_t_full(a0, dir)?;
            let box_a0 = stencil::dalembertian_full(a0)?;
            let box_t = stencil::dalembertian_full(&t_a0)?;
            let t_box = stencil::directional_derivative_t_full(&box_a0, dir)?;
            let mut rhs = box_t.add_field(&t_box)?.scaled(-0.5);
            {
                let dst = rhs.values_mut();
                let a = coeffs.a().component(0);
                let tv = t_a0.component(0);
                for f in 0..nn {
                    dst[f] = dst[f] - tv[f].scale(0.5 * a[f]);
                }
            }
            rhs = rhs.sub_field(&bc)?;
            Ok(rhs.scaled(sign))
        }
    }
}

/// Build `(a₀, a₁)` for the given direction, modulation and weight.
///
/// `a₁` is obtained by two characteristic integrations of the corrector
/// right side, with zero initial profiles on the `t = 0` plane. The grid of
/// `coeffs` is the working grid; pass coefficients sampled on an extension
/// of Q when amplitude values near ∂Q must use centered derivatives.
pub fn build_amplitudes(
    coeffs: &CoefficientSet,
    dir: &Direction,
    xi: Option<&FrequencyVector>,
    weight: AmplitudeWeight,
    sign: f64,
) -> Result<(ComplexField, ComplexField)> {
    if let Some(x) = xi {
        x.ensure_characteristic(dir)?;
    }
    let grid = coeffs.grid().clone();
    let a0 = sample_a0(&grid, dir, xi, weight);
    // invariant: T²a₀ = 0 within truncation tolerance
    let t2 = stencil::directional_derivative_t_full(
        &stencil::directional_derivative_t_full(&a0, dir)?,
        dir,
    )?;
    let xi_scale = xi.map(|x| (1.0 + x.norm()).powi(3)).unwrap_or(1.0);
    let tol = 50.0 * grid.truncation_scale() * xi_scale * l2_norm_q(&a0).max(1e-300);
    let resid = l2_norm_q(&t2);
    if resid > tol {
        return Err(GoError::TransportResidual { residual: resid, tol });
    }
    let rhs = transport_rhs(coeffs, dir, sign, &a0, weight)?;
    let v = transport_integrate(&rhs, None, dir)?;
    let a1 = transport_integrate(&v, None, dir)?;
    Ok((a0, a1))
}

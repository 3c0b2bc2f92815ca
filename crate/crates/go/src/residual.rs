//! Residual-order verification for the GO ansatz: the weighted residual
//! `R(h) = ‖ h⁴ e^{∓φ/h} 𝓛(e^{±φ/h}(a₀ + h a₁)) ‖_{L²(Q)}` is computed via
//! the fused conjugated stencils (never by literal multiplication, which
//! loses the leading-order cancellation to rounding) and the slope of
//! `log R` against `log h` is fit by least squares. Full two-term ansätze
//! scale like h⁴, suppressing `a₁` leaves the h³ term.

use crate::ansatz::{GOAnsatz, GoSign};
use crate::error::{GoError, Result};
use bwlab_core::coeffs::CoefficientSet;
use bwlab_core::conjugate::{CarlemanWeight, Conjugation};
use bwlab_core::grid::SpaceTimeGrid;
use bwlab_core::quadrature::l2_norm_q;
use std::sync::Arc;

/// Scale-separation guard: `h ≥ 10 · max(dt, dx)`.
pub use bwlab_core::conjugate::SCALE_SEPARATION;

pub fn check_scale_separation(grid: &SpaceTimeGrid, h: f64) -> Result<()> {
    let min_h = bwlab_core::conjugate::min_admissible_h(grid);
    if h < min_h {
        return Err(GoError::ScaleSeparation { h, min_h });
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ResidualOrderReport {
    pub h: Vec<f64>,
    pub residual: Vec<f64>,
    /// Fitted slope of log R vs log h.
    pub slope: f64,
    pub with_corrector: bool,
    pub sign: GoSign,
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in lx.iter().zip(&ly) {
        num += (a - mx) * (b - my);
        den += (a - mx) * (a - mx);
    }
    num / den
}

/// Sweep `h` and report the residual scaling. `q_grid` is the physical Q;
/// the ansatz amplitudes and coefficients must live on a grid that contains
/// it (an extension), so the restriction to Q uses centered stencils only.
pub fn verify_residual_order(
    coeffs: &CoefficientSet,
    q_grid: &Arc<SpaceTimeGrid>,
    build: impl Fn(f64) -> Result<GOAnsatz>,
    h_sweep: &[f64],
    with_corrector: bool,
) -> Result<ResidualOrderReport> {
    if h_sweep.len() < 3 {
        return Err(GoError::SweepTooShort { min: 3, got: h_sweep.len() });
    }
    let mut residuals = Vec::with_capacity(h_sweep.len());
    let mut sign = GoSign::Growing;
    for &h in h_sweep {
        check_scale_separation(q_grid, h)?;
        let ansatz = build(h)?;
        sign = ansatz.sign;
        let amp = if with_corrector { ansatz.amplitude_sum() } else { ansatz.a0.clone() };
        let conj = match ansatz.sign {
            GoSign::Growing => Conjugation::growing(ansatz.dir.clone(), h, CarlemanWeight::Linear)?,
            GoSign::Decaying => Conjugation::decaying(ansatz.dir.clone(), h, CarlemanWeight::Linear)?,
        };
        let res_ext = conj.biwave_apply(coeffs, &amp)?;
        let res_q = res_ext.restrict(q_grid)?;
        residuals.push(l2_norm_q(&res_q));
    }
    let slope = loglog_slope(h_sweep, &residuals);
    Ok(ResidualOrderReport { h: h_sweep.to_vec(), residual: residuals, slope, with_corrector, sign })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplitudes::AmplitudeWeight;
    use bwlab_core::direction::Direction;

    #[test]
    fn zero_coefficients_give_vanishing_residual() {
        let q = SpaceTimeGrid::new(1.0, &[(0.0, 1.0)], 41, &[41]).unwrap();
        let ext = q.extended(3);
        let cs = CoefficientSet::zeros(&ext);
        let dir = Direction::new(&[1.0]).unwrap();
        let report = verify_residual_order(
            &cs,
            &q,
            |h| GOAnsatz::build(&cs, &dir, h, GoSign::Growing, None, AmplitudeWeight::One),
            &[0.4, 0.3, 0.25],
            true,
        )
        .unwrap();
        for r in &report.residual {
            assert!(*r < 1e-12, "residual {r}");
        }
    }

    #[test]
    fn guard_rejects_small_h() {
        let q = SpaceTimeGrid::new(1.0, &[(0.0, 1.0)], 11, &[11]).unwrap();
        assert!(check_scale_separation(&q, 0.5).is_err());
        assert!(check_scale_separation(&q, 1.1).is_ok());
    }
}

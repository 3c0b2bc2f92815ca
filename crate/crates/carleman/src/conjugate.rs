//! The conjugated-operator surface of the probes:
//! `e^{-w/h}·Op(e^{w/h}u)` for the semiclassical wave (`h²□`) and bi-wave
//! (`h⁴𝓛`) operators, with the linear weight `φ` or the convexified `φ_ε`.
//! The exponentials are fused into the stencil coefficients (see
//! `bwlab_core::conjugate`); literal multiplication is used only by the
//! tiny-grid oracle below.

use crate::error::{CarlemanError, Result};
use crate::CONVEXIFIED_H_FACTOR;
use bwlab_core::coeffs::CoefficientSet;
use bwlab_core::conjugate::{CarlemanWeight, Conjugation};
use bwlab_core::direction::Direction;
use bwlab_core::field::{Field, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConjugateVariant {
    /// `e^{-w/h}(h²□)e^{w/h}`
    Wave,
    /// `e^{-w/h}(h⁴𝓛_{A,B,C,q})e^{w/h}`
    Biwave,
}

fn check_weight(weight: &CarlemanWeight, h: f64) -> Result<()> {
    if let CarlemanWeight::Convexified { eps } = weight {
        if !(*eps > 0.0 && *eps < 1.0) {
            return Err(CarlemanError::BadEps(*eps));
        }
        let max_h = eps / CONVEXIFIED_H_FACTOR;
        if h > max_h {
            return Err(CarlemanError::ConvexifiedRegime {
                h,
                max_h,
                factor: CONVEXIFIED_H_FACTOR,
            });
        }
    }
    Ok(())
}

/// Apply the conjugated operator to a compactly supported field.
pub fn conjugate_apply<T: Scalar>(
    u: &Field<T>,
    coeffs: &CoefficientSet,
    h: f64,
    dir: &Direction,
    variant: ConjugateVariant,
    weight: CarlemanWeight,
) -> Result<Field<T>> {
    check_weight(&weight, h)?;
    let conj = Conjugation::growing(dir.clone(), h, weight).map_err(CarlemanError::Core)?;
    conj.ensure_compact_support(u, 1e-12 * (1.0 + u.linf()))
        .map_err(CarlemanError::Core)?;
    let out = match variant {
        ConjugateVariant::Wave => conj.wave_apply(u)?,
        ConjugateVariant::Biwave => conj.biwave_apply(coeffs, u)?,
    };
    Ok(out)
}

//! The partial input-output operator: Neumann traces of `u` and `□u` on the
//! measured patch `G` (second-order one-sided stencils) plus the three
//! final-time traces. The extra trace `∂t(□u)(T,·)` used by the
//! reconstruction identity is not part of the measured tuple; it can be read
//! from solver state and is flagged as such.

use crate::data::IbvpData;
use crate::error::Result;
use crate::ibvp::{solve_ibvp, SystemState};
use bwlab_core::coeffs::CoefficientSet;
use bwlab_core::direction::Direction;
use bwlab_core::field::{Field, Scalar};
use bwlab_core::quadrature::BoundaryRegion;
use bwlab_core::stencil;

/// Where a trace came from; the reconstruction records this per term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceSource {
    Measured,
    Simulated,
    SolverState,
    Dropped,
}

/// Output tuple of the partial input-output operator.
#[derive(Debug, Clone)]
pub struct MeasurementBundle<T: Scalar> {
    /// ∂ν u on Σ (values meaningful on the faces of `G` only).
    pub du_g: Field<T>,
    /// ∂ν (□u) on Σ (faces of `G` only).
    pub dw_g: Field<T>,
    /// u(T,·), ∂t u(T,·), ∂t² u(T,·) stored at the final slab of full fields.
    pub final_u: Field<T>,
    pub final_ut: Field<T>,
    pub final_utt: Field<T>,
    /// the measured patch
    pub omega0: Direction,
    pub margin: f64,
}

impl<T: Scalar> MeasurementBundle<T> {
    pub fn g_region(&self) -> BoundaryRegion {
        BoundaryRegion::G { omega0: self.omega0.clone(), margin: self.margin }
    }

    pub fn max_abs(&self) -> f64 {
        self.du_g
            .linf()
            .max(self.dw_g.linf())
            .max(self.final_u.linf())
            .max(self.final_ut.linf())
            .max(self.final_utt.linf())
    }

    /// Difference of two bundles (the inverse-problem data).
    pub fn difference(&self, other: &Self) -> Result<Self> {
        Ok(Self {
            du_g: other.du_g.sub_field(&self.du_g)?,
            dw_g: other.dw_g.sub_field(&self.dw_g)?,
            final_u: other.final_u.sub_field(&self.final_u)?,
            final_ut: other.final_ut.sub_field(&self.final_ut)?,
            final_utt: other.final_utt.sub_field(&self.final_utt)?,
            omega0: self.omega0.clone(),
            margin: self.margin,
        })
    }
}

/// Extract the measurement tuple from a computed state.
pub fn measure_state<T: Scalar>(
    state: &SystemState<T>,
    omega0: &Direction,
    margin: f64,
) -> Result<MeasurementBundle<T>> {
    let grid = state.grid().clone();
    let region = BoundaryRegion::G { omega0: omega0.clone(), margin };
    let mut du = Field::zeros(&grid, 1);
    let mut dw = Field::zeros(&grid, 1);
    for face in region.faces(&grid) {
        let tu = stencil::face_normal_derivative(&state.u, &face)?;
        let tw = stencil::face_normal_derivative(&state.w, &face)?;
        bwlab_core::quadrature::for_each_face_node(&grid, &face, |f, _| {
            du.set(0, f, tu.at(0, f));
            dw.set(0, f, tw.at(0, f));
        });
    }
    Ok(MeasurementBundle {
        du_g: du,
        dw_g: dw,
        final_u: state.u.clone(),
        final_ut: stencil::final_time_derivative(&state.u, 1)?,
        final_utt: stencil::final_time_derivative(&state.u, 2)?,
        omega0: omega0.clone(),
        margin,
    })
}

/// Solve and measure in one step (the operator `𝓝` of the inverse problem).
pub fn measurement_operator<T: Scalar>(
    coeffs: &CoefficientSet,
    data: &IbvpData<T>,
    omega0: &Direction,
    margin: f64,
) -> Result<(MeasurementBundle<T>, SystemState<T>)> {
    let state = solve_ibvp(coeffs, data, None)?;
    let bundle = measure_state(&state, omega0, margin)?;
    Ok((bundle, state))
}

/// `∂t(□u)(T,·)` from solver state — the trace outside the measured tuple.
pub fn final_dtw_from_state<T: Scalar>(state: &SystemState<T>) -> Result<Field<T>> {
    Ok(stencil::final_time_derivative(&state.w, 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bwlab_core::grid::SpaceTimeGrid;
    use bwlab_core::synth;
    use std::sync::Arc;

    fn grid2(m: usize) -> Arc<SpaceTimeGrid> {
        SpaceTimeGrid::new(0.5, &[(0.0, 1.0), (0.0, 1.0)], m, &[m, m]).unwrap()
    }

    #[test]
    fn zero_input_zero_output() {
        let g = grid2(9);
        let cs = bwlab_core::CoefficientSet::zeros(&g);
        let omega0 = Direction::new(&[1.0, 0.0]).unwrap();
        let (bundle, _) =
            measurement_operator(&cs, &IbvpData::<f64>::zeros(&g), &omega0, 0.1).unwrap();
        assert_eq!(bundle.max_abs(), 0.0);
    }

    #[test]
    fn linear_solution_has_unit_normal_traces() {
        // u* = x₁ solves the zero-coefficient system exactly; ∂νu = ±1 on
        // the two x₁ faces, 0 on the x₂ faces.
        let g = grid2(9);
        let cs = bwlab_core::CoefficientSet::zeros(&g);
        let data = IbvpData::from_closures(
            &g,
            |p| p[1],
            |k, p| if k == 0 { p[1] } else { 0.0 },
            |_| 0.0,
        );
        let state = solve_ibvp(&cs, &data, None).unwrap();
        // measure on the full boundary: margin 2 makes G = Σ
        let omega0 = Direction::new(&[1.0, 0.0]).unwrap();
        let bundle = measure_state(&state, &omega0, 2.0).unwrap();
        let region = bundle.g_region();
        for face in region.faces(&g) {
            bwlab_core::quadrature::for_each_face_node(&g, &face, |f, _| {
                let idx = g.decode(f);
                let corner = (idx[1] == 0 || idx[1] == g.nx()[0] - 1)
                    && (idx[2] == 0 || idx[2] == g.nx()[1] - 1);
                if corner {
                    return;
                }
                let expect = match (face.axis, face.side) {
                    (0, bwlab_core::grid::Side::Lo) => -1.0,
                    (0, bwlab_core::grid::Side::Hi) => 1.0,
                    _ => 0.0,
                };
                assert!(
                    (bundle.du_g.at(0, f) - expect).abs() < 1e-10,
                    "face {face:?}: {}",
                    bundle.du_g.at(0, f)
                );
            });
        }
    }

    #[test]
    fn q_difference_is_detectable_above_noise_floor() {
        let g = grid2(17);
        let omega0 = Direction::new(&[1.0, 0.0]).unwrap();
        let cs1 = bwlab_core::CoefficientSet::zeros(&g);
        let bump = synth::centered_bump(&g, 0.6);
        let cs2 = bwlab_core::CoefficientSet::from_fns(
            &g,
            |_| 0.0,
            |_| 0.0,
            |_, _| 0.0,
            |p| 5.0 * bump(p),
        );
        // data from an analytic function so the Σ traces are nonzero
        let uex = |p: &[f64]| (2.0 * p[0] + p[1]).sin() * (1.3 * p[2]).cos();
        let data = IbvpData::<f64>::from_closures(
            &g,
            uex,
            |k, p| {
                let arg = 2.0 * p[0] + p[1];
                let c = (1.3 * p[2]).cos();
                match k {
                    0 => arg.sin() * c,
                    1 => 2.0 * arg.cos() * c,
                    2 => -4.0 * arg.sin() * c,
                    _ => -8.0 * arg.cos() * c,
                }
            },
            |p| {
                // □u = ∂t²u - Δu = (-4 + 1 + 1.69)·u
                (-4.0 + 1.0 + 1.69) * (2.0 * p[0] + p[1]).sin() * (1.3 * p[2]).cos()
            },
        );
        let (b1, _) = measurement_operator(&cs1, &data, &omega0, 0.1).unwrap();
        let (b1_again, _) = measurement_operator(&cs1, &data, &omega0, 0.1).unwrap();
        let (b2, _) = measurement_operator(&cs2, &data, &omega0, 0.1).unwrap();
        // noise floor: identical runs differ只 by exactly zero; add the
        // machine-scale floor of the trace magnitudes
        let floor = b1.difference(&b1_again).unwrap().max_abs().max(1e-13 * b1.max_abs());
        let signal = b1.difference(&b2).unwrap().max_abs();
        assert!(signal > 10.0 * floor, "signal {signal:e} floor {floor:e}");
    }
}

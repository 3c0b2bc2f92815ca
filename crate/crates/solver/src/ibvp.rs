//! Explicit leapfrog stepping of the coupled `(u, w)` system.
//!
//! Both second-order equations are advanced with centered time differences;
//! the first-order coupling term `B∂tu` in the w-equation uses the true
//! centered quotient `(u^{m+1}-u^{m-1})/2dt`, which is available because the
//! u-update does not involve `w^{m+1}` (lag-free, keeps second order). A
//! window guard converts blow-ups of aggressive runs into a diagnosable
//! error instead of NaN storms.

use crate::data::IbvpData;
use crate::error::{Result, SolverError};
use bwlab_core::coeffs::CoefficientSet;
use bwlab_core::field::{Field, Scalar};
use bwlab_core::grid::SpaceTimeGrid;
use bwlab_core::quadrature::l2_norm_q;
use bwlab_core::stencil;
use std::sync::Arc;

/// CFL number must stay strictly below this for explicit stepping.
pub const CFL_LIMIT: f64 = 1.0;
/// Stability-tested magnitude bound for the coefficients (empirical).
pub const COEFF_BOUND: f64 = 100.0;
/// Window growth factor that trips the instability guard.
pub const GUARD_FACTOR: f64 = 10.0;
/// Steps per guard window.
pub const GUARD_WINDOW: usize = 10;

/// Full `(u, w)` history of one solve.
#[derive(Debug, Clone)]
pub struct SystemState<T: Scalar> {
    pub u: Field<T>,
    pub w: Field<T>,
}

impl<T: Scalar> SystemState<T> {
    pub fn grid(&self) -> &Arc<SpaceTimeGrid> {
        self.u.grid()
    }

    /// `‖□u - w - s_u‖_{L²}` over interior nodes: the reduction invariant,
    /// checked on demand.
    pub fn box_consistency(&self, source_u: Option<&Field<T>>) -> Result<f64> {
        let box_u = stencil::apply_dalembertian(&self.u)?;
        let grid = self.u.grid().clone();
        let mut diff = Field::zeros(&grid, 1);
        for f in 0..grid.total_nodes() {
            let idx = grid.decode(f);
            if grid.is_interior(&idx) {
                let mut v = box_u.at(0, f) - self.w.at(0, f);
                if let Some(s) = source_u {
                    v = v - s.at(0, f);
                }
                diff.set(0, f, v);
            }
        }
        Ok(l2_norm_q(&diff))
    }
}

/// Solve the IBVP. `source` is the optional manufactured-solution pair
/// `(s_u, s_w)` added to the right sides of the two wave equations.
pub fn solve_ibvp<T: Scalar>(
    coeffs: &CoefficientSet,
    data: &IbvpData<T>,
    source: Option<(&Field<T>, &Field<T>)>,
) -> Result<SystemState<T>> {
    let grid = data.grid().clone();
    coeffs.ensure_grid(&grid)?;
    if grid.cfl_number() >= CFL_LIMIT {
        return Err(SolverError::CflViolation { cfl: grid.cfl_number(), limit: CFL_LIMIT });
    }
    if coeffs.max_abs() > COEFF_BOUND {
        return Err(SolverError::CoefficientsTooLarge { max: coeffs.max_abs(), bound: COEFF_BOUND });
    }
    data.check_compatibility()?;

    let nt = grid.nt();
    let spatial: usize = grid.nx().iter().product();
    let dt = grid.dt();
    let dt2 = dt * dt;
    let n = grid.n();
    let sstrides: Vec<usize> = (0..n).map(|a| grid.strides()[1 + a]).collect();
    let inv_dx2: Vec<f64> = grid.dx().iter().map(|d| 1.0 / (d * d)).collect();
    let inv_2dx: Vec<f64> = grid.dx().iter().map(|d| 0.5 / d).collect();

    let mut u = vec![T::zero(); nt * spatial];
    let mut w = vec![T::zero(); nt * spatial];

    // spatial-boundary mask (lateral nodes within a slab)
    let is_lateral: Vec<bool> = (0..spatial)
        .map(|s| {
            let idx = grid.decode(s);
            (0..n).any(|a| idx[1 + a] == 0 || idx[1 + a] == grid.nx()[a] - 1)
        })
        .collect();

    let fv = data.f.component(0);
    let gv = data.g.component(0);

    // spatial Laplacian of a slab entry
    let lap = |slab: &[T], s: usize| -> T {
        let mut acc = T::zero();
        for a in 0..n {
            let st = sstrides[a];
            acc = acc
                + (slab[s + st] - slab[s].scale(2.0) + slab[s - st]).scale(inv_dx2[a]);
        }
        acc
    };

    // level 0
    for s in 0..spatial {
        if is_lateral[s] {
            u[s] = fv[s];
            w[s] = gv[s];
        } else {
            u[s] = data.psi[0][s];
        }
    }
    // w⁰ = ψ₂ - Δψ₀ in the interior
    {
        let psi0: &[T] = &data.psi[0];
        for s in 0..spatial {
            if !is_lateral[s] {
                w[s] = data.psi[2][s] - lap(psi0, s);
            }
        }
    }
    if nt >= 2 {
        // level 1: Taylor start, third order in dt
        // u¹ = ψ₀ + dtψ₁ + dt²/2·ψ₂ + dt³/6·ψ₃
        for s in 0..spatial {
            let f1 = spatial + s;
            if is_lateral[s] {
                u[f1] = fv[f1];
                w[f1] = gv[f1];
            } else {
                u[f1] = data.psi[0][s]
                    + data.psi[1][s].scale(dt)
                    + data.psi[2][s].scale(dt2 / 2.0)
                    + data.psi[3][s].scale(dt2 * dt / 6.0);
            }
        }
        // w¹ = w⁰ + dt(ψ₃ - Δψ₁) + dt²/2·(Δw⁰ - B ψ₁ - C·∇ψ₀ - q ψ₀ - A w⁰ + s_w⁰)
        let a0 = coeffs.a().component(0);
        let b0 = coeffs.b().component(0);
        let q0 = coeffs.q().component(0);
        let (w0_slab, _rest) = w.split_at(spatial);
        let mut w1 = vec![T::zero(); spatial];
        let psi1: &[T] = &data.psi[1];
        for s in 0..spatial {
            if is_lateral[s] {
                continue;
            }
            let mut rhs = lap(w0_slab, s)
                - psi1[s].scale(b0[s])
                - data.psi[0][s].scale(q0[s])
                - w0_slab[s].scale(a0[s]);
            for a in 0..n {
                let st = sstrides[a];
                let grad =
                    (data.psi[0][s + st] - data.psi[0][s - st]).scale(inv_2dx[a]);
                rhs = rhs - grad.scale(coeffs.c(a).component(0)[s]);
            }
            if let Some((_, s_w)) = source {
                rhs = rhs + s_w.at(0, s);
            }
            let dt_w0 = data.psi[3][s] - lap(psi1, s);
            w1[s] = w0_slab[s] + dt_w0.scale(dt) + rhs.scale(dt2 / 2.0);
        }
        for s in 0..spatial {
            if !is_lateral[s] {
                w[spatial + s] = w1[s];
            }
        }
    }

    // leapfrog sweep
    let mut window_norm: Option<f64> = None;
    for m in 1..nt - 1 {
        let base_prev = (m - 1) * spatial;
        let base_cur = m * spatial;
        let base_next = (m + 1) * spatial;
        // u-update first (independent of w^{m+1})
        for s in 0..spatial {
            if is_lateral[s] {
                u[base_next + s] = fv[base_next + s];
                continue;
            }
            let mut acc = T::zero();
            for a in 0..n {
                let st = sstrides[a];
                acc = acc
                    + (u[base_cur + s + st] - u[base_cur + s].scale(2.0)
                        + u[base_cur + s - st])
                        .scale(inv_dx2[a]);
            }
            acc = acc + w[base_cur + s];
            if let Some((s_u, _)) = source {
                acc = acc + s_u.at(0, base_cur + s);
            }
            u[base_next + s] =
                u[base_cur + s].scale(2.0) - u[base_prev + s] + acc.scale(dt2);
        }
        // w-update with the centered ∂t u at level m
        let av = coeffs.a().component(0);
        let bv = coeffs.b().component(0);
        let qv = coeffs.q().component(0);
        for s in 0..spatial {
            if is_lateral[s] {
                w[base_next + s] = gv[base_next + s];
                continue;
            }
            let mut acc = T::zero();
            for a in 0..n {
                let st = sstrides[a];
                acc = acc
                    + (w[base_cur + s + st] - w[base_cur + s].scale(2.0)
                        + w[base_cur + s - st])
                        .scale(inv_dx2[a]);
            }
            let dtu = (u[base_next + s] - u[base_prev + s]).scale(0.5 / dt);
            acc = acc - dtu.scale(bv[base_cur + s]);
            for a in 0..n {
                let st = sstrides[a];
                let grad = (u[base_cur + s + st] - u[base_cur + s - st]).scale(inv_2dx[a]);
                acc = acc - grad.scale(coeffs.c(a).component(0)[base_cur + s]);
            }
            acc = acc - u[base_cur + s].scale(qv[base_cur + s])
                - w[base_cur + s].scale(av[base_cur + s]);
            if let Some((_, s_w)) = source {
                acc = acc + s_w.at(0, base_cur + s);
            }
            w[base_next + s] =
                w[base_cur + s].scale(2.0) - w[base_prev + s] + acc.scale(dt2);
        }
        // stability guard on 10-step windows
        if (m + 1) % GUARD_WINDOW == 0 {
            let mut norm_sq = 0.0;
            for s in 0..spatial {
                norm_sq += u[base_next + s].abs_sq() + w[base_next + s].abs_sq();
            }
            let norm = norm_sq.sqrt();
            if let Some(prev) = window_norm {
                if prev > 0.0 && norm > GUARD_FACTOR * prev.max(1e-300) {
                    return Err(SolverError::Instability {
                        step: m + 1,
                        factor: norm / prev,
                        guard: GUARD_FACTOR,
                    });
                }
            }
            window_norm = Some(norm.max(window_norm.unwrap_or(0.0) * 1e-16));
        }
    }

    let mut uf = Field::zeros(&grid, 1);
    uf.values_mut().copy_from_slice(&u);
    let mut wf = Field::zeros(&grid, 1);
    wf.values_mut().copy_from_slice(&w);
    Ok(SystemState { u: uf, w: wf })
}

#[cfg(test)]
mod tests {
    use super::*;
    use bwlab_core::field::RealField;
    use bwlab_core::synth;
    use bwlab_core::C64;

    fn grid2(m: usize) -> Arc<SpaceTimeGrid> {
        // T = 0.5 keeps the CFL number at 0.5·√2·(m-1)/(m-1)... below 1
        SpaceTimeGrid::new(0.5, &[(0.0, 1.0), (0.0, 1.0)], m, &[m, m]).unwrap()
    }

    #[test]
    fn zero_data_gives_zero_history() {
        let g = grid2(17);
        let cs = bwlab_core::CoefficientSet::zeros(&g);
        let state = solve_ibvp(&cs, &IbvpData::<f64>::zeros(&g), None).unwrap();
        assert_eq!(state.u.linf(), 0.0);
        assert_eq!(state.w.linf(), 0.0);
    }

    #[test]
    fn cubic_plane_wave_is_reproduced_exactly() {
        // u* = (x·ω - t)³ has □u* = 0, so w ≡ 0 and any A is inert; the
        // cubic is differenced exactly, so the solver reproduces it to
        // rounding.
        let g = grid2(17);
        let omega = [0.6, 0.8];
        let cs = bwlab_core::CoefficientSet::from_fns(
            &g,
            |p| 0.5 + 0.2 * p[0],
            |_| 0.0,
            |_, _| 0.0,
            |_| 0.0,
        );
        let star = move |p: &[f64]| {
            let s = omega[0] * p[1] + omega[1] * p[2] - p[0];
            s * s * s
        };
        let data = IbvpData::from_closures(
            &g,
            star,
            move |k, p| {
                let s = omega[0] * p[1] + omega[1] * p[2] - p[0];
                match k {
                    0 => s * s * s,
                    1 => -3.0 * s * s,
                    2 => 6.0 * s,
                    _ => -6.0,
                }
            },
            |_| 0.0,
        );
        let state = solve_ibvp(&cs, &data, None).unwrap();
        let exact = RealField::from_fn(&g, star);
        let diff = state.u.sub_field(&exact).unwrap();
        assert!(diff.linf() < 1e-10, "L∞ = {}", diff.linf());
        assert!(state.w.linf() < 1e-10);
    }

    #[test]
    fn manufactured_solution_converges_at_second_order() {
        // u* = sin(t)·sin(πx₁)sin(πx₂), w* = □u* = λu*, nonzero (A,B,C,q)
        // with the induced source; L∞ error order ≥ 1.9 over 3 grids.
        let pi = std::f64::consts::PI;
        let lam = 2.0 * pi * pi - 1.0;
        let ustar = move |p: &[f64]| p[0].sin() * (pi * p[1]).sin() * (pi * p[2]).sin();
        let mut errs = Vec::new();
        for &m in &[9usize, 17, 33] {
            let g = grid2(m);
            let fam = synth::CoefficientFamily {
                a: std::sync::Arc::new(|p: &[f64]| 0.4 + 0.2 * (p[0] + p[1]).sin()),
                b: std::sync::Arc::new(|p: &[f64]| 0.5 - 0.3 * (p[2]).cos()),
                c: vec![
                    std::sync::Arc::new(|p: &[f64]| 0.3 * (p[0]).cos()) as synth::AnalyticFn,
                    std::sync::Arc::new(|_: &[f64]| -0.2) as synth::AnalyticFn,
                ],
                q: std::sync::Arc::new(|p: &[f64]| 0.8 + 0.1 * (2.0 * p[1]).sin()),
            };
            let cs = fam.sample(&g);
            let s_w = RealField::from_fn(&g, |p| {
                let u = ustar(p);
                let ut = p[0].cos() * (pi * p[1]).sin() * (pi * p[2]).sin();
                let ux = pi * p[0].sin() * (pi * p[1]).cos() * (pi * p[2]).sin();
                let uy = pi * p[0].sin() * (pi * p[1]).sin() * (pi * p[2]).cos();
                lam * lam * u
                    + (fam.a)(p) * lam * u
                    + (fam.b)(p) * ut
                    + (fam.c[0])(p) * ux
                    + (fam.c[1])(p) * uy
                    + (fam.q)(p) * u
            });
            let s_u = RealField::zeros(&g, 1);
            let data = IbvpData::from_closures(
                &g,
                ustar,
                move |k, p| {
                    let sp = (pi * p[1]).sin() * (pi * p[2]).sin();
                    match k {
                        0 => p[0].sin() * sp,
                        1 => p[0].cos() * sp,
                        2 => -p[0].sin() * sp,
                        _ => -p[0].cos() * sp,
                    }
                },
                move |p| lam * ustar(p),
            );
            let state = solve_ibvp(&cs, &data, Some((&s_u, &s_w))).unwrap();
            let exact = RealField::from_fn(&g, ustar);
            errs.push(state.u.sub_field(&exact).unwrap().linf());
        }
        let o1 = (errs[0] / errs[1]).log2();
        let o2 = (errs[1] / errs[2]).log2();
        assert!(o1 > 1.9 && o2 > 1.9, "orders {o1:.2} {o2:.2}, errs {errs:?}");
    }

    #[test]
    fn solve_is_linear_in_the_data() {
        let g = grid2(13);
        let fam = synth::CoefficientFamily::random_smooth(&g, 5, 0.8);
        let cs = fam.sample(&g);
        let mk = |seed: u64| {
            let f = synth::band_limited_random(&g, seed, 2, 1.0);
            IbvpData::<f64>::from_closures(
                &g,
                |p| f(p),
                |k, p| if k == 0 { f(p) } else { 0.0 },
                |_| 0.0,
            )
        };
        let d1 = mk(100);
        let d2 = mk(200);
        let combo = d1.scaled(2.0).add(&d2.scaled(-0.5)).unwrap();
        let s1 = solve_ibvp(&cs, &d1, None).unwrap();
        let s2 = solve_ibvp(&cs, &d2, None).unwrap();
        let sc = solve_ibvp(&cs, &combo, None).unwrap();
        let expect = s1.u.scaled(2.0).add_field(&s2.u.scaled(-0.5)).unwrap();
        let scale = expect.linf().max(1e-30);
        let diff = sc.u.sub_field(&expect).unwrap();
        assert!(diff.linf() / scale < 1e-10, "{}", diff.linf() / scale);
    }

    #[test]
    fn finite_propagation_speed_n1() {
        // n = 1 with CFL near 1: the stencil cone (one cell per step) sits
        // inside ball + t + 2 cells, so the solution is exactly zero there
        let nx = 201;
        let dx = 1.0 / (nx as f64 - 1.0);
        let dt = 0.98 * dx;
        let nt = (0.5 / dt).floor() as usize + 1;
        let t_final = dt * (nt - 1) as f64;
        let g = SpaceTimeGrid::new(t_final, &[(0.0, 1.0)], nt, &[nx]).unwrap();
        let cs = bwlab_core::CoefficientSet::zeros(&g);
        let r0 = 0.1;
        let mut data = IbvpData::<f64>::zeros(&g);
        let spatial: usize = g.nx().iter().product();
        for s in 0..spatial {
            let p = g.point(&g.decode(s));
            data.psi[0][s] = synth::bump1((p[1] - 0.5) / r0);
        }
        let state = solve_ibvp(&cs, &data, None).unwrap();
        let mut worst: f64 = 0.0;
        for f in 0..g.total_nodes() {
            let p = g.point(&g.decode(f));
            if (p[1] - 0.5).abs() > r0 + p[0] + 2.0 * dx {
                worst = worst.max(state.u.at(0, f).abs()).max(state.w.at(0, f).abs());
            }
        }
        assert!(worst <= 1e-12, "leakage {worst:e}");
    }

    #[test]
    fn finite_propagation_discrete_cone_n2() {
        // n = 2: one cell per axis per step (discrete domain of dependence),
        // exactly zero beyond the dilated ball
        let g = SpaceTimeGrid::new(0.4, &[(0.0, 1.0), (0.0, 1.0)], 27, &[33, 33]).unwrap();
        let cs = bwlab_core::CoefficientSet::zeros(&g);
        let r0 = 0.15;
        let mut data = IbvpData::<f64>::zeros(&g);
        let spatial: usize = g.nx().iter().product();
        for s in 0..spatial {
            let p = g.point(&g.decode(s));
            let r = ((p[1] - 0.5).powi(2) + (p[2] - 0.5).powi(2)).sqrt();
            data.psi[0][s] = synth::bump1(r / r0);
        }
        let state = solve_ibvp(&cs, &data, None).unwrap();
        let cell = g.dx()[0].max(g.dx()[1]);
        let mut worst: f64 = 0.0;
        for f in 0..g.total_nodes() {
            let idx = g.decode(f);
            let p = g.point(&idx);
            let spread = idx[0] as f64 * cell;
            let cheb = (p[1] - 0.5).abs().max((p[2] - 0.5).abs());
            if cheb > r0 + spread + 2.0 * cell {
                worst = worst.max(state.u.at(0, f).abs()).max(state.w.at(0, f).abs());
            }
        }
        assert!(worst <= 1e-12, "leakage {worst:e}");
    }

    #[test]
    fn box_consistency_within_truncation_bound() {
        // the u-update enforces □u = w at interior nodes by construction,
        // so the defect sits at rounding level, far under C(dt²+dx²)
        let pi = std::f64::consts::PI;
        let mut defects = Vec::new();
        let mut bounds = Vec::new();
        for &m in &[9usize, 17, 33] {
            let g = grid2(m);
            let cs = bwlab_core::CoefficientSet::zeros(&g);
            let data = IbvpData::from_closures(
                &g,
                move |p: &[f64]| p[0].sin() * (pi * p[1]).sin() * (pi * p[2]).sin(),
                move |k, p| {
                    let sp = (pi * p[1]).sin() * (pi * p[2]).sin();
                    match k {
                        0 => p[0].sin() * sp,
                        1 => p[0].cos() * sp,
                        2 => -p[0].sin() * sp,
                        _ => -p[0].cos() * sp,
                    }
                },
                move |p| (2.0 * pi * pi - 1.0) * p[0].sin() * (pi * p[1]).sin() * (pi * p[2]).sin(),
            );
            let state = solve_ibvp(&cs, &data, None).unwrap();
            defects.push(state.box_consistency(None).unwrap());
            bounds.push(g.truncation_scale());
        }
        for (d, b) in defects.iter().zip(&bounds) {
            assert!(d <= b, "defect {d:e} exceeds C(dt²+dx²) = {b:e}");
        }
    }

    #[test]
    fn instability_guard_trips_on_runaway_growth() {
        // □w = -Aw with A = -30 grows at rate √30 ≈ 5.5; with dt ≈ 0.09 a
        // 10-step window multiplies the norm by ~100x and the guard fires
        let g = SpaceTimeGrid::new(4.5, &[(0.0, 1.0)], 51, &[11]).unwrap();
        let cs =
            bwlab_core::CoefficientSet::from_fns(&g, |_| -30.0, |_| 0.0, |_, _| 0.0, |_| 0.0);
        let f = synth::centered_bump(&g, 0.5);
        let mut data = IbvpData::<f64>::zeros(&g);
        let spatial: usize = g.nx().iter().product();
        for s in 0..spatial {
            let p = g.point(&g.decode(s));
            data.psi[2][s] = f(&[2.25, p[1]]);
        }
        match solve_ibvp(&cs, &data, None) {
            Err(SolverError::Instability { .. }) => {}
            other => panic!("expected instability guard, got {other:?}"),
        }
    }

    #[test]
    fn complex_data_is_supported() {
        let g = grid2(9);
        let cs = bwlab_core::CoefficientSet::zeros(&g);
        let data = IbvpData::<C64>::from_closures(
            &g,
            |p| C64::new(p[1], p[2]),
            |k, p| if k == 0 { C64::new(p[1], p[2]) } else { C64::new(0.0, 0.0) },
            |_| C64::new(0.0, 0.0),
        );
        let state = solve_ibvp(&cs, &data, None).unwrap();
        // u* = x + iy is harmonic and time-independent: preserved exactly
        for f in 0..g.total_nodes() {
            let p = g.point(&g.decode(f));
            assert!((state.u.at(0, f) - C64::new(p[1], p[2])).norm() < 1e-11);
        }
    }
}

//! Analytic test-function and coefficient families: C∞ tensor bumps,
//! modulated bumps, and seeded band-limited random fields. Everything here
//! is a closure of the space-time point, so the same function can be
//! sampled on arbitrarily refined grids (refinement sweeps) and stays
//! reproducible from a single recorded seed.

use crate::coeffs::CoefficientSet;
use crate::field::RealField;
use crate::grid::SpaceTimeGrid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Shareable analytic scalar function on space-time.
pub type AnalyticFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// C∞ bump of one variable: exp(1 - 1/(1-s²)) for |s|<1, else 0. Peaks at 1.
#[inline]
pub fn bump1(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

/// Tensor bump centered at `center` with half-widths `halfwidth` per axis
/// (time axis included). Support is the open box `|y_k - c_k| < w_k`.
pub fn tensor_bump(center: Vec<f64>, halfwidth: Vec<f64>) -> AnalyticFn {
    Arc::new(move |p: &[f64]| {
        let mut v = 1.0;
        for k in 0..center.len() {
            v *= bump1((p[k] - center[k]) / halfwidth[k]);
            if v == 0.0 {
                return 0.0;
            }
        }
        v
    })
}

/// Bump centered in a grid's box, shrunk by `shrink` (0 < shrink ≤ 1) so the
/// support stays strictly inside Q.
pub fn centered_bump(grid: &SpaceTimeGrid, shrink: f64) -> AnalyticFn {
    let dims = grid.dims();
    let mut center = Vec::with_capacity(dims);
    let mut hw = Vec::with_capacity(dims);
    for k in 0..dims {
        let lo = grid.origin(k);
        let hi = lo + (grid.shape(k) - 1) as f64 * grid.spacing(k);
        center.push(0.5 * (lo + hi));
        hw.push(0.5 * (hi - lo) * shrink);
    }
    tensor_bump(center, hw)
}

/// `bump(y) · cos(k·y + phase)` — a modulated bump.
pub fn modulated_bump(base: AnalyticFn, wavevec: Vec<f64>, phase: f64) -> AnalyticFn {
    Arc::new(move |p: &[f64]| {
        let mut ph = phase;
        for (k, &w) in wavevec.iter().enumerate() {
            ph += w * p[k];
        }
        base(p) * ph.cos()
    })
}

/// Seeded band-limited random field: a C∞ bump window times a random
/// trigonometric polynomial with integer wave numbers up to `max_mode`.
pub fn band_limited_random(grid: &SpaceTimeGrid, seed: u64, max_mode: usize, amplitude: f64) -> AnalyticFn {
    let raw = trig_random(grid, seed, max_mode, amplitude);
    let window = centered_bump(grid, 0.9);
    Arc::new(move |p: &[f64]| window(p) * raw(p))
}

/// Window `Π sin⁴(π(y_k - lo_k)/extent_k)`: vanishes with three derivatives
/// on ∂Q and has moderate higher derivatives, unlike the C∞ bump whose
/// 5th/6th-order derivative spikes keep fourth-order operators preasymptotic
/// on desk-scale grids.
pub fn sin4_window(grid: &SpaceTimeGrid) -> AnalyticFn {
    let dims = grid.dims();
    let mut lo = Vec::with_capacity(dims);
    let mut extent = Vec::with_capacity(dims);
    for k in 0..dims {
        lo.push(grid.origin(k));
        extent.push((grid.shape(k) - 1) as f64 * grid.spacing(k));
    }
    Arc::new(move |p: &[f64]| {
        let mut w = 1.0;
        for k in 0..lo.len() {
            let s = (p[k] - lo[k]) / extent[k];
            if !(0.0..=1.0).contains(&s) {
                return 0.0;
            }
            w *= (std::f64::consts::PI * s).sin().powi(4);
        }
        w
    })
}

/// Seeded random trigonometric polynomial times the sin⁴ window: the smooth
/// compactly-supported corpus for adjoint/Carleman probes.
pub fn windowed_trig_random(
    grid: &SpaceTimeGrid,
    seed: u64,
    max_mode: usize,
    amplitude: f64,
) -> AnalyticFn {
    let raw = trig_random(grid, seed, max_mode, amplitude);
    let window = sin4_window(grid);
    Arc::new(move |p: &[f64]| window(p) * raw(p))
}

/// Seeded random trigonometric polynomial (no window).
pub fn trig_random(grid: &SpaceTimeGrid, seed: u64, max_mode: usize, amplitude: f64) -> AnalyticFn {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = grid.dims();
    let mut extents = Vec::with_capacity(dims);
    let mut origins = Vec::with_capacity(dims);
    for k in 0..dims {
        origins.push(grid.origin(k));
        extents.push((grid.shape(k) - 1) as f64 * grid.spacing(k));
    }
    let mut modes: Vec<(Vec<f64>, f64, f64)> = Vec::new();
    let mut counter = vec![0i64; dims];
    let m = max_mode as i64;
    loop {
        if counter.iter().any(|&c| c != 0) {
            let wave: Vec<f64> = counter
                .iter()
                .enumerate()
                .map(|(k, &c)| 2.0 * std::f64::consts::PI * c as f64 / extents[k])
                .collect();
            let coeff: f64 = rng.gen_range(-1.0..1.0);
            let phase: f64 = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            modes.push((wave, coeff, phase));
        }
        let mut k = 0;
        loop {
            if k == dims {
                break;
            }
            counter[k] += 1;
            if counter[k] > m {
                counter[k] = -m;
                k += 1;
            } else {
                break;
            }
        }
        if k == dims {
            break;
        }
    }
    let norm: f64 = amplitude / (modes.len() as f64).sqrt();
    Arc::new(move |p: &[f64]| {
        let mut v = 0.0;
        for (wave, coeff, phase) in &modes {
            let mut ph = *phase;
            for (k, w) in wave.iter().enumerate() {
                ph += w * (p[k] - origins[k]);
            }
            v += coeff * ph.cos();
        }
        v * norm
    })
}

/// The zero function.
pub fn zero_fn() -> AnalyticFn {
    Arc::new(|_| 0.0)
}

/// A constant.
pub fn constant_fn(v: f64) -> AnalyticFn {
    Arc::new(move |_| v)
}

/// Analytic coefficient quadruple; `c` has one entry per spatial axis.
#[derive(Clone)]
pub struct CoefficientFamily {
    pub a: AnalyticFn,
    pub b: AnalyticFn,
    pub c: Vec<AnalyticFn>,
    pub q: AnalyticFn,
}

impl CoefficientFamily {
    pub fn zero(n: usize) -> Self {
        Self { a: zero_fn(), b: zero_fn(), c: (0..n).map(|_| zero_fn()).collect(), q: zero_fn() }
    }

    pub fn constants(a: f64, b: f64, c: &[f64], q: f64) -> Self {
        Self {
            a: constant_fn(a),
            b: constant_fn(b),
            c: c.iter().map(|&v| constant_fn(v)).collect(),
            q: constant_fn(q),
        }
    }

    /// Smooth seeded random coefficients, compactly supported inside Q.
    pub fn random_smooth(grid: &SpaceTimeGrid, seed: u64, scale: f64) -> Self {
        let n = grid.n();
        Self {
            a: band_limited_random(grid, seed, 2, scale),
            b: band_limited_random(grid, seed.wrapping_add(1), 2, scale),
            c: (0..n)
                .map(|ax| band_limited_random(grid, seed.wrapping_add(2 + ax as u64), 2, scale))
                .collect(),
            q: band_limited_random(grid, seed.wrapping_add(10), 2, scale),
        }
    }

    pub fn sample(&self, grid: &Arc<SpaceTimeGrid>) -> CoefficientSet {
        CoefficientSet::from_fns(
            grid,
            |p| (self.a)(p),
            |p| (self.b)(p),
            |ax, p| (self.c[ax])(p),
            |p| (self.q)(p),
        )
    }
}

/// Sample a scalar analytic function on a grid.
pub fn sample_scalar(grid: &Arc<SpaceTimeGrid>, f: &AnalyticFn) -> RealField {
    RealField::from_fn(grid, |p| f(p))
}

/// Seeded corpus of compactly supported test functions: a tensor bump, a
/// modulated bump and `extra` band-limited random fields.
pub fn test_function_corpus(grid: &Arc<SpaceTimeGrid>, seed: u64, extra: usize) -> Vec<AnalyticFn> {
    let mut corpus = Vec::with_capacity(2 + extra);
    let base = centered_bump(grid, 0.8);
    corpus.push(base.clone());
    let dims = grid.dims();
    let mut wave = vec![0.0; dims];
    for (k, w) in wave.iter_mut().enumerate() {
        let extent = (grid.shape(k) - 1) as f64 * grid.spacing(k);
        *w = 2.0 * std::f64::consts::PI / extent * if k == 0 { 2.0 } else { 1.0 };
    }
    corpus.push(modulated_bump(base, wave, 0.3));
    for j in 0..extra {
        corpus.push(band_limited_random(grid, seed.wrapping_add(j as u64), 2, 1.0));
    }
    corpus
}

//! Unit directions `ω ∈ S^{n-1}`, the characteristic covector `(1, -ω)`,
//! the Carleman phase `φ(t,x) = t + x·ω`, and frequency vectors constrained
//! to the hyperplane `ξ·(1,-ω) = 0`.

use crate::error::{CoreError, Result};

pub const UNIT_TOL: f64 = 1e-12;

/// A unit spatial direction together with the neighborhood radius used for
/// `N_ε(ω₀)` sampling (chordal distance on the sphere).
#[derive(Debug, Clone, PartialEq)]
pub struct Direction {
    omega: Vec<f64>,
    epsilon: f64,
}

impl Direction {
    pub fn new(omega: &[f64]) -> Result<Self> {
        Self::with_epsilon(omega, 0.3)
    }

    pub fn with_epsilon(omega: &[f64], epsilon: f64) -> Result<Self> {
        let norm = omega.iter().map(|w| w * w).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(CoreError::NotUnit(norm));
        }
        if !(epsilon > 0.0 && epsilon <= 2.0) {
            return Err(CoreError::BadEpsilon(epsilon));
        }
        Ok(Self { omega: omega.to_vec(), epsilon })
    }

    /// Normalizes the input before constructing.
    pub fn from_unnormalized(v: &[f64], epsilon: f64) -> Result<Self> {
        let norm = v.iter().map(|w| w * w).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(CoreError::NotUnit(0.0));
        }
        let omega: Vec<f64> = v.iter().map(|w| w / norm).collect();
        Self::with_epsilon(&omega, epsilon)
    }

    pub fn n(&self) -> usize {
        self.omega.len()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The space-time covector `(1, -ω)`.
    pub fn char_covector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(1 + self.omega.len());
        v.push(1.0);
        v.extend(self.omega.iter().map(|w| -w));
        v
    }

    /// Carleman phase `φ(t,x) = t + x·ω` at a space-time point `(t, x..)`.
    #[inline]
    pub fn phi(&self, p: &[f64]) -> f64 {
        let mut s = p[0];
        for (a, w) in self.omega.iter().enumerate() {
            s += p[1 + a] * w;
        }
        s
    }

    /// Linear amplitude weight `ℓ(t,x) = (1,-ω)·(t,x) = t - x·ω`.
    #[inline]
    pub fn ell(&self, p: &[f64]) -> f64 {
        let mut s = p[0];
        for (a, w) in self.omega.iter().enumerate() {
            s -= p[1 + a] * w;
        }
        s
    }

    #[inline]
    pub fn dot_spatial(&self, x: &[f64]) -> f64 {
        self.omega.iter().zip(x).map(|(w, xi)| w * xi).sum()
    }

    /// Chordal distance to another direction.
    pub fn distance(&self, other: &Direction) -> f64 {
        self.omega
            .iter()
            .zip(&other.omega)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Deterministic sample of `N_ε(ω₀) = {y ∈ S^{n-1}: |y-ω₀| ≤ ε}`,
    /// including `ω₀` itself.
    pub fn neighborhood_samples(&self, count: usize) -> Vec<Direction> {
        let mut out = Vec::with_capacity(count.max(1));
        match self.n() {
            1 => {
                out.push(self.clone());
                if self.epsilon >= 2.0 {
                    out.push(Direction { omega: vec![-self.omega[0]], epsilon: self.epsilon });
                }
            }
            2 => {
                let theta0 = self.omega[1].atan2(self.omega[0]);
                // chord ≤ ε  ⇔  |Δθ| ≤ 2 asin(ε/2)
                let alpha = 2.0 * (self.epsilon / 2.0).min(1.0).asin();
                let m = count.max(1);
                for k in 0..m {
                    let s = if m == 1 { 0.0 } else { -1.0 + 2.0 * k as f64 / (m - 1) as f64 };
                    let th = theta0 + s * alpha;
                    out.push(Direction { omega: vec![th.cos(), th.sin()], epsilon: self.epsilon });
                }
            }
            _ => {
                // spherical cap sampled on a deterministic spiral
                let cap = 2.0 * (self.epsilon / 2.0).min(1.0).asin();
                let (u, v) = orthonormal_complement(&self.omega);
                let m = count.max(1);
                let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
                for k in 0..m {
                    if k == 0 {
                        out.push(self.clone());
                        continue;
                    }
                    let r = cap * (k as f64 / (m - 1).max(1) as f64).sqrt();
                    let ang = golden * k as f64;
                    let mut w = vec![0.0; 3];
                    for i in 0..3 {
                        w[i] = r.cos() * self.omega[i]
                            + r.sin() * (ang.cos() * u[i] + ang.sin() * v[i]);
                    }
                    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
                    for x in w.iter_mut() {
                        *x /= norm;
                    }
                    out.push(Direction { omega: w, epsilon: self.epsilon });
                }
            }
        }
        out
    }

    /// Uniform full-sphere sweep (n=1: both signs; n=2: equispaced circle;
    /// n=3: Fibonacci sphere). Deterministic.
    pub fn full_sphere(n: usize, count: usize) -> Vec<Direction> {
        let eps = 2.0;
        match n {
            1 => vec![
                Direction { omega: vec![1.0], epsilon: eps },
                Direction { omega: vec![-1.0], epsilon: eps },
            ],
            2 => (0..count.max(1))
                .map(|k| {
                    let th = 2.0 * std::f64::consts::PI * k as f64 / count.max(1) as f64;
                    Direction { omega: vec![th.cos(), th.sin()], epsilon: eps }
                })
                .collect(),
            _ => {
                let m = count.max(2);
                let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
                (0..m)
                    .map(|k| {
                        let z = 1.0 - 2.0 * (k as f64 + 0.5) / m as f64;
                        let r = (1.0 - z * z).sqrt();
                        let ang = golden * k as f64;
                        Direction { omega: vec![r * ang.cos(), r * ang.sin(), z], epsilon: eps }
                    })
                    .collect()
            }
        }
    }

    /// Orthonormal basis of the hyperplane `(1,-ω)^⊥ ⊂ ℝ^{1+n}`
    /// (n vectors, deterministic Gram-Schmidt against canonical axes).
    pub fn hyperplane_basis(&self) -> Vec<Vec<f64>> {
        let d = 1 + self.n();
        let nu: Vec<f64> = {
            let c = self.char_covector();
            let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            c.iter().map(|x| x / norm).collect()
        };
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(self.n());
        for k in 0..d {
            if basis.len() == self.n() {
                break;
            }
            let mut e = vec![0.0; d];
            e[k] = 1.0;
            // project out nu and previously accepted vectors
            let pn: f64 = e.iter().zip(&nu).map(|(a, b)| a * b).sum();
            for i in 0..d {
                e[i] -= pn * nu[i];
            }
            for b in &basis {
                let pb: f64 = e.iter().zip(b).map(|(a, c)| a * c).sum();
                for i in 0..d {
                    e[i] -= pb * b[i];
                }
            }
            let norm = e.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                for x in e.iter_mut() {
                    *x /= norm;
                }
                basis.push(e);
            }
        }
        debug_assert_eq!(basis.len(), self.n());
        basis
    }
}

fn orthonormal_complement(w: &[f64]) -> (Vec<f64>, Vec<f64>) {
    debug_assert_eq!(w.len(), 3);
    let pick = if w[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let dot: f64 = w.iter().zip(&pick).map(|(a, b)| a * b).sum();
    let mut u: Vec<f64> = (0..3).map(|i| pick[i] - dot * w[i]).collect();
    let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in u.iter_mut() {
        *x /= norm;
    }
    let v = vec![
        w[1] * u[2] - w[2] * u[1],
        w[2] * u[0] - w[0] * u[2],
        w[0] * u[1] - w[1] * u[0],
    ];
    (u, v)
}

/// A space-time frequency `ξ = (ξ₀, ξ')` with pairing `ξ·(t,x) = ξ₀ t + ξ'·x`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyVector {
    xi: Vec<f64>,
}

impl FrequencyVector {
    pub fn new(xi: &[f64]) -> Result<Self> {
        if xi.iter().any(|x| !x.is_finite()) {
            return Err(CoreError::InvalidGrid("frequency has non-finite component".into()));
        }
        Ok(Self { xi: xi.to_vec() })
    }

    pub fn zero(dims: usize) -> Self {
        Self { xi: vec![0.0; dims] }
    }

    pub fn components(&self) -> &[f64] {
        &self.xi
    }

    pub fn temporal(&self) -> f64 {
        self.xi[0]
    }

    pub fn spatial(&self) -> &[f64] {
        &self.xi[1..]
    }

    #[inline]
    pub fn dot(&self, p: &[f64]) -> f64 {
        self.xi.iter().zip(p).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.xi.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `ξ·(1,-ω)`; zero exactly when the frequency rides the characteristic.
    pub fn char_defect(&self, dir: &Direction) -> f64 {
        let mut s = self.xi[0];
        for (a, w) in dir.omega().iter().enumerate() {
            s -= self.xi[1 + a] * w;
        }
        s
    }

    pub fn ensure_characteristic(&self, dir: &Direction) -> Result<()> {
        let d = self.char_defect(dir);
        if d.abs() > UNIT_TOL * (1.0 + self.norm()) {
            return Err(CoreError::NotCharacteristic(d));
        }
        Ok(())
    }

    /// Strictly spacelike: `|ξ₀| < |ξ'|` (the set reached by some unit ω).
    pub fn is_spacelike(&self) -> bool {
        let sp: f64 = self.spatial().iter().map(|x| x * x).sum::<f64>().sqrt();
        self.temporal().abs() < sp
    }
}

/// For n = 2: the (up to two) unit directions ω on the circle with
/// `ξ·(1,-ω) = 0`, i.e. `ξ'·ω = ξ₀`. Empty if ξ is not spacelike.
pub fn circle_directions_for(xi: &FrequencyVector, epsilon: f64) -> Vec<Direction> {
    assert_eq!(xi.components().len(), 3, "circle_directions_for expects n = 2");
    let (a, b, c) = (xi.spatial()[0], xi.spatial()[1], xi.temporal());
    let r2 = a * a + b * b;
    if r2 == 0.0 {
        return vec![];
    }
    let r = r2.sqrt();
    if c.abs() >= r {
        return vec![];
    }
    // solve a cosθ + b sinθ = c on the unit circle
    let base = b.atan2(a);
    let delta = (c / r).acos();
    let mut out = Vec::new();
    for s in [1.0, -1.0] {
        let th = base + s * delta;
        if let Ok(d) = Direction::with_epsilon(&[th.cos(), th.sin()], epsilon) {
            out.push(d);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_unit() {
        assert!(Direction::new(&[1.0, 0.5]).is_err());
        assert!(Direction::new(&[3.0 / 5.0, 4.0 / 5.0]).is_ok());
    }

    #[test]
    fn hyperplane_basis_is_orthonormal() {
        let d = Direction::new(&[0.6, 0.8]).unwrap();
        let basis = d.hyperplane_basis();
        assert_eq!(basis.len(), 2);
        let nu = d.char_covector();
        for b in &basis {
            let dn: f64 = b.iter().zip(&nu).map(|(x, y)| x * y).sum();
            assert!(dn.abs() < 1e-12);
            let norm: f64 = b.iter().map(|x| x * x).sum();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        let cross: f64 = basis[0].iter().zip(&basis[1]).map(|(x, y)| x * y).sum();
        assert!(cross.abs() < 1e-12);
    }

    #[test]
    fn circle_directions_solve_constraint() {
        let xi = FrequencyVector::new(&[1.0, 2.0, -1.5]).unwrap();
        assert!(xi.is_spacelike());
        let dirs = circle_directions_for(&xi, 2.0);
        assert_eq!(dirs.len(), 2);
        for d in &dirs {
            assert!(xi.char_defect(d).abs() < 1e-10);
        }
        let timelike = FrequencyVector::new(&[2.0, 1.0, 0.5]).unwrap();
        assert!(circle_directions_for(&timelike, 2.0).is_empty());
    }

    #[test]
    fn neighborhood_stays_in_cap() {
        let d = Direction::with_epsilon(&[1.0, 0.0], 0.3).unwrap();
        for s in d.neighborhood_samples(9) {
            assert!(d.distance(&s) <= 0.3 + 1e-12);
        }
    }
}

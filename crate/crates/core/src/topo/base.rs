//! Equivariant observables `X → Lip(R^k)` evaluated lazily along orbits.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::flows::Flow;
use crate::lipfun::{GridFunction, GridSpec};

/// Default number of Gauss–Hermite nodes per axis.
pub const DEFAULT_HERMITE_POINTS: usize = 40;

/// Outermost quadrature node must reach this many kernel widths.
pub const TAIL_WIDTHS: f64 = 6.0;

/// A map `x ↦ f(x) ∈ Lip_τ(R^k)` evaluated pointwise.
pub trait Ensemble {
    fn eval(&self, x: &[f64], t: &[f64]) -> f64;

    /// Declared Lipschitz constant of every `f(x)`.
    fn tau(&self) -> f64;

    fn on_grid(&self, x: &[f64], grid: &GridSpec) -> GridFunction {
        GridFunction::from_fn(grid.clone(), self.tau(), |t| self.eval(x, t))
    }
}

/// Nodes and weights of the `n`-point Gauss–Hermite rule for `e^{-v²}`,
/// weights normalised to sum to one (Golub–Welsch).
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one quadrature node".into()));
    }
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Symmetrise to remove eigen-solver asymmetry.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let v = 0.5 * (pairs[j].0 - pairs[i].0);
        let w = 0.5 * (pairs[i].1 + pairs[j].1);
        pairs[i] = (-v, w);
        pairs[j] = (v, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    Ok((pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1 / total).collect()))
}

/// `f₀(x)(t) = ∫ φ(t - s) h₁(s·x) ds` with the Gaussian kernel
/// `φ(u) = (√π b)^{-k} exp(-|u|²/b²)`, integrated in `u = t - s`.
#[derive(Debug, Clone)]
pub struct GaussianBase {
    flow: Flow,
    bwidth: f64,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

/// Smallest admissible kernel width `4k/√π`.
pub fn min_bwidth(k: usize) -> f64 {
    4.0 * k as f64 / std::f64::consts::PI.sqrt()
}

impl GaussianBase {
    pub fn new(flow: &Flow, bwidth: f64) -> Result<Self> {
        Self::with_nodes(flow, bwidth, DEFAULT_HERMITE_POINTS)
    }

    pub fn with_nodes(flow: &Flow, bwidth: f64, n: usize) -> Result<Self> {
        let k = flow.k();
        let lo = min_bwidth(k);
        if !(bwidth >= lo * (1.0 - 1e-12)) {
            return Err(Error::InvalidParameter(format!("kernel width {bwidth} below 4k/sqrt(pi) = {lo}")));
        }
        let (v, w) = gauss_hermite(n)?;
        let reach = v.last().copied().unwrap_or(0.0);
        if reach < TAIL_WIDTHS {
            return Err(Error::InvalidParameter(format!(
                "{n} Hermite nodes reach {reach} widths, need {TAIL_WIDTHS}"
            )));
        }
        let total = n.pow(k as u32);
        let mut nodes = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rem = flat;
            let mut node = vec![0.0; k];
            let mut weight = 1.0;
            for axis in (0..k).rev() {
                let i = rem % n;
                rem /= n;
                node[axis] = bwidth * v[i];
                weight *= w[i];
            }
            nodes.push(node);
            weights.push(weight);
        }
        Ok(Self { flow: flow.clone(), bwidth, nodes, weights })
    }

    pub fn bwidth(&self) -> f64 {
        self.bwidth
    }

    pub fn flow(&self) -> &Flow {
        &self.flow
    }
}

impl Ensemble for GaussianBase {
    fn eval(&self, x: &[f64], t: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (u, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * self.flow.observe_shifted(x, t, u);
        }
        acc.clamp(0.0, 1.0)
    }

    fn tau(&self) -> f64 {
        0.5
    }
}

/// `f₀(x)` sampled on `window`.
pub fn gaussian_base(flow: &Flow, bwidth: f64, x: &[f64], window: &GridSpec) -> Result<GridFunction> {
    if window.dim() != flow.k() {
        return Err(Error::GridMismatch(format!("window dimension {} for k={}", window.dim(), flow.k())));
    }
    Ok(GaussianBase::new(flow, bwidth)?.on_grid(x, window))
}

/// `F(x)(t) = 1/2 + κ (h₁(t·x) - 1/2)`: the base observable read along the orbit,
/// compressed towards 1/2.
#[derive(Debug, Clone)]
pub struct OrbitObservable {
    flow: Flow,
    kappa: f64,
}

impl OrbitObservable {
    pub fn new(flow: &Flow, kappa: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&kappa) {
            return Err(Error::InvalidParameter(format!("kappa {kappa} outside [0, 1]")));
        }
        Ok(Self { flow: flow.clone(), kappa })
    }

    /// Lipschitz constant of `t ↦ h₁(t·x)`.
    pub fn h1_lipschitz(flow: &Flow) -> f64 {
        match flow {
            Flow::Torus { k, scale } => 0.5 * std::f64::consts::PI / (scale * (*k as f64).sqrt()),
            Flow::Logistic => 0.25,
        }
    }
}

impl Ensemble for OrbitObservable {
    fn eval(&self, x: &[f64], t: &[f64]) -> f64 {
        let zero = [0.0; 8];
        let h = self.flow.observe_shifted(x, t, &zero[..t.len()]);
        0.5 + self.kappa * (h - 0.5)
    }

    fn tau(&self) -> f64 {
        self.kappa * Self::h1_lipschitz(&self.flow)
    }
}

/// `(1 - δ) f + δ f₀`.
pub struct Blend<'a> {
    f: &'a dyn Ensemble,
    f0: &'a dyn Ensemble,
    delta: f64,
}

pub fn blend<'a>(f: &'a dyn Ensemble, f0: &'a dyn Ensemble, delta: f64) -> Result<Blend<'a>> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameter(format!("blend weight {delta} outside [0, 1]")));
    }
    Ok(Blend { f, f0, delta })
}

impl Blend<'_> {
    pub fn delta(&self) -> f64 {
        self.delta
    }
}

impl Ensemble for Blend<'_> {
    fn eval(&self, x: &[f64], t: &[f64]) -> f64 {
        if self.delta == 0.0 {
            return self.f.eval(x, t);
        }
        if self.delta == 1.0 {
            return self.f0.eval(x, t);
        }
        (1.0 - self.delta) * self.f.eval(x, t) + self.delta * self.f0.eval(x, t)
    }

    fn tau(&self) -> f64 {
        (1.0 - self.delta) * self.f.tau() + self.delta * self.f0.tau()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::{logistic_interval_flow, torus_translation_flow};
    use crate::lipfun::lip_const_estimate;

    #[test]
    fn hermite_rule_integrates_moments() {
        let (v, w) = gauss_hermite(40).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        // Under e^{-v²}/√π: E[v²] = 1/2, E[v⁴] = 3/4.
        let m2: f64 = v.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        let m4: f64 = v.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert!((m2 - 0.5).abs() < 1e-12);
        assert!((m4 - 0.75).abs() < 1e-12);
        assert!(*v.last().unwrap() > TAIL_WIDTHS);
    }

    #[test]
    fn constant_observable_is_reproduced() {
        let f = torus_translation_flow(1, 8.0).unwrap();
        let base = GaussianBase::new(&f, min_bwidth(1)).unwrap();
        let obs = OrbitObservable::new(&f, 0.0).unwrap();
        assert_eq!(obs.eval(&[0.3], &[1.0]), 0.5);
        // cos averages against the Gaussian with factor exp(-(π b/λ)²).
        let b = min_bwidth(1);
        let damp = (-(std::f64::consts::PI * b / 8.0).powi(2)).exp();
        for t in [-3.0, 0.0, 2.5] {
            let expect = 0.5 + 0.25 * damp * (2.0 * std::f64::consts::PI * (0.3 + t / 8.0)).cos();
            assert!((base.eval(&[0.3], &[t]) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn width_below_bound_rejected() {
        let f = logistic_interval_flow();
        assert!(GaussianBase::new(&f, 1.0).is_err());
        assert!(GaussianBase::with_nodes(&f, 3.0, 10).is_err());
    }

    #[test]
    fn logistic_base_is_half_lipschitz() {
        let f = logistic_interval_flow();
        let w = GridSpec::symmetric(1, -10.0, 10.0, 201).unwrap();
        for x in [0.01, 0.3, 0.5, 0.97] {
            let g = gaussian_base(&f, min_bwidth(1), &Flow::logistic_state(x), &w).unwrap();
            assert!(lip_const_estimate(&g).unwrap() <= 0.5);
            assert!(g.min_value() >= 0.0 && g.max_value() <= 1.0);
        }
        let fixed = gaussian_base(&f, min_bwidth(1), &[f64::INFINITY], &w).unwrap();
        assert!(fixed.values().iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn blend_endpoints_and_budget() {
        let f = torus_translation_flow(2, 8.0).unwrap();
        let base = GaussianBase::new(&f, min_bwidth(2)).unwrap();
        let obs = OrbitObservable::new(&f, 1.0).unwrap();
        let x = [0.1, 0.7];
        let t = [0.4, -1.2];
        assert_eq!(blend(&obs, &base, 0.0).unwrap().eval(&x, &t), obs.eval(&x, &t));
        assert_eq!(blend(&obs, &base, 1.0).unwrap().eval(&x, &t), base.eval(&x, &t));
        let b = blend(&obs, &base, 0.2).unwrap();
        assert!(b.tau() <= 1.0 - 0.1);
        let w = GridSpec::symmetric(2, -4.0, 4.0, 33).unwrap();
        let g = b.on_grid(&x, &w);
        assert!(lip_const_estimate(&g).unwrap() <= 0.9 + w.max_spacing());
        assert!(blend(&obs, &base, 1.5).is_err());
    }
}

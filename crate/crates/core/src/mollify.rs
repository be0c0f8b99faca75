//! Variable-radius mollification that keeps boundary values fixed.
//!
//! `Φ(b) = ∫_B θ(t) φ(b - ρ(b) t) dt` over the closed unit ball, with a radius
//! field `ρ` vanishing on the complement of `Ω = (0, a)^k \ D`. The integral is
//! a tensor-product rule on `[-1, 1]^k` restricted to the open ball, and `θ` is
//! normalised so that the discrete weights sum to one.

use crate::error::{Error, Result};
use crate::extension::dist;
use crate::lipfun::{GridFunction, GridSpec};

pub const DEFAULT_QUAD_POINTS: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifyParams {
    pub delta: f64,
    pub epsilon: f64,
    pub tau: f64,
    pub quad_points_per_axis: usize,
}

impl MollifyParams {
    pub fn new(delta: f64, epsilon: f64, tau: f64) -> Result<Self> {
        Self::with_quadrature(delta, epsilon, tau, DEFAULT_QUAD_POINTS)
    }

    pub fn with_quadrature(delta: f64, epsilon: f64, tau: f64, quad_points_per_axis: usize) -> Result<Self> {
        if !(delta > 0.0) || !(epsilon > 0.0) || !(tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta, epsilon, tau must be positive (got {delta}, {epsilon}, {tau})"
            )));
        }
        if epsilon > tau {
            return Err(Error::InvalidParameter(format!("epsilon {epsilon} exceeds tau {tau}")));
        }
        if quad_points_per_axis < 5 {
            return Err(Error::InvalidParameter(format!(
                "need at least 5 quadrature points per axis, got {quad_points_per_axis}"
            )));
        }
        Ok(Self { delta, epsilon, tau, quad_points_per_axis })
    }
}

/// `Ω = (0, a)^k` minus finitely many points and segments.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DomainDescriptor {
    pub a: f64,
    pub k: usize,
    pub points: Vec<Vec<f64>>,
    pub segments: Vec<(Vec<f64>, Vec<f64>)>,
}

impl DomainDescriptor {
    pub fn cube(k: usize, a: f64) -> Self {
        Self { a, k, points: Vec::new(), segments: Vec::new() }
    }

    pub fn with_point(mut self, p: Vec<f64>) -> Self {
        self.points.push(p);
        self
    }

    pub fn with_segment(mut self, p: Vec<f64>, q: Vec<f64>) -> Self {
        self.segments.push((p, q));
        self
    }

    pub fn validate(&self) -> Result<()> {
        let inside = |p: &[f64]| p.len() == self.k && p.iter().all(|&x| (0.0..=self.a).contains(&x));
        let ok = self.points.iter().all(|p| inside(p))
            && self.segments.iter().all(|(p, q)| inside(p) && inside(q));
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter("excluded set leaves the cube".into()))
        }
    }
}

pub(crate) fn point_segment_distance(b: &[f64], p: &[f64], q: &[f64]) -> f64 {
    let mut dd = 0.0;
    let mut dot = 0.0;
    for i in 0..b.len() {
        let d = q[i] - p[i];
        dd += d * d;
        dot += (b[i] - p[i]) * d;
    }
    if dd == 0.0 {
        return dist(b, p);
    }
    let s = (dot / dd).clamp(0.0, 1.0);
    b.iter()
        .zip(p.iter().zip(q))
        .map(|(&bi, (&pi, &qi))| {
            let c = pi + s * (qi - pi);
            (bi - c) * (bi - c)
        })
        .sum::<f64>()
        .sqrt()
}

/// Distance from `b` to `R^k \ Ω`.
pub fn distance_to_boundary(b: &[f64], dom: &DomainDescriptor) -> f64 {
    let mut h = b
        .iter()
        .map(|&x| x.min(dom.a - x))
        .fold(f64::INFINITY, f64::min)
        .max(0.0);
    for p in &dom.points {
        h = h.min(dist(b, p));
    }
    for (p, q) in &dom.segments {
        h = h.min(point_segment_distance(b, p, q));
    }
    h
}

/// `ρ(b) = min(δ / 2τ, (ε / 2τ) h(b))`.
///
/// With `ε <= τ` this stays below `h/2` and `h/τ`, and is `ε/(2τ)`-Lipschitz.
pub fn radius_field(b: &[f64], params: &MollifyParams, dom: &DomainDescriptor) -> Result<f64> {
    if params.epsilon > params.tau {
        return Err(Error::InvalidParameter(format!(
            "epsilon {} exceeds tau {}",
            params.epsilon, params.tau
        )));
    }
    Ok(radius_from_distance(distance_to_boundary(b, dom), params))
}

/// Points closer than this to the excluded set count as excluded.
pub const EXCLUSION_TOL: f64 = 1e-12;

fn radius_from_distance(h: f64, params: &MollifyParams) -> f64 {
    if h < EXCLUSION_TOL {
        return 0.0;
    }
    let cap = params.delta / (2.0 * params.tau);
    (params.epsilon / (2.0 * params.tau) * h).min(cap)
}

/// Discretised mollifier: nodes of the tensor rule inside the open unit ball and
/// their normalised weights (`θ(t_j) · cell volume`).
#[derive(Debug, Clone)]
pub struct Mollifier {
    k: usize,
    n: usize,
    normalizer: f64,
    cell_volume: f64,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

fn bump(t: &[f64]) -> f64 {
    let r2: f64 = t.iter().map(|x| x * x).sum();
    if r2 >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - r2)).exp()
    }
}

impl Mollifier {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k == 0 || n < 5 {
            return Err(Error::InvalidParameter(format!("mollifier needs k >= 1, n >= 5 (k={k}, n={n})")));
        }
        let h = 2.0 / (n - 1) as f64;
        let cell_volume = h.powi(k as i32);
        let grid = GridSpec::symmetric(k, -1.0, 1.0, n)?;
        let mut nodes = Vec::new();
        let mut raw = Vec::new();
        for t in grid.iter_points() {
            let w = bump(&t);
            if w > 0.0 {
                raw.push(w);
                nodes.push(t);
            }
        }
        let total: f64 = raw.iter().sum::<f64>() * cell_volume;
        let normalizer = 1.0 / total;
        let weights = raw.iter().map(|w| w * normalizer * cell_volume).collect();
        Ok(Self { k, n, normalizer, cell_volume, nodes, weights })
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_volume
    }

    /// `θ(t) = c · exp(-1 / (1 - |t|²))` inside the ball, zero outside.
    pub fn weight(&self, t: &[f64]) -> f64 {
        self.normalizer * bump(t)
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    /// Quadrature weights `θ(t_j) · cell volume`; they sum to one.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ_j w_j φ(b - r t_j)`.
    pub fn average(&self, b: &[f64], r: f64, phi: impl Fn(&[f64]) -> f64) -> f64 {
        let mut y = vec![0.0; self.k];
        let mut acc = 0.0;
        for (t, &w) in self.nodes.iter().zip(&self.weights) {
            for i in 0..self.k {
                y[i] = b[i] - r * t[i];
            }
            acc += w * phi(&y);
        }
        acc
    }
}

/// Mollifies an arbitrary function evaluated off-grid through `phi`, sampling the
/// result on `grid`. Points with `ρ = 0` keep `phi` exactly.
pub fn mollify_with(
    phi: impl Fn(&[f64]) -> f64,
    grid: &GridSpec,
    dom: &DomainDescriptor,
    params: &MollifyParams,
) -> Result<GridFunction> {
    dom.validate()?;
    if grid.dim() != dom.k {
        return Err(Error::GridMismatch(format!(
            "grid dimension {} vs domain dimension {}",
            grid.dim(),
            dom.k
        )));
    }
    let moll = Mollifier::new(dom.k, params.quad_points_per_axis)?;
    let values = grid
        .iter_points()
        .map(|b| {
            let r = radius_from_distance(distance_to_boundary(&b, dom), params);
            if r == 0.0 {
                phi(&b)
            } else {
                moll.average(&b, r, &phi)
            }
        })
        .collect();
    Ok(GridFunction::new(grid.clone(), values, params.tau + params.epsilon)?
        .with_slack(2.0 * params.tau * grid.max_spacing()))
}

/// Mollifies a grid function, evaluating it off-grid by multilinear interpolation.
pub fn mollify_fn(phi: &GridFunction, dom: &DomainDescriptor, params: &MollifyParams) -> Result<GridFunction> {
    for axis in 0..phi.grid().dim() {
        let lo = phi.grid().lower(axis);
        let hi = phi.grid().upper(axis);
        if lo > 1e-12 || hi < dom.a - 1e-12 {
            return Err(Error::GridMismatch(format!(
                "input grid [{lo}, {hi}] does not cover [0, {}] on axis {axis}",
                dom.a
            )));
        }
    }
    mollify_with(|y| phi.interpolate(y), phi.grid(), dom, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lipfun::lip_const_estimate;

    #[test]
    fn distance_examples() {
        let dom = DomainDescriptor::cube(2, 1.0);
        assert_eq!(distance_to_boundary(&[0.5, 0.5], &dom), 0.5);
        let dom = dom.with_point(vec![0.5, 0.6]);
        assert!((distance_to_boundary(&[0.5, 0.5], &dom) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn segment_distance_matches_dense_sampling() {
        let (p, q) = (vec![0.5, 0.25], vec![0.5, 0.5]);
        let dom = DomainDescriptor::cube(2, 1.0).with_segment(p.clone(), q.clone());
        for b in [[0.47, 0.3], [0.6, 0.55], [0.52, 0.1], [0.5, 0.4]] {
            let oracle = (0..=10_000)
                .map(|i| {
                    let s = i as f64 / 10_000.0;
                    dist(&b, &[0.5, p[1] + s * (q[1] - p[1])])
                })
                .fold(f64::INFINITY, f64::min);
            let cube = b.iter().map(|&x| x.min(1.0 - x)).fold(f64::INFINITY, f64::min);
            assert!((distance_to_boundary(&b, &dom) - oracle.min(cube)).abs() < 1e-6);
        }
    }

    #[test]
    fn radius_examples() {
        let dom = DomainDescriptor::cube(1, 100.0);
        let p = MollifyParams::new(0.2, 0.5, 0.5).unwrap();
        assert_eq!(radius_field(&[0.0], &p, &dom).unwrap(), 0.0);
        assert!((radius_from_distance(10.0, &p) - 0.2).abs() < 1e-15);
        let p = MollifyParams::new(0.2, 0.1, 0.5).unwrap();
        assert!((radius_from_distance(0.3, &p) - 0.03).abs() < 1e-15);
        assert!(MollifyParams::new(0.2, 0.6, 0.5).is_err());
    }

    #[test]
    fn mollifier_support_symmetry_normalisation() {
        for k in 1..=2 {
            let m = Mollifier::new(k, 21).unwrap();
            assert_eq!(m.weight(&vec![1.0; k]), 0.0);
            assert!(m.weight(&vec![0.0; k][..]).is_finite());
            let t: Vec<f64> = (0..k).map(|i| 0.3 - 0.2 * i as f64).collect();
            let neg: Vec<f64> = t.iter().map(|x| -x).collect();
            assert_eq!(m.weight(&t), m.weight(&neg));
            let forward: f64 = m.weights().iter().sum();
            let backward: f64 = m.weights().iter().rev().sum();
            assert!((forward - 1.0).abs() < 1e-12 && (backward - 1.0).abs() < 1e-12);
            let direct: f64 = m.nodes().iter().map(|t| m.weight(t) * m.cell_volume()).sum();
            assert!((direct - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_and_linear_reproduced() {
        let grid = GridSpec::cube(1, 1.0, 101).unwrap();
        let dom = DomainDescriptor::cube(1, 1.0);
        let p = MollifyParams::new(0.05, 0.1, 0.9).unwrap();
        let c = GridFunction::from_fn(grid.clone(), 0.0, |_| 0.37);
        let out = mollify_fn(&c, &dom, &p).unwrap();
        assert!(out.values().iter().all(|v| (v - 0.37).abs() < 1e-12));

        let m = Mollifier::new(1, 21).unwrap();
        let first_moment: f64 = m.nodes().iter().zip(m.weights()).map(|(t, w)| w * t[0]).sum();
        assert!(first_moment.abs() < 1e-12);
        let id = GridFunction::from_fn(grid, 1.0, |t| t[0]);
        let out = mollify_fn(&id, &dom, &p).unwrap();
        assert!(out.sup_distance(&id).unwrap() < 1e-10);
    }

    #[test]
    fn kink_smoothed_within_budget() {
        let grid = GridSpec::cube(1, 1.0, 201).unwrap();
        let dom = DomainDescriptor::cube(1, 1.0);
        let p = MollifyParams::new(0.05, 0.05, 0.9).unwrap();
        let f = GridFunction::from_fn(grid, 1.0, |t| (t[0] - 0.5).abs());
        let out = mollify_fn(&f, &dom, &p).unwrap();
        assert!(out.sup_distance(&f).unwrap() < 0.05);
        assert_eq!(out.values()[0], 0.5);
        assert_eq!(out.values()[200], 0.5);
        assert_eq!(out.values()[0], f.values()[0]);
        assert!(out.values()[100] > 0.0);
    }

    #[test]
    fn excluded_points_are_fixed_and_interior_is_smooth() {
        let grid = GridSpec::cube(2, 1.0, 41).unwrap();
        let dom = DomainDescriptor::cube(2, 1.0)
            .with_point(vec![0.25, 0.25])
            .with_segment(vec![0.5, 0.3], vec![0.5, 0.7]);
        let p = MollifyParams::new(0.05, 0.05, 0.8).unwrap();
        let f = GridFunction::from_fn(grid.clone(), 0.8, |t| 0.8 * ((t[0] - 0.3).abs() - (t[1] - 0.6).abs()).abs() / 2f64.sqrt());
        let out = mollify_fn(&f, &dom, &p).unwrap();
        for (i, b) in grid.iter_points().enumerate() {
            if distance_to_boundary(&b, &dom) == 0.0 {
                assert_eq!(out.values()[i], f.values()[i]);
            }
        }
        assert!(lip_const_estimate(&out).unwrap() <= 0.85 + 2.0 * 0.8 * grid.max_spacing());

        // Second differences stay bounded where the radius is at its cap.
        let rho_max = p.delta / (2.0 * p.tau);
        let h = grid.spacing(0);
        let mut worst = 0.0f64;
        for i in 1..40 {
            for j in 1..40 {
                let b = [grid.coord(0, i), grid.coord(1, j)];
                if distance_to_boundary(&b, &dom) > 2.0 * rho_max {
                    let c = out.value_at(&[i, j]);
                    let d2 = (out.value_at(&[i + 1, j]) - 2.0 * c + out.value_at(&[i - 1, j])) / (h * h);
                    worst = worst.max(d2.abs());
                }
            }
        }
        let min_rho = radius_from_distance(2.0 * rho_max, &p).min(rho_max);
        assert!(worst <= 10.0 * (p.tau + p.epsilon) / min_rho, "{worst}");
    }
}

//! Finite open cover of the state space with a subordinate partition of unity.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flows::{Flow, State};
use crate::lipfun::GridSpec;
use crate::topo::base::Ensemble;

/// Open sets `U_m` are balls of this multiple of the support radius.
pub const OUTER_FACTOR: f64 = 1.1;

const COVERAGE_SAMPLES_PER_AXIS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct CoverData {
    pub flow: Flow,
    pub anchors: Vec<State>,
    /// `h_m` is supported in the closed ball of this radius around `p_m`.
    pub radius: f64,
}

/// Reference sample of the state space and the largest distance from a sample
/// point to the unsampled rest of the space.
fn state_sample(flow: &Flow) -> (Vec<State>, f64) {
    let n = COVERAGE_SAMPLES_PER_AXIS;
    match flow {
        Flow::Torus { k, .. } => {
            let grid = GridSpec::new(vec![0.0; *k], vec![1.0 - 1.0 / n as f64; *k], vec![n; *k])
                .expect("valid sample grid");
            let pts = grid.iter_points().collect();
            (pts, (*k as f64).sqrt() / (2.0 * n as f64))
        }
        Flow::Logistic => {
            let pts = (0..=n).map(|i| Flow::logistic_state(i as f64 / n as f64)).collect();
            (pts, 0.5 / n as f64)
        }
    }
}

impl CoverData {
    /// Cover by balls around `anchors`, with the radius chosen from a reference
    /// sample so that every state has a positive weight.
    pub fn new(flow: &Flow, anchors: Vec<State>) -> Result<Self> {
        if anchors.is_empty() {
            return Err(Error::InvalidParameter("cover needs at least one anchor".into()));
        }
        let (sample, resolution) = state_sample(flow);
        let covering = sample
            .iter()
            .map(|x| anchors.iter().map(|p| flow.dist(x, p)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        let radius = covering + resolution + 1e-3;
        Ok(Self { flow: flow.clone(), anchors, radius })
    }

    /// `M` anchors spread along the diagonal of the state space.
    pub fn diagonal(flow: &Flow, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("cover size must be >= 1".into()));
        }
        let anchors = match flow {
            Flow::Torus { k, .. } => (0..m).map(|i| vec![i as f64 / m as f64; *k]).collect(),
            Flow::Logistic => (0..m).map(|i| Flow::logistic_state((i as f64 + 0.5) / m as f64)).collect(),
        };
        Self::new(flow, anchors)
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    pub fn outer_radius(&self) -> f64 {
        OUTER_FACTOR * self.radius
    }

    /// Whether `x ∈ U_m`.
    pub fn contains(&self, m: usize, x: &[f64]) -> bool {
        self.flow.dist(x, &self.anchors[m]) < self.outer_radius()
    }

    /// `h_m(x) ∝ max(0, r - d(x, p_m))`, normalised to sum to one.
    pub fn weights(&self, x: &[f64]) -> Vec<f64> {
        if self.anchors.len() == 1 {
            return vec![1.0];
        }
        let raw: Vec<f64> = self
            .anchors
            .iter()
            .map(|p| (self.radius - self.flow.dist(x, p)).max(0.0))
            .collect();
        let total: f64 = raw.iter().sum();
        raw.iter().map(|w| w / total).collect()
    }

    /// Largest `|Σ h_m - 1|` over the given states.
    pub fn partition_defect(&self, states: &[State]) -> f64 {
        states
            .iter()
            .map(|x| (self.weights(x).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest sup-distance between `f(x)` and `f(y)` on `grid` over seeded
    /// pairs lying in a common `U_m`; each anchor is paired with every sample.
    pub fn image_diameter(&self, f: &dyn Ensemble, grid: &GridSpec, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for m in 0..self.anchors.len() {
            let mut members = vec![self.anchors[m].clone()];
            let mut tries = 0;
            while members.len() < samples + 1 && tries < 100 * samples {
                tries += 1;
                let x = self.flow.sample_state(&mut rng);
                if self.contains(m, &x) {
                    members.push(x);
                }
            }
            let images: Vec<Vec<f64>> =
                members.iter().map(|x| f.on_grid(x, grid).values().to_vec()).collect();
            for i in 0..images.len() {
                for j in 0..i {
                    let d = images[i]
                        .iter()
                        .zip(&images[j])
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    worst = worst.max(d);
                }
            }
        }
        worst
    }
}

//! Perturbation `g` of a `τ`-Lipschitz ensemble on `[0,a]^k` that agrees with
//! `f` on the boundary, is non-constant on the marker line and is rigid under
//! small shifts.
//!
//! Stages per state: anchor data `g₀` on `D = Edge ∪ A ∪ conv(Λ)`, McShane
//! extension `g₁` at budget `τ'`, truncation `g₂, g₃` to `f ± δ/2`,
//! variable-radius mollification `g₄`, and clamping to `[0,1]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::extension::AnchorSet;
use crate::flows::State;
use crate::genvec::{sample_generic_vectors, GenericVectorSet};
use crate::lipfun::{clamp01, composite_lip_bound, lip_max, lip_min, GridFunction};
use crate::mollify::{mollify_fn, MollifyParams};
use crate::topo::base::Ensemble;
use crate::topo::cover::CoverData;
use crate::topo::params::{AnchorKind, LemmaGeometry, MainLemmaParams};

/// Seeded states used, with the cover anchors, to calibrate `τ'`.
pub const CALIBRATION_STATES: usize = 32;

pub const DEFAULT_MATCH_TOL: f64 = 1e-6;

pub struct MainLemma<'a> {
    f: &'a dyn Ensemble,
    pub cover: CoverData,
    pub params: MainLemmaParams,
    pub geometry: LemmaGeometry,
    pub uset: GenericVectorSet,
    /// Budget of the anchor data and of `g₁, g₂, g₃`.
    pub tau_prime: f64,
    /// Mollification allowance; `g` declares `τ'' = τ' + ε`.
    pub epsilon: f64,
    /// Largest anchor quotient over `Edge ∪ A` seen during calibration.
    pub tau_edge_line: f64,
    /// The composite bound `(τ₀' + Δτ₀'/d) / (1 - Δ/d)` for `d = d(A, Edge)`;
    /// infinite when `Δ >= d`.
    pub composite_bound: f64,
    anchor_points: Vec<Vec<f64>>,
}

/// All intermediate stages for one state.
#[derive(Debug, Clone)]
pub struct LemmaStages {
    pub f: GridFunction,
    pub g0: AnchorSet,
    pub g1: GridFunction,
    pub g2: GridFunction,
    pub g3: GridFunction,
    pub g4: GridFunction,
    pub g: GridFunction,
    /// `max_D |g₀ - f|`.
    pub anchor_deviation: f64,
}

/// Per-state checks of the four properties.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateChecks {
    /// `max |g - f|` on the grid.
    pub max_deviation: f64,
    /// `max |g - f|` on boundary anchors.
    pub edge_deviation: f64,
    /// `max_A g - min_A g`.
    pub line_spread: f64,
    pub anchor_deviation: f64,
}

/// Samples generic vectors near `f(p_m)|_A` and assembles the pipeline.
pub fn main_lemma_g<'a>(
    f: &'a dyn Ensemble,
    cover: CoverData,
    params: MainLemmaParams,
    seed: u64,
    max_retries: usize,
) -> Result<MainLemma<'a>> {
    if params.m != cover.len() {
        return Err(Error::InvalidParameter(format!(
            "cover has {} sets but parameters expect M = {}",
            cover.len(),
            params.m
        )));
    }
    let geometry = params.geometry()?;
    let targets = line_targets(f, &cover, &geometry);
    let uset = sample_generic_vectors(&targets, &geometry.line, params.eta, seed, max_retries)?;
    MainLemma::with_vectors(f, cover, params, geometry, uset)
}

/// `f(p_m)` restricted to the marker line, one vector per cover anchor.
pub fn line_targets(
    f: &dyn Ensemble,
    cover: &CoverData,
    geometry: &LemmaGeometry,
) -> Vec<Vec<f64>> {
    cover
        .anchors
        .iter()
        .map(|p| {
            geometry
                .line_index
                .iter()
                .map(|&i| f.eval(p, &geometry.grid.point(i)))
                .collect()
        })
        .collect()
}

/// Replaces every vector by its period-two repetition of the first two entries,
/// breaking rigidity under the shift by `2Δ`.
pub fn periodic_corruption(uset: &GenericVectorSet) -> Vec<Vec<f64>> {
    uset.vectors
        .iter()
        .map(|u| (0..u.len()).map(|r| u[r % 2]).collect())
        .collect()
}

impl<'a> MainLemma<'a> {
    /// Uses the given vectors without re-checking them and calibrates `τ'`.
    pub fn with_vectors(
        f: &'a dyn Ensemble,
        cover: CoverData,
        params: MainLemmaParams,
        geometry: LemmaGeometry,
        uset: GenericVectorSet,
    ) -> Result<Self> {
        if uset.vectors.len() != cover.len() || uset.vectors.iter().any(|u| u.len() != params.n) {
            return Err(Error::InvalidParameter("vector set does not match cover and marker line".into()));
        }
        let anchor_points: Vec<Vec<f64>> = geometry.anchors.iter().map(|&(i, _)| geometry.grid.point(i)).collect();
        let mut lemma = Self {
            f,
            cover,
            params,
            geometry,
            uset,
            tau_prime: 0.0,
            epsilon: 0.0,
            tau_edge_line: 0.0,
            composite_bound: f64::INFINITY,
            anchor_points,
        };
        lemma.calibrate()?;
        Ok(lemma)
    }

    fn calibrate(&mut self) -> Result<()> {
        let mut states = self.cover.anchors.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(self.uset.seed ^ 0xca11_b8a7e);
        states.extend((0..CALIBRATION_STATES).map(|_| self.cover.flow.sample_state(&mut rng)));
        let n_edge_line = self
            .geometry
            .anchors
            .iter()
            .filter(|a| !matches!(a.1, AnchorKind::Segment(..)))
            .count();
        let mut full = self.params.tau;
        let mut partial = self.params.tau;
        for x in &states {
            let values = self.anchor_values(x, |t| self.f.eval(x, t));
            full = full.max(AnchorSet::pairwise_constant(&self.anchor_points, &values));
            partial = partial.max(AnchorSet::pairwise_constant(
                &self.anchor_points[..n_edge_line],
                &values[..n_edge_line],
            ));
        }
        if full >= 1.0 {
            return Err(Error::BudgetExceeded(format!(
                "anchor data need Lipschitz constant {full} >= 1"
            )));
        }
        self.tau_prime = full + (1.0 - full) / 8.0;
        self.epsilon = ((1.0 - self.tau_prime) / 4.0).min(self.tau_prime);
        self.tau_edge_line = partial;
        let ratio = self.params.step / self.params.dist_line_edge;
        self.composite_bound = composite_lip_bound(partial, ratio, ratio * partial).unwrap_or(f64::INFINITY);
        Ok(())
    }

    /// `τ'' = τ' + ε < 1`, the budget declared by `g`.
    pub fn tau_double_prime(&self) -> f64 {
        self.tau_prime + self.epsilon
    }

    /// The input ensemble.
    pub fn input(&self) -> &'a dyn Ensemble {
        self.f
    }

    /// `g₀(x)` on the anchors, given `f(x)` through `fx`.
    fn anchor_values(&self, x: &[f64], fx: impl Fn(&[f64]) -> f64) -> Vec<f64> {
        let h = self.cover.weights(x);
        let line: Vec<f64> = (0..self.params.n)
            .map(|r| h.iter().zip(&self.uset.vectors).map(|(w, u)| w * u[r]).sum())
            .collect();
        self.geometry
            .anchors
            .iter()
            .zip(&self.anchor_points)
            .map(|(&(_, kind), p)| match kind {
                AnchorKind::Edge => fx(p),
                AnchorKind::Line(r) => line[r],
                AnchorKind::Segment(r, mu) => (1.0 - mu) * line[r] + mu * line[r + 1],
            })
            .collect()
    }

    /// Runs every stage for `x`.
    pub fn evaluate(&self, x: &[f64]) -> Result<LemmaStages> {
        let grid = &self.geometry.grid;
        let f = self.f.on_grid(x, grid);
        let values = self.anchor_values(x, |t| f.values()[grid.locate(t).expect("anchor on grid")]);
        let anchor_deviation = self
            .geometry
            .anchors
            .iter()
            .zip(&values)
            .map(|(&(i, _), v)| (v - f.values()[i]).abs())
            .fold(0.0, f64::max);
        let g0 = AnchorSet::new(self.anchor_points.clone(), values, self.tau_prime).map_err(|e| match e {
            Error::NotExtendable { vi, vj, dist, .. } => Error::BudgetExceeded(format!(
                "values {vi} and {vj} at distance {dist} exceed tau' = {}",
                self.tau_prime
            )),
            other => other,
        })?;
        let g1 = GridFunction::from_fn(grid.clone(), self.tau_prime, |t| g0.evaluate(t));
        let delta = self.params.delta;
        let upper = f.map(|v| v + delta / 2.0);
        let lower = f.map(|v| v - delta / 2.0);
        let g2 = lip_min(&g1, &upper)?.with_tau(self.tau_prime);
        let g3 = lip_max(&g2, &lower)?.with_tau(self.tau_prime);
        let mp = MollifyParams::new(delta, self.epsilon, self.tau_prime)?;
        let g4 = mollify_fn(&g3, &self.geometry.domain, &mp)?;
        let g = clamp01(&g4).with_tau(self.tau_double_prime());
        Ok(LemmaStages { f, g0, g1, g2, g3, g4, g, anchor_deviation })
    }

    /// Final `g(x)` only.
    pub fn g(&self, x: &[f64]) -> Result<GridFunction> {
        Ok(self.evaluate(x)?.g)
    }

    pub fn checks(&self, stages: &LemmaStages) -> StateChecks {
        let f = stages.f.values();
        let g = stages.g.values();
        let max_deviation = f.iter().zip(g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let edge_deviation = self
            .geometry
            .anchors
            .iter()
            .filter(|a| a.1 == AnchorKind::Edge)
            .map(|&(i, _)| (f[i] - g[i]).abs())
            .fold(0.0, f64::max);
        let line: Vec<f64> = self.geometry.line_index.iter().map(|&i| g[i]).collect();
        let line_spread = line.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - line.iter().copied().fold(f64::INFINITY, f64::min);
        StateChecks { max_deviation, edge_deviation, line_spread, anchor_deviation: stages.anchor_deviation }
    }

    /// Marker-line points inside `[a/8, 7a/8]^k`.
    pub fn rigidity_points(&self) -> Vec<Vec<f64>> {
        let a = self.params.a;
        self.params
            .line
            .iter()
            .map(|&v| self.params.line_point(v))
            .filter(|p| p.iter().all(|&c| c >= a / 8.0 && c <= 7.0 * a / 8.0))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzReport {
    pub trials: usize,
    pub matches: usize,
    pub violations: usize,
    /// Smallest mismatch over trials other than `x = y, w = 0`.
    pub min_nontrivial_mismatch: f64,
    /// First violating trial: pool indices and shift.
    pub first_violation: Option<(usize, usize, Vec<f64>)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuzzConfig {
    pub trials: usize,
    pub seed: u64,
    pub match_tol: f64,
    /// Defaults to `Δ/2` when `None`.
    pub w_tol: Option<f64>,
    /// Random states in the pool; half of them also get a nearby companion.
    pub pool: usize,
}

impl FuzzConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self { trials, seed, match_tol: DEFAULT_MATCH_TOL, w_tol: None, pool: 16 }
    }
}

/// Seeded search for `x, y, w` with `g(x)(t + w) ≈ g(y)(t)` on the rigidity
/// points; every match must have `|w|∞ < w_tol` and `d(x, y) < δ`.
pub fn shift_rigidity_fuzz(lemma: &MainLemma<'_>, cfg: &FuzzConfig) -> Result<FuzzReport> {
    let flow = &lemma.cover.flow;
    let params = &lemma.params;
    let w_tol = cfg.w_tol.unwrap_or(params.step / 2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pool: Vec<State> = lemma.cover.anchors.clone();
    let mut companions = Vec::new();
    for i in 0..cfg.pool {
        let x = flow.sample_state(&mut rng);
        if i % 2 == 0 {
            let nudge: Vec<f64> = (0..flow.k()).map(|_| rng.gen_range(-1e-3..1e-3)).collect();
            companions.push((pool.len(), flow.act(&nudge, &x)));
        }
        pool.push(x);
    }
    let mut near_pairs = Vec::new();
    for (i, y) in companions {
        near_pairs.push((i, pool.len()));
        pool.push(y);
    }
    let images: Vec<GridFunction> = pool.iter().map(|x| lemma.g(x)).collect::<Result<_>>()?;
    let points = lemma.rigidity_points();
    let k = params.k;
    let reach = params.a / 8.0;
    let max_shift = (reach / params.step).floor() as isize;
    let grid_shifts: Vec<isize> = (-max_shift..=max_shift).filter(|&s| s != 0).collect();

    let mut report = FuzzReport {
        trials: cfg.trials,
        matches: 0,
        violations: 0,
        min_nontrivial_mismatch: f64::INFINITY,
        first_violation: None,
    };
    for trial in 0..cfg.trials {
        let mut w = vec![0.0; k];
        let (i, j) = match trial % 5 {
            0 => {
                let i = rng.gen_range(0..pool.len());
                (i, i)
            }
            1 | 4 => {
                let i = rng.gen_range(0..pool.len());
                let j = if trial % 5 == 1 { i } else { rng.gen_range(0..pool.len()) };
                if !grid_shifts.is_empty() {
                    let s = grid_shifts[rng.gen_range(0..grid_shifts.len())];
                    w[k - 1] = s as f64 * params.step;
                }
                (i, j)
            }
            2 => {
                for c in w.iter_mut() {
                    *c = rng.gen_range(-reach..=reach);
                }
                (rng.gen_range(0..pool.len()), rng.gen_range(0..pool.len()))
            }
            _ => near_pairs[rng.gen_range(0..near_pairs.len())],
        };
        let mut mismatch = 0.0f64;
        let mut shifted = vec![0.0; k];
        for t in &points {
            for c in 0..k {
                shifted[c] = t[c] + w[c];
            }
            mismatch = mismatch.max((images[i].interpolate(&shifted) - images[j].interpolate(t)).abs());
        }
        let trivial = i == j && w.iter().all(|&c| c == 0.0);
        if !trivial {
            report.min_nontrivial_mismatch = report.min_nontrivial_mismatch.min(mismatch);
        }
        if mismatch < cfg.match_tol {
            report.matches += 1;
            let wnorm = w.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            if !(wnorm < w_tol && flow.dist(&pool[i], &pool[j]) < params.delta) {
                report.violations += 1;
                if report.first_violation.is_none() {
                    report.first_violation = Some((i, j, w.clone()));
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::torus_translation_flow;
    use crate::topo::base::{blend, min_bwidth, GaussianBase, OrbitObservable};
    use crate::topo::params::choose_main_lemma_params;

    #[test]
    fn one_dimensional_pipeline() {
        // A fast circle keeps f₀ nearly constant, so two cover sets suffice.
        let flow = torus_translation_flow(1, 2.0).unwrap();
        let base = GaussianBase::new(&flow, min_bwidth(1)).unwrap();
        let obs = OrbitObservable::new(&flow, 0.02).unwrap();
        let f1 = blend(&obs, &base, 0.4).unwrap();
        let params = choose_main_lemma_params(1.0, 1, 0.4, f1.tau(), 2).unwrap();
        let cover = CoverData::diagonal(&flow, 2).unwrap();
        let lemma = main_lemma_g(&f1, cover, params, 7, 10).unwrap();
        assert!(lemma.tau_double_prime() < 1.0);
        for x in [[0.0], [0.13], [0.5], [0.77]] {
            let st = lemma.evaluate(&x).unwrap();
            let c = lemma.checks(&st);
            assert!(c.max_deviation < 0.8);
            assert_eq!(c.edge_deviation, 0.0);
            assert!(c.line_spread > 1e-9);
            assert!(c.anchor_deviation < 0.2);
        }
        // h₁(p₁) = 1 collapses the partition.
        let st = lemma.evaluate(&[0.0]).unwrap();
        for (r, &i) in lemma.geometry.line_index.iter().enumerate() {
            assert_eq!(st.g.values()[i], lemma.uset.vectors[0][r]);
        }
        let rep = shift_rigidity_fuzz(&lemma, &FuzzConfig::new(200, 3)).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.matches > 0);
    }
}

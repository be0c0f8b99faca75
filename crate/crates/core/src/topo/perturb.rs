//! Marker perturbation along orbits and the two genericity predicates.
//!
//! For every marker `s` (a return time of `x` to a section) the cube
//! `s + [0,a]^k` receives `q(s·x) · u(s·x)(t - s)` with `u = g - f₁`, where `g`
//! is the cube perturbation. For a singleton section `s·x` is always the base
//! point, so `u` is computed once per section.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flows::{marker_set, Flow, LocalSection, State};
use crate::lipfun::{lip1_metric, shift_residual, GridFunction, GridSpec};
use crate::topo::base::Ensemble;
use crate::topo::main_lemma::MainLemma;

const EDGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SectionPatch {
    pub section: LocalSection,
    /// Weight `q` at the section point.
    pub q: f64,
    /// `g(p) - f₁(p)` on the cube grid; zero on the boundary.
    pub u: GridFunction,
}

pub struct MarkerPerturbation<'a> {
    flow: Flow,
    a: f64,
    f1: &'a dyn Ensemble,
    patches: Vec<SectionPatch>,
}

impl<'a> MarkerPerturbation<'a> {
    /// Builds the patches for singleton sections with weights `q`. The sections
    /// must be local sections at scale `a` of the cube perturbation.
    pub fn new(lemma: &MainLemma<'a>, sections: Vec<(LocalSection, f64)>) -> Result<Self> {
        let a = lemma.params.a;
        let flow = lemma.cover.flow.clone();
        let mut patches = Vec::with_capacity(sections.len());
        for (section, q) in sections {
            if (section.a - a).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "section certified at scale {} but the cube has side {a}",
                    section.a
                )));
            }
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::InvalidParameter(format!("weight {q} outside [0, 1]")));
            }
            let stages = lemma.evaluate(&section.base)?;
            let u = stages.g.zip_with(&stages.f, 1.0, |g, f| g - f)?;
            patches.push(SectionPatch { section, q, u });
        }
        Ok(Self { flow, a, f1: lemma.input(), patches })
    }

    pub fn patches(&self) -> &[SectionPatch] {
        &self.patches
    }

    /// Requires `δ` below the distance between every pair of section points.
    pub fn check_separation(&self, delta: f64) -> Result<f64> {
        let bases: Vec<State> = self.patches.iter().map(|p| p.section.base.clone()).collect();
        check_section_separation(&self.flow, &bases, delta)
    }

    /// Markers whose cubes meet `window`, tagged with their patch.
    pub fn markers(&self, x: &[f64], window: &[(f64, f64)]) -> Result<Vec<(usize, Vec<f64>)>> {
        let reach: Vec<(f64, f64)> = window.iter().map(|&(lo, hi)| (lo - self.a, hi)).collect();
        let mut out = Vec::new();
        for (p, patch) in self.patches.iter().enumerate() {
            for s in marker_set(&self.flow, &patch.section, x, &reach) {
                out.push((p, s));
            }
        }
        for i in 0..out.len() {
            for j in 0..i {
                let sep = out[i].1.iter().zip(&out[j].1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                if sep <= self.a {
                    return Err(Error::OverlappingMarkers(out[i].1.clone(), out[j].1.clone()));
                }
            }
        }
        Ok(out)
    }

    /// `g₁(x)(t)` given the markers of `x`.
    fn value(&self, x: &[f64], t: &[f64], markers: &[(usize, Vec<f64>)]) -> f64 {
        let base = self.f1.eval(x, t);
        for (p, s) in markers {
            let inside = t
                .iter()
                .zip(s)
                .all(|(&ti, &si)| ti - si >= -EDGE_TOL && ti - si <= self.a + EDGE_TOL);
            if inside {
                let local: Vec<f64> = t.iter().zip(s).map(|(&ti, &si)| (ti - si).clamp(0.0, self.a)).collect();
                let patch = &self.patches[*p];
                return base + patch.q * patch.u.interpolate(&local);
            }
        }
        base
    }

    /// `g₁(x)` sampled on `window`.
    pub fn g1(&self, x: &[f64], window: &GridSpec) -> Result<GridFunction> {
        let bounds: Vec<(f64, f64)> = (0..window.dim()).map(|i| (window.lower(i), window.upper(i))).collect();
        let markers = self.markers(x, &bounds)?;
        Ok(GridFunction::from_fn(window.clone(), 1.0, |t| self.value(x, t, &markers)))
    }
}

pub fn marker_perturb_g1(pert: &MarkerPerturbation<'_>, x: &[f64], window: &GridSpec) -> Result<GridFunction> {
    pert.g1(x, window)
}

/// Smallest distance between section points; errors unless `δ` lies below it.
pub fn check_section_separation(flow: &Flow, bases: &[State], delta: f64) -> Result<f64> {
    let mut d = f64::INFINITY;
    for i in 0..bases.len() {
        for j in 0..i {
            d = d.min(flow.dist(&bases[i], &bases[j]));
        }
    }
    if !(delta < d) {
        return Err(Error::Precondition(format!(
            "delta too large for section pair: delta = {delta}, d(B0, C0) = {d}"
        )));
    }
    Ok(d)
}

/// Largest `|g₁(r·x)(t) - g₁(x)(t + r)|` over seeded states and grid translations `r`.
pub fn g1_equivariance(
    pert: &MarkerPerturbation<'_>,
    states: &[State],
    window: &GridSpec,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let x = &states[rng.gen_range(0..states.len())];
        let shift: Vec<isize> = window
            .points_per_axis()
            .iter()
            .map(|&n| rng.gen_range(-(n as isize / 2)..=n as isize / 2))
            .collect();
        let r: Vec<f64> = shift.iter().enumerate().map(|(a, &j)| j as f64 * window.spacing(a)).collect();
        let moved = pert.g1(&pert.flow.act(&r, x), window)?;
        let here = pert.g1(x, window)?;
        worst = worst.max(shift_residual(&moved, &here, &shift)?);
    }
    Ok(worst)
}

/// Every function is non-constant (spread above `1e-9`); returns the smallest
/// spread.
pub fn verify_ga(images: &[GridFunction]) -> (bool, f64) {
    let min = images.iter().map(GridFunction::spread).fold(f64::INFINITY, f64::min);
    (min > 1e-9, min)
}

/// Smallest `lip1_metric` between an image from `b` and one from `c`.
pub fn verify_gbc(b: &[GridFunction], c: &[GridFunction], m_max: usize) -> Result<(bool, f64)> {
    let mut min = f64::INFINITY;
    for f in b {
        for g in c {
            min = min.min(lip1_metric(f, g, m_max)?);
        }
    }
    Ok((min > 0.0, min))
}

/// States `t·p` for `t` on a uniform grid of `[-r, r]^k` with `n` points per axis.
pub fn orbit_patch(flow: &Flow, p: &[f64], r: f64, n: usize) -> Result<Vec<State>> {
    let grid = GridSpec::symmetric(flow.k(), -r, r, n)?;
    Ok(grid.iter_points().map(|t| flow.act(&t, p)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::{local_section_at, torus_translation_flow};
    use crate::topo::base::{blend, min_bwidth, GaussianBase, OrbitObservable};
    use crate::topo::cover::CoverData;
    use crate::topo::main_lemma::main_lemma_g;
    use crate::topo::params::choose_main_lemma_params;

    #[test]
    fn circle_perturbation() {
        let flow = torus_translation_flow(1, 2.0).unwrap();
        let base = GaussianBase::new(&flow, min_bwidth(1)).unwrap();
        let obs = OrbitObservable::new(&flow, 0.02).unwrap();
        let f1 = blend(&obs, &base, 0.3).unwrap();
        let params = choose_main_lemma_params(0.5, 1, 0.3, f1.tau(), 2).unwrap();
        let cover = CoverData::diagonal(&flow, 2).unwrap();
        let lemma = main_lemma_g(&f1, cover, params, 11, 10).unwrap();
        let sec = local_section_at(&flow, vec![0.2], 0.5).unwrap();
        let window = GridSpec::symmetric(1, -4.0, 4.0, 161).unwrap();

        let off = MarkerPerturbation::new(&lemma, vec![(sec.clone(), 0.0)]).unwrap();
        let x = [0.37];
        let g1 = off.g1(&x, &window).unwrap();
        let plain = f1.on_grid(&x, &window);
        assert_eq!(g1.values(), plain.values());

        let on = MarkerPerturbation::new(&lemma, vec![(sec, 1.0)]).unwrap();
        let g = lemma.g(&[0.2]).unwrap();
        let g1 = on.g1(&[0.2], g.grid()).unwrap();
        assert!(g1.sup_distance(&g).unwrap() < 1e-12);

        let r = [0.5];
        let moved = on.g1(&flow.act(&r, &x), &window).unwrap();
        let here = on.g1(&x, &window).unwrap();
        for i in 0..window.len() - 10 {
            assert!((moved.values()[i] - here.values()[i + 10]).abs() < 1e-9);
        }
        assert!(g1_equivariance(&on, &[vec![0.1], vec![0.6]], &window, 10, 1).unwrap() < 1e-9);
        assert!(check_section_separation(&flow, &[vec![0.1], vec![0.3]], 0.5).is_err());
    }

    #[test]
    fn predicates() {
        let g = GridSpec::symmetric(1, -2.0, 2.0, 5).unwrap();
        let flat = GridFunction::from_fn(g.clone(), 1.0, |_| 0.3);
        let bump = GridFunction::from_fn(g, 1.0, |t| 0.3 + 0.1 * t[0].abs());
        assert!(!verify_ga(std::slice::from_ref(&flat)).0);
        assert!(verify_ga(std::slice::from_ref(&bump)).0);
        assert_eq!(verify_gbc(std::slice::from_ref(&bump), std::slice::from_ref(&bump), 2).unwrap(), (false, 0.0));
        assert!(verify_gbc(&[bump], &[flat], 2).unwrap().0);
    }
}

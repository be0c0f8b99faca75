//! Equivariant 1-Lipschitz embedding built from a lacunary cross-section.
//!
//! `φ(x) = (1 - ρ(x, π(x))) / α(π(x))` when `x` lies within orbital distance 1
//! of the section and `0` otherwise; `Φ(x)(t) = φ(t·x)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flows::{CrossSection, State};
use crate::lipfun::{lip1_metric, lip_const_estimate, shift_residual, GridFunction, GridSpec};

/// Nearest section point and its distance, if closer than 1.
pub fn project_to_section(section: &CrossSection, x: &[f64]) -> Option<(usize, f64)> {
    let (i, r) = section.nearest(x);
    (r < 1.0).then_some((i, r))
}

pub fn phi_observable(section: &CrossSection, x: &[f64]) -> f64 {
    match project_to_section(section, x) {
        Some((i, r)) => (1.0 - r) / section.alpha[i],
        None => 0.0,
    }
}

/// Samples `Φ(x)` on `window`.
pub fn embed_point(section: &CrossSection, x: &[f64], window: &GridSpec) -> Result<GridFunction> {
    let k = section.flow.k();
    if window.dim() != k {
        return Err(Error::GridMismatch(format!("window of dimension {} for k={k}", window.dim())));
    }
    for axis in 0..k {
        if (window.lower(axis) + window.upper(axis)).abs() > 1e-12 {
            return Err(Error::InvalidParameter("window must be symmetric around 0".into()));
        }
    }
    Ok(GridFunction::from_fn(window.clone(), 1.0, |t| {
        phi_observable(section, &section.flow.act(t, x))
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingReport {
    pub max_lipschitz_violation: f64,
    pub max_equivariance_residual: f64,
    pub min_pairwise_separation: f64,
    /// Indices of the pair attaining the minimum separation.
    pub closest_pair: (usize, usize),
    /// Pairs with zero separation (duplicates in the input).
    pub zero_separation_pairs: usize,
    pub n_points: usize,
    pub n_equivariance_trials: usize,
    pub seed: u64,
}

pub const EQUIVARIANCE_TRIALS: usize = 100;

/// Checks 1-Lipschitzness, equivariance under grid translations and pairwise
/// separation of the embedded points.
pub fn verify_embedding(
    section: &CrossSection,
    points: &[State],
    window: &GridSpec,
    m_max: usize,
    seed: u64,
) -> Result<EmbeddingReport> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter("need at least two points".into()));
    }
    let embedded: Vec<GridFunction> =
        points.iter().map(|x| embed_point(section, x, window)).collect::<Result<_>>()?;
    let mut max_excess = 0.0f64;
    for f in &embedded {
        max_excess = max_excess.max(lip_const_estimate(f)? - 1.0);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = window.dim();
    let mut max_res = 0.0f64;
    for _ in 0..EQUIVARIANCE_TRIALS {
        let x = &points[rng.gen_range(0..points.len())];
        let shift: Vec<isize> = (0..k)
            .map(|a| {
                let n = window.points_per_axis()[a] as isize;
                rng.gen_range(-(n / 2)..=n / 2)
            })
            .collect();
        let r: Vec<f64> = shift.iter().enumerate().map(|(a, &j)| j as f64 * window.spacing(a)).collect();
        let moved = embed_point(section, &section.flow.act(&r, x), window)?;
        let base = &embedded[points.iter().position(|p| p == x).unwrap_or(0)];
        max_res = max_res.max(shift_residual(&moved, base, &shift)?);
    }

    let mut min_sep = f64::INFINITY;
    let mut closest = (0, 1);
    let mut zeros = 0;
    for i in 0..embedded.len() {
        for j in 0..i {
            let d = lip1_metric(&embedded[i], &embedded[j], m_max)?;
            if d == 0.0 {
                zeros += 1;
            }
            if d < min_sep {
                min_sep = d;
                closest = (j, i);
            }
        }
    }
    Ok(EmbeddingReport {
        max_lipschitz_violation: max_excess.max(0.0),
        max_equivariance_residual: max_res,
        min_pairwise_separation: min_sep,
        closest_pair: closest,
        zero_separation_pairs: zeros,
        n_points: points.len(),
        n_equivariance_trials: EQUIVARIANCE_TRIALS,
        seed,
    })
}

/// Largest `|Φ(p)|` over fixed points and the least `lip1_metric` between a
/// fixed point's image and the image of any sample.
pub fn fixed_point_check(
    section: &CrossSection,
    samples: &[State],
    window: &GridSpec,
    m_max: usize,
) -> Result<(f64, f64)> {
    let mut max_abs = 0.0f64;
    let mut min_sep = f64::INFINITY;
    let images: Vec<GridFunction> =
        samples.iter().map(|x| embed_point(section, x, window)).collect::<Result<_>>()?;
    for p in section.flow.fixed_points() {
        let f = embed_point(section, &p, window)?;
        max_abs = max_abs.max(f.values().iter().fold(0.0, |m, v| m.max(v.abs())));
        for g in &images {
            min_sep = min_sep.min(lip1_metric(&f, g, m_max)?);
        }
    }
    Ok((max_abs, min_sep))
}

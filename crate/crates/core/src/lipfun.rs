//! Grid-sampled Lipschitz functions.
//!
//! Every Lipschitz object in the crate (observables along orbits, perturbations,
//! extensions, mollified functions) is represented as a [`GridFunction`]: values on
//! a rectangular grid together with a declared Lipschitz budget `tau` and an
//! explicit `slack`. Claims about Lipschitz constants are grid claims
//! `|v(s) - v(t)| <= tau * |s - t| + slack`.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// All-pairs estimation is used up to this many grid points.
pub const ALL_PAIRS_LIMIT: usize = 4096;
/// Random pairs examined on top of axis neighbours for larger grids.
pub const RANDOM_PAIRS: usize = 100_000;
const RANDOM_PAIRS_SEED: u64 = 0x5EED_11F0;
/// Default truncation depth of the `Lip1` metric series.
pub const DEFAULT_M_MAX: usize = 20;

/// Rectangular grid `origin + [0, extent]` with `points[i] >= 2` samples per axis,
/// enumerated in row-major order (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    origin: Vec<f64>,
    extent: Vec<f64>,
    points: Vec<usize>,
}

impl GridSpec {
    pub fn new(origin: Vec<f64>, extent: Vec<f64>, points: Vec<usize>) -> Result<Self> {
        let k = origin.len();
        if k == 0 || extent.len() != k || points.len() != k {
            return Err(Error::InvalidParameter(format!(
                "grid dimension mismatch: origin {}, extent {}, points {}",
                origin.len(),
                extent.len(),
                points.len()
            )));
        }
        if let Some(&n) = points.iter().find(|&&n| n < 2) {
            return Err(Error::DegenerateGrid(format!("{n} points on an axis")));
        }
        if extent.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(Error::InvalidParameter(format!("extent must be positive: {extent:?}")));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidParameter(format!("origin not finite: {origin:?}")));
        }
        Ok(Self { origin, extent, points })
    }

    /// `[lo, hi]^k` with `n` points per axis.
    pub fn symmetric(k: usize, lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(vec![lo; k], vec![hi - lo; k], vec![n; k])
    }

    /// `[0, a]^k` with `n` points per axis.
    pub fn cube(k: usize, a: f64, n: usize) -> Result<Self> {
        Self::symmetric(k, 0.0, a, n)
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn extent(&self) -> &[f64] {
        &self.extent
    }

    pub fn points_per_axis(&self) -> &[usize] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.extent[axis] / (self.points[axis] - 1) as f64
    }

    pub fn max_spacing(&self) -> f64 {
        (0..self.dim()).map(|i| self.spacing(i)).fold(0.0, f64::max)
    }

    pub fn lower(&self, axis: usize) -> f64 {
        self.origin[axis]
    }

    pub fn upper(&self, axis: usize) -> f64 {
        self.origin[axis] + self.extent[axis]
    }

    /// Coordinate of index `idx` along `axis`; the endpoints are hit exactly.
    pub fn coord(&self, axis: usize, idx: usize) -> f64 {
        let n = self.points[axis] - 1;
        if idx == n {
            return self.upper(axis);
        }
        self.origin[axis] + self.extent[axis] * idx as f64 / n as f64
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for axis in (0..self.dim()).rev() {
            idx[axis] = flat % self.points[axis];
            flat /= self.points[axis];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.points)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(axis, &i)| self.coord(axis, i))
            .collect()
    }

    pub fn iter_points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// True when the grid point lies on the boundary of the grid box.
    pub fn is_boundary(&self, flat: usize) -> bool {
        self.multi_index(flat)
            .iter()
            .zip(&self.points)
            .any(|(&i, &n)| i == 0 || i == n - 1)
    }

    /// Whether `[-m, m]^k` lies inside the grid box.
    pub fn covers_cube(&self, m: f64) -> bool {
        let tol = 1e-9 * (1.0 + m.abs());
        (0..self.dim()).all(|a| self.lower(a) <= -m + tol && self.upper(a) >= m - tol)
    }

    /// Fractional grid coordinate along `axis`, snapped to an integer when within 1e-9.
    fn fractional(&self, axis: usize, x: f64) -> f64 {
        let n = (self.points[axis] - 1) as f64;
        let u = ((x - self.origin[axis]) / self.extent[axis] * n).clamp(0.0, n);
        let r = u.round();
        if (u - r).abs() < 1e-9 {
            r
        } else {
            u
        }
    }

    /// Index of the grid point nearest to `x`, if `x` is a grid point (to 1e-9 cells).
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let mut idx = Vec::with_capacity(self.dim());
        for (axis, &xi) in x.iter().enumerate() {
            let n = (self.points[axis] - 1) as f64;
            let u = (xi - self.origin[axis]) / self.extent[axis] * n;
            let r = u.round();
            if (u - r).abs() > 1e-9 || r < 0.0 || r > n {
                return None;
            }
            idx.push(r as usize);
        }
        Some(self.flat_index(&idx))
    }
}

/// Values on a grid with a declared Lipschitz budget.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: GridSpec,
    values: Vec<f64>,
    tau: f64,
    slack: f64,
}

impl GridFunction {
    pub fn new(grid: GridSpec, values: Vec<f64>, tau: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        if !(tau >= 0.0) {
            return Err(Error::InvalidParameter(format!("negative Lipschitz budget {tau}")));
        }
        Ok(Self { grid, values, tau, slack: 0.0 })
    }

    pub fn from_fn(grid: GridSpec, tau: f64, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = grid.iter_points().map(|p| f(&p)).collect();
        Self { grid, values, tau, slack: 0.0 }
    }

    pub fn with_slack(mut self, slack: f64) -> Self {
        self.slack = slack;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn slack(&self) -> f64 {
        self.slack
    }

    pub fn value_at(&self, idx: &[usize]) -> f64 {
        self.values[self.grid.flat_index(idx)]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max - min` of the sampled values.
    pub fn spread(&self) -> f64 {
        self.max_value() - self.min_value()
    }

    /// Pointwise map keeping grid, budget and slack.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            tau: self.tau,
            slack: self.slack,
        }
    }

    /// Pointwise combination with another function on the same grid; the result
    /// declares `tau`.
    pub fn zip_with(&self, other: &Self, tau: f64, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        ensure_same_grid(self, other)?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
            tau,
            slack: self.slack.max(other.slack),
        })
    }

    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        ensure_same_grid(self, other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Multilinear interpolation; points outside the box are clamped onto it.
    /// Grid points are reproduced exactly.
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        let k = self.grid.dim();
        let mut base = vec![0usize; k];
        let mut frac = vec![0.0; k];
        for axis in 0..k {
            let u = self.grid.fractional(axis, x[axis]);
            let n = self.grid.points[axis] - 1;
            let i = (u.floor() as usize).min(n - 1);
            base[axis] = i;
            frac[axis] = u - i as f64;
        }
        let mut acc = 0.0;
        let mut corner = vec![0usize; k];
        for mask in 0..(1usize << k) {
            let mut w = 1.0;
            for axis in 0..k {
                let up = (mask >> axis) & 1 == 1;
                let l = frac[axis];
                let wa = if up { l } else { 1.0 - l };
                if wa == 0.0 {
                    w = 0.0;
                    break;
                }
                w *= wa;
                corner[axis] = base[axis] + usize::from(up);
            }
            if w != 0.0 {
                acc += w * self.value_at(&corner);
            }
        }
        acc
    }

    /// Writes `index,coord_1,…,coord_k,value` rows in row-major order.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let k = self.grid.dim();
        let mut header = vec!["index".to_string()];
        header.extend((1..=k).map(|i| format!("coord_{i}")));
        header.push("value".into());
        w.write_record(&header)?;
        for (i, p) in self.grid.iter_points().enumerate() {
            let mut row = vec![i.to_string()];
            row.extend(p.iter().map(|c| c.to_string()));
            row.push(self.values[i].to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the CSV written by [`GridFunction::write_csv`], reconstructing the grid
    /// from the coordinates. The declared budget is supplied by the caller.
    pub fn read_csv<R: Read>(reader: R, tau: f64) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let header = r.headers()?.clone();
        let k = header.len().checked_sub(2).filter(|&k| k > 0).ok_or_else(|| {
            Error::Format(format!("expected index,coord_1..coord_k,value header, got {header:?}"))
        })?;
        if &header[0] != "index" || &header[k + 1] != "value" {
            return Err(Error::Format(format!("bad header {header:?}")));
        }
        let mut coords: Vec<Vec<f64>> = Vec::new();
        let mut values = Vec::new();
        for (row_no, rec) in r.records().enumerate() {
            let rec = rec?;
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Format(format!("row {row_no}: {e}")))
            };
            let index: usize = rec[0]
                .trim()
                .parse()
                .map_err(|e| Error::Format(format!("row {row_no}: index {e}")))?;
            if index != row_no {
                return Err(Error::Format(format!("row {row_no} carries index {index}")));
            }
            coords.push((1..=k).map(|i| parse(&rec[i])).collect::<Result<_>>()?);
            values.push(parse(&rec[k + 1])?);
        }
        if coords.is_empty() {
            return Err(Error::Format("no rows".into()));
        }
        // Axis sizes from the row-major layout: the last axis varies fastest.
        let first = &coords[0];
        let last = &coords[coords.len() - 1];
        let mut points = vec![0usize; k];
        let mut stride = 1usize;
        for axis in (0..k).rev() {
            let mut count = 1usize;
            while count * stride < coords.len()
                && (0..axis).all(|b| coords[count * stride][b] == first[b])
            {
                count += 1;
            }
            points[axis] = count;
            stride *= count;
        }
        if stride != coords.len() {
            return Err(Error::Format(format!(
                "{} rows do not form a rectangular grid {:?}",
                coords.len(),
                points
            )));
        }
        let extent: Vec<f64> = (0..k).map(|a| last[a] - first[a]).collect();
        let grid = GridSpec::new(first.clone(), extent, points)
            .map_err(|e| Error::Format(format!("grid: {e}")))?;
        for (i, c) in coords.iter().enumerate() {
            let p = grid.point(i);
            for a in 0..k {
                if (p[a] - c[a]).abs() > 1e-9 * (1.0 + grid.extent[a]) {
                    return Err(Error::Format(format!(
                        "row {i}: coordinate {} does not match grid value {}",
                        c[a], p[a]
                    )));
                }
            }
        }
        GridFunction::new(grid, values, tau)
    }
}

fn ensure_same_grid(f: &GridFunction, g: &GridFunction) -> Result<()> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", f.grid, g.grid)));
    }
    Ok(())
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Largest difference quotient over examined point pairs.
///
/// All pairs are examined when the grid has at most [`ALL_PAIRS_LIMIT`] points;
/// otherwise every axis-aligned neighbour pair plus [`RANDOM_PAIRS`] pairs drawn
/// from a fixed seed, so the approximation is deterministic.
pub fn lip_const_estimate(f: &GridFunction) -> Result<f64> {
    let grid = f.grid();
    let n = grid.len();
    if n < 2 {
        return Err(Error::DegenerateGrid("single-point grid".into()));
    }
    let pts: Vec<Vec<f64>> = grid.iter_points().collect();
    let v = f.values();
    let quotient = |i: usize, j: usize| (v[i] - v[j]).abs() / euclid(&pts[i], &pts[j]);
    let mut best = 0.0f64;
    if n <= ALL_PAIRS_LIMIT {
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.max(quotient(i, j));
            }
        }
        return Ok(best);
    }
    for i in 0..n {
        let idx = grid.multi_index(i);
        for axis in 0..grid.dim() {
            if idx[axis] + 1 < grid.points_per_axis()[axis] {
                let mut nb = idx.clone();
                nb[axis] += 1;
                best = best.max(quotient(i, grid.flat_index(&nb)));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_PAIRS_SEED);
    for _ in 0..RANDOM_PAIRS {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i != j {
            best = best.max(quotient(i, j));
        }
    }
    Ok(best)
}

/// Truncated `Lip1(R^k)` metric `Σ_{M=1}^{m_max} 2^{-M} max_{[-M,M]^k} |f1 - f2|`.
pub fn lip1_metric(f1: &GridFunction, f2: &GridFunction, m_max: usize) -> Result<f64> {
    ensure_same_grid(f1, f2)?;
    let grid = f1.grid();
    if !grid.covers_cube(m_max as f64) {
        return Err(Error::GridMismatch(format!(
            "grid does not cover [-{m_max}, {m_max}]^{}",
            grid.dim()
        )));
    }
    // Largest |f1 - f2| seen inside each window [-M, M]^k.
    let mut window_max = vec![0.0f64; m_max + 1];
    for (i, p) in grid.iter_points().enumerate() {
        let r = p.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let first = (r - 1e-12).ceil().max(1.0) as usize;
        if first > m_max {
            continue;
        }
        let d = (f1.values[i] - f2.values[i]).abs();
        if d > window_max[first] {
            window_max[first] = d;
        }
    }
    let mut running = 0.0f64;
    let mut total = 0.0;
    for (m, &w) in window_max.iter().enumerate().skip(1) {
        running = running.max(w);
        total += running * 0.5f64.powi(m as i32);
    }
    Ok(total)
}

/// `max |moved(t) - base(t + shift·spacing)|` over grid points where both sides
/// are on the grid.
pub fn shift_residual(moved: &GridFunction, base: &GridFunction, shift: &[isize]) -> Result<f64> {
    ensure_same_grid(moved, base)?;
    let grid = moved.grid();
    if shift.len() != grid.dim() {
        return Err(Error::GridMismatch(format!("shift of length {} on a {}-d grid", shift.len(), grid.dim())));
    }
    let mut worst = 0.0f64;
    for flat in 0..grid.len() {
        let target: Option<Vec<usize>> = grid
            .multi_index(flat)
            .iter()
            .zip(shift)
            .zip(grid.points_per_axis())
            .map(|((&i, &j), &n)| {
                let m = i as isize + j;
                (m >= 0 && (m as usize) < n).then_some(m as usize)
            })
            .collect();
        if let Some(t) = target {
            worst = worst.max((moved.values[flat] - base.value_at(&t)).abs());
        }
    }
    Ok(worst)
}

/// Pointwise maximum; the result declares the larger of the two budgets.
pub fn lip_max(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.zip_with(g, f.tau.max(g.tau), f64::max)
}

/// Pointwise minimum; the result declares the larger of the two budgets.
pub fn lip_min(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.zip_with(g, f.tau.max(g.tau), f64::min)
}

/// `max{0, min{1, f}}`.
pub fn clamp01(f: &GridFunction) -> GridFunction {
    f.map(|v| v.clamp(0.0, 1.0))
}

/// Lipschitz bound `(tau' + eps) / (1 - delta)` for points near an anchor set
/// whose cross-quotients against a second set are at most `tau'`.
pub fn composite_lip_bound(tau_prime: f64, delta: f64, epsilon: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidParameter(format!("delta must lie in [0, 1), got {delta}")));
    }
    if epsilon < 0.0 || tau_prime < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tau' = {tau_prime} and epsilon = {epsilon} must be nonnegative"
        )));
    }
    Ok((tau_prime + epsilon) / (1.0 - delta))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientReport {
    pub max_norm: f64,
    pub tau: f64,
    pub tol: f64,
    pub interior_points: usize,
    pub pass: bool,
}

/// Central-difference gradient norms at interior grid points.
pub fn gradient_bound_check(f: &GridFunction, tau: f64, tol: f64) -> GradientReport {
    let grid = f.grid();
    let k = grid.dim();
    let mut max_norm = 0.0f64;
    let mut interior = 0;
    for i in 0..grid.len() {
        let idx = grid.multi_index(i);
        if (0..k).any(|a| idx[a] == 0 || idx[a] + 1 == grid.points_per_axis()[a]) {
            continue;
        }
        interior += 1;
        let mut sq = 0.0;
        for a in 0..k {
            let mut up = idx.clone();
            let mut dn = idx.clone();
            up[a] += 1;
            dn[a] -= 1;
            let d = (f.value_at(&up) - f.value_at(&dn)) / (2.0 * grid.spacing(a));
            sq += d * d;
        }
        max_norm = max_norm.max(sq.sqrt());
    }
    GradientReport { max_norm, tau, tol, interior_points: interior, pass: max_norm <= tau + tol }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::from_fn(GridSpec::cube(1, 1.0, n).unwrap(), 1.0, |p| f(p[0]))
    }

    #[test]
    fn abs_kink_has_unit_slope() {
        let f = line(101, |t| (t - 0.5).abs());
        assert!((lip_const_estimate(&f).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_has_zero_slope() {
        let f = GridFunction::from_fn(GridSpec::cube(2, 1.0, 9).unwrap(), 0.0, |_| 0.3);
        assert_eq!(lip_const_estimate(&f).unwrap(), 0.0);
    }

    #[test]
    fn square_matches_brute_force() {
        let f = line(101, |t| t * t);
        let pts: Vec<f64> = (0..101).map(|i| f.grid().coord(0, i)).collect();
        let mut oracle = 0.0f64;
        for i in 0..101 {
            for j in 0..i {
                let q = (pts[i] * pts[i] - pts[j] * pts[j]).abs() / (pts[i] - pts[j]);
                oracle = oracle.max(q);
            }
        }
        assert!((oracle - 1.99).abs() < 1e-12);
        assert!((lip_const_estimate(&f).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn degenerate_grid_rejected() {
        assert!(matches!(GridSpec::cube(1, 1.0, 1), Err(Error::DegenerateGrid(_))));
    }

    #[test]
    fn large_grid_uses_neighbour_pairs() {
        let grid = GridSpec::cube(2, 1.0, 81).unwrap();
        let f = GridFunction::from_fn(grid, 1.0, |p| 0.7 * p[0] - 0.2 * p[1]);
        let est = lip_const_estimate(&f).unwrap();
        let exact = (0.49f64 + 0.04).sqrt();
        assert!(est <= exact + 1e-12 && est > 0.7 - 1e-12);
    }

    #[test]
    fn lip1_metric_examples() {
        let grid = GridSpec::symmetric(1, -20.0, 20.0, 81).unwrap();
        let zero = GridFunction::from_fn(grid.clone(), 1.0, |_| 0.0);
        let one = GridFunction::from_fn(grid, 1.0, |_| 1.0);
        let d = lip1_metric(&zero, &one, 20).unwrap();
        assert!((d - (1.0 - 0.5f64.powi(20))).abs() < 1e-15);
        assert_eq!(lip1_metric(&one, &one, 20).unwrap(), 0.0);

        let grid = GridSpec::symmetric(2, -2.0, 2.0, 9).unwrap();
        let zero = GridFunction::from_fn(grid.clone(), 1.0, |_| 0.0);
        let cone = GridFunction::from_fn(grid, 1.0, |p| (p[0] * p[0] + p[1] * p[1]).sqrt().min(1.0));
        assert!((lip1_metric(&zero, &cone, 2).unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn lip1_metric_requires_cover_and_same_grid() {
        let g1 = GridSpec::symmetric(1, -2.0, 2.0, 5).unwrap();
        let g2 = GridSpec::symmetric(1, -2.0, 2.0, 9).unwrap();
        let a = GridFunction::from_fn(g1.clone(), 1.0, |_| 0.0);
        let b = GridFunction::from_fn(g2, 1.0, |_| 0.0);
        assert!(lip1_metric(&a, &b, 2).is_err());
        assert!(lip1_metric(&a, &a, 3).is_err());
    }

    #[test]
    fn max_min_pointwise() {
        let c = line(11, |_| 0.2);
        let id = line(11, |t| t);
        let m = lip_max(&c, &id).unwrap();
        assert_eq!(m.values()[1], 0.2);
        assert_eq!(m.values()[9], id.values()[9]);
        assert_eq!(lip_max(&id, &id).unwrap(), id);
        let n = lip_min(&c, &id).unwrap();
        assert_eq!(n.values()[9], 0.2);
        let other = GridFunction::from_fn(GridSpec::cube(1, 1.0, 5).unwrap(), 1.0, |_| 0.0);
        assert!(lip_max(&c, &other).is_err());
    }

    #[test]
    fn clamp_examples() {
        assert!(clamp01(&line(5, |_| 1.5)).values().iter().all(|&v| v == 1.0));
        assert!(clamp01(&line(5, |_| -0.2)).values().iter().all(|&v| v == 0.0));
        let f = clamp01(&line(5, |t| 2.0 * t - 0.5));
        assert_eq!(f.values()[0], 0.0);
        assert_eq!(f.values()[2], 0.5);
        assert_eq!(f.values()[4], 1.0);
    }

    #[test]
    fn composite_bound_examples() {
        assert_eq!(composite_lip_bound(0.9, 0.0, 0.0).unwrap(), 0.9);
        assert_eq!(composite_lip_bound(0.5, 0.5, 0.25).unwrap(), 1.5);
        assert!(composite_lip_bound(0.5, 1.0, 0.1).is_err());
    }

    #[test]
    fn gradient_examples() {
        let g = GridSpec::cube(2, 1.0, 11).unwrap();
        let f = GridFunction::from_fn(g.clone(), 0.5, |p| 0.5 * p[0]);
        let r = gradient_bound_check(&f, 0.5, 1e-12);
        assert!((r.max_norm - 0.5).abs() < 1e-12 && r.pass);
        let c = GridFunction::from_fn(g, 0.0, |_| 0.4);
        assert_eq!(gradient_bound_check(&c, 0.0, 0.0).max_norm, 0.0);
    }

    #[test]
    fn interpolation_reproduces_grid_and_linear() {
        let g = GridSpec::new(vec![0.0, -1.0], vec![1.0, 2.0], vec![7, 5]).unwrap();
        let f = GridFunction::from_fn(g.clone(), 1.0, |p| 0.3 * p[0] - 0.2 * p[1] + 0.1);
        for (i, p) in g.iter_points().enumerate() {
            assert_eq!(f.interpolate(&p), f.values()[i]);
        }
        let q = [0.37, 0.41];
        assert!((f.interpolate(&q) - (0.3 * 0.37 - 0.2 * 0.41 + 0.1)).abs() < 1e-14);
    }

    #[test]
    fn csv_round_trip() {
        let g = GridSpec::new(vec![-0.5, 0.0], vec![1.5, 2.0], vec![4, 3]).unwrap();
        let f = GridFunction::from_fn(g, 0.7, |p| (p[0] * 1.3).sin() + p[1] / 3.0);
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("index,coord_1,coord_2,value\n"));
        let back = GridFunction::read_csv(&buf[..], 0.7).unwrap();
        assert_eq!(back.grid().points_per_axis(), &[4, 3]);
        for (a, b) in back.values().iter().zip(f.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn csv_rejects_ragged_input() {
        let text = "index,coord_1,value\n0,0,1\n2,0.5,1\n";
        assert!(GridFunction::read_csv(text.as_bytes(), 1.0).is_err());
    }
}

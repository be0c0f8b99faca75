//! Constants and sampling geometry of the perturbation on `[0,a]^k`.

use crate::error::{Error, Result};
use crate::genvec::LineGeometry;
use crate::lipfun::GridSpec;
use crate::mollify::DomainDescriptor;

/// Grid points per non-marker axis; odd so that `a/2` is a grid point.
pub const CROSS_AXIS_POINTS: usize = 33;

const MAX_N: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct MainLemmaParams {
    pub a: f64,
    pub k: usize,
    pub delta: f64,
    pub tau: f64,
    pub m: usize,
    pub b: f64,
    pub c: f64,
    pub n: usize,
    /// Spacing `(c - b)/(N - 1)` of the marker line.
    pub step: f64,
    /// `a_1, …, a_N`.
    pub line: Vec<f64>,
    /// 1-based indices with `a_L <= a/4 < a_{L+1} <= a_Q <= a/2 < a_{Q+1}`.
    pub l: usize,
    pub q: usize,
    pub eta: f64,
    /// Euclidean distance from the marker line to the boundary of the cube.
    pub dist_line_edge: f64,
}

fn line_values(b: f64, c: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|r| {
            if r == n {
                c
            } else {
                b + (c - b) * (r - 1) as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// `(L, Q)` for the line, if both exist with `L < Q`.
fn window_indices(line: &[f64], a: f64) -> Option<(usize, usize)> {
    let l = line.iter().rposition(|&v| v <= a / 4.0)? + 1;
    let q = line.iter().rposition(|&v| v <= a / 2.0)? + 1;
    (l < q && q < line.len()).then_some((l, q))
}

pub fn choose_main_lemma_params(a: f64, k: usize, delta: f64, tau: f64, m: usize) -> Result<MainLemmaParams> {
    if !(a > 0.0) || k == 0 {
        return Err(Error::InvalidParameter(format!("need a > 0 and k >= 1 (a={a}, k={k})")));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::InvalidParameter(format!("tau must lie in (0, 1), got {tau}")));
    }
    if !(delta > 0.0) || m == 0 {
        return Err(Error::InvalidParameter(format!("need delta > 0 and M >= 1 (delta={delta}, M={m})")));
    }
    let b = a / 16.0;
    let c = 15.0 * a / 16.0;
    let dist_line_edge = b;
    for n in 3..MAX_N {
        let step = (c - b) / (n - 1) as f64;
        if !(step < delta / 8.0) {
            continue;
        }
        let line = line_values(b, c, n);
        let Some((l, q)) = window_indices(&line, a) else { continue };
        if q - l < 2 * m {
            continue;
        }
        let eta = (delta / 8.0).min((1.0 - tau) * dist_line_edge / 8.0);
        return Ok(MainLemmaParams {
            a,
            k,
            delta,
            tau,
            m,
            b,
            c,
            n,
            step,
            line,
            l,
            q,
            eta,
            dist_line_edge,
        });
    }
    Err(Error::InvalidParameter(format!("no N below {MAX_N} satisfies the constraints")))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Kind of a sampled point of `D = Edge ∪ A ∪ conv(Λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnchorKind {
    Edge,
    /// Marker-line point `a_r` (0-based `r`).
    Line(usize),
    /// Point of `conv(Λ)` between `a_r` and `a_{r+1}` (0-based) at fraction `μ`.
    Segment(usize, f64),
}

/// Evaluation grid on `[0,a]^k` and the grid indices of the anchor set.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaGeometry {
    pub grid: GridSpec,
    /// Flat grid index and kind of every anchor, edges first.
    pub anchors: Vec<(usize, AnchorKind)>,
    /// Flat grid index of each `a_r`.
    pub line_index: Vec<usize>,
    pub line: LineGeometry,
    pub domain: DomainDescriptor,
}

impl MainLemmaParams {
    /// Points per axis of the marker axis making every `a_r` a grid point.
    pub fn marker_axis_points(&self) -> usize {
        let g = gcd(self.n - 1, 14);
        16 * (self.n - 1) / g + 1
    }

    /// The point `(a/2, …, a/2, v)`.
    pub fn line_point(&self, v: f64) -> Vec<f64> {
        let mut p = vec![self.a / 2.0; self.k];
        p[self.k - 1] = v;
        p
    }

    pub fn geometry(&self) -> Result<LemmaGeometry> {
        let mut pts = vec![CROSS_AXIS_POINTS; self.k];
        pts[self.k - 1] = self.marker_axis_points();
        let grid = GridSpec::new(vec![0.0; self.k], vec![self.a; self.k], pts)?;
        let mut line_index = Vec::with_capacity(self.n);
        for &v in &self.line {
            let idx = grid
                .locate(&self.line_point(v))
                .ok_or_else(|| Error::GridMismatch(format!("marker point {v} is not a grid point")))?;
            line_index.push(idx);
        }
        let mut anchors: Vec<(usize, AnchorKind)> =
            (0..grid.len()).filter(|&i| grid.is_boundary(i)).map(|i| (i, AnchorKind::Edge)).collect();
        anchors.extend(line_index.iter().enumerate().map(|(r, &i)| (i, AnchorKind::Line(r))));
        // conv(Λ) runs from a_{L+1} to a_Q (1-based), i.e. 0-based l..=q-1.
        let (lo, hi) = (self.l, self.q - 1);
        let axis = self.k - 1;
        let mut idx = grid.multi_index(line_index[lo]);
        let end = grid.multi_index(line_index[hi])[axis];
        let mut piece = lo;
        for j in idx[axis] + 1..end {
            idx[axis] = j;
            let flat = grid.flat_index(&idx);
            let v = grid.coord(axis, j);
            while self.line[piece + 1] <= v {
                piece += 1;
            }
            if line_index.contains(&flat) {
                continue;
            }
            let mu = (v - self.line[piece]) / (self.line[piece + 1] - self.line[piece]);
            anchors.push((flat, AnchorKind::Segment(piece, mu)));
        }
        let line = LineGeometry::new(self.n, self.l, self.q)?;
        let mut domain = DomainDescriptor::cube(self.k, self.a)
            .with_segment(self.line_point(self.line[lo]), self.line_point(self.line[hi]));
        for &v in &self.line {
            domain = domain.with_point(self.line_point(v));
        }
        Ok(LemmaGeometry { grid, anchors, line_index, line, domain })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_choice() {
        let p = choose_main_lemma_params(1.0, 2, 0.4, 0.5, 1).unwrap();
        assert_eq!(p.n, 19);
        assert_eq!(p.b, 1.0 / 16.0);
        assert_eq!(p.c, 15.0 / 16.0);
        assert!(p.step < 0.05);
        let (l, q) = (p.l, p.q);
        assert!(p.line[l - 1] <= 0.25 && 0.25 < p.line[l]);
        assert!(p.line[l] <= p.line[q - 1] && p.line[q - 1] <= 0.5 && 0.5 < p.line[q]);
        assert!(q - l >= 2);
        assert_eq!((l, q), (4, 10));
        assert!(p.line[1] <= 0.5 && p.line[0] < 0.125);
        assert!(p.line[l] > 0.125 && p.line[q - 1] < 0.875);
        assert!(p.eta < p.delta / 4.0);
    }

    #[test]
    fn cover_size_drives_n() {
        let p3 = choose_main_lemma_params(1.0, 2, 0.4, 0.5, 3).unwrap();
        assert!(p3.q - p3.l >= 6);
        let p4 = choose_main_lemma_params(1.0, 2, 0.4, 0.5, 4).unwrap();
        assert!(p4.q - p4.l >= 8);
        assert!(p4.n > 19);
        let fine = choose_main_lemma_params(1.0, 1, 0.04, 0.5, 1).unwrap();
        assert!(fine.step < 0.005);
    }

    #[test]
    fn invalid_inputs() {
        assert!(choose_main_lemma_params(1.0, 2, 0.4, 1.0, 1).is_err());
        assert!(choose_main_lemma_params(1.0, 2, 0.0, 0.5, 1).is_err());
        assert!(choose_main_lemma_params(1.0, 2, 0.4, 0.5, 0).is_err());
    }

    #[test]
    fn geometry_places_markers_on_grid() {
        for (k, m) in [(1, 1), (2, 2), (2, 4)] {
            let p = choose_main_lemma_params(1.0, k, 0.4, 0.5, m).unwrap();
            let g = p.geometry().unwrap();
            assert_eq!(g.line_index.len(), p.n);
            for (r, &i) in g.line_index.iter().enumerate() {
                let pt = g.grid.point(i);
                assert!((pt[k - 1] - p.line[r]).abs() < 1e-12);
            }
            let segs = g.anchors.iter().filter(|a| matches!(a.1, AnchorKind::Segment(..))).count();
            assert!(segs > 0);
            let mut seen: Vec<usize> = g.anchors.iter().map(|a| a.0).collect();
            seen.sort_unstable();
            seen.dedup();
            assert_eq!(seen.len(), g.anchors.len());
        }
        let p = choose_main_lemma_params(1.0, 2, 0.4, 0.5, 2).unwrap();
        assert_eq!(p.marker_axis_points(), 145);
    }
}

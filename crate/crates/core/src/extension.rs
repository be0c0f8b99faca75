//! McShane–Whitney extension of Lipschitz data from a finite anchor set.

use crate::error::{Error, Result};

/// Tolerance used when testing pairwise consistency of anchors.
pub const CONSISTENCY_TOL: f64 = 1e-12;

/// Finite set of anchor points with values and a common Lipschitz budget.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSet {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    tau: f64,
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

impl AnchorSet {
    /// Builds an anchor set, rejecting duplicates and data that admit no
    /// `tau`-Lipschitz extension.
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>, tau: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("empty anchor set".into()));
        }
        if points.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} anchor points but {} values",
                points.len(),
                values.len()
            )));
        }
        let k = points[0].len();
        if points.iter().any(|p| p.len() != k) {
            return Err(Error::InvalidParameter("anchor points of mixed dimension".into()));
        }
        if !(tau >= 0.0) {
            return Err(Error::InvalidParameter(format!("negative budget {tau}")));
        }
        for i in 0..points.len() {
            for j in 0..i {
                let d = dist(&points[i], &points[j]);
                if d < 1e-12 {
                    return Err(Error::InvalidParameter(format!(
                        "duplicate anchor {:?}",
                        points[i]
                    )));
                }
                if (values[i] - values[j]).abs() > tau * d + CONSISTENCY_TOL {
                    return Err(Error::NotExtendable {
                        vi: values[i],
                        vj: values[j],
                        tau,
                        dist: d,
                    });
                }
            }
        }
        Ok(Self { points, values, tau })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Smallest budget the data are consistent with (max pairwise quotient).
    pub fn pairwise_constant(points: &[Vec<f64>], values: &[f64]) -> f64 {
        let mut best = 0.0f64;
        for i in 0..points.len() {
            for j in 0..i {
                let d = dist(&points[i], &points[j]);
                if d > 0.0 {
                    best = best.max((values[i] - values[j]).abs() / d);
                }
            }
        }
        best
    }

    /// `max_i (v_i - tau |q - p_i|)`; anchor points return their own value.
    pub fn evaluate(&self, q: &[f64]) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for (p, &v) in self.points.iter().zip(&self.values) {
            let d = dist(p, q);
            if d == 0.0 {
                return v;
            }
            best = best.max(v - self.tau * d);
        }
        best
    }
}

/// Evaluates the McShane extension of `anchors` at every query point.
pub fn mcshane_extend(anchors: &AnchorSet, queries: &[Vec<f64>]) -> Vec<f64> {
    queries.iter().map(|q| anchors.evaluate(q)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_anchor_cone() {
        let a = AnchorSet::new(vec![vec![0.0]], vec![1.0], 1.0).unwrap();
        assert_eq!(mcshane_extend(&a, &[vec![0.5]]), vec![0.5]);
    }

    #[test]
    fn two_anchor_max() {
        let a = AnchorSet::new(vec![vec![0.0], vec![1.0]], vec![0.0, 1.0], 1.0).unwrap();
        assert_eq!(mcshane_extend(&a, &[vec![0.5]]), vec![0.5]);
        assert_eq!(mcshane_extend(&a, &[vec![1.0], vec![0.0]]), vec![1.0, 0.0]);
    }

    #[test]
    fn inconsistent_anchors_rejected() {
        let r = AnchorSet::new(vec![vec![0.0], vec![0.1]], vec![0.0, 1.0], 1.0);
        assert!(matches!(r, Err(Error::NotExtendable { .. })));
    }

    #[test]
    fn duplicates_rejected() {
        let r = AnchorSet::new(vec![vec![0.2, 0.2], vec![0.2, 0.2]], vec![0.0, 0.0], 1.0);
        assert!(r.is_err());
        assert!(AnchorSet::new(vec![], vec![], 1.0).is_err());
    }

    #[test]
    fn consistent_new_anchor_leaves_extension_unchanged() {
        let a = AnchorSet::new(
            vec![vec![0.1, 0.2], vec![0.8, 0.3], vec![0.4, 0.9]],
            vec![0.3, 0.5, 0.1],
            0.9,
        )
        .unwrap();
        let p = vec![0.55, 0.45];
        let v = a.evaluate(&p);
        let mut pts = a.points().to_vec();
        pts.push(p);
        let mut vals = a.values().to_vec();
        vals.push(v);
        let b = AnchorSet::new(pts, vals, 0.9).unwrap();
        for i in 0..20 {
            let q = vec![i as f64 / 19.0, 1.0 - i as f64 / 23.0];
            assert!((a.evaluate(&q) - b.evaluate(&q)).abs() < 1e-12);
        }
    }
}

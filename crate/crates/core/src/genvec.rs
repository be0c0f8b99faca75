//! Generic vectors on the marker line and their independence certificates.
//!
//! Vectors `u_1..u_M ∈ (0,1)^N` are drawn near prescribed targets and accepted
//! once four conditions hold numerically:
//!
//! 1. `|u_m(a) - target_m(a)| < η` (exact by construction of the sampling box);
//! 2. `e, u_1, …, u_M` are linearly independent (`e` the all-ones vector);
//! 3. `ẽ, D u_1, …, D u_M` are independent, with `D` the forward difference over
//!    the marker indices `L+1 ..= Q+1`;
//! 4. for every admissible nonzero shift `j`, the restrictions of all `u_m` to the
//!    marker window and to the window shifted by `j` are independent.
//!
//! Independence is certified by the smallest singular value of the stacked
//! vectors exceeding [`RANK_TOL`].

use std::io::Write;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const RANK_TOL: f64 = 1e-9;

/// Forward differences `(x_2 - x_1, …, x_{n+1} - x_n)`.
pub fn diff_vector(u: &[f64]) -> Result<Vec<f64>> {
    if u.len() < 2 {
        return Err(Error::InvalidParameter(format!("difference of length-{} vector", u.len())));
    }
    Ok(u.windows(2).map(|w| w[1] - w[0]).collect())
}

/// `u|_α^{α+l-1}` with 1-based `alpha`.
pub fn window_restrict(u: &[f64], alpha: usize, l: usize) -> Result<Vec<f64>> {
    if alpha < 1 || alpha + l - 1 > u.len() || l == 0 {
        return Err(Error::InvalidParameter(format!(
            "window [{alpha}, {}] outside 1..={}",
            alpha + l - 1,
            u.len()
        )));
    }
    Ok(u[alpha - 1..alpha - 1 + l].to_vec())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankCheck {
    pub full: bool,
    /// Smallest singular value of the stacked vectors.
    pub certificate: f64,
    pub reason: Option<&'static str>,
}

/// Full-row-rank test by smallest singular value.
pub fn rank_full_check(vectors: &[Vec<f64>], tol: f64) -> RankCheck {
    let m = vectors.len();
    let n = vectors.first().map_or(0, Vec::len);
    if m == 0 || vectors.iter().any(|v| v.len() != n) {
        return RankCheck { full: false, certificate: 0.0, reason: Some("ragged input") };
    }
    if m > n {
        return RankCheck { full: false, certificate: 0.0, reason: Some("dimension deficit") };
    }
    let mat = DMatrix::from_fn(m, n, |i, j| vectors[i][j]);
    let certificate = mat
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    RankCheck { full: certificate > tol, certificate, reason: None }
}

/// Index geometry of the marker line `A = {1..N}` and its window `Λ = {L+1..Q}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineGeometry {
    pub n: usize,
    pub l: usize,
    pub q: usize,
    /// Nonzero index shifts `j` with `j + Λ ⊂ A`.
    pub shifts: Vec<isize>,
}

impl LineGeometry {
    pub fn new(n: usize, l: usize, q: usize) -> Result<Self> {
        if !(l >= 1 && l < q && q < n) {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= L < Q < N, got L={l}, Q={q}, N={n}"
            )));
        }
        let lo = 1 - (l as isize + 1);
        let hi = n as isize - q as isize;
        let shifts = (lo..=hi).filter(|&j| j != 0).collect();
        Ok(Self { n, l, q, shifts })
    }

    pub fn window_len(&self) -> usize {
        self.q - self.l
    }

    /// `D_{Q-L} u`: differences over indices `L+1 ..= Q+1`.
    pub fn marker_differences(&self, u: &[f64]) -> Vec<f64> {
        (self.l + 1..=self.q).map(|i| u[i] - u[i - 1]).collect()
    }

    fn restrict(&self, u: &[f64], shift: isize) -> Vec<f64> {
        let start = (self.l as isize + shift) as usize;
        u[start..start + self.window_len()].to_vec()
    }
}

/// Sampled vectors with their certificates for conditions (2), (3), (4).
#[derive(Debug, Clone, PartialEq)]
pub struct GenericVectorSet {
    pub vectors: Vec<Vec<f64>>,
    pub eta: f64,
    pub certificates: [f64; 3],
    pub seed: u64,
    /// Number of draws used (1 = first draw accepted).
    pub attempts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certification {
    pub closeness_ok: bool,
    pub certificates: [f64; 3],
    /// First failing condition number, if any.
    pub failing: Option<u8>,
}

/// Checks conditions (1)–(4) from scratch.
pub fn certify(
    vectors: &[Vec<f64>],
    targets: &[Vec<f64>],
    geometry: &LineGeometry,
    eta: f64,
) -> Certification {
    let closeness_ok = vectors.iter().zip(targets).all(|(u, t)| {
        u.iter()
            .zip(t)
            .all(|(&x, &y)| (x - y).abs() < eta && x > 0.0 && x < 1.0)
    });
    let mut cond2 = vec![vec![1.0; geometry.n]];
    cond2.extend(vectors.iter().cloned());
    let c2 = rank_full_check(&cond2, RANK_TOL);

    let mut cond3 = vec![vec![1.0; geometry.window_len()]];
    cond3.extend(vectors.iter().map(|u| geometry.marker_differences(u)));
    let c3 = rank_full_check(&cond3, RANK_TOL);

    let mut c4 = f64::INFINITY;
    for &j in &geometry.shifts {
        let mut stack: Vec<Vec<f64>> = vectors.iter().map(|u| geometry.restrict(u, 0)).collect();
        stack.extend(vectors.iter().map(|u| geometry.restrict(u, j)));
        c4 = c4.min(rank_full_check(&stack, RANK_TOL).certificate);
    }
    if geometry.shifts.is_empty() {
        c4 = 0.0;
    }
    let certificates = [c2.certificate, c3.certificate, c4];
    let failing = if !closeness_ok {
        Some(1)
    } else {
        certificates
            .iter()
            .position(|&c| !(c > RANK_TOL))
            .map(|i| i as u8 + 2)
    };
    Certification { closeness_ok, certificates, failing }
}

/// Open sampling interval around `target`, shrunk one-sidedly to stay in (0, 1).
fn sampling_box(target: f64, eta: f64) -> (f64, f64) {
    let lo = (target - eta).max(0.0);
    let hi = (target + eta).min(1.0);
    (lo, hi)
}

/// Rejection sampling of `M = targets.len()` vectors of length `N`.
pub fn sample_generic_vectors(
    targets: &[Vec<f64>],
    geometry: &LineGeometry,
    eta: f64,
    seed: u64,
    max_retries: usize,
) -> Result<GenericVectorSet> {
    let m = targets.len();
    if m == 0 {
        return Err(Error::InvalidParameter("no target vectors".into()));
    }
    if targets.iter().any(|t| t.len() != geometry.n) {
        return Err(Error::InvalidParameter("target length differs from |A|".into()));
    }
    if !(geometry.n > geometry.window_len() && geometry.window_len() >= 2 * m) {
        return Err(Error::Precondition(format!(
            "need N > Q-L >= 2M, got N={}, Q-L={}, M={m}",
            geometry.n,
            geometry.window_len()
        )));
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
    }
    if targets.iter().flatten().any(|&t| !(t > -eta && t < 1.0 + eta)) {
        return Err(Error::Precondition("target farther than eta from (0, 1)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_failure = 1;
    for attempt in 1..=max_retries.max(1) {
        let vectors: Vec<Vec<f64>> = targets
            .iter()
            .map(|t| {
                t.iter()
                    .map(|&c| {
                        let (lo, hi) = sampling_box(c, eta);
                        loop {
                            let x = rng.gen_range(lo..hi);
                            if x > 0.0 && x < 1.0 && (x - c).abs() < eta {
                                break x;
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        let cert = certify(&vectors, targets, geometry, eta);
        match cert.failing {
            None => {
                return Ok(GenericVectorSet {
                    vectors,
                    eta,
                    certificates: cert.certificates,
                    seed,
                    attempts: attempt,
                })
            }
            Some(c) => last_failure = c,
        }
    }
    Err(Error::RetriesExhausted { retries: max_retries, condition: last_failure })
}

impl GenericVectorSet {
    /// Wraps hand-made vectors without enforcing the conditions; certificates are
    /// still computed. Used for mutation tests.
    pub fn uncertified(vectors: Vec<Vec<f64>>, targets: &[Vec<f64>], geometry: &LineGeometry, eta: f64) -> Self {
        let cert = certify(&vectors, targets, geometry, eta);
        Self { vectors, eta, certificates: cert.certificates, seed: 0, attempts: 0 }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// One row per vector: `vector,a_1,…,a_N`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let n = self.vectors.first().map_or(0, Vec::len);
        let mut header = vec!["vector".to_string()];
        header.extend((1..=n).map(|i| format!("a_{i}")));
        w.write_record(&header)?;
        for (m, u) in self.vectors.iter().enumerate() {
            let mut row = vec![(m + 1).to_string()];
            row.extend(u.iter().map(|x| x.to_string()));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Certificate sidecar: `condition,certificate,tol,pass`.
    pub fn write_certificates<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["condition", "certificate", "tol", "pass"])?;
        for (i, c) in self.certificates.iter().enumerate() {
            w.write_record([
                (i + 2).to_string(),
                c.to_string(),
                RANK_TOL.to_string(),
                (*c > RANK_TOL).to_string(),
            ])?;
        }
        w.write_record(["eta".into(), self.eta.to_string(), String::new(), "true".into()])?;
        w.flush()?;
        Ok(())
    }
}

//! Flows with closed-form orbits, the orbital metric `ρ`, sections and markers.
//!
//! The group `R^k` carries the Euclidean metric. A torus flow with scale `λ`
//! moves a point by `t/λ`, so one unit of group time is `1/λ` on the torus and
//! `ρ(x, y) = λ·|y - x|_torus`.
//!
//! Logistic states are stored in logit coordinates `z = ln(x/(1-x))`, where the
//! flow is a translation; the fixed points `x = 0, 1` are `z = ∓∞`. Use
//! [`Flow::logistic_state`] and [`Flow::logistic_x`] to convert.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type State = Vec<f64>;

/// Minimum scale of a torus flow for a singleton section to be 4-lacunary.
pub const MIN_SECTION_SCALE: f64 = 8.0;

/// Number of sampled pairs in the local-section injectivity fuzz.
pub const SECTION_FUZZ_PAIRS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Flow {
    Torus { k: usize, scale: f64 },
    Logistic,
}

/// `x + t/scale mod 1` on `[0,1)^k`.
pub fn torus_translation_flow(k: usize, group_scale: f64) -> Result<Flow> {
    if k == 0 {
        return Err(Error::InvalidParameter("torus dimension must be >= 1".into()));
    }
    if !(group_scale > 0.0 && group_scale.is_finite()) {
        return Err(Error::InvalidParameter(format!("group scale must be positive, got {group_scale}")));
    }
    Ok(Flow::Torus { k, scale: group_scale })
}

/// The flow of `x' = x(1-x)` on `[0,1]`.
pub fn logistic_interval_flow() -> Flow {
    Flow::Logistic
}

fn wrap01(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Signed representative of `d` modulo 1 in `[-1/2, 1/2]`.
fn wrap_half(d: f64) -> f64 {
    d - d.round()
}

fn norm(v: impl Iterator<Item = f64>) -> f64 {
    v.map(|x| x * x).sum::<f64>().sqrt()
}

impl Flow {
    /// Looks a flow up by its configuration name.
    pub fn from_name(name: &str, scale: f64) -> Result<Self> {
        match name {
            "torus1" => torus_translation_flow(1, scale),
            "torus2" => torus_translation_flow(2, scale),
            "logistic" => Ok(Flow::Logistic),
            other => Err(Error::Config(format!("unknown flow '{other}'"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Flow::Torus { k, .. } => format!("torus{k}"),
            Flow::Logistic => "logistic".into(),
        }
    }

    /// Acting dimension.
    pub fn k(&self) -> usize {
        match self {
            Flow::Torus { k, .. } => *k,
            Flow::Logistic => 1,
        }
    }

    pub fn state_dim(&self) -> usize {
        self.k()
    }

    pub fn group_scale(&self) -> f64 {
        match self {
            Flow::Torus { scale, .. } => *scale,
            Flow::Logistic => 1.0,
        }
    }

    /// Logit coordinate of the interval point `x`.
    pub fn logistic_state(x: f64) -> State {
        let z = if x <= 0.0 {
            f64::NEG_INFINITY
        } else if x >= 1.0 {
            f64::INFINITY
        } else {
            (x / (1.0 - x)).ln()
        };
        vec![z]
    }

    /// Interval point of the logit state `s`.
    pub fn logistic_x(s: &[f64]) -> f64 {
        let z = s[0];
        if z == f64::INFINITY {
            1.0
        } else if z == f64::NEG_INFINITY {
            0.0
        } else if z >= 0.0 {
            1.0 / (1.0 + (-z).exp())
        } else {
            let e = z.exp();
            e / (1.0 + e)
        }
    }

    pub fn act(&self, t: &[f64], x: &[f64]) -> State {
        match self {
            Flow::Torus { scale, .. } => {
                x.iter().zip(t).map(|(&xi, &ti)| wrap01(xi + ti / scale)).collect()
            }
            Flow::Logistic => vec![x[0] + t[0]],
        }
    }

    /// State-space metric: flat torus distance, or `|x - y|` on `[0,1]`.
    pub fn dist(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Flow::Torus { .. } => norm(x.iter().zip(y).map(|(a, b)| wrap_half(b - a))),
            Flow::Logistic => (Self::logistic_x(x) - Self::logistic_x(y)).abs(),
        }
    }

    pub fn fixed_points(&self) -> Vec<State> {
        match self {
            Flow::Torus { .. } => Vec::new(),
            Flow::Logistic => vec![vec![f64::NEG_INFINITY], vec![f64::INFINITY]],
        }
    }

    pub fn is_fixed(&self, x: &[f64]) -> bool {
        match self {
            Flow::Torus { .. } => false,
            Flow::Logistic => x[0].is_infinite(),
        }
    }

    /// Continuous observable into `[0,1]` that is injective on the fixed points.
    pub fn h1(&self, x: &[f64]) -> f64 {
        match self {
            Flow::Torus { k, .. } => {
                let s: f64 = x.iter().map(|&v| (2.0 * std::f64::consts::PI * v).cos()).sum();
                0.5 + 0.25 * s / *k as f64
            }
            Flow::Logistic => Self::logistic_x(x),
        }
    }

    /// `h1((t - u)·x)` without building the intermediate state.
    pub fn observe_shifted(&self, x: &[f64], t: &[f64], u: &[f64]) -> f64 {
        match self {
            Flow::Torus { k, scale } => {
                let mut s = 0.0;
                for i in 0..*k {
                    s += (2.0 * std::f64::consts::PI * wrap01(x[i] + (t[i] - u[i]) / scale)).cos();
                }
                0.5 + 0.25 * s / *k as f64
            }
            Flow::Logistic => Self::logistic_x(&[x[0] + (t[0] - u[0])]),
        }
    }

    /// Orbital extended metric `inf{|g| : g x = y}`; `∞` across orbits.
    pub fn rho(&self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Flow::Torus { scale, .. } => {
                scale * norm(x.iter().zip(y).map(|(a, b)| wrap_half(b - a)))
            }
            Flow::Logistic => {
                let (a, b) = (x[0], y[0]);
                if a == b {
                    0.0
                } else if a.is_infinite() || b.is_infinite() {
                    f64::INFINITY
                } else {
                    (b - a).abs()
                }
            }
        }
    }

    /// A state drawn from a fixed reference distribution: uniform on the torus,
    /// uniform in `x` on `(0,1)` for the logistic flow.
    pub fn sample_state<R: Rng>(&self, rng: &mut R) -> State {
        match self {
            Flow::Torus { k, .. } => (0..*k).map(|_| rng.gen::<f64>()).collect(),
            Flow::Logistic => {
                let x = rng.gen_range(1e-6..1.0 - 1e-6);
                Self::logistic_state(x)
            }
        }
    }
}

/// Lacunary cross-section with an injective label `α: S → [1,2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSection {
    pub flow: Flow,
    pub points: Vec<State>,
    pub alpha: Vec<f64>,
    /// Distinct section points on one orbit are at least this far apart in `ρ`.
    pub lacunarity: f64,
}

/// `S = {base}` with `α(base) = 1.5` on a torus flow of scale at least 8.
pub fn singleton_cross_section(flow: &Flow, base: State) -> Result<CrossSection> {
    match flow {
        Flow::Torus { k, scale } => {
            if base.len() != *k {
                return Err(Error::InvalidParameter("base point of wrong dimension".into()));
            }
            if *scale < MIN_SECTION_SCALE {
                return Err(Error::LacunarityViolated(format!(
                    "group scale {scale} < {MIN_SECTION_SCALE}"
                )));
            }
            Ok(CrossSection { flow: flow.clone(), points: vec![base], alpha: vec![1.5], lacunarity: *scale })
        }
        Flow::Logistic => CrossSection::new(flow, vec![base]),
    }
}

impl CrossSection {
    /// General finite section. Labels are `1 + (i+1)/(n+1)` in lexicographic
    /// order of the points; pairwise `ρ ≥ 4` is enforced, as is the torus
    /// return time (scale at least 8).
    pub fn new(flow: &Flow, points: Vec<State>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("empty section".into()));
        }
        if points.iter().any(|p| p.len() != flow.state_dim()) {
            return Err(Error::InvalidParameter("section point of wrong dimension".into()));
        }
        if points.iter().any(|p| flow.is_fixed(p)) {
            return Err(Error::Precondition("section point is fixed".into()));
        }
        let mut lac = match flow {
            Flow::Torus { scale, .. } => {
                if *scale < MIN_SECTION_SCALE {
                    return Err(Error::LacunarityViolated(format!(
                        "group scale {scale} < {MIN_SECTION_SCALE}"
                    )));
                }
                *scale
            }
            Flow::Logistic => f64::INFINITY,
        };
        for i in 0..points.len() {
            for j in 0..i {
                let r = flow.rho(&points[i], &points[j]);
                if r < 4.0 {
                    return Err(Error::LacunarityViolated(format!(
                        "section points {:?} and {:?} at orbital distance {r}",
                        points[i], points[j]
                    )));
                }
                lac = lac.min(r);
            }
        }
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| {
            points[a]
                .iter()
                .zip(&points[b])
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let n = points.len() as f64;
        let mut alpha = vec![0.0; points.len()];
        for (rank, &i) in order.iter().enumerate() {
            alpha[i] = 1.0 + (rank as f64 + 1.0) / (n + 1.0);
        }
        Ok(Self { flow: flow.clone(), points, alpha, lacunarity: lac })
    }

    /// Section point closest to `x` in `ρ`, with that distance.
    pub fn nearest(&self, x: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, s) in self.points.iter().enumerate() {
            let r = self.flow.rho(x, s);
            if r < best.1 {
                best = (i, r);
            }
        }
        best
    }
}

/// Singleton local section `{p}` certified on `[-a,a]^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSection {
    pub base: State,
    pub a: f64,
    pub points: Vec<State>,
}

/// Checks that `(t, s) ↦ t·s` is injective on `[-a,a]^k × {p}` by seeded fuzzing,
/// including pairs that differ by a torus period.
pub fn local_section_at(flow: &Flow, p: State, a: f64) -> Result<LocalSection> {
    if flow.is_fixed(&p) {
        return Err(Error::Precondition("base point is fixed".into()));
    }
    if !(a > 0.0) {
        return Err(Error::InvalidParameter(format!("a must be positive, got {a}")));
    }
    let k = flow.k();
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_c710);
    let fail = |reason: String| Error::NotLocalSection { a, reason };
    for _ in 0..SECTION_FUZZ_PAIRS {
        let t: Vec<f64> = (0..k).map(|_| rng.gen_range(-a..=a)).collect();
        let mut others: Vec<Vec<f64>> = vec![(0..k).map(|_| rng.gen_range(-a..=a)).collect()];
        if let Flow::Torus { scale, .. } = flow {
            for axis in 0..k {
                for sign in [-1.0, 1.0] {
                    let mut u = t.clone();
                    u[axis] += sign * scale;
                    if u[axis].abs() <= a {
                        others.push(u);
                    }
                }
            }
        }
        let x = flow.act(&t, &p);
        for u in others {
            let sep = t.iter().zip(&u).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            if sep == 0.0 {
                continue;
            }
            let y = flow.act(&u, &p);
            let d = match flow {
                Flow::Logistic => (x[0] - y[0]).abs(),
                Flow::Torus { .. } => flow.dist(&x, &y),
            };
            if d <= 1e-9 {
                return Err(fail(format!("t={t:?} and {u:?} reach the same state")));
            }
        }
    }
    Ok(LocalSection { base: p.clone(), a, points: vec![p] })
}

/// Return times `{t ∈ window : t·x = p}` of `x` to a singleton section, sorted
/// lexicographically.
pub fn marker_set(flow: &Flow, section: &LocalSection, x: &[f64], window: &[(f64, f64)]) -> Vec<Vec<f64>> {
    let p = &section.base;
    match flow {
        Flow::Torus { k, scale } => {
            let mut ranges = Vec::with_capacity(*k);
            for axis in 0..*k {
                let d = p[axis] - x[axis];
                let (lo, hi) = window[axis];
                let nlo = (lo / scale - d).ceil() as i64;
                let nhi = (hi / scale - d).floor() as i64;
                ranges.push((nlo..=nhi).map(|n| scale * (d + n as f64)).collect::<Vec<_>>());
            }
            let mut out: Vec<Vec<f64>> = vec![Vec::new()];
            for r in ranges {
                out = out
                    .into_iter()
                    .flat_map(|pre| {
                        r.iter().map(move |&v| {
                            let mut q = pre.clone();
                            q.push(v);
                            q
                        })
                    })
                    .collect();
            }
            out
        }
        Flow::Logistic => {
            if flow.is_fixed(x) {
                return Vec::new();
            }
            let t = p[0] - x[0];
            if t >= window[0].0 && t <= window[0].1 {
                vec![vec![t]]
            } else {
                Vec::new()
            }
        }
    }
}

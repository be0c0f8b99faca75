//! Configuration-driven experiments producing pass/fail reports.
//!
//! Every run is a pure function of its [`ExperimentConfig`]; the same config
//! yields a byte-identical report.

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::borel::{embed_point, fixed_point_check, verify_embedding};
use crate::error::{Error, Result};
use crate::extension::{mcshane_extend, AnchorSet};
use crate::flows::{local_section_at, singleton_cross_section, Flow, State};
use crate::genvec::GenericVectorSet;
use crate::lipfun::{lip_const_estimate, GridFunction, GridSpec};
use crate::mollify::{mollify_with, DomainDescriptor, MollifyParams};
use crate::report::{Report, REPORT_HEADER};
use crate::topo::{
    blend, check_section_separation, choose_main_lemma_params, g1_equivariance, gaussian_base, line_targets, main_lemma_g, min_bwidth,
    periodic_corruption, shift_rigidity_fuzz, verify_ga, verify_gbc, Blend, CoverData, Ensemble, FuzzConfig,
    GaussianBase, MainLemma, MainLemmaParams, MarkerPerturbation, OrbitObservable,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    EmbedBorel,
    EmbedTopo,
    MainLemma,
    McShane,
    Mollify,
    Verify,
}

impl Subcommand {
    pub const ALL: [Subcommand; 6] = [
        Subcommand::EmbedBorel,
        Subcommand::EmbedTopo,
        Subcommand::MainLemma,
        Subcommand::McShane,
        Subcommand::Mollify,
        Subcommand::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::EmbedBorel => "embed-borel",
            Subcommand::EmbedTopo => "embed-topo",
            Subcommand::MainLemma => "main-lemma",
            Subcommand::McShane => "mcshane",
            Subcommand::Mollify => "mollify",
            Subcommand::Verify => "verify",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| Error::Config(format!("unknown subcommand {name:?}")))
    }
}

/// Parameters shared by all experiments. Unused fields are ignored by a given
/// subcommand.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `torus1`, `torus2` or `logistic`.
    pub flow: String,
    /// Group scale of torus flows.
    pub scale: f64,
    /// Section base point (Borel embedding).
    pub base: Option<Vec<f64>>,
    /// Section base points `B₀`, `C₀` (topological embedding).
    pub sections: Option<Vec<Vec<f64>>>,
    pub seed: u64,
    /// Number of sampled states.
    pub points: usize,
    pub a: f64,
    pub delta: f64,
    /// Cover size `M`.
    pub cover: usize,
    /// Compression of the input observable towards 1/2.
    pub kappa: f64,
    pub bwidth: Option<f64>,
    pub eta: Option<f64>,
    /// Truncation depth of the `Lip1` metric; defaults to the window half-width.
    pub m_max: Option<usize>,
    /// Half-width of the symmetric group window (20 for `embed-borel`, 4 for
    /// `embed-topo`).
    pub window: Option<f64>,
    pub window_points: Option<usize>,
    pub trials: usize,
    pub retries: usize,
    pub match_tol: f64,
    pub w_tol: Option<f64>,
    pub pool: usize,
    /// Skip the corrupted-vector negative control of `main-lemma`.
    pub skip_negative_control: bool,
    /// Dimension of the cube for `mcshane` and `mollify`.
    pub dim: usize,
    pub tau: f64,
    pub epsilon: f64,
    pub anchors: usize,
    pub grid_points: usize,
    pub tol: f64,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            flow: "torus2".into(),
            scale: 8.0,
            base: None,
            sections: None,
            seed: 42,
            points: 50,
            a: 1.0,
            delta: 0.4,
            cover: 2,
            kappa: 0.02,
            bwidth: None,
            eta: None,
            m_max: None,
            window: None,
            window_points: None,
            trials: 1000,
            retries: 10,
            match_tol: crate::topo::main_lemma::DEFAULT_MATCH_TOL,
            w_tol: None,
            pool: 16,
            skip_negative_control: false,
            dim: 2,
            tau: 0.9,
            epsilon: 0.05,
            anchors: 40,
            grid_points: 33,
            tol: 1e-9,
            input: None,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn flow(&self) -> Result<Flow> {
        Flow::from_name(&self.flow, self.scale).map_err(|e| match e {
            Error::InvalidParameter(m) => Error::Config(m),
            other => other,
        })
    }

    /// Symmetric window `[-w, w]^k` with `per_unit` points per unit length
    /// unless `window_points` is set.
    fn window_grid(&self, k: usize, default_half: f64, per_unit: f64) -> Result<GridSpec> {
        let w = self.window.unwrap_or(default_half);
        let n = self.window_points.unwrap_or((2.0 * w * per_unit).round() as usize + 1);
        GridSpec::symmetric(k, -w, w, n)
    }

    /// `[-20, 20]^k` with 161 points per axis for `k = 1` and 41 for `k = 2`.
    pub fn borel_window(&self, k: usize) -> Result<GridSpec> {
        self.window_grid(k, 20.0, if k == 1 { 4.0 } else { 1.0 })
    }

    /// `[-4, 4]^k` with 32 points per unit for `k = 1` and 8 for `k >= 2`.
    pub fn topo_window(&self, k: usize) -> Result<GridSpec> {
        self.window_grid(k, 4.0, if k == 1 { 32.0 } else { 8.0 })
    }

    fn m_max_for(&self, window: &GridSpec) -> usize {
        self.m_max.unwrap_or(window.upper(0).floor() as usize)
    }
}

/// A finished run: the report plus named output files.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub report: Report,
    pub grids: Vec<(String, GridFunction)>,
    /// Plot data as `(file name, rows of (x, y))`.
    pub plots: Vec<(String, Vec<(f64, f64)>)>,
}

impl RunOutput {
    /// Writes `report.csv`, one CSV per grid and `x,y` plot files into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        self.report.save(&dir.join("report.csv"))?;
        for (name, g) in &self.grids {
            g.write_csv(fs::File::create(dir.join(format!("{name}.csv")))?)?;
        }
        for (name, rows) in &self.plots {
            let mut w = csv::Writer::from_path(dir.join(format!("{name}.csv")))?;
            w.write_record(["x", "y"])?;
            for (x, y) in rows {
                w.write_record([format!("{x:?}"), format!("{y:?}")])?;
            }
            w.flush()?;
        }
        Ok(())
    }
}

pub fn run(cmd: Subcommand, cfg: &ExperimentConfig) -> Result<RunOutput> {
    match cmd {
        Subcommand::EmbedBorel => run_embed_borel(cfg),
        Subcommand::EmbedTopo => run_embed_topo(cfg),
        Subcommand::MainLemma => run_main_lemma(cfg),
        Subcommand::McShane => run_mcshane(cfg),
        Subcommand::Mollify => run_mollify(cfg),
        Subcommand::Verify => run_verify(cfg),
    }
}

fn default_base(flow: &Flow) -> State {
    match flow {
        Flow::Torus { k, .. } => vec![0.0; *k],
        Flow::Logistic => Flow::logistic_state(0.5),
    }
}

fn sample_states(flow: &Flow, n: usize, seed: u64) -> Vec<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| flow.sample_state(&mut rng)).collect()
}

/// Equivariant Borel embedding through a singleton cross-section.
pub fn run_embed_borel(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let flow = cfg.flow()?;
    let base = cfg.base.clone().unwrap_or_else(|| default_base(&flow));
    let section = singleton_cross_section(&flow, base)?;
    let window = cfg.borel_window(flow.k())?;
    let m_max = cfg.m_max_for(&window);
    let states = sample_states(&flow, cfg.points, cfg.seed);
    let rep = verify_embedding(&section, &states, &window, m_max, cfg.seed)?;

    let mut report = Report::new();
    report.info("n_points", "sample-count", rep.n_points as f64);
    report.at_most("lipschitz_excess", "one-lipschitz", rep.max_lipschitz_violation, cfg.tol);
    report.at_most("equivariance_residual", "equivariance", rep.max_equivariance_residual, 1e-12);
    report.above("min_pairwise_separation", "injectivity", rep.min_pairwise_separation, 0.0);
    if !flow.fixed_points().is_empty() {
        let (max_abs, min_sep) = fixed_point_check(&section, &states, &window, m_max)?;
        report.at_most("fixed_point_value", "fixed-points-to-zero", max_abs, 0.0);
        report.above("fixed_point_separation", "injectivity", min_sep, 0.0);
    }
    let mut out = RunOutput { report, ..Default::default() };
    for (i, x) in states.iter().enumerate() {
        out.grids.push((format!("point_{i:03}"), embed_point(&section, x, &window)?));
    }
    Ok(out)
}

/// The ensemble fed to the perturbation: the compressed orbit observable `F`
/// blended with the Gaussian base `f₀` at weight `δ`.
pub struct InputEnsemble {
    pub flow: Flow,
    pub observable: OrbitObservable,
    pub base: GaussianBase,
}

impl InputEnsemble {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let flow = cfg.flow()?;
        let b = cfg.bwidth.unwrap_or_else(|| min_bwidth(flow.k()));
        Ok(Self {
            observable: OrbitObservable::new(&flow, cfg.kappa)?,
            base: GaussianBase::new(&flow, b)?,
            flow,
        })
    }

    pub fn f1(&self, delta: f64) -> Result<Blend<'_>> {
        blend(&self.observable, &self.base, delta)
    }
}

fn lemma_params(cfg: &ExperimentConfig, k: usize, tau: f64) -> Result<MainLemmaParams> {
    let mut p = choose_main_lemma_params(cfg.a, k, cfg.delta, tau, cfg.cover)?;
    if let Some(eta) = cfg.eta {
        if !(eta > 0.0 && eta <= p.eta) {
            return Err(Error::Config(format!("eta override {eta} must lie in (0, {}]", p.eta)));
        }
        p.eta = eta;
    }
    Ok(p)
}

fn fuzz_config(cfg: &ExperimentConfig, seed: u64) -> FuzzConfig {
    FuzzConfig { trials: cfg.trials, seed, match_tol: cfg.match_tol, w_tol: cfg.w_tol, pool: cfg.pool }
}

fn build_lemma<'a>(cfg: &ExperimentConfig, f1: &'a dyn Ensemble, flow: &Flow) -> Result<MainLemma<'a>> {
    let params = lemma_params(cfg, flow.k(), f1.tau())?;
    let cover = CoverData::diagonal(flow, cfg.cover)?;
    main_lemma_g(f1, cover, params, cfg.seed, cfg.retries)
}

fn lemma_rows(report: &mut Report, lemma: &MainLemma<'_>) {
    let p = &lemma.params;
    report.info("N", "marker-line-length", p.n as f64);
    report.info("Delta", "marker-spacing", p.step);
    report.info("eta", "vector-box-radius", p.eta);
    for (i, c) in lemma.uset.certificates.iter().enumerate() {
        report.above(&format!("genericity_{}", i + 2), "generic-vectors", *c, crate::genvec::RANK_TOL);
    }
    report.info("tau_prime", "anchor-budget", lemma.tau_prime);
    report.info("composite_bound", "anchor-budget-composite", lemma.composite_bound);
    report.below("tau_double_prime", "perturbation-lipschitz", lemma.tau_double_prime(), 1.0);
}

/// The perturbation `g` on `[0,a]^k` with its four properties and the
/// shift-rigidity fuzz, plus a corrupted-vector negative control.
pub fn run_main_lemma(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let input = InputEnsemble::new(cfg)?;
    let f1 = input.f1(cfg.delta)?;
    let lemma = build_lemma(cfg, &f1, &input.flow)?;
    let delta = cfg.delta;

    let mut report = Report::new();
    lemma_rows(&mut report, &lemma);
    let states = sample_states(&input.flow, cfg.points, cfg.seed.wrapping_add(1));
    let (mut dev, mut edge, mut spread, mut anchor) = (0.0f64, 0.0f64, f64::INFINITY, 0.0f64);
    let mut out = RunOutput::default();
    for (i, x) in states.iter().enumerate() {
        let stages = lemma.evaluate(x)?;
        let c = lemma.checks(&stages);
        dev = dev.max(c.max_deviation);
        edge = edge.max(c.edge_deviation);
        spread = spread.min(c.line_spread);
        anchor = anchor.max(c.anchor_deviation);
        if i == 0 {
            for (name, g) in [
                ("f", &stages.f),
                ("g1", &stages.g1),
                ("g2", &stages.g2),
                ("g3", &stages.g3),
                ("g4", &stages.g4),
                ("g", &stages.g),
            ] {
                out.grids.push((format!("stage_{name}"), g.clone()));
            }
            let along = |g: &GridFunction| -> Vec<(f64, f64)> {
                lemma.params.line.iter().map(|&v| (v, g.interpolate(&lemma.params.line_point(v)))).collect()
            };
            let g0: Vec<(f64, f64)> = lemma
                .params
                .line
                .iter()
                .map(|&v| (v, stages.g0.evaluate(&lemma.params.line_point(v))))
                .collect();
            out.plots.push(("plot_g0_line".into(), g0));
            out.plots.push(("plot_g_line".into(), along(&stages.g)));
        }
    }
    report.info("n_states", "sample-count", states.len() as f64);
    report.below("max_deviation", "closeness", dev, 2.0 * delta);
    report.at_most("edge_deviation", "edge-agreement", edge, 0.0);
    report.above("min_line_spread", "non-constant-on-markers", spread, 1e-9);
    report.below("anchor_deviation", "anchor-closeness", anchor, delta / 2.0);

    let fuzz = shift_rigidity_fuzz(&lemma, &fuzz_config(cfg, cfg.seed.wrapping_add(2)))?;
    report.info("fuzz_trials", "shift-rigidity", fuzz.trials as f64);
    report.info("fuzz_matches", "shift-rigidity", fuzz.matches as f64);
    report.info("fuzz_min_nontrivial_mismatch", "shift-rigidity", fuzz.min_nontrivial_mismatch);
    report.at_most("fuzz_violations", "shift-rigidity", fuzz.violations as f64, 0.0);

    if !cfg.skip_negative_control {
        let geometry = lemma.geometry.clone();
        let targets = line_targets(&f1, &lemma.cover, &geometry);
        let corrupted = GenericVectorSet::uncertified(
            periodic_corruption(&lemma.uset),
            &targets,
            &geometry.line,
            lemma.params.eta,
        );
        let broken = MainLemma::with_vectors(&f1, lemma.cover.clone(), lemma.params.clone(), geometry, corrupted)?;
        let neg = shift_rigidity_fuzz(&broken, &fuzz_config(cfg, cfg.seed.wrapping_add(2)))?;
        let v = neg.violations as f64;
        report.push("negative_control_violations", "shift-rigidity-mutation", v, 1.0, v >= 1.0);
    }
    out.report = report;
    Ok(out)
}

fn default_sections(flow: &Flow) -> Vec<State> {
    match flow {
        Flow::Torus { k, .. } => vec![vec![0.25; *k], vec![0.75; *k]],
        Flow::Logistic => vec![Flow::logistic_state(0.3), Flow::logistic_state(0.7)],
    }
}

/// States `t·p` for seeded `t ∈ [-a/16, a/16]^k`.
fn near_section(flow: &Flow, p: &[f64], a: f64, n: usize, rng: &mut ChaCha8Rng) -> Vec<State> {
    let r = a / 16.0;
    (0..n)
        .map(|_| {
            let t: Vec<f64> = (0..flow.k()).map(|_| rng.gen_range(-r..=r)).collect();
            flow.act(&t, p)
        })
        .collect()
}

pub const A_SAMPLES: usize = 100;
pub const BC_SAMPLES: usize = 20;
const EQUIVARIANCE_TRIALS: usize = 20;

/// Marker perturbation `g₁` around two disjoint singleton sections with the
/// `G(A)` and `G(B, C)` checks.
pub fn run_embed_topo(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let input = InputEnsemble::new(cfg)?;
    let flow = input.flow.clone();
    let bases = cfg.sections.clone().unwrap_or_else(|| default_sections(&flow));
    if bases.len() != 2 {
        return Err(Error::Config(format!("need exactly two section bases, got {}", bases.len())));
    }
    let d_bc = check_section_separation(&flow, &bases, cfg.delta)?;
    let window = cfg.topo_window(flow.k())?;
    let m_max = cfg.m_max_for(&window);
    if !window.covers_cube(m_max as f64) {
        return Err(Error::Config(format!("window does not cover [-{m_max}, {m_max}]^k")));
    }
    let f1 = input.f1(cfg.delta)?;
    let lemma = build_lemma(cfg, &f1, &flow)?;
    let sections = bases
        .iter()
        .map(|p| Ok((local_section_at(&flow, p.clone(), cfg.a)?, 1.0)))
        .collect::<Result<Vec<_>>>()?;
    let pert = MarkerPerturbation::new(&lemma, sections)?;

    let mut report = Report::new();
    lemma_rows(&mut report, &lemma);
    report.above("section_distance", "section-separation", d_bc, cfg.delta);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(3));
    let a_states = near_section(&flow, &bases[0], cfg.a, A_SAMPLES, &mut rng);
    let b_states = near_section(&flow, &bases[0], cfg.a, BC_SAMPLES, &mut rng);
    let c_states = near_section(&flow, &bases[1], cfg.a, BC_SAMPLES, &mut rng);
    let free = sample_states(&flow, cfg.points, cfg.seed.wrapping_add(4));

    let image = |xs: &[State]| -> Result<Vec<GridFunction>> { xs.iter().map(|x| pert.g1(x, &window)).collect() };
    let a_img = image(&a_states)?;
    let b_img = image(&b_states)?;
    let c_img = image(&c_states)?;
    let free_img = image(&free)?;

    let (ga, spread) = verify_ga(&a_img);
    report.push("ga_min_spread", "non-constant-on-A", spread, 1e-9, ga);
    let (gbc, min_sep) = verify_gbc(&b_img, &c_img, m_max)?;
    report.push("gbc_min_separation", "disjoint-images-B-C", min_sep, 0.0, gbc);

    let mut dev = 0.0f64;
    let groups = [(&a_states, &a_img), (&b_states, &b_img), (&c_states, &c_img), (&free, &free_img)];
    for (xs, imgs) in groups {
        for (x, g) in xs.iter().zip(imgs) {
            let f = input.observable.on_grid(x, &window);
            dev = dev.max(g.sup_distance(&f)?);
        }
    }
    report.at_most("g1_max_deviation", "perturbation-closeness", dev, 4.0 * cfg.delta);
    let range_ok = free_img.iter().chain(&a_img).all(|g| g.min_value() >= 0.0 && g.max_value() <= 1.0);
    report.push("g1_range", "unit-range", if range_ok { 1.0 } else { 0.0 }, 1.0, range_ok);

    let mut all: Vec<State> = free.clone();
    all.extend(b_states.iter().cloned());
    all.extend(c_states.iter().cloned());
    let res = g1_equivariance(&pert, &all, &window, EQUIVARIANCE_TRIALS, cfg.seed.wrapping_add(5))?;
    report.at_most("g1_equivariance_residual", "equivariance", res, 1e-9);

    let mut out = RunOutput { report, ..Default::default() };
    out.grids.push(("g1_A0".into(), pert.g1(&bases[0], &window)?));
    out.grids.push(("g1_C0".into(), pert.g1(&bases[1], &window)?));
    let g0 = gaussian_base(&flow, input.base.bwidth(), &bases[0], &window)?;
    let cut = |g: &GridFunction| -> Vec<(f64, f64)> {
        let n = window.points_per_axis()[0];
        (0..n)
            .map(|i| {
                let mut t = vec![0.0; flow.k()];
                t[0] = window.coord(0, i);
                (t[0], g.interpolate(&t))
            })
            .collect()
    };
    out.plots.push(("plot_g0_cut".into(), cut(&g0)));
    out.plots.push(("plot_g1_cut".into(), cut(&out.grids[0].1)));
    Ok(out)
}

/// Seeded anchor data consistent with budget `tau`: values of
/// `tau · min_j (|x - c_j| + o_j)` at uniform points of `[0,1]^k`.
pub fn consistent_anchors(k: usize, n: usize, tau: f64, rng: &mut ChaCha8Rng) -> Result<AnchorSet> {
    let centres: Vec<(Vec<f64>, f64)> = (0..3)
        .map(|_| ((0..k).map(|_| rng.gen::<f64>()).collect(), rng.gen_range(0.0..0.3)))
        .collect();
    let points: Vec<Vec<f64>> = (0..n).map(|_| (0..k).map(|_| rng.gen::<f64>()).collect()).collect();
    let values = points
        .iter()
        .map(|p| {
            centres
                .iter()
                .map(|(c, o)| tau * (crate::extension::dist(p, c) + o))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    AnchorSet::new(points, values, tau)
}

/// `tau`-Lipschitz test input `min(1, tau · min_j |x - c_j|)` plus a constant.
fn lipschitz_input(k: usize, tau: f64, rng: &mut ChaCha8Rng) -> impl Fn(&[f64]) -> f64 {
    let centres: Vec<Vec<f64>> = (0..2).map(|_| (0..k).map(|_| rng.gen::<f64>()).collect()).collect();
    let lift = rng.gen_range(0.0..0.2);
    move |x: &[f64]| {
        let d = centres.iter().map(|c| crate::extension::dist(x, c)).fold(f64::INFINITY, f64::min);
        (lift + tau * d).min(1.0)
    }
}

/// McShane extension of seeded consistent anchor sets.
pub fn run_mcshane(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let k = cfg.dim;
    let grid = GridSpec::cube(k, 1.0, cfg.grid_points)?;
    let queries: Vec<Vec<f64>> = grid.iter_points().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut match_err, mut lip_excess) = (0.0f64, f64::NEG_INFINITY);
    let mut out = RunOutput::default();
    for set in 0..cfg.points {
        let n = rng.gen_range(1..=cfg.anchors.max(1));
        let anchors = consistent_anchors(k, n, cfg.tau, &mut rng)?;
        let at = mcshane_extend(&anchors, anchors.points());
        for (v, w) in at.iter().zip(anchors.values()) {
            match_err = match_err.max((v - w).abs());
        }
        let ext = GridFunction::new(grid.clone(), mcshane_extend(&anchors, &queries), cfg.tau)?;
        lip_excess = lip_excess.max(lip_const_estimate(&ext)? - cfg.tau);
        if set == 0 {
            out.grids.push(("extension_000".into(), ext));
        }
    }
    out.report.info("n_sets", "sample-count", cfg.points as f64);
    out.report.at_most("anchor_match", "interpolation", match_err, 1e-12);
    out.report.at_most("lipschitz_excess", "tau-lipschitz", lip_excess, cfg.tol);
    Ok(out)
}

/// Mollification of seeded `tau`-Lipschitz inputs on `(0,1)^k`.
pub fn run_mollify(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let k = cfg.dim;
    let grid = GridSpec::cube(k, 1.0, cfg.grid_points)?;
    let dom = DomainDescriptor::cube(k, 1.0);
    let params = MollifyParams::new(cfg.delta, cfg.epsilon, cfg.tau)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut boundary, mut dev, mut lip) = (0.0f64, 0.0f64, 0.0f64);
    let mut out = RunOutput::default();
    for i in 0..cfg.points {
        let phi = lipschitz_input(k, cfg.tau, &mut rng);
        let smooth = mollify_with(&phi, &grid, &dom, &params)?;
        for (flat, t) in grid.iter_points().enumerate() {
            let d = (smooth.values()[flat] - phi(&t)).abs();
            dev = dev.max(d);
            if grid.is_boundary(flat) {
                boundary = boundary.max(d);
            }
        }
        lip = lip.max(lip_const_estimate(&smooth)?);
        if i == 0 {
            out.grids.push(("input_000".into(), GridFunction::from_fn(grid.clone(), cfg.tau, &phi)));
            out.grids.push(("mollified_000".into(), smooth));
        }
    }
    let constant = mollify_with(|_| 0.37, &grid, &dom, &params)?;
    let const_err = constant.values().iter().map(|v| (v - 0.37).abs()).fold(0.0, f64::max);

    let r = &mut out.report;
    r.info("n_inputs", "sample-count", cfg.points as f64);
    r.at_most("boundary_change", "boundary-preserved", boundary, 0.0);
    r.below("max_deviation", "closeness", dev, cfg.delta);
    r.at_most("lipschitz", "lipschitz-budget", lip, cfg.tau + cfg.epsilon + 2.0 * grid.max_spacing());
    r.at_most("constant_error", "constants-reproduced", const_err, 1e-10);
    Ok(out)
}

/// Re-checks a saved file: a report must be all-pass; a grid function must be
/// `tau`-Lipschitz up to its grid slack `2·tau·spacing` and take values in `[0,1]`.
pub fn run_verify(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let path = cfg.input.as_ref().ok_or_else(|| Error::Config("verify needs an input file".into()))?;
    let text = fs::read_to_string(path)?;
    let first = text.lines().next().unwrap_or_default();
    let mut out = RunOutput::default();
    if first == REPORT_HEADER.join(",") {
        let saved = Report::read_csv(text.as_bytes())?;
        let failed = saved.failures().count();
        out.report.info("rows", "saved-report", saved.rows.len() as f64);
        out.report.at_most("failed_rows", "saved-report", failed as f64, 0.0);
    } else {
        let g = GridFunction::read_csv(text.as_bytes(), cfg.tau)?;
        let slack = 2.0 * cfg.tau * g.grid().max_spacing();
        out.report.at_most("lipschitz", "tau-lipschitz", lip_const_estimate(&g)?, cfg.tau + slack + cfg.tol);
        out.report.at_most("min_value", "unit-range", -g.min_value(), 0.0);
        out.report.at_most("max_value", "unit-range", g.max_value(), 1.0);
    }
    Ok(out)
}

/// Exit code of a failed run: 1 when a construction step itself failed a
/// property, 2 for configuration, input and precondition errors.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::BudgetExceeded(_)
        | Error::RetriesExhausted { .. }
        | Error::NotExtendable { .. }
        | Error::OverlappingMarkers(..) => 1,
        _ => 2,
    }
}

/// Runs `cmd`, writes outputs to `cfg.output` if set and returns the exit code
/// (0 all pass, 1 some check failed, 2 configuration error) with the output.
pub fn run_and_report(cmd: Subcommand, cfg: &ExperimentConfig) -> (i32, Result<RunOutput>) {
    match run(cmd, cfg) {
        Ok(out) => {
            if let Some(dir) = &cfg.output {
                if let Err(e) = out.write_to(dir) {
                    return (2, Err(e));
                }
            }
            (if out.report.all_pass() { 0 } else { 1 }, Ok(out))
        }
        Err(e) => (exit_code(&e), Err(e)),
    }
}

//! Perturb an equivariant ensemble on the cube `[0,a]^k` so that it becomes
//! shift-rigid along the marker line, then fuzz the rigidity property.
//!
//! Runs the circle flow by default; pass `torus2` for the two-dimensional case
//! (about a minute in release mode).

use lipflow::topo::{
    blend, choose_main_lemma_params, main_lemma_g, min_bwidth, periodic_corruption, shift_rigidity_fuzz,
    CoverData, Ensemble, FuzzConfig, GaussianBase, MainLemma, OrbitObservable,
};
use lipflow::genvec::GenericVectorSet;
use lipflow::topo::line_targets;
use lipflow::flows::Flow;

fn main() -> lipflow::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "torus1".into());
    let scale = if name == "torus1" { 2.0 } else { 8.0 };
    let flow = Flow::from_name(&name, scale)?;
    let delta = 0.4;

    let base = GaussianBase::new(&flow, min_bwidth(flow.k()))?;
    let obs = OrbitObservable::new(&flow, 0.02)?;
    let f1 = blend(&obs, &base, delta)?;
    let params = choose_main_lemma_params(1.0, flow.k(), delta, f1.tau(), 2)?;
    let cover = CoverData::diagonal(&flow, 2)?;
    let lemma = main_lemma_g(&f1, cover, params, 42, 10)?;
    println!(
        "{}: N = {}, tau' = {:.4}, tau'' = {:.4}, certificates {:?}",
        flow.name(),
        lemma.params.n,
        lemma.tau_prime,
        lemma.tau_double_prime(),
        lemma.uset.certificates
    );

    for x in [vec![0.1; flow.k()], vec![0.6; flow.k()]] {
        let c = lemma.checks(&lemma.evaluate(&x)?);
        println!(
            "  x = {x:?}: |g - f| {:.4}, edge {:e}, marker spread {:.4}, anchor deviation {:.4}",
            c.max_deviation, c.edge_deviation, c.line_spread, c.anchor_deviation
        );
    }

    let fuzz = shift_rigidity_fuzz(&lemma, &FuzzConfig::new(500, 1))?;
    println!("fuzz: {} matches, {} violations", fuzz.matches, fuzz.violations);

    let targets = line_targets(&f1, &lemma.cover, &lemma.geometry);
    let corrupted = GenericVectorSet::uncertified(
        periodic_corruption(&lemma.uset),
        &targets,
        &lemma.geometry.line,
        lemma.params.eta,
    );
    let broken =
        MainLemma::with_vectors(&f1, lemma.cover.clone(), lemma.params.clone(), lemma.geometry.clone(), corrupted)?;
    let neg = shift_rigidity_fuzz(&broken, &FuzzConfig::new(500, 1))?;
    println!("periodic vectors: {} violations", neg.violations);
    Ok(())
}

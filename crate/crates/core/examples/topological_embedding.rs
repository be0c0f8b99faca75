//! Plant the cube perturbation along orbits at two disjoint sections and check
//! that the result separates them and never becomes constant near them.

use lipflow::experiment::{run_embed_topo, ExperimentConfig};

fn main() -> lipflow::Result<()> {
    let cfg = ExperimentConfig {
        flow: "torus1".into(),
        scale: 8.0,
        sections: Some(vec![vec![0.25], vec![0.75]]),
        // The slow circle needs a finer cover to keep f within δ/8 on each set.
        cover: 4,
        points: 20,
        ..ExperimentConfig::default()
    };
    let out = run_embed_topo(&cfg)?;
    print!("{}", out.report.to_csv_string());
    println!("all checks pass: {}", out.report.all_pass());

    let close = ExperimentConfig { delta: 0.6, ..cfg };
    match run_embed_topo(&close) {
        Err(e) => println!("delta = 0.6: {e}"),
        Ok(_) => println!("delta = 0.6 accepted"),
    }
    Ok(())
}

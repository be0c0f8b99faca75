//! Draw vectors near given targets that satisfy the three rank conditions
//! used for shift rigidity, and print their certificates.

use lipflow::genvec::{rank_full_check, sample_generic_vectors, LineGeometry};
use lipflow::topo::choose_main_lemma_params;

fn main() -> lipflow::Result<()> {
    let params = choose_main_lemma_params(1.0, 2, 0.4, 0.5, 2)?;
    println!(
        "N = {}, L = {}, Q = {}, Delta = {:.5}, eta = {:.5}",
        params.n, params.l, params.q, params.step, params.eta
    );
    let geometry = LineGeometry::new(params.n, params.l, params.q)?;
    let targets = vec![vec![0.3; params.n], vec![0.7; params.n]];
    let set = sample_generic_vectors(&targets, &geometry, params.eta, 7, 10)?;
    println!("accepted after {} draw(s)", set.attempts);
    for (i, c) in set.certificates.iter().enumerate() {
        println!("  condition ({}) smallest singular value {c:.3e}", i + 2);
    }

    // Two equal vectors violate condition (2).
    let twins = vec![set.vectors[0].clone(), set.vectors[0].clone()];
    let check = rank_full_check(&twins, 1e-9);
    println!("duplicated vector: full rank = {}, certificate {:.1e}", check.full, check.certificate);

    let mut csv = Vec::new();
    set.write_certificates(&mut csv).expect("in-memory write");
    print!("{}", String::from_utf8_lossy(&csv));
    Ok(())
}

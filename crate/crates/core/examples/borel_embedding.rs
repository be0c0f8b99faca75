//! Equivariant 1-Lipschitz embedding of a flow into `Lip_1(R^k, [0,1])` from a
//! lacunary cross-section.

use lipflow::borel::{embed_point, fixed_point_check, verify_embedding};
use lipflow::flows::{logistic_interval_flow, singleton_cross_section, torus_translation_flow, Flow};
use lipflow::GridSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> lipflow::Result<()> {
    let window = GridSpec::symmetric(1, -20.0, 20.0, 161)?;
    for flow in [torus_translation_flow(1, 8.0)?, logistic_interval_flow()] {
        let base = match flow {
            Flow::Logistic => Flow::logistic_state(0.5),
            _ => vec![0.0],
        };
        let section = singleton_cross_section(&flow, base)?;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let states: Vec<_> = (0..50).map(|_| flow.sample_state(&mut rng)).collect();
        let rep = verify_embedding(&section, &states, &window, 20, 42)?;
        println!("{}:", flow.name());
        println!("  Lipschitz excess      {:e}", rep.max_lipschitz_violation);
        println!("  equivariance residual {:e}", rep.max_equivariance_residual);
        println!("  min separation        {:.6} at {:?}", rep.min_pairwise_separation, rep.closest_pair);
        let peak = embed_point(&section, &states[0], &window)?.max_value();
        println!("  sup of the first embedded point {peak:.4}");
        if !flow.fixed_points().is_empty() {
            let (max_abs, sep) = fixed_point_check(&section, &states, &window, 20)?;
            println!("  fixed points: sup |Phi| = {max_abs}, separation {sep:.6}");
        }
    }
    Ok(())
}

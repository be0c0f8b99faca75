//! Sample Lipschitz functions on grids, estimate their constants and compare
//! them in the `Lip1` metric.

use lipflow::lipfun::{clamp01, gradient_bound_check, lip1_metric, lip_const_estimate, lip_max};
use lipflow::{GridFunction, GridSpec};

fn main() -> lipflow::Result<()> {
    let grid = GridSpec::symmetric(2, -4.0, 4.0, 41)?;
    let cone = GridFunction::from_fn(grid.clone(), 0.5, |t| 0.5 * (t[0] * t[0] + t[1] * t[1]).sqrt());
    let wave = GridFunction::from_fn(grid.clone(), 0.3, |t| 0.5 + 0.3 * t[0].sin());

    println!("cone: estimate {:.6}, declared {}", lip_const_estimate(&cone)?, cone.tau());
    println!("wave: estimate {:.6}, declared {}", lip_const_estimate(&wave)?, wave.tau());
    let grad = gradient_bound_check(&wave, 0.3, 1e-9);
    println!("wave: max central gradient {:.6}", grad.max_norm);

    let top = clamp01(&lip_max(&cone, &wave)?);
    println!("max(cone, wave) clamped to [0,1]: estimate {:.6}", lip_const_estimate(&top)?);

    for m in [1, 2, 4] {
        println!("Lip1 distance cone/wave, m_max = {m}: {:.6}", lip1_metric(&cone, &wave, m)?);
    }

    let mut csv = Vec::new();
    wave.write_csv(&mut csv)?;
    let back = GridFunction::read_csv(csv.as_slice(), 0.3)?;
    println!("CSV round trip sup error: {:e}", back.sup_distance(&wave)?);
    Ok(())
}

//! Extend scattered anchor values to a `τ`-Lipschitz function on a grid.

use lipflow::lipfun::lip_const_estimate;
use lipflow::{mcshane_extend, AnchorSet, GridFunction, GridSpec};

fn main() -> lipflow::Result<()> {
    let points = vec![vec![0.1, 0.2], vec![0.8, 0.3], vec![0.5, 0.9], vec![0.4, 0.5]];
    let values = vec![0.0, 0.4, 0.2, 0.3];
    let needed = AnchorSet::pairwise_constant(&points, &values);
    println!("anchor data needs tau >= {needed:.6}");

    let anchors = AnchorSet::new(points.clone(), values.clone(), 0.8)?;
    let grid = GridSpec::cube(2, 1.0, 33)?;
    let queries: Vec<Vec<f64>> = grid.iter_points().collect();
    let ext = GridFunction::new(grid, mcshane_extend(&anchors, &queries), anchors.tau())?;
    println!("extension on 33x33: estimate {:.6} (tau {})", lip_const_estimate(&ext)?, ext.tau());
    for (p, v) in points.iter().zip(&values) {
        println!("  at {p:?}: {:.3} (anchor {v})", anchors.evaluate(p));
    }

    match AnchorSet::new(points, values, 0.1) {
        Err(e) => println!("tau = 0.1 rejected: {e}"),
        Ok(_) => println!("tau = 0.1 unexpectedly accepted"),
    }
    Ok(())
}

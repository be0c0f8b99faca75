//! Smooth a Lipschitz kink inside `(0,1)^2` while keeping boundary values and a
//! removed marker point fixed.

use lipflow::lipfun::lip_const_estimate;
use lipflow::mollify::{mollify_fn, DomainDescriptor, MollifyParams};
use lipflow::{GridFunction, GridSpec};

fn main() -> lipflow::Result<()> {
    let grid = GridSpec::cube(2, 1.0, 41)?;
    let phi = GridFunction::from_fn(grid.clone(), 0.9, |t| 0.9 * (t[0] - 0.5).abs() + 0.05);
    let marker = vec![0.5, 0.25];
    let dom = DomainDescriptor::cube(2, 1.0).with_point(marker.clone());
    let params = MollifyParams::new(0.05, 0.05, 0.9)?;
    let smooth = mollify_fn(&phi, &dom, &params)?;

    let boundary = (0..grid.len())
        .filter(|&i| grid.is_boundary(i))
        .map(|i| (smooth.values()[i] - phi.values()[i]).abs())
        .fold(0.0, f64::max);
    let at_marker = grid.locate(&marker).map(|i| smooth.values()[i] - phi.values()[i]);
    println!("sup |Phi - phi|      {:.6}", smooth.sup_distance(&phi)?);
    println!("boundary change      {boundary:e}");
    println!("change at the marker {at_marker:?}");
    println!("Lipschitz estimate   {:.6} (budget {} + slack {:.4})", lip_const_estimate(&smooth)?, smooth.tau(), smooth.slack());
    Ok(())
}

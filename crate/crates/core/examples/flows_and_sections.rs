//! Torus and logistic flows: group action, orbital distance, lacunary
//! cross-sections and marker sets.

use lipflow::flows::{local_section_at, marker_set, singleton_cross_section, torus_translation_flow, Flow};

fn main() -> lipflow::Result<()> {
    let torus = torus_translation_flow(2, 8.0)?;
    let x = vec![0.1, 0.9];
    let y = torus.act(&[4.0, -2.0], &x);
    println!("torus2: (4,-2)·{x:?} = {y:?}, rho = {:.6}", torus.rho(&x, &y));

    let section = singleton_cross_section(&torus, vec![0.0, 0.0])?;
    println!("singleton section: alpha {:?}, lacunarity {}", section.alpha, section.lacunarity);
    match torus_translation_flow(2, 2.0).and_then(|f| singleton_cross_section(&f, vec![0.0, 0.0])) {
        Err(e) => println!("scale 2: {e}"),
        Ok(_) => println!("scale 2 accepted"),
    }

    let local = local_section_at(&torus, vec![0.25, 0.25], 1.0)?;
    let markers = marker_set(&torus, &local, &x, &[(-10.0, 10.0), (-10.0, 10.0)]);
    println!("markers of {x:?} in [-10,10]^2: {}", markers.len());
    for s in markers.iter().take(4) {
        println!("  {s:?}");
    }

    let logistic = Flow::from_name("logistic", 1.0)?;
    let p = Flow::logistic_state(0.3);
    for t in [-2.0, 0.0, 2.0] {
        println!("logistic: x(t·0.3) at t = {t}: {:.6}", Flow::logistic_x(&logistic.act(&[t], &p)));
    }
    println!("fixed points: {:?}", logistic.fixed_points());
    Ok(())
}

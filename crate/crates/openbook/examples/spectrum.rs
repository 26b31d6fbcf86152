//! Spectral bottoms: Kirchhoff-type gluing puts the constants in the kernel,
//! so the smallest eigenvalue vanishes on compact structures, and the second
//! interval eigenvalue converges to pi^2 under refinement.

use openbook::presets;
use openbook::{build_book_system, build_graph_system, spectral_bottom};
use openbook::topology::{Edge, Extent, GraphSpec};

fn main() -> openbook::Result<()> {
    let torus = build_book_system(&presets::torus_book(1.0, 1.0), 0.05)?;
    let pairs = spectral_bottom(&torus.ops, 3)?;
    println!("torus book      lambda_1 = {:+.3e}   lambda_2 = {:.6}", pairs[0].0, pairs[1].0);

    let triangle = build_graph_system(&presets::triangle_graph(1.0), 0.01)?;
    let pairs = spectral_bottom(&triangle.ops, 2)?;
    println!("triangle graph  lambda_1 = {:+.3e}   lambda_2 = {:.6}", pairs[0].0, pairs[1].0);

    let interval = GraphSpec {
        vertices: vec!["a".into(), "b".into()],
        edges: vec![Edge {
            id: "e".into(),
            from: "a".into(),
            to: "b".into(),
            length: Extent::Finite(1.0),
        }],
    };
    println!("unit interval   lambda_2 vs pi^2 = {:.6}", std::f64::consts::PI.powi(2));
    for h in [0.02, 0.01, 0.005] {
        let sys = build_graph_system(&interval, h)?;
        let pairs = spectral_bottom(&sys.ops, 2)?;
        println!("  h = {h:<6}  lambda_2 = {:.8}", pairs[1].0);
    }
    Ok(())
}

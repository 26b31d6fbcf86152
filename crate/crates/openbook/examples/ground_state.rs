//! Ground state on a truncated line: the computed level approaches the
//! closed-form soliton value 4/3 (omega = 1, p = 3), and the converged state
//! satisfies the Nehari identity level = action.

use openbook::presets;
use openbook::topology::truncate_graph;
use openbook::{build_graph_system, GroundStateProblem, Params, SolveOptions, Start};

fn main() -> openbook::Result<()> {
    let (line, _) = truncate_graph(&presets::line_graph(), 40.0)?;
    println!("exact line-soliton level: 4/3 = {:.10}", 4.0 / 3.0);
    for h in [0.04, 0.02, 0.01] {
        let sys = build_graph_system(&line, h)?;
        let problem = GroundStateProblem::new(&sys.ops, Params::new(1.0, 3.0))?;
        let center = sys.mesh.vertex_dof["c"];
        let start = Start::bump("bump(c)", &sys.mesh.distances(&[center]), 1.0);
        let (u, report) = problem.solve(&start, SolveOptions::default())?;
        let peak = u.iter().cloned().fold(0.0f64, f64::max);
        println!(
            "h = {h:<5} level = {:.10}  action - level = {:+.2e}  peak = {:.6} (sqrt(2) = {:.6})  iters = {}",
            report.level,
            report.action - report.level,
            peak,
            2.0f64.sqrt(),
            report.iterations,
        );
    }
    Ok(())
}

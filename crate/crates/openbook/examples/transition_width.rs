//! Locates the critical transverse width by bisection on the dimensionality
//! of the best branch, and compares it against the linearized prediction
//! pi / sqrt(-lambda_1) from the 1-d ground state.

use openbook::experiments::detect_lmin;
use openbook::presets;
use openbook::Params;

fn main() -> openbook::Result<()> {
    let report = detect_lmin(
        &presets::line_graph(),
        Params::new(1.0, 3.0),
        [1.5, 2.2],
        0.1,
        1e-8,
        1e-6,
        Some(20.0),
    )?;
    println!("detected L_min      = {:.4}  (bracket [{:.4}, {:.4}])",
        report.lmin, report.bracket[0], report.bracket[1]);
    if let Some(pred) = report.linearized_prediction {
        println!("linearized estimate = {pred:.4}");
    }
    println!("exact for the line  = {:.4}", std::f64::consts::PI / 3.0f64.sqrt());
    println!("plateau level {:.6} -> level at bracket top {:.6} (undercuts: {})",
        report.plateau_level, report.upper_level, report.undercuts_plateau);
    Ok(())
}

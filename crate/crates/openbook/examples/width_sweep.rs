//! Rescaled level curve L -> s_{omega,L} on the line: constant on a plateau
//! up to the critical width, then strictly decreasing with genuinely
//! two-dimensional minimizers (positive transverse fraction).

use openbook::experiments::sweep_widths;
use openbook::io::sweep_csv;
use openbook::presets;
use openbook::Params;

fn main() -> openbook::Result<()> {
    let widths: Vec<f64> = (1..=12).map(|i| 0.25 * i as f64).collect();
    let records = sweep_widths(
        &presets::line_graph(),
        Params::new(1.0, 3.0),
        &widths,
        0.1,
        1e-8,
        Some(20.0),
        &[],
    )?;
    print!("{}", sweep_csv(&records));
    eprintln!("# plateau level {:.8}, transition predicted near pi/sqrt(3) = {:.4}",
        records[0].level,
        std::f64::consts::PI / 3.0f64.sqrt());
    Ok(())
}

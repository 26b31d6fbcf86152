//! Exponential decay on semi-infinite pages: the fitted tail rate of a star
//! book ground state clears the guaranteed bound sqrt(omega)/2 on each page
//! (empirically it sits near sqrt(omega), the slowest transverse mode).

use openbook::experiments::{book_starts, decay_fit};
use openbook::presets;
use openbook::topology::truncate_book;
use openbook::{build_book_system, GroundStateProblem, Params, SolveOptions};

fn main() -> openbook::Result<()> {
    let omega = 1.0;
    let star = presets::star_book(3, 1.0);
    let cut = truncate_book(&star, 25.0)?;
    let system = build_book_system(&cut.book, 0.1)?;
    let problem = GroundStateProblem::new(&system.ops, Params::new(omega, 3.0))?;
    let starts: Vec<_> = book_starts(&system, &cut.artificial_bindings, omega)
        .into_iter()
        .filter(|s| s.label == "bump(c)")
        .collect();
    let (field, report, _) = problem.multi_start(&starts, SolveOptions::default())?;
    println!("star book (3 pages), level = {:.6}, iterations = {}", report.level, report.iterations);
    for fit in decay_fit(&system, &cut.truncated_axes, &field, omega)? {
        println!(
            "page {:<5} fitted rate {:.5} over [{:.1}, {:.1}]  bound {:.2}  margin {:+.4}",
            fit.page, fit.rate, fit.window[0], fit.window[1], fit.bound, fit.margin
        );
    }
    Ok(())
}

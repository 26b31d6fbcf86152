//! Existence condition on finite non-compact books: the level must undercut
//! the widest incident strip's level. A tadpole traps the state on its
//! compact head and satisfies the condition; a straight strip is
//! translation-invariant, so the comparison is inconclusive by design.

use openbook::experiments::existence_report;
use openbook::topology::{graph_based_book, Attachment, Binding, Book, Extent, Orientation, Page, Side};
use openbook::{presets, Params};

fn straight_strip_book(width: f64) -> Book {
    // Two half-infinite strips glued along one transverse seam.
    let mut book = Book::default();
    for id in ["left", "right"] {
        book.pages.push(Page { id: id.into(), lx: Extent::Infinite, ly: Extent::Finite(width) });
        book.attachments.push(Attachment {
            page: id.into(),
            side: Side::West,
            binding: "seam".into(),
            orientation: Orientation::Forward,
        });
    }
    book.bindings.push(Binding { id: "seam".into(), length: Extent::Finite(width) });
    book
}

fn main() -> openbook::Result<()> {
    let params = Params::new(1.0, 3.0);

    let tadpole = graph_based_book(&presets::tadpole_graph(std::f64::consts::TAU), 1.0)?;
    let report = existence_report(&tadpole, params, 0.1, 1e-8, Some(25.0))?;
    println!(
        "tadpole book: level {:.6} vs strip {:.6} (width {}) -> {}",
        report.level, report.strip_level, report.widest_width, report.condition
    );

    let strip = straight_strip_book(1.0);
    let report = existence_report(&strip, params, 0.1, 1e-8, Some(25.0))?;
    println!(
        "straight strip: level {:.6} vs strip {:.6} (width {}) -> {}",
        report.level, report.strip_level, report.widest_width, report.condition
    );
    Ok(())
}

//! Ready-made books and graphs: the classical structures (line, star,
//! tadpole, dumbbell, grid, torus) used across the examples and tests.

use crate::topology::{
    graph_based_book, Attachment, Binding, Book, Edge, Extent, GraphSpec, Orientation, Page, Side,
};

/// The real line as a graph: a center vertex with two infinite rays.
/// Truncating at radius `t` gives an interval of length `2t` centered at `c`.
pub fn line_graph() -> GraphSpec {
    GraphSpec {
        vertices: vec!["c".into(), "end-".into(), "end+".into()],
        edges: vec![
            Edge { id: "ray-".into(), from: "c".into(), to: "end-".into(), length: Extent::Infinite },
            Edge { id: "ray+".into(), from: "c".into(), to: "end+".into(), length: Extent::Infinite },
        ],
    }
}

/// Star graph: `arms` infinite rays joined at one vertex.
pub fn star_graph(arms: usize) -> GraphSpec {
    let mut vertices = vec!["c".into()];
    let mut edges = Vec::new();
    for k in 0..arms {
        vertices.push(format!("end{k}"));
        edges.push(Edge {
            id: format!("arm{k}"),
            from: "c".into(),
            to: format!("end{k}"),
            length: Extent::Infinite,
        });
    }
    GraphSpec { vertices, edges }
}

/// Open-book star: `arms` half-infinite pages of width `width` sharing one
/// transverse binding.
pub fn star_book(arms: usize, width: f64) -> Book {
    graph_based_book(&star_graph(arms), width).expect("star graph is connected")
}

/// Tadpole: a loop of length `loop_len` with one infinite tail.
pub fn tadpole_graph(loop_len: f64) -> GraphSpec {
    GraphSpec {
        vertices: vec!["v".into(), "end".into()],
        edges: vec![
            Edge { id: "loop".into(), from: "v".into(), to: "v".into(), length: Extent::Finite(loop_len) },
            Edge { id: "tail".into(), from: "v".into(), to: "end".into(), length: Extent::Infinite },
        ],
    }
}

/// Single loop edge at one vertex; its book is a cylinder.
pub fn loop_graph(len: f64) -> GraphSpec {
    GraphSpec {
        vertices: vec!["v".into()],
        edges: vec![Edge { id: "loop".into(), from: "v".into(), to: "v".into(), length: Extent::Finite(len) }],
    }
}

/// Triangle with three equal edges.
pub fn triangle_graph(edge_len: f64) -> GraphSpec {
    GraphSpec {
        vertices: vec!["a".into(), "b".into(), "c".into()],
        edges: vec![
            Edge { id: "ab".into(), from: "a".into(), to: "b".into(), length: Extent::Finite(edge_len) },
            Edge { id: "bc".into(), from: "b".into(), to: "c".into(), length: Extent::Finite(edge_len) },
            Edge { id: "ca".into(), from: "c".into(), to: "a".into(), length: Extent::Finite(edge_len) },
        ],
    }
}

/// Dumbbell: two loops of length `loop_len` joined by a bar of length `bar_len`.
pub fn dumbbell_graph(loop_len: f64, bar_len: f64) -> GraphSpec {
    GraphSpec {
        vertices: vec!["l".into(), "r".into()],
        edges: vec![
            Edge { id: "loopL".into(), from: "l".into(), to: "l".into(), length: Extent::Finite(loop_len) },
            Edge { id: "bar".into(), from: "l".into(), to: "r".into(), length: Extent::Finite(bar_len) },
            Edge { id: "loopR".into(), from: "r".into(), to: "r".into(), length: Extent::Finite(loop_len) },
        ],
    }
}

/// Rectangular grid graph with `nx` x `ny` vertices and unit-multiple spacing.
pub fn grid_graph(nx: usize, ny: usize, spacing: f64) -> GraphSpec {
    assert!(nx >= 1 && ny >= 1);
    let name = |i: usize, j: usize| format!("v{i}_{j}");
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            vertices.push(name(i, j));
        }
    }
    for i in 0..nx {
        for j in 0..ny {
            if i + 1 < nx {
                edges.push(Edge {
                    id: format!("h{i}_{j}"),
                    from: name(i, j),
                    to: name(i + 1, j),
                    length: Extent::Finite(spacing),
                });
            }
            if j + 1 < ny {
                edges.push(Edge {
                    id: format!("u{i}_{j}"),
                    from: name(i, j),
                    to: name(i, j + 1),
                    length: Extent::Finite(spacing),
                });
            }
        }
    }
    GraphSpec { vertices, edges }
}

/// Torus book: one page with opposite sides identified pairwise.
pub fn torus_book(lx: f64, ly: f64) -> Book {
    Book {
        pages: vec![Page { id: "P".into(), lx: Extent::Finite(lx), ly: Extent::Finite(ly) }],
        bindings: vec![
            Binding { id: "B0".into(), length: Extent::Finite(lx) },
            Binding { id: "B1".into(), length: Extent::Finite(ly) },
        ],
        attachments: vec![
            Attachment { page: "P".into(), side: Side::South, binding: "B0".into(), orientation: Orientation::Forward },
            Attachment { page: "P".into(), side: Side::North, binding: "B0".into(), orientation: Orientation::Forward },
            Attachment { page: "P".into(), side: Side::West, binding: "B1".into(), orientation: Orientation::Forward },
            Attachment { page: "P".into(), side: Side::East, binding: "B1".into(), orientation: Orientation::Forward },
        ],
    }
}

/// Single free rectangular page with four private bindings.
pub fn square_book(lx: f64, ly: f64) -> Book {
    let mut book = Book {
        pages: vec![Page { id: "P".into(), lx: Extent::Finite(lx), ly: Extent::Finite(ly) }],
        bindings: vec![],
        attachments: vec![],
    };
    for side in Side::ALL {
        let len = if side.is_horizontal() { lx } else { ly };
        let id = format!("P.{side}").to_lowercase();
        book.bindings.push(Binding { id: id.clone(), length: Extent::Finite(len) });
        book.attachments.push(Attachment {
            page: "P".into(),
            side,
            binding: id,
            orientation: Orientation::Forward,
        });
    }
    book
}

/// Half-plane as two quarter-plane pages joined along an infinite seam.
pub fn half_plane_book() -> Book {
    Book {
        pages: vec![
            Page { id: "Q-".into(), lx: Extent::Infinite, ly: Extent::Infinite },
            Page { id: "Q+".into(), lx: Extent::Infinite, ly: Extent::Infinite },
        ],
        bindings: vec![Binding { id: "seam".into(), length: Extent::Infinite }],
        attachments: vec![
            Attachment { page: "Q-".into(), side: Side::West, binding: "seam".into(), orientation: Orientation::Forward },
            Attachment { page: "Q+".into(), side: Side::West, binding: "seam".into(), orientation: Orientation::Forward },
        ],
    }
}

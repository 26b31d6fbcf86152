//! Conforming tensor-product meshes on compact books and metric graphs.
//!
//! Node counts are derived per length class, so all sides glued to one
//! binding automatically carry matching grids; degrees of freedom on a shared
//! binding are identified across pages (discrete trace equality).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::topology::{Book, Extent, GraphSpec, Orientation, Side};

/// Grid dimensions and spacings of one page.
#[derive(Debug, Clone, PartialEq)]
pub struct PageGrid {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
}

/// Mesh plan for a compact book: one grid per page plus per-binding node
/// counts, all conforming by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshPlan {
    pub target_h: f64,
    pub pages: Vec<PageGrid>,
    pub binding_nodes: Vec<usize>,
}

/// Nodes for an interval of length `len` at target spacing `h`.
pub fn node_count(len: f64, h: f64) -> usize {
    ((len / h) - 1e-9).ceil().max(1.0) as usize + 1
}

/// Plans a conforming grid with spacing at most `h` in both directions.
pub fn plan_mesh(book: &Book, h: f64) -> Result<MeshPlan> {
    plan_mesh_anisotropic(book, h, h)
}

/// Variant with separate horizontal/vertical target spacings. Only valid
/// when no binding glues a horizontal side to a vertical one (the product
/// meshes used for rescaled problems satisfy this).
pub fn plan_mesh_anisotropic(book: &Book, hx: f64, hy: f64) -> Result<MeshPlan> {
    if !(hx > 0.0) || !(hy > 0.0) {
        return Err(Error::Mesh(format!("spacing must be positive, got {hx}, {hy}")));
    }
    book.validate().into_result()?;
    if !book.is_compact() {
        return Err(Error::Mesh("book is not compact; truncate it first".into()));
    }
    // Node count per (length, axis) class. A binding inherits the counts of
    // the sides it is attached to; mixing axes at different spacings is
    // rejected to preserve conformity.
    let count_for = |len: f64, horizontal: bool| -> usize {
        node_count(len, if horizontal { hx } else { hy })
    };
    let mut binding_nodes = vec![0usize; book.bindings.len()];
    let binding_index: BTreeMap<&str, usize> = book
        .bindings
        .iter()
        .enumerate()
        .map(|(i, b)| (b.id.as_str(), i))
        .collect();
    for (i, binding) in book.bindings.iter().enumerate() {
        let len = binding.length.finite().expect("compact book");
        let mut counts: Vec<usize> = book
            .attachments
            .iter()
            .filter(|a| a.binding == binding.id)
            .map(|a| count_for(len, a.side.is_horizontal()))
            .collect();
        counts.dedup();
        if counts.len() > 1 {
            return Err(Error::Mesh(format!(
                "binding {} glues sides of different axes at different spacings",
                binding.id
            )));
        }
        binding_nodes[i] = counts.first().copied().unwrap_or_else(|| count_for(len, true));
    }
    let mut pages = Vec::with_capacity(book.pages.len());
    for page in &book.pages {
        let lx = page.lx.finite().expect("compact book");
        let ly = page.ly.finite().expect("compact book");
        // A page inherits counts from its attached bindings where present.
        let mut nx = count_for(lx, true);
        let mut ny = count_for(ly, false);
        for att in book.attachments.iter().filter(|a| a.page == page.id) {
            let nb = binding_nodes[binding_index[att.binding.as_str()]];
            if att.side.is_horizontal() {
                nx = nb;
            } else {
                ny = nb;
            }
        }
        pages.push(PageGrid {
            nx,
            ny,
            hx: lx / (nx - 1) as f64,
            hy: ly / (ny - 1) as f64,
        });
    }
    Ok(MeshPlan {
        target_h: hx.max(hy),
        pages,
        binding_nodes,
    })
}

/// Global degree-of-freedom map: grid nodes per page with trace-identified
/// ids across bindings, plus the per-binding node ids.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    pub ndof: usize,
    /// Per page, `nx * ny` ids in row-major order (`ix * ny + iy`).
    pub page_dofs: Vec<Vec<usize>>,
    /// Per binding, the ids of its nodes in binding parametrization order.
    pub binding_dofs: Vec<Vec<usize>>,
}

impl DofMap {
    pub fn page_dof(&self, page: usize, grid: &PageGrid, ix: usize, iy: usize) -> usize {
        self.page_dofs[page][ix * grid.ny + iy]
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller root wins, keeping global ids in first-appearance order.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Assigns global ids deterministically (page order, then row-major) and
/// unifies them across attachments respecting orientation.
pub fn build_dofs(book: &Book, plan: &MeshPlan) -> Result<DofMap> {
    let npages = book.pages.len();
    if plan.pages.len() != npages || plan.binding_nodes.len() != book.bindings.len() {
        return Err(Error::Mesh("mesh plan does not match the book".into()));
    }
    let mut page_offset = vec![0usize; npages + 1];
    for (p, grid) in plan.pages.iter().enumerate() {
        page_offset[p + 1] = page_offset[p] + grid.nx * grid.ny;
    }
    let mut binding_offset = vec![page_offset[npages]; book.bindings.len() + 1];
    for (b, &nb) in plan.binding_nodes.iter().enumerate() {
        binding_offset[b + 1] = binding_offset[b] + nb;
    }
    let total = binding_offset[book.bindings.len()];
    let mut uf = UnionFind::new(total);

    let page_index: BTreeMap<&str, usize> = book
        .pages
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id.as_str(), i))
        .collect();
    let binding_index: BTreeMap<&str, usize> = book
        .bindings
        .iter()
        .enumerate()
        .map(|(i, b)| (b.id.as_str(), i))
        .collect();

    for att in &book.attachments {
        let p = page_index[att.page.as_str()];
        let b = binding_index[att.binding.as_str()];
        let grid = &plan.pages[p];
        let nb = plan.binding_nodes[b];
        let side_nodes: Vec<usize> = side_node_indices(grid, att.side)
            .map(|(ix, iy)| page_offset[p] + ix * grid.ny + iy)
            .collect();
        if side_nodes.len() != nb {
            return Err(Error::Mesh(format!(
                "side {} of page {} has {} nodes but binding {} has {}",
                att.side,
                att.page,
                side_nodes.len(),
                att.binding,
                nb
            )));
        }
        for (k, &node) in side_nodes.iter().enumerate() {
            let bk = match att.orientation {
                Orientation::Forward => k,
                Orientation::Reversed => nb - 1 - k,
            };
            uf.union(node, binding_offset[b] + bk);
        }
    }

    // Number the identification classes in first-appearance order.
    let mut global = vec![usize::MAX; total];
    let mut ndof = 0usize;
    for i in 0..total {
        let root = uf.find(i);
        if global[root] == usize::MAX {
            global[root] = ndof;
            ndof += 1;
        }
        global[i] = global[root];
    }

    let page_dofs: Vec<Vec<usize>> = (0..npages)
        .map(|p| {
            let grid = &plan.pages[p];
            (0..grid.nx * grid.ny)
                .map(|local| global[page_offset[p] + local])
                .collect()
        })
        .collect();
    let binding_dofs: Vec<Vec<usize>> = (0..book.bindings.len())
        .map(|b| {
            (0..plan.binding_nodes[b])
                .map(|k| global[binding_offset[b] + k])
                .collect()
        })
        .collect();

    // Identification must not collapse any cell.
    for (p, grid) in plan.pages.iter().enumerate() {
        for ix in 0..grid.nx - 1 {
            for iy in 0..grid.ny - 1 {
                let ids = [
                    page_dofs[p][ix * grid.ny + iy],
                    page_dofs[p][(ix + 1) * grid.ny + iy],
                    page_dofs[p][ix * grid.ny + iy + 1],
                    page_dofs[p][(ix + 1) * grid.ny + iy + 1],
                ];
                for a in 0..4 {
                    for b in (a + 1)..4 {
                        if ids[a] == ids[b] {
                            let bindings: Vec<&str> = book
                                .attachments
                                .iter()
                                .filter(|a| a.page == book.pages[p].id)
                                .map(|a| a.binding.as_str())
                                .collect();
                            return Err(Error::Mesh(format!(
                                "identification through bindings [{}] collapses a cell of page {}; refine the mesh",
                                bindings.join(", "),
                                book.pages[p].id
                            )));
                        }
                    }
                }
            }
        }
    }

    Ok(DofMap { ndof, page_dofs, binding_dofs })
}

/// Grid indices of a side in its parametrization order (South/North along x,
/// West/East along y).
pub fn side_node_indices(grid: &PageGrid, side: Side) -> Box<dyn Iterator<Item = (usize, usize)> + '_> {
    let (nx, ny) = (grid.nx, grid.ny);
    match side {
        Side::South => Box::new((0..nx).map(move |ix| (ix, 0))),
        Side::North => Box::new((0..nx).map(move |ix| (ix, ny - 1))),
        Side::West => Box::new((0..ny).map(move |iy| (0, iy))),
        Side::East => Box::new((0..ny).map(move |iy| (nx - 1, iy))),
    }
}

/// Shortest mesh distances from a set of source dofs (Dijkstra over grid
/// edges). Used to seed localized initial guesses.
pub fn dof_distances(plan: &MeshPlan, dofs: &DofMap, sources: &[usize]) -> Vec<f64> {
    let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dofs.ndof];
    for (p, grid) in plan.pages.iter().enumerate() {
        for ix in 0..grid.nx {
            for iy in 0..grid.ny {
                let a = dofs.page_dof(p, grid, ix, iy);
                if ix + 1 < grid.nx {
                    let b = dofs.page_dof(p, grid, ix + 1, iy);
                    adjacency[a].push((b, grid.hx));
                    adjacency[b].push((a, grid.hx));
                }
                if iy + 1 < grid.ny {
                    let b = dofs.page_dof(p, grid, ix, iy + 1);
                    adjacency[a].push((b, grid.hy));
                    adjacency[b].push((a, grid.hy));
                }
            }
        }
    }
    dijkstra(&adjacency, sources)
}

pub(crate) fn dijkstra(adjacency: &[Vec<(usize, f64)>], sources: &[usize]) -> Vec<f64> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let mut dist = vec![f64::INFINITY; adjacency.len()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(Reverse((ordered(0.0), s)));
    }
    while let Some(Reverse((d, u))) = heap.pop() {
        let d = f64::from_bits(d);
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adjacency[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((ordered(nd), v)));
            }
        }
    }
    dist
}

// Nonnegative floats order correctly through their bit patterns.
fn ordered(x: f64) -> u64 {
    x.to_bits()
}

/// One-dimensional mesh over a metric graph: shared vertex dofs plus edge
/// interiors, in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphMesh {
    pub ndof: usize,
    /// Per edge: global dof of each node, endpoint to endpoint.
    pub edge_nodes: Vec<Vec<usize>>,
    /// Per edge: actual spacing.
    pub edge_h: Vec<f64>,
    pub vertex_dof: BTreeMap<String, usize>,
}

pub fn build_graph_mesh(graph: &GraphSpec, h: f64) -> Result<GraphMesh> {
    if !(h > 0.0) {
        return Err(Error::Mesh(format!("spacing must be positive, got {h}")));
    }
    graph.validate().map_err(|e| match e {
        Error::Topology(msg) => Error::Mesh(msg),
        other => other,
    })?;
    for e in &graph.edges {
        if !e.length.is_finite() {
            return Err(Error::Mesh(format!(
                "edge {} has infinite length; truncate the graph first",
                e.id
            )));
        }
    }
    let mut vertex_dof = BTreeMap::new();
    let mut next = 0usize;
    for v in &graph.vertices {
        vertex_dof.insert(v.clone(), next);
        next += 1;
    }
    let mut edge_nodes = Vec::with_capacity(graph.edges.len());
    let mut edge_h = Vec::with_capacity(graph.edges.len());
    for e in &graph.edges {
        let len = match e.length {
            Extent::Finite(l) => l,
            Extent::Infinite => unreachable!(),
        };
        let n = node_count(len, h);
        if e.from == e.to && n < 3 {
            return Err(Error::Mesh(format!(
                "loop edge {} needs at least three nodes; refine the mesh",
                e.id
            )));
        }
        let mut nodes = Vec::with_capacity(n);
        nodes.push(vertex_dof[&e.from]);
        for _ in 1..(n - 1) {
            nodes.push(next);
            next += 1;
        }
        nodes.push(vertex_dof[&e.to]);
        edge_nodes.push(nodes);
        edge_h.push(len / (n - 1) as f64);
    }
    Ok(GraphMesh {
        ndof: next,
        edge_nodes,
        edge_h,
        vertex_dof,
    })
}

impl GraphMesh {
    /// Dof closest to the midpoint of an edge.
    pub fn edge_midpoint_dof(&self, edge: usize) -> usize {
        let nodes = &self.edge_nodes[edge];
        nodes[nodes.len() / 2]
    }

    pub fn distances(&self, sources: &[usize]) -> Vec<f64> {
        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.ndof];
        for (e, nodes) in self.edge_nodes.iter().enumerate() {
            for w in nodes.windows(2) {
                adjacency[w[0]].push((w[1], self.edge_h[e]));
                adjacency[w[1]].push((w[0], self.edge_h[e]));
            }
        }
        dijkstra(&adjacency, sources)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::topology::{truncate_book, Attachment, Binding, Book, Orientation, Page};

    #[test]
    fn plan_counts_match_hand_arithmetic() {
        let square = presets::square_book(1.0, 1.0);
        let plan = plan_mesh(&square, 0.5).unwrap();
        assert_eq!((plan.pages[0].nx, plan.pages[0].ny), (3, 3));

        let wide = presets::square_book(2.0, 1.0);
        let plan = plan_mesh(&wide, 0.5).unwrap();
        assert_eq!((plan.pages[0].nx, plan.pages[0].ny), (5, 3));
    }

    #[test]
    fn star_pages_share_binding_nodes() {
        let star = presets::star_book(3, 1.0);
        let cut = truncate_book(&star, 1.0).unwrap();
        let plan = plan_mesh(&cut.book, 0.5).unwrap();
        for grid in &plan.pages {
            assert_eq!((grid.nx, grid.ny), (3, 3));
        }
        let dofs = build_dofs(&cut.book, &plan).unwrap();
        // 3 pages x 9 nodes - 2 x 3 shared on the common binding.
        assert_eq!(dofs.ndof, 27 - 6);
    }

    #[test]
    fn two_glued_squares_have_fifteen_dofs() {
        let book = Book {
            pages: vec![
                Page { id: "A".into(), lx: Extent::Finite(1.0), ly: Extent::Finite(1.0) },
                Page { id: "B".into(), lx: Extent::Finite(1.0), ly: Extent::Finite(1.0) },
            ],
            bindings: vec![
                Binding { id: "shared".into(), length: Extent::Finite(1.0) },
                Binding { id: "a.s".into(), length: Extent::Finite(1.0) },
                Binding { id: "a.n".into(), length: Extent::Finite(1.0) },
                Binding { id: "a.w".into(), length: Extent::Finite(1.0) },
                Binding { id: "b.s".into(), length: Extent::Finite(1.0) },
                Binding { id: "b.n".into(), length: Extent::Finite(1.0) },
                Binding { id: "b.e".into(), length: Extent::Finite(1.0) },
            ],
            attachments: vec![
                Attachment { page: "A".into(), side: Side::East, binding: "shared".into(), orientation: Orientation::Forward },
                Attachment { page: "B".into(), side: Side::West, binding: "shared".into(), orientation: Orientation::Forward },
                Attachment { page: "A".into(), side: Side::South, binding: "a.s".into(), orientation: Orientation::Forward },
                Attachment { page: "A".into(), side: Side::North, binding: "a.n".into(), orientation: Orientation::Forward },
                Attachment { page: "A".into(), side: Side::West, binding: "a.w".into(), orientation: Orientation::Forward },
                Attachment { page: "B".into(), side: Side::South, binding: "b.s".into(), orientation: Orientation::Forward },
                Attachment { page: "B".into(), side: Side::North, binding: "b.n".into(), orientation: Orientation::Forward },
                Attachment { page: "B".into(), side: Side::East, binding: "b.e".into(), orientation: Orientation::Forward },
            ],
        };
        let plan = plan_mesh(&book, 0.5).unwrap();
        let dofs = build_dofs(&book, &plan).unwrap();
        assert_eq!(dofs.ndof, 15);
    }

    #[test]
    fn torus_identifies_opposite_sides() {
        let torus = presets::torus_book(1.0, 1.0);
        let plan = plan_mesh(&torus, 0.5).unwrap();
        let dofs = build_dofs(&torus, &plan).unwrap();
        assert_eq!(dofs.ndof, 4); // (3-1)^2
    }

    #[test]
    fn reversed_orientation_flips_the_identification() {
        // Cylinder with a flip: South forward, North reversed onto one binding.
        let mut book = presets::square_book(1.0, 1.0);
        book.bindings.retain(|b| b.id == "p.west" || b.id == "p.east");
        book.bindings.push(Binding { id: "glue".into(), length: Extent::Finite(1.0) });
        book.attachments = vec![
            Attachment { page: "P".into(), side: Side::South, binding: "glue".into(), orientation: Orientation::Forward },
            Attachment { page: "P".into(), side: Side::North, binding: "glue".into(), orientation: Orientation::Reversed },
            Attachment { page: "P".into(), side: Side::West, binding: "p.west".into(), orientation: Orientation::Forward },
            Attachment { page: "P".into(), side: Side::East, binding: "p.east".into(), orientation: Orientation::Forward },
        ];
        let plan = plan_mesh(&book, 0.25).unwrap();
        let dofs = build_dofs(&book, &plan).unwrap();
        let grid = &plan.pages[0];
        for ix in 0..grid.nx {
            let south = dofs.page_dof(0, grid, ix, 0);
            let north = dofs.page_dof(0, grid, grid.nx - 1 - ix, grid.ny - 1);
            assert_eq!(south, north);
        }
    }

    #[test]
    fn collapsing_identification_is_rejected() {
        // 2-node transverse torus direction would collapse cells.
        let torus = presets::torus_book(1.0, 1.0);
        let plan = plan_mesh(&torus, 1.0).unwrap();
        assert!(build_dofs(&torus, &plan).is_err());
    }

    #[test]
    fn graph_mesh_shares_vertices_and_handles_loops() {
        let mesh = build_graph_mesh(&presets::triangle_graph(1.0), 0.5).unwrap();
        // 3 vertices + 3 edges x 1 interior node.
        assert_eq!(mesh.ndof, 6);
        let tadpole = presets::tadpole_graph(2.0);
        let (cut, artificial) = crate::topology::truncate_graph(&tadpole, 3.0).unwrap();
        assert_eq!(artificial.len(), 1);
        let mesh = build_graph_mesh(&cut, 0.5).unwrap();
        let loop_nodes = &mesh.edge_nodes[0];
        assert_eq!(loop_nodes.first(), loop_nodes.last());
    }
}

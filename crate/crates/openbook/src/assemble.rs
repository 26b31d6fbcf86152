//! Finite-element assembly: bilinear elements on page grids, hat functions on
//! graph edges. Gluing happens entirely through shared degrees of freedom, so
//! Kirchhoff-type flux balance at the bindings is natural: no boundary terms
//! are ever imposed.

use crate::error::{Error, Result};
use crate::linalg::Csr;
use crate::mesh::{build_dofs, build_graph_mesh, plan_mesh, plan_mesh_anisotropic, DofMap, GraphMesh, MeshPlan};
use crate::topology::{graph_based_book, Book, GraphSpec};

/// Assembled operators over one global dof set. `kx` and `ky` hold the
/// per-axis gradient parts with `K = kx + ky`; `transverse_split` marks
/// meshes where the y axis is a meaningful transverse direction (products of
/// a graph with [0,1]).
#[derive(Debug, Clone)]
pub struct Operators {
    pub kx: Csr,
    pub ky: Csr,
    pub mass: Csr,
    /// Diagonal quadrature weights (row sums of the consistent mass).
    pub lumped: Vec<f64>,
    pub transverse_split: bool,
}

impl Operators {
    pub fn ndof(&self) -> usize {
        self.mass.dim()
    }

    /// Full stiffness kx + ky.
    pub fn stiffness(&self) -> Csr {
        Csr::linear_combination(&[(1.0, &self.kx), (1.0, &self.ky)])
    }

    pub fn check_dim(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.ndof() {
            return Err(Error::Dimension { expected: self.ndof(), got: u.len() });
        }
        Ok(())
    }
}

// 1-d element matrices for spacing h.
fn stiffness_1d(h: f64) -> [[f64; 2]; 2] {
    let c = 1.0 / h;
    [[c, -c], [-c, c]]
}

fn mass_1d(h: f64) -> [[f64; 2]; 2] {
    let c = h / 6.0;
    [[2.0 * c, c], [c, 2.0 * c]]
}

/// Assembles stiffness (split by axis) and mass over a planned book mesh.
pub fn assemble_book_operators(_book: &Book, plan: &MeshPlan, dofs: &DofMap) -> Operators {
    let n = dofs.ndof;
    let mut tx = Vec::new();
    let mut ty = Vec::new();
    let mut tm = Vec::new();
    for (p, grid) in plan.pages.iter().enumerate() {
        let sx = stiffness_1d(grid.hx);
        let mx = mass_1d(grid.hx);
        let sy = stiffness_1d(grid.hy);
        let my = mass_1d(grid.hy);
        for ix in 0..grid.nx - 1 {
            for iy in 0..grid.ny - 1 {
                let node = |a: usize, b: usize| dofs.page_dof(p, grid, ix + a, iy + b);
                for a in 0..2 {
                    for b in 0..2 {
                        let row = node(a, b);
                        for a2 in 0..2 {
                            for b2 in 0..2 {
                                let col = node(a2, b2);
                                tx.push((row, col, sx[a][a2] * my[b][b2]));
                                ty.push((row, col, mx[a][a2] * sy[b][b2]));
                                tm.push((row, col, mx[a][a2] * my[b][b2]));
                            }
                        }
                    }
                }
            }
        }
    }
    let mass = Csr::from_triplets(n, &tm);
    let lumped = mass.row_sums();
    Operators {
        kx: Csr::from_triplets(n, &tx),
        ky: Csr::from_triplets(n, &ty),
        mass,
        lumped,
        transverse_split: false,
    }
}

/// Plans, identifies and assembles a compact book in one step.
pub struct BookSystem {
    pub book: Book,
    pub plan: MeshPlan,
    pub dofs: DofMap,
    pub ops: Operators,
}

pub fn build_book_system(book: &Book, h: f64) -> Result<BookSystem> {
    let plan = plan_mesh(book, h)?;
    let dofs = build_dofs(book, &plan)?;
    let ops = assemble_book_operators(book, &plan, &dofs);
    Ok(BookSystem { book: book.clone(), plan, dofs, ops })
}

/// Assembles hat-function operators over a graph mesh; vertex dofs are shared
/// across incident edges.
pub fn assemble_graph_operators(mesh: &GraphMesh) -> Operators {
    let n = mesh.ndof;
    let mut tk = Vec::new();
    let mut tm = Vec::new();
    for (e, nodes) in mesh.edge_nodes.iter().enumerate() {
        let s = stiffness_1d(mesh.edge_h[e]);
        let m = mass_1d(mesh.edge_h[e]);
        for w in nodes.windows(2) {
            for a in 0..2 {
                for b in 0..2 {
                    tk.push((w[a], w[b], s[a][b]));
                    tm.push((w[a], w[b], m[a][b]));
                }
            }
        }
    }
    let mass = Csr::from_triplets(n, &tm);
    let lumped = mass.row_sums();
    Operators {
        kx: Csr::from_triplets(n, &tk),
        ky: Csr::zeros(n),
        mass,
        lumped,
        transverse_split: false,
    }
}

/// A compact graph meshed in one dimension.
pub struct GraphSystem {
    pub graph: GraphSpec,
    pub mesh: GraphMesh,
    pub ops: Operators,
}

pub fn build_graph_system(graph: &GraphSpec, h: f64) -> Result<GraphSystem> {
    let mesh = build_graph_mesh(graph, h)?;
    let ops = assemble_graph_operators(&mesh);
    Ok(GraphSystem { graph: graph.clone(), mesh, ops })
}

/// Product mesh of a compact graph with the unit transverse interval,
/// together with its one-dimensional trace mesh and the adapters between
/// them. This is the geometry of the rescaled width problems.
pub struct ProductSystem {
    pub graph: GraphSpec,
    pub book: Book,
    pub plan: MeshPlan,
    pub dofs: DofMap,
    pub ops: Operators,
    pub graph_mesh: GraphMesh,
    pub graph_ops: Operators,
    /// 2-d dof -> 1-d trace dof.
    pub lift_map: Vec<usize>,
    /// Per 2-d dof: transverse quadrature weight (sums to 1 along a column).
    pub transverse_weight: Vec<f64>,
    /// Per 2-d dof: transverse coordinate in [0, 1].
    pub transverse_coord: Vec<f64>,
}

/// Builds the product system at spacing `hx` along edges and `hy` across.
pub fn build_product_system(graph: &GraphSpec, hx: f64, hy: f64) -> Result<ProductSystem> {
    let book = graph_based_book(graph, 1.0)?;
    let plan = plan_mesh_anisotropic(&book, hx, hy)?;
    let dofs = build_dofs(&book, &plan)?;
    let mut ops = assemble_book_operators(&book, &plan, &dofs);
    ops.transverse_split = true;
    let graph_mesh = build_graph_mesh(graph, hx)?;
    let graph_ops = assemble_graph_operators(&graph_mesh);

    let mut lift_map = vec![usize::MAX; dofs.ndof];
    let mut transverse_weight = vec![0.0; dofs.ndof];
    let mut transverse_coord = vec![0.0; dofs.ndof];
    for (p, grid) in plan.pages.iter().enumerate() {
        let trace = &graph_mesh.edge_nodes[p];
        if trace.len() != grid.nx {
            return Err(Error::Mesh(format!(
                "trace mesh of edge {} does not match the page grid",
                book.pages[p].id
            )));
        }
        for ix in 0..grid.nx {
            for iy in 0..grid.ny {
                let d2 = dofs.page_dof(p, grid, ix, iy);
                let d1 = trace[ix];
                if lift_map[d2] != usize::MAX && lift_map[d2] != d1 {
                    return Err(Error::Mesh(
                        "inconsistent trace identification on the product mesh".into(),
                    ));
                }
                lift_map[d2] = d1;
                let w = if iy == 0 || iy == grid.ny - 1 { grid.hy / 2.0 } else { grid.hy };
                transverse_weight[d2] = w;
                transverse_coord[d2] = iy as f64 * grid.hy;
            }
        }
    }
    Ok(ProductSystem {
        graph: graph.clone(),
        book,
        plan,
        dofs,
        ops,
        graph_mesh,
        graph_ops,
        lift_map,
        transverse_weight,
        transverse_coord,
    })
}

impl ProductSystem {
    /// Extends a trace field constantly across the transverse direction.
    /// The result has zero transverse gradient energy.
    pub fn lift(&self, trace: &[f64]) -> Result<Vec<f64>> {
        self.graph_ops.check_dim(trace)?;
        Ok(self.lift_map.iter().map(|&d1| trace[d1]).collect())
    }

    /// Transverse quadrature average, returned as a y-constant 2-d field.
    pub fn average_transverse(&self, u: &[f64]) -> Result<Vec<f64>> {
        Ok(self.lift(&self.average_to_trace(u)?)?)
    }

    /// Transverse quadrature average collapsed onto the trace mesh.
    pub fn average_to_trace(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.ops.check_dim(u)?;
        let mut acc = vec![0.0; self.graph_ops.ndof()];
        for (d2, &d1) in self.lift_map.iter().enumerate() {
            acc[d1] += self.transverse_weight[d2] * u[d2];
        }
        Ok(acc)
    }

    /// Multiplies a lifted field by `1 + amplitude * cos(pi y)`: the first
    /// transverse mode, used to probe for two-dimensional branches.
    pub fn ridge(&self, trace: &[f64], amplitude: f64) -> Result<Vec<f64>> {
        let mut u = self.lift(trace)?;
        for (d2, v) in u.iter_mut().enumerate() {
            *v *= 1.0 + amplitude * (std::f64::consts::PI * self.transverse_coord[d2]).cos();
        }
        Ok(u)
    }
}

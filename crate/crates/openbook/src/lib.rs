//! Ground states of the stationary nonlinear Schrödinger equation on open
//! books: collections of rectangular pages glued along one-dimensional
//! bindings with Kirchhoff-type matching.
//!
//! The crate models the structures ([`topology`]), meshes them with
//! conforming tensor grids whose binding traces share degrees of freedom
//! ([`mesh`], [`assemble`]), evaluates action/Nehari functionals
//! ([`functionals`]), computes minimizers by Nehari-projected preconditioned
//! descent ([`solver`]), and drives the width sweeps, threshold detection and
//! decay checks ([`experiments`]).
//!
//! The `examples/` directory contains one runnable program per capability;
//! the `openbook` binary exposes the same operations as subcommands with
//! JSON/CSV output.

pub mod assemble;
pub mod error;
pub mod experiments;
pub mod functionals;
pub mod io;
pub mod linalg;
pub mod mesh;
pub mod presets;
pub mod solver;
pub mod topology;

pub use assemble::{
    assemble_book_operators, assemble_graph_operators, build_book_system, build_graph_system,
    build_product_system, BookSystem, GraphSystem, Operators, ProductSystem,
};
pub use error::{Error, Result};
pub use functionals::{
    evaluate, level_constant, nehari_project, nehari_scale, transverse_fraction, FunctionalReport,
    Params,
};
pub use mesh::{build_dofs, build_graph_mesh, plan_mesh, DofMap, GraphMesh, MeshPlan};
pub use solver::{
    ground_state, linearized_smallest_eig, spectral_bottom, transition_width_prediction,
    GroundStateProblem, SolveOptions, SolveReport, Start,
};
pub use topology::{
    compact_core, connected_components, graph_based_book, min_binding_length, truncate_book,
    truncate_graph, validate_book, Attachment, Binding, Book, Edge, Extent, GraphSpec,
    Orientation, Page, Side, TruncatedBook,
};

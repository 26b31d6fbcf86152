// Thin command-line front end over the openbook library. Each subcommand
// reads a JSON book/graph specification and writes JSON or CSV results;
// identical invocations produce byte-identical outputs.
//
// Exit codes: 0 success, 2 validation/schema error, 3 non-convergence,
// 4 I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use openbook::assemble::{build_book_system, build_graph_system};
use openbook::error::Error;
use openbook::experiments::{
    self, book_starts, default_truncation, graph_starts, SweepContext,
};
use openbook::functionals::Params;
use openbook::io::{self, Structure};
use openbook::solver::{GroundStateProblem, SolveOptions, SolveReport, Start};
use openbook::topology::{truncate_book, truncate_graph};

#[derive(Parser)]
#[command(name = "openbook", version, about = "NLS action ground states on open books")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Smallest eigenpairs of the stiffness/mass pencil.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        /// Number of eigenpairs.
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 0.05)]
        h: f64,
        /// Truncation radius for non-compact inputs.
        #[arg(long)]
        truncate: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single ground state; with --out, also dumps the field page by page.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        omega: f64,
        #[arg(long)]
        p: f64,
        /// Rescaled transverse width (graph inputs only).
        #[arg(long = "L")]
        width: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        h: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        truncate: Option<f64>,
        /// Adds seeded random restarts to the deterministic start menu.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Level curve across transverse widths (CSV; row L=0 is the reference).
    Sweep {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        omega: f64,
        #[arg(long)]
        p: f64,
        /// Ascending widths as start:end:count.
        #[arg(long)]
        widths: String,
        #[arg(long, default_value_t = 0.05)]
        h: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        truncate: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bisect the dimensional-transition width inside a bracket.
    Lmin {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        omega: f64,
        #[arg(long)]
        p: f64,
        /// Bracket as lo,hi.
        #[arg(long)]
        bracket: String,
        #[arg(long, default_value_t = 0.05)]
        h: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        truncate: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exponential decay rates on truncated semi-infinite pages.
    Decay {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        omega: f64,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.1)]
        h: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        truncate: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Existence condition: level against the widest-strip level.
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        omega: f64,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.1)]
        h: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        truncate: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::NoConvergence(_) => 3,
                Error::Io(_) | Error::Json(_) => 4,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json<T: Serialize>(value: &T, out: &Option<PathBuf>) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(value).map_err(Error::Json)?;
    text.push('\n');
    emit(&text, out)
}

fn parse_widths(spec: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("widths must be start:end:count, got '{spec}'")));
    }
    let a: f64 = parts[0].parse().map_err(|_| Error::Parse(format!("bad width '{}'", parts[0])))?;
    let b: f64 = parts[1].parse().map_err(|_| Error::Parse(format!("bad width '{}'", parts[1])))?;
    let n: usize = parts[2].parse().map_err(|_| Error::Parse(format!("bad count '{}'", parts[2])))?;
    if n < 1 || b < a {
        return Err(Error::Parse(format!("widths '{spec}' must ascend with count >= 1")));
    }
    Ok((0..n)
        .map(|i| {
            if n == 1 {
                a
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect())
}

fn parse_bracket(spec: &str) -> Result<[f64; 2], Error> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::Parse(format!("bracket must be lo,hi, got '{spec}'")));
    }
    let lo: f64 = parts[0].parse().map_err(|_| Error::Parse(format!("bad bracket '{}'", parts[0])))?;
    let hi: f64 = parts[1].parse().map_err(|_| Error::Parse(format!("bad bracket '{}'", parts[1])))?;
    Ok([lo, hi])
}

fn require_graph(structure: Structure, command: &str) -> Result<openbook::GraphSpec, Error> {
    match structure {
        Structure::Graph(g) => Ok(g),
        Structure::Book(_) => Err(Error::Parse(format!("{command} expects a graph input"))),
    }
}

#[derive(Serialize)]
struct SpectrumOutput {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct SolveOutput {
    report: SolveReport,
    branches: Vec<SolveReport>,
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Spectrum { input, k, h, truncate, out } => {
            let ops = match io::read_structure(&input)? {
                Structure::Book(book) => {
                    let book = if book.is_compact() {
                        book
                    } else {
                        let cutoff = truncate.ok_or_else(|| {
                            Error::Parse("non-compact book: pass --truncate".into())
                        })?;
                        truncate_book(&book, cutoff)?.book
                    };
                    build_book_system(&book, h)?.ops
                }
                Structure::Graph(graph) => {
                    let graph = match truncate {
                        Some(cutoff) => truncate_graph(&graph, cutoff)?.0,
                        None => graph,
                    };
                    build_graph_system(&graph, h)?.ops
                }
            };
            let pairs = openbook::solver::spectral_bottom(&ops, k)?;
            let output = SpectrumOutput {
                eigenvalues: pairs.iter().map(|(l, _)| *l).collect(),
                eigenvectors: pairs.into_iter().map(|(_, v)| v).collect(),
            };
            emit_json(&output, &out)
        }

        Command::Solve { input, omega, p, width, h, tol, truncate, seed, out } => {
            let opts = SolveOptions::with_tol(tol);
            match io::read_structure(&input)? {
                Structure::Book(book) => {
                    if width.is_some() {
                        return Err(Error::Parse("--L applies to graph inputs only".into()));
                    }
                    let cut = if book.is_compact() {
                        truncate_book(&book, 1.0)? // no-op, empty metadata
                    } else {
                        truncate_book(&book, truncate.unwrap_or_else(|| default_truncation(omega)))?
                    };
                    let system = build_book_system(&cut.book, h)?;
                    let problem = GroundStateProblem::new(&system.ops, Params::new(omega, p))?;
                    let mut starts = book_starts(&system, &cut.artificial_bindings, omega);
                    if let Some(seed) = seed {
                        starts.push(Start::random(system.ops.ndof(), seed));
                    }
                    let (field, best, branches) = problem.multi_start(&starts, opts)?;
                    if let Some(stem) = out.as_ref().map(|o| o.with_extension("")) {
                        io::dump_field(&cut.book, &system.plan, &system.dofs, &field, &stem)?;
                    }
                    emit_json(&SolveOutput { report: best, branches }, &out)
                }
                Structure::Graph(graph) => {
                    let cutoff = truncate.unwrap_or_else(|| default_truncation(omega));
                    let (cut, artificial) = truncate_graph(&graph, cutoff)?;
                    let params = Params::new(omega, p);
                    match width {
                        Some(width) => {
                            let context = SweepContext::new(&cut, &artificial, params, h, h, opts)?;
                            let seeds: Vec<u64> = seed.into_iter().collect();
                            let (field, record) =
                                context.solve_width(params, width, None, &seeds, opts)?;
                            if let Some(stem) = out.as_ref().map(|o| o.with_extension("")) {
                                io::dump_field(
                                    &context.system.book,
                                    &context.system.plan,
                                    &context.system.dofs,
                                    &field,
                                    &stem,
                                )?;
                            }
                            let best = record
                                .branches
                                .iter()
                                .find(|r| r.converged && r.level == record.level)
                                .cloned()
                                .unwrap_or_else(|| record.branches[0].clone());
                            emit_json(&SolveOutput { report: best, branches: record.branches }, &out)
                        }
                        None => {
                            let system = build_graph_system(&cut, h)?;
                            let problem = GroundStateProblem::new(&system.ops, params)?;
                            let mut starts = graph_starts(&system.mesh, &system.graph, &artificial, omega);
                            if let Some(seed) = seed {
                                starts.push(Start::random(system.ops.ndof(), seed));
                            }
                            let (field, best, branches) = problem.multi_start(&starts, opts)?;
                            if let Some(stem) = out.as_ref().map(|o| o.with_extension("")) {
                                dump_graph_field(&system, &field, &stem)?;
                            }
                            emit_json(&SolveOutput { report: best, branches }, &out)
                        }
                    }
                }
            }
        }

        Command::Sweep { input, omega, p, widths, h, tol, truncate, seed, out } => {
            let graph = require_graph(io::read_structure(&input)?, "sweep")?;
            let widths = parse_widths(&widths)?;
            let seeds: Vec<u64> = seed.map(|s| vec![s, s.wrapping_add(1)]).unwrap_or_default();
            let records = experiments::sweep_widths(
                &graph,
                Params::new(omega, p),
                &widths,
                h,
                tol,
                truncate,
                &seeds,
            )?;
            emit(&io::sweep_csv(&records), &out)
        }

        Command::Lmin { input, omega, p, bracket, h, tol, truncate, out } => {
            let graph = require_graph(io::read_structure(&input)?, "lmin")?;
            let bracket = parse_bracket(&bracket)?;
            let report = experiments::detect_lmin(
                &graph,
                Params::new(omega, p),
                bracket,
                h,
                tol,
                1e-6,
                truncate,
            )?;
            if let Some(path) = &out {
                let evidence = path.with_extension("evidence.csv");
                std::fs::write(&evidence, io::sweep_csv(&report.records))?;
            }
            emit_json(&report, &out)
        }

        Command::Decay { input, omega, p, h, tol, truncate, out } => {
            let book = match io::read_structure(&input)? {
                Structure::Book(b) => b,
                Structure::Graph(_) => {
                    return Err(Error::Parse("decay expects a book input".into()))
                }
            };
            if book.is_compact() {
                return Err(Error::Parse("decay expects a book with semi-infinite pages".into()));
            }
            let cutoff = truncate.unwrap_or_else(|| default_truncation(omega));
            let cut = truncate_book(&book, cutoff)?;
            let system = build_book_system(&cut.book, h)?;
            let problem = GroundStateProblem::new(&system.ops, Params::new(omega, p))?;
            // Anchor the state at a real binding so profiles decay from it.
            let starts: Vec<Start> = book_starts(&system, &cut.artificial_bindings, omega)
                .into_iter()
                .filter(|s| s.label.starts_with("bump(") && !s.label.starts_with("bump(center"))
                .collect();
            if starts.is_empty() {
                return Err(Error::Experiment("no finite binding to anchor the state".into()));
            }
            let (field, _, _) = problem.multi_start(&starts, SolveOptions::with_tol(tol))?;
            let fits = experiments::decay_fit(&system, &cut.truncated_axes, &field, omega)?;
            emit_json(&fits, &out)
        }

        Command::Report { input, omega, p, h, tol, truncate, out } => {
            let book = match io::read_structure(&input)? {
                Structure::Book(b) => b,
                Structure::Graph(_) => {
                    return Err(Error::Parse("report expects a book input".into()))
                }
            };
            let report =
                experiments::existence_report(&book, Params::new(omega, p), h, tol, truncate)?;
            emit_json(&report, &out)
        }
    }
}

/// One CSV per edge for one-dimensional fields (ny = 1, hy = 0).
fn dump_graph_field(
    system: &openbook::GraphSystem,
    field: &[f64],
    stem: &Path,
) -> Result<(), Error> {
    use std::fmt::Write as _;
    for (e, nodes) in system.mesh.edge_nodes.iter().enumerate() {
        let mut text = String::from("page_id,nx,ny,hx,hy\n");
        let _ = writeln!(
            text,
            "{},{},1,{},0",
            system.graph.edges[e].id,
            nodes.len(),
            system.mesh.edge_h[e]
        );
        for &dof in nodes {
            let _ = writeln!(text, "{}", field[dof]);
        }
        let name = format!(
            "{}.{}.csv",
            stem.file_name().and_then(|s| s.to_str()).unwrap_or("field"),
            system.graph.edges[e].id
        );
        std::fs::write(stem.with_file_name(name), text)?;
    }
    Ok(())
}

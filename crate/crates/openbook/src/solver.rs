//! Ground-state computation.
//!
//! The minimizer search runs a preconditioned gradient descent rescaled onto
//! the Nehari manifold after every step: with A = K_L + omega M,
//!
//!   u  <-  project( u - alpha A^{-1} (A u - f(u)) ),      f_i = m_i |u_i|^{p-1} u_i,
//!
//! where alpha is chosen by backtracking so the action decreases. A is
//! factored once per problem, so each iteration costs two banded solves'
//! worth of work. Everything is deterministic: fixed iteration order, seeded
//! randomness only where requested.

use serde::Serialize;

use crate::assemble::Operators;
use crate::error::{Error, Result};
use crate::functionals::{self, Params};
use crate::linalg::{dot, BandCholesky, Csr};

/// Outcome of one descent run.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub init: String,
    pub level: f64,
    pub action: f64,
    pub nehari_residual: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transverse_fraction: Option<f64>,
}

/// Stopping control: relative action stall and preconditioned residual must
/// both drop below `tol`.
#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-8, max_iter: 20_000 }
    }
}

impl SolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolveOptions { tol, ..Default::default() }
    }
}

/// A labelled starting vector for the descent.
#[derive(Debug, Clone)]
pub struct Start {
    pub label: String,
    pub values: Vec<f64>,
}

impl Start {
    pub fn new(label: impl Into<String>, values: Vec<f64>) -> Self {
        Start { label: label.into(), values }
    }

    pub fn uniform(n: usize) -> Self {
        Start::new("uniform", vec![1.0; n])
    }

    pub fn random(n: usize, seed: u64) -> Self {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Start::new(
            format!("random({seed})"),
            (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        )
    }

    /// Localized positive profile from mesh distances to a seed set,
    /// exp(-sqrt(omega) d)-shaped so the tails already decay correctly.
    pub fn bump(label: impl Into<String>, distances: &[f64], omega: f64) -> Self {
        let rate = omega.max(1e-12).sqrt();
        Start::new(
            label,
            distances.iter().map(|&d| (-rate * d).exp()).collect(),
        )
    }
}

/// A ground-state problem with its preconditioner factored once.
pub struct GroundStateProblem<'a> {
    ops: &'a Operators,
    params: Params,
    a: Csr,
    chol: BandCholesky,
}

impl<'a> GroundStateProblem<'a> {
    /// Requires omega above the spectral bottom (zero for the Kirchhoff-type
    /// books assembled here), so that K_L + omega M is positive definite.
    pub fn new(ops: &'a Operators, params: Params) -> Result<Self> {
        params.validate()?;
        if params.omega <= 0.0 {
            return Err(Error::Solver(format!(
                "omega must exceed the spectral bottom (0 for Kirchhoff books), got {}",
                params.omega
            )));
        }
        if params.width.is_some() && !ops.transverse_split {
            return Err(Error::Solver(
                "a rescaled width requires operators with a transverse split".into(),
            ));
        }
        let a = Csr::linear_combination(&[
            (1.0, &ops.kx),
            (params.transverse_coefficient(), &ops.ky),
            (params.omega, &ops.mass),
        ]);
        let chol = BandCholesky::new(&a).map_err(Error::Solver)?;
        Ok(GroundStateProblem { ops, params, a, chol })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Runs the projected descent from one start.
    pub fn solve(&self, start: &Start, opts: SolveOptions) -> Result<(Vec<f64>, SolveReport)> {
        self.ops.check_dim(&start.values)?;
        let n = self.ops.ndof();
        let mut u = functionals::nehari_project(self.ops, &self.params, &start.values)?;
        let mut action_prev = f64::INFINITY;
        let mut force = vec![0.0; n];
        let mut iterations = 0usize;
        let mut converged = false;
        let mut residual = f64::INFINITY;

        for _ in 0..opts.max_iter {
            functionals::nonlinear_force(&self.ops.lumped, &u, self.params.p, &mut force);
            let au = self.a.mul_vec(&u);
            let r: Vec<f64> = au.iter().zip(&force).map(|(a, f)| a - f).collect();
            let g = self.chol.solve(&r);
            let slope = dot(&r, &g).max(0.0);
            let norm_a = dot(&u, &au).max(f64::MIN_POSITIVE);
            residual = (slope / norm_a).sqrt();
            let report = functionals::evaluate(self.ops, &self.params, &u)?;
            let action = report.action;
            if (action_prev - action).abs() <= opts.tol * action.abs().max(1.0)
                && residual <= opts.tol
            {
                converged = true;
                break;
            }
            action_prev = action;

            // Backtracking on the projected step; plain decrease is enough
            // once the Armijo margin is below rounding noise.
            let mut alpha = 1.0;
            let mut accepted = None;
            while alpha >= 1e-12 {
                let candidate: Vec<f64> = u
                    .iter()
                    .zip(&g)
                    .map(|(ui, gi)| ui - alpha * gi)
                    .collect();
                if let Ok(projected) = functionals::nehari_project(self.ops, &self.params, &candidate) {
                    let cand_action = functionals::evaluate(self.ops, &self.params, &projected)?.action;
                    let margin = (1e-4 * alpha * slope).max(0.0);
                    let noise = 1e-14 * action.abs().max(1.0);
                    if cand_action <= action - margin + noise {
                        accepted = Some((projected, cand_action));
                        break;
                    }
                }
                alpha *= 0.5;
            }
            match accepted {
                Some((next, next_action)) => {
                    debug_assert!(next_action <= action + 1e-12 * action.abs().max(1.0));
                    u = next;
                    iterations += 1;
                }
                None => {
                    // Stagnation: either we are at the minimizer or the
                    // landscape is flat below rounding; judge by the residual.
                    converged = residual <= opts.tol;
                    break;
                }
            }
        }

        // Nonnegative representative: flip so the weighted mean is >= 0.
        let mean: f64 = u.iter().zip(&self.ops.lumped).map(|(x, w)| w * x).sum();
        if mean < 0.0 {
            for x in u.iter_mut() {
                *x = -*x;
            }
        }
        let report = functionals::evaluate(self.ops, &self.params, &u)?;
        let quad = report.nehari + report.np1;
        let transverse = if self.ops.transverse_split {
            Some(functionals::transverse_fraction(self.ops, &u)?)
        } else {
            None
        };
        Ok((
            u,
            SolveReport {
                init: start.label.clone(),
                level: report.level,
                action: report.action,
                nehari_residual: report.nehari.abs() / quad.abs().max(f64::MIN_POSITIVE),
                residual,
                iterations,
                converged,
                transverse_fraction: transverse,
            },
        ))
    }

    /// Runs every start and keeps the converged result of smallest level;
    /// level ties within 2 tol prefer the smaller transverse fraction.
    pub fn multi_start(
        &self,
        starts: &[Start],
        opts: SolveOptions,
    ) -> Result<(Vec<f64>, SolveReport, Vec<SolveReport>)> {
        if starts.is_empty() {
            return Err(Error::Solver("multi_start needs at least one start".into()));
        }
        let mut best: Option<(Vec<f64>, SolveReport)> = None;
        let mut reports = Vec::with_capacity(starts.len());
        for start in starts {
            let (u, report) = self.solve(start, opts)?;
            if report.converged {
                let better = match &best {
                    None => true,
                    Some((_, incumbent)) => {
                        let tie = 2.0 * opts.tol * incumbent.level.abs().max(1.0);
                        if (report.level - incumbent.level).abs() <= tie {
                            report.transverse_fraction.unwrap_or(0.0)
                                < incumbent.transverse_fraction.unwrap_or(0.0)
                        } else {
                            report.level < incumbent.level
                        }
                    }
                };
                if better {
                    best = Some((u, report.clone()));
                }
            }
            reports.push(report);
        }
        match best {
            Some((u, report)) => Ok((u, report, reports)),
            None => Err(Error::NoConvergence(reports)),
        }
    }
}

/// Convenience wrapper building the problem and solving one start.
pub fn ground_state(
    ops: &Operators,
    params: Params,
    start: &Start,
    opts: SolveOptions,
) -> Result<(Vec<f64>, SolveReport)> {
    GroundStateProblem::new(ops, params)?.solve(start, opts)
}

/// The k smallest eigenpairs of K v = lambda M v over the assembled
/// operators (full stiffness). Deterministic; eigenvalues ascend.
pub fn spectral_bottom(ops: &Operators, count: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let k = ops.stiffness();
    crate::linalg::smallest_eigenpairs(&k, &ops.mass, count, 1.0, 0x5eed)
        .map_err(Error::Solver)
}

/// Smallest eigenvalue of the operator linearized at a one-dimensional
/// ground state: L+ = K + omega M - p diag(m_i |u_i|^{p-1}).
pub fn linearized_smallest_eig(ops: &Operators, params: &Params, u: &[f64]) -> Result<f64> {
    params.validate()?;
    ops.check_dim(u)?;
    let n = ops.ndof();
    let p = params.p;
    let mut max_amp: f64 = 0.0;
    let mut triplets = Vec::with_capacity(n);
    for i in 0..n {
        let amp = u[i].abs().powf(p - 1.0);
        max_amp = max_amp.max(amp);
        triplets.push((i, i, -p * ops.lumped[i] * amp));
    }
    let potential = Csr::from_triplets(n, &triplets);
    let k = ops.stiffness();
    let lin = Csr::linear_combination(&[(1.0, &k), (params.omega, &ops.mass), (1.0, &potential)]);
    // Lumped and consistent masses are spectrally within a factor 3, so this
    // shift keeps the operator positive definite.
    let shift = 3.0 * p * max_amp + params.omega.abs() + 1.0;
    let pairs = crate::linalg::smallest_eigenpairs(&lin, &ops.mass, 1, shift, 0x11e1)
        .map_err(Error::Solver)?;
    Ok(pairs[0].0)
}

/// Width at which the first transverse mode destabilizes a lifted state:
/// pi / sqrt(-lambda1), or None when no transverse bifurcation is predicted.
pub fn transition_width_prediction(lambda1: f64) -> Option<f64> {
    if lambda1 < 0.0 {
        Some(std::f64::consts::PI / (-lambda1).sqrt())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assemble::{build_book_system, build_graph_system, build_product_system};
    use crate::functionals::transverse_fraction;
    use crate::presets;
    use crate::topology::{truncate_graph, Edge, Extent, GraphSpec};

    fn interval_graph(len: f64) -> GraphSpec {
        GraphSpec {
            vertices: vec!["a".into(), "b".into()],
            edges: vec![Edge { id: "e".into(), from: "a".into(), to: "b".into(), length: Extent::Finite(len) }],
        }
    }

    #[test]
    fn kirchhoff_bottom_is_zero_on_compact_structures() {
        let torus = build_book_system(&presets::torus_book(1.0, 1.0), 0.1).unwrap();
        let pairs = spectral_bottom(&torus.ops, 2).unwrap();
        assert!(pairs[0].0.abs() < 1e-9, "torus bottom {}", pairs[0].0);
        assert!(pairs[1].0 > 1.0);

        let triangle = build_graph_system(&presets::triangle_graph(1.0), 0.05).unwrap();
        let pairs = spectral_bottom(&triangle.ops, 2).unwrap();
        assert!(pairs[0].0.abs() < 1e-9);
    }

    #[test]
    fn interval_second_eigenvalue_converges_at_second_order() {
        let pi2 = std::f64::consts::PI.powi(2);
        let mut errors = Vec::new();
        for h in [0.02, 0.01] {
            let sys = build_graph_system(&interval_graph(1.0), h).unwrap();
            let pairs = spectral_bottom(&sys.ops, 2).unwrap();
            errors.push((pairs[1].0 - pi2).abs());
        }
        let rate = errors[0] / errors[1];
        assert!(rate > 3.0 && rate < 5.0, "refinement ratio {rate}");
    }

    #[test]
    fn unit_square_second_eigenvalue_near_pi_squared() {
        let sys = build_book_system(&presets::square_book(1.0, 1.0), 0.02).unwrap();
        let pairs = spectral_bottom(&sys.ops, 3).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!(pairs[0].0.abs() < 1e-9);
        assert!((pairs[1].0 - pi2).abs() < 0.01 * pi2);
        // Doubly degenerate on the square.
        assert!((pairs[2].0 - pi2).abs() < 0.01 * pi2);
    }

    #[test]
    fn line_soliton_level_on_a_coarse_interval() {
        // Centered line: two rays truncated at radius 30, h = 0.02.
        let (graph, _) = truncate_graph(&presets::line_graph(), 30.0).unwrap();
        let sys = build_graph_system(&graph, 0.02).unwrap();
        let params = Params::new(1.0, 3.0);
        let problem = GroundStateProblem::new(&sys.ops, params).unwrap();
        let center = sys.mesh.vertex_dof["c"];
        let start = Start::bump("bump(c)", &sys.mesh.distances(&[center]), 1.0);
        let (u, report) = problem.solve(&start, SolveOptions::default()).unwrap();
        assert!(report.converged, "{report:?}");
        let exact = 4.0 / 3.0;
        assert!(
            (report.level - exact).abs() < 0.01 * exact,
            "level {} vs {exact}",
            report.level
        );
        // Converged states satisfy the Nehari identity level = action.
        assert!((report.action - report.level).abs() < 1e-8 * exact);
        assert!(u.iter().cloned().fold(f64::NEG_INFINITY, f64::max) > 1.0);
    }

    #[test]
    fn lifted_start_stays_transverse_constant_below_threshold() {
        let (graph, _) = truncate_graph(&presets::line_graph(), 15.0).unwrap();
        let sys = build_product_system(&graph, 0.1, 0.1).unwrap();
        let params = Params::with_width(1.0, 3.0, 1.0);
        let problem = GroundStateProblem::new(&sys.ops, params).unwrap();
        // 1-d ground state, lifted.
        let trace_problem = GroundStateProblem::new(&sys.graph_ops, Params::new(1.0, 3.0)).unwrap();
        let center = sys.graph_mesh.vertex_dof["c"];
        let start = Start::bump("bump(c)", &sys.graph_mesh.distances(&[center]), 1.0);
        let (trace, trace_report) = trace_problem.solve(&start, SolveOptions::default()).unwrap();
        let lifted = Start::new("lift", sys.lift(&trace).unwrap());
        let (u, report) = problem.solve(&lifted, SolveOptions::default()).unwrap();
        assert!(report.converged);
        assert!(report.transverse_fraction.unwrap() < 1e-8);
        assert!((report.level - trace_report.level).abs() < 1e-6);
        let tau = transverse_fraction(&sys.ops, &u).unwrap();
        assert!(tau < 1e-8);
    }

    #[test]
    fn multi_start_is_deterministic_and_picks_the_smallest_level() {
        let sys = build_book_system(&presets::square_book(2.0, 1.0), 0.2).unwrap();
        let params = Params::new(1.0, 3.0);
        let problem = GroundStateProblem::new(&sys.ops, params).unwrap();
        let starts = vec![
            Start::uniform(sys.ops.ndof()),
            Start::random(sys.ops.ndof(), 42),
            Start::random(sys.ops.ndof(), 7),
        ];
        let (_, best1, all1) = problem.multi_start(&starts, SolveOptions::default()).unwrap();
        let (_, best2, _) = problem.multi_start(&starts, SolveOptions::default()).unwrap();
        assert_eq!(best1.level.to_bits(), best2.level.to_bits());
        for r in &all1 {
            if r.converged {
                assert!(best1.level <= r.level + 2.0 * 1e-8 * r.level.abs().max(1.0));
            }
        }
    }

    #[test]
    fn omega_at_or_below_bottom_is_refused() {
        let sys = build_graph_system(&interval_graph(1.0), 0.1).unwrap();
        assert!(GroundStateProblem::new(&sys.ops, Params::new(0.0, 3.0)).is_err());
        assert!(GroundStateProblem::new(&sys.ops, Params::new(-1.0, 3.0)).is_err());
    }

    #[test]
    fn level_is_stable_under_page_reordering() {
        let (graph, _) = truncate_graph(&presets::star_graph(3), 6.0).unwrap();
        let mut reordered = graph.clone();
        reordered.edges.reverse();
        let tol = 1e-9;
        let mut levels = Vec::new();
        for g in [graph, reordered] {
            let sys = build_graph_system(&g, 0.05).unwrap();
            let params = Params::new(1.0, 3.0);
            let problem = GroundStateProblem::new(&sys.ops, params).unwrap();
            let center = sys.mesh.vertex_dof["c"];
            let start = Start::bump("bump(c)", &sys.mesh.distances(&[center]), 1.0);
            let (_, report) = problem.solve(&start, SolveOptions::with_tol(tol)).unwrap();
            assert!(report.converged);
            levels.push(report.level);
        }
        assert!((levels[0] - levels[1]).abs() <= 2.0 * tol * levels[0].max(1.0));
    }

    #[test]
    fn linearized_eigenvalue_of_the_line_soliton() {
        let (graph, _) = truncate_graph(&presets::line_graph(), 20.0).unwrap();
        let sys = build_graph_system(&graph, 0.005).unwrap();
        let params = Params::new(1.0, 3.0);
        let problem = GroundStateProblem::new(&sys.ops, params).unwrap();
        let center = sys.mesh.vertex_dof["c"];
        let start = Start::bump("bump(c)", &sys.mesh.distances(&[center]), 1.0);
        let (u, report) = problem.solve(&start, SolveOptions::with_tol(1e-10)).unwrap();
        assert!(report.converged);
        let lambda = linearized_smallest_eig(&sys.ops, &params, &u).unwrap();
        assert!((lambda + 3.0).abs() < 0.01, "lambda1 {lambda}");
        let predicted = transition_width_prediction(lambda).unwrap();
        let exact = std::f64::consts::PI / 3.0f64.sqrt();
        assert!((predicted - exact).abs() < 0.01 * exact);
        // Positive lambda yields no prediction.
        assert_eq!(transition_width_prediction(0.5), None);
    }

    #[test]
    fn report_serializes_flat() {
        let report = SolveReport {
            init: "uniform".into(),
            level: 1.0,
            action: 1.0,
            nehari_residual: 0.0,
            residual: 0.0,
            iterations: 3,
            converged: true,
            transverse_fraction: None,
        };
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"level\":1.0") || json.contains("\"level\":1"));
        assert!(!json.contains("transverse_fraction"));
    }
}

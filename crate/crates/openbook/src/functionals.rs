//! Action and Nehari functionals on discrete fields, the exact projection
//! onto the Nehari manifold, and the transverse-energy diagnostic.
//!
//! When `Params::width` is set, the transverse gradient energy is weighted by
//! 1/L^2: the width dependence of the product problem transported to the unit
//! transverse interval. Without a width the evaluation is the physical one.

use serde::Serialize;

use crate::assemble::Operators;
use crate::error::{Error, Result};

/// Frequency, nonlinearity power, and (for rescaled product problems) the
/// transverse width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub omega: f64,
    pub p: f64,
    pub width: Option<f64>,
}

impl Params {
    pub fn new(omega: f64, p: f64) -> Self {
        Params { omega, p, width: None }
    }

    pub fn with_width(omega: f64, p: f64, width: f64) -> Self {
        Params { omega, p, width: Some(width) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0) || !self.p.is_finite() {
            return Err(Error::Solver(format!("nonlinearity power must exceed 1, got {}", self.p)));
        }
        if !self.omega.is_finite() {
            return Err(Error::Solver("omega must be finite".into()));
        }
        if let Some(w) = self.width {
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::Solver(format!("width must be positive, got {w}")));
            }
        }
        Ok(())
    }

    /// Coefficient applied to the transverse gradient energy.
    pub fn transverse_coefficient(&self) -> f64 {
        match self.width {
            Some(w) => 1.0 / (w * w),
            None => 1.0,
        }
    }
}

/// The constant c_p = (p - 1) / (2 (p + 1)) relating the minimal action to
/// the p+1 norm on the Nehari manifold.
pub fn level_constant(p: f64) -> f64 {
    (p - 1.0) / (2.0 * (p + 1.0))
}

/// All functional values of one field. `level` is c_p * np1, which equals
/// `action - nehari / 2` identically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalReport {
    pub qx: f64,
    pub qy: f64,
    pub mass2: f64,
    pub np1: f64,
    pub action: f64,
    pub nehari: f64,
    pub level: f64,
}

/// Sum of lumped-quadrature |u|^q.
pub fn lumped_power_sum(lumped: &[f64], u: &[f64], q: f64) -> f64 {
    if (q - 4.0).abs() < 1e-13 {
        u.iter()
            .zip(lumped)
            .map(|(x, w)| {
                let s = x * x;
                w * s * s
            })
            .sum()
    } else {
        u.iter().zip(lumped).map(|(x, w)| w * x.abs().powf(q)).sum()
    }
}

/// Gradient of the lumped p+1 potential: out_i = m_i |u_i|^{p-1} u_i.
pub fn nonlinear_force(lumped: &[f64], u: &[f64], p: f64, out: &mut [f64]) {
    if (p - 3.0).abs() < 1e-13 {
        for ((o, x), w) in out.iter_mut().zip(u).zip(lumped) {
            *o = w * x * x * x;
        }
    } else {
        for ((o, x), w) in out.iter_mut().zip(u).zip(lumped) {
            *o = w * x.abs().powf(p - 1.0) * x;
        }
    }
}

/// Evaluates action, Nehari and level. Defined for u = 0 as all zeros.
pub fn evaluate(ops: &Operators, params: &Params, u: &[f64]) -> Result<FunctionalReport> {
    params.validate()?;
    ops.check_dim(u)?;
    if params.width.is_some() && !ops.transverse_split {
        return Err(Error::Solver(
            "a rescaled width requires operators with a transverse split (product mesh)".into(),
        ));
    }
    let (qx, qy) = if ops.transverse_split {
        (ops.kx.quadratic_form(u), ops.ky.quadratic_form(u))
    } else {
        (ops.kx.quadratic_form(u) + ops.ky.quadratic_form(u), 0.0)
    };
    let mass2 = ops.mass.quadratic_form(u);
    let np1 = lumped_power_sum(&ops.lumped, u, params.p + 1.0);
    let quad = qx + params.transverse_coefficient() * qy + params.omega * mass2;
    let action = 0.5 * quad - np1 / (params.p + 1.0);
    let nehari = quad - np1;
    Ok(FunctionalReport {
        qx,
        qy,
        mass2,
        np1,
        action,
        nehari,
        level: level_constant(params.p) * np1,
    })
}

/// The scaling factor pi(u) with I(pi(u) u) = 0: (Q(u) / np1)^{1/(p-1)}.
pub fn nehari_scale(ops: &Operators, params: &Params, u: &[f64]) -> Result<f64> {
    let report = evaluate(ops, params, u)?;
    if report.np1 <= 0.0 {
        return Err(Error::Solver("cannot project the zero field onto the Nehari manifold".into()));
    }
    let quad = report.nehari + report.np1;
    if quad <= 0.0 {
        return Err(Error::Solver(
            "quadratic part is nonpositive: omega is at or below the spectral bottom".into(),
        ));
    }
    Ok((quad / report.np1).powf(1.0 / (params.p - 1.0)))
}

/// Projects u onto the Nehari manifold by scaling.
pub fn nehari_project(ops: &Operators, params: &Params, u: &[f64]) -> Result<Vec<f64>> {
    let pi = nehari_scale(ops, params, u)?;
    Ok(u.iter().map(|x| pi * x).collect())
}

/// Share of gradient energy carried by the transverse direction,
/// qy / (qx + qy) in [0, 1]; zero field gives 0.
pub fn transverse_fraction(ops: &Operators, u: &[f64]) -> Result<f64> {
    if !ops.transverse_split {
        return Err(Error::Solver(
            "transverse fraction requires operators with a transverse split".into(),
        ));
    }
    ops.check_dim(u)?;
    let qx = ops.kx.quadratic_form(u);
    let qy = ops.ky.quadratic_form(u);
    // Constant fields have no gradient energy at all; what the quadratic
    // forms return for them is rounding noise, so treat it as 0/0 = 0.
    let noise = 1e-14 * crate::linalg::dot(u, u).max(f64::MIN_POSITIVE);
    let denom = qx + qy;
    if denom <= noise {
        return Ok(0.0);
    }
    Ok((qy / denom).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assemble::build_product_system;
    use crate::presets;
    use crate::topology::truncate_graph;
    use rand::{Rng, SeedableRng};

    fn fixture() -> crate::assemble::ProductSystem {
        let (graph, _) = truncate_graph(&presets::star_graph(3), 1.5).unwrap();
        build_product_system(&graph, 0.25, 0.25).unwrap()
    }

    #[test]
    fn zero_field_reports_zeros() {
        let sys = fixture();
        let params = Params::with_width(1.0, 3.0, 0.8);
        let r = evaluate(&sys.ops, &params, &vec![0.0; sys.ops.ndof()]).unwrap();
        assert_eq!(r.action, 0.0);
        assert_eq!(r.nehari, 0.0);
        assert_eq!(r.level, 0.0);
    }

    #[test]
    fn level_constant_at_cubic_power() {
        assert!((level_constant(3.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn level_identity_on_random_fields() {
        let sys = fixture();
        let params = Params::with_width(1.3, 3.0, 0.7);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let u: Vec<f64> = (0..sys.ops.ndof()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r = evaluate(&sys.ops, &params, &u).unwrap();
            let identity = r.action - 0.5 * r.nehari - r.level;
            assert!(identity.abs() <= 1e-12 * r.level.abs().max(1.0));
        }
    }

    #[test]
    fn projection_lands_on_the_manifold_and_is_idempotent() {
        let sys = fixture();
        let params = Params::with_width(1.0, 3.0, 1.2);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let u: Vec<f64> = (0..sys.ops.ndof()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v = nehari_project(&sys.ops, &params, &u).unwrap();
        let r = evaluate(&sys.ops, &params, &v).unwrap();
        assert!(r.nehari.abs() <= 1e-10 * r.np1);
        let w = nehari_project(&sys.ops, &params, &v).unwrap();
        for (a, b) in w.iter().zip(&v) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-30));
        }
    }

    #[test]
    fn projection_is_scale_invariant() {
        let sys = fixture();
        let params = Params::with_width(0.9, 2.4, 1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let u: Vec<f64> = (0..sys.ops.ndof()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let base = nehari_project(&sys.ops, &params, &u).unwrap();
        for t in [0.5, 2.0, 10.0] {
            let scaled: Vec<f64> = u.iter().map(|x| t * x).collect();
            let projected = nehari_project(&sys.ops, &params, &scaled).unwrap();
            for (a, b) in projected.iter().zip(&base) {
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-30));
            }
        }
    }

    #[test]
    fn nehari_comparison_is_monotone_in_width() {
        let sys = fixture();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let u: Vec<f64> = (0..sys.ops.ndof()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let narrow = evaluate(&sys.ops, &Params::with_width(1.0, 3.0, 0.5), &u).unwrap();
        let wide = evaluate(&sys.ops, &Params::with_width(1.0, 3.0, 2.0), &u).unwrap();
        assert!(narrow.nehari > wide.nehari);
        // Equality (up to assembly rounding) for transverse-constant fields.
        let lifted = sys.lift(&vec![1.0; sys.graph_ops.ndof()]).unwrap();
        let narrow = evaluate(&sys.ops, &Params::with_width(1.0, 3.0, 0.5), &lifted).unwrap();
        let wide = evaluate(&sys.ops, &Params::with_width(1.0, 3.0, 2.0), &lifted).unwrap();
        assert!((narrow.nehari - wide.nehari).abs() <= 1e-12 * narrow.np1);
    }

    #[test]
    fn projection_does_not_raise_the_level_inside_the_manifold() {
        let sys = fixture();
        let params = Params::with_width(1.0, 3.0, 1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let u: Vec<f64> = (0..sys.ops.ndof()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let on = nehari_project(&sys.ops, &params, &u).unwrap();
            // Push strictly inside I <= 0 and check the projection only shrinks.
            let inside: Vec<f64> = on.iter().map(|x| 1.5 * x).collect();
            let before = evaluate(&sys.ops, &params, &inside).unwrap();
            assert!(before.nehari < 0.0);
            let after = evaluate(&sys.ops, &params, &nehari_project(&sys.ops, &params, &inside).unwrap()).unwrap();
            assert!(after.level <= before.level * (1.0 + 1e-12));
        }
    }

    #[test]
    fn transverse_fraction_diagnoses_dimensionality() {
        let sys = fixture();
        let ones = vec![1.0; sys.graph_ops.ndof()];
        let lifted = sys.lift(&ones).unwrap();
        assert_eq!(transverse_fraction(&sys.ops, &lifted).unwrap(), 0.0);
        let mut ridge = vec![0.0; sys.ops.ndof()];
        for (d2, v) in ridge.iter_mut().enumerate() {
            *v = (std::f64::consts::PI * sys.transverse_coord[d2]).cos();
        }
        let tau = transverse_fraction(&sys.ops, &ridge).unwrap();
        assert!((tau - 1.0).abs() < 1e-12, "pure ridge should be fully transverse, got {tau}");
        let wavy: Vec<f64> = (0..sys.graph_ops.ndof()).map(|i| (i as f64 * 0.5).sin()).collect();
        let mix: Vec<f64> = sys
            .lift(&wavy)
            .unwrap()
            .iter()
            .zip(&ridge)
            .map(|(a, b)| a + 0.3 * b)
            .collect();
        let tau = transverse_fraction(&sys.ops, &mix).unwrap();
        assert!(tau > 0.0 && tau < 1.0);
        // Physical (unsplit) operators refuse the diagnostic.
        assert!(transverse_fraction(&sys.graph_ops, &ones).is_err());
    }
}

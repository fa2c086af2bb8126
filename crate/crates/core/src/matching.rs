//! When do the deformation force `G(t)` and the transformation force `H(t)`
//! coincide?
//!
//! `G = H` reduces to `ä₁ = −ḟ/2 · F₂`, `ä₂ = ḟ/2 · F₁`. In the polynomial
//! limit `ä` spans `{2b, 6c t}`, so a match needs `ḟ` of degree at most one:
//! the K2 family (constant `ḟ`, solved by `b`), and K3/K5 (linear `ḟ`, solved
//! by `c`). K1 has `ḟ ≡ 0` and is matched by the identity transformation.
//! At finite `τ` every `ḟ` carries `cosh(2t/τ)` or `sinh(2t/τ)` terms, which
//! lie outside the span `{cosh(t/τ), sinh(t/τ)}` of `ä`, so nothing matches
//! unless the deformation force vanishes altogether.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::classical::{AxisCoefficients, TransformFamily};
use crate::deformation::{DeformationFamily, FamilyId, Tau};
use crate::dynamics::{deformation_force, distance, ForceField, Scenario};
use crate::error::{ensure_finite, Error, Result};
use crate::{classical, dynamics, Vec3};

/// Probe grid used to confirm a verdict: `t = 0, 0.01, …, 10`.
pub const PROBE_T_END: f64 = 10.0;
pub const PROBE_POINTS: usize = 1001;

/// Matches are accepted when `max |residual| ≤ MATCH_TOLERANCE · (1 + scale)`,
/// where `scale` is the largest required `|ä|` on the probe grid.
pub const MATCH_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchKind {
    /// No deformation force to reproduce; the zero transformation matches.
    Trivial,
    /// Constant extra force, reproduced by the `b` (acceleration) terms.
    Quadratic,
    /// Linearly growing extra force, reproduced by the `c` (jerk) terms.
    Cubic,
    None,
}

impl fmt::Display for MatchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchKind::Trivial => "trivial",
            MatchKind::Quadratic => "quadratic",
            MatchKind::Cubic => "cubic",
            MatchKind::None => "none",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub exists: bool,
    /// Present iff `exists`.
    pub tf: Option<TransformFamily>,
    pub matched_family: DeformationFamily,
    pub force: ForceField,
    pub mass: f64,
    pub kind: MatchKind,
    /// `max |G − H| / m` over the probe grid, for `tf` when a match exists and
    /// for the least-squares candidate otherwise.
    pub residual_bound: f64,
    pub tolerance: f64,
    /// Least-squares transformation within the family's `ä` span; only set
    /// when no exact match exists.
    pub best_fit: Option<TransformFamily>,
    pub notes: String,
}

/// `(ä₁ + ḟ/2 F₂, ä₂ − ḟ/2 F₁)`; zero exactly when `G(t) = H(t)`.
pub fn match_residual(
    family: &DeformationFamily,
    tf: &TransformFamily,
    force: &ForceField,
    mass: f64,
    t: f64,
) -> Result<[f64; 2]> {
    ensure_finite("t", t)?;
    check_mass(mass)?;
    Ok(residual_at(family, tf, force, t))
}

fn residual_at(family: &DeformationFamily, tf: &TransformFamily, force: &ForceField, t: f64) -> [f64; 2] {
    let half = 0.5 * family.f_dot(t);
    let acc = tf.a_ddot_vec(t);
    [acc[0] + half * force.0[1], acc[1] - half * force.0[0]]
}

fn check_mass(mass: f64) -> Result<()> {
    if mass.is_finite() && mass > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")))
    }
}

fn probe_grid() -> impl Iterator<Item = f64> {
    let dt = PROBE_T_END / (PROBE_POINTS - 1) as f64;
    (0..PROBE_POINTS).map(move |k| k as f64 * dt)
}

/// Required `ä` scale: `max_t |ḟ(t)|/2 · max(|F₁|, |F₂|)`.
fn target_scale(family: &DeformationFamily, force: &ForceField) -> f64 {
    let fmax = force.0[0].abs().max(force.0[1].abs());
    probe_grid().map(|t| 0.5 * family.f_dot(t).abs() * fmax).fold(0.0, f64::max)
}

fn residual_bound(family: &DeformationFamily, tf: &TransformFamily, force: &ForceField) -> f64 {
    probe_grid()
        .map(|t| {
            let [r1, r2] = residual_at(family, tf, force, t);
            r1.abs().max(r2.abs())
        })
        .fold(0.0, f64::max)
}

/// Solve `G ≡ H` for the transformation coefficients.
pub fn solve_match(family: &DeformationFamily, force: &ForceField, mass: f64) -> Result<MatchResult> {
    check_mass(mass)?;
    ForceField::new(force.0)?;
    let [f1, f2, _] = force.0;
    let kappa = family.kappa();
    let tau = family.tau();
    let no_deformation_force =
        kappa == 0.0 || (f1 == 0.0 && f2 == 0.0) || (tau.is_infinite() && family.id() == FamilyId::K1);

    let (kind, tf, notes) = if no_deformation_force {
        (
            MatchKind::Trivial,
            Some(TransformFamily::zero(tau)),
            "no deformation force; the identity transformation matches".to_string(),
        )
    } else {
        match (tau, family.id()) {
            (Tau::Infinite, FamilyId::K2) => {
                let one = AxisCoefficients { b: -kappa * f2 / 4.0, ..Default::default() };
                let two = AxisCoefficients { b: kappa * f1 / 4.0, ..Default::default() };
                (
                    MatchKind::Quadratic,
                    Some(TransformFamily::from_axes(one, two, Tau::Infinite)),
                    "linear f = κt; constant extra force matched by b1 = -κF2/4, b2 = κF1/4".to_string(),
                )
            }
            (Tau::Infinite, FamilyId::K3 | FamilyId::K5) => {
                // both reduce to f = κ t² with κ = κ3 = κ5/2
                let k = if family.id() == FamilyId::K3 { kappa } else { 0.5 * kappa };
                let one = AxisCoefficients { c: -k * f2 / 6.0, ..Default::default() };
                let two = AxisCoefficients { c: k * f1 / 6.0, ..Default::default() };
                (
                    MatchKind::Cubic,
                    Some(TransformFamily::from_axes(one, two, Tau::Infinite)),
                    format!("quadratic f = κt² with κ = {k}; matched by c1 = -κF2/6, c2 = κF1/6"),
                )
            }
            (Tau::Infinite, id) => (
                MatchKind::None,
                None,
                format!("f-dot of family {id} has degree above one; a(t) would need degree above three"),
            ),
            (Tau::Finite(_), id) => (
                MatchKind::None,
                None,
                format!("f-dot of family {id} contains frequency 2/tau terms outside the a(t) span"),
            ),
        }
    };

    let tolerance = MATCH_TOLERANCE * (1.0 + target_scale(family, force));
    let (residual, best_fit) = match &tf {
        Some(tf) => (residual_bound(family, tf, force), None),
        None => {
            let fit = least_squares_fit(family, force)?;
            (residual_bound(family, &fit, force), Some(fit))
        }
    };

    Ok(MatchResult {
        exists: tf.is_some(),
        tf,
        matched_family: *family,
        force: *force,
        mass,
        kind,
        residual_bound: residual,
        tolerance,
        best_fit,
        notes,
    })
}

/// Best `(b, c)` per axis in the least-squares sense over the probe grid.
fn least_squares_fit(family: &DeformationFamily, force: &ForceField) -> Result<TransformFamily> {
    let times: Vec<f64> = probe_grid().collect();
    let tau = family.tau();
    // columns: ∂ä/∂b and ∂ä/∂c
    let basis = |t: f64| match tau {
        Tau::Infinite => (2.0, 6.0 * t),
        Tau::Finite(tau) => {
            let u = t / tau;
            (2.0 * u.cosh(), 6.0 * tau * u.sinh())
        }
    };
    let design = DMatrix::from_fn(times.len(), 2, |r, c| {
        let (cb, cc) = basis(times[r]);
        if c == 0 {
            cb
        } else {
            cc
        }
    });
    // column equilibration keeps the SVD well scaled for small τ
    let norms: Vec<f64> = (0..2).map(|c| design.column(c).norm().max(f64::MIN_POSITIVE)).collect();
    let scaled = DMatrix::from_fn(times.len(), 2, |r, c| design[(r, c)] / norms[c]);
    let svd = scaled.svd(true, true);

    let [f1, f2, _] = force.0;
    let solve = |coef: f64| -> Result<(f64, f64)> {
        let rhs = DVector::from_iterator(times.len(), times.iter().map(|&t| coef * 0.5 * family.f_dot(t)));
        let sol = svd
            .solve(&rhs, 1e-14)
            .map_err(|e| Error::InvalidArgument(format!("least-squares fit failed: {e}")))?;
        Ok((sol[0] / norms[0], sol[1] / norms[1]))
    };
    let (b1, c1) = solve(-f2)?;
    let (b2, c2) = solve(f1)?;
    let one = AxisCoefficients { b: b1, c: c1, ..Default::default() };
    let two = AxisCoefficients { b: b2, c: c2, ..Default::default() };
    Ok(TransformFamily::from_axes(one, two, tau))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityReport {
    pub family: DeformationFamily,
    pub kind: MatchKind,
    pub probe_count: usize,
    /// `max |G − expected|`.
    pub max_g_deviation: f64,
    /// `max |H − expected|`.
    pub max_h_deviation: f64,
    /// `max |G − H|`.
    pub max_gh_gap: f64,
}

impl EqualityReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_g_deviation.max(self.max_h_deviation).max(self.max_gh_gap)
    }
}

/// Check the explicit closed forms of the shared force at each probe time.
///
/// * K2: `G = H = (F₁ − mκF₂/2, F₂ + mκF₁/2, F₃)`
/// * K3/K5 (κ = κ₃ = κ₅/2): `G = H = (F₁ − mκF₂t, F₂ + mκF₁t, F₃)`
/// * trivial matches: `G = H = F`
pub fn verify_equalities(
    family: &DeformationFamily,
    force: &ForceField,
    mass: f64,
    probe_times: &[f64],
) -> Result<EqualityReport> {
    let result = solve_match(family, force, mass)?;
    let tf = result.tf.ok_or(Error::NoMatch(family.id()))?;
    let [f1, f2, f3] = force.0;
    let kappa = family.kappa();
    let expected = |t: f64| -> Vec3 {
        match (result.kind, family.id()) {
            (MatchKind::Quadratic, _) => [f1 - mass * kappa / 2.0 * f2, f2 + mass * kappa / 2.0 * f1, f3],
            (MatchKind::Cubic, id) => {
                let k = if id == FamilyId::K3 { kappa } else { 0.5 * kappa };
                [f1 - mass * k * f2 * t, f2 + mass * k * f1 * t, f3]
            }
            _ => force.0,
        }
    };

    let mut report = EqualityReport {
        family: *family,
        kind: result.kind,
        probe_count: probe_times.len(),
        max_g_deviation: 0.0,
        max_h_deviation: 0.0,
        max_gh_gap: 0.0,
    };
    for &t in probe_times {
        ensure_finite("probe time", t)?;
        let g = deformation_force(Some(family), force, mass, t);
        let h = classical::generated_force_h(t, &tf, force, mass)?;
        let e = expected(t);
        for i in 0..3 {
            report.max_g_deviation = report.max_g_deviation.max((g[i] - e[i]).abs());
            report.max_h_deviation = report.max_h_deviation.max((h[i] - e[i]).abs());
            report.max_gh_gap = report.max_gh_gap.max((g[i] - h[i]).abs());
        }
    }
    Ok(report)
}

/// Forces with `F = 0`: the deformation generates nothing, while the
/// transformation still generates `m ä`.
pub fn zero_force_contrast(
    family: &DeformationFamily,
    tf: &TransformFamily,
    mass: f64,
    t: f64,
) -> Result<(Vec3, Vec3)> {
    ensure_finite("t", t)?;
    check_mass(mass)?;
    let g = deformation_force(Some(family), &ForceField::ZERO, mass, t);
    let h = classical::generated_force_h(t, tf, &ForceField::ZERO, mass)?;
    Ok((g, h))
}

/// Untransformed initial data for the transformation treatment so that its
/// trajectory starts where the deformed one does: `x0_B = x0 − a(0)` and
/// `v0_B = ẋ_A(0) − ȧ(0)`, with `ẋ_A(0)` the deformed initial velocity.
pub fn aligned_classical_scenario(deformed: &Scenario, tf: &TransformFamily) -> Result<Scenario> {
    deformed.validate()?;
    let t0 = deformed.t0();
    let rate = dynamics::eom_rhs(&deformed.initial, deformed);
    let a = tf.a_vec(t0);
    let a_dot = tf.a_dot_vec(t0);
    let x0: Vec3 = std::array::from_fn(|i| deformed.x0()[i] - a[i]);
    let v0: Vec3 = std::array::from_fn(|i| rate.x_dot[i] - a_dot[i]);
    Scenario::from_velocity(deformed.mass, deformed.force, None, x0, v0, (t0, deformed.t_end), deformed.step)
}

/// Largest distance between the closed-form deformed trajectory and the
/// closed-form transformed trajectory with aligned initial data.
pub fn trajectory_gap(deformed: &Scenario, tf: &TransformFamily, times: &[f64]) -> Result<f64> {
    let classical_side = aligned_classical_scenario(deformed, tf)?;
    let mut gap: f64 = 0.0;
    for &t in times {
        let xa = dynamics::analytic_solution_nc(t, deformed)?;
        let xb = classical::analytic_solution_cl(t, tf, &classical_side)?;
        gap = gap.max(distance(&xa, &xb));
    }
    Ok(gap)
}

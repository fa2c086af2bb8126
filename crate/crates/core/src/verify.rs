//! Self-check suite: deformed bracket relations, Jacobi identity, and the
//! `τ → ∞` contraction of both `f(t)` and `a(t)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classical::{Axis, AxisCoefficients, TransformFamily};
use crate::deformation::{DeformationFamily, FamilyId, Tau};
use crate::error::Result;
use crate::phase_space::{self, SampleBox, REL_X1_X2};

/// Bracket relations that involve `f(t)`, scaled by `max(1, |f|)`.
pub const BRACKET_F_TOL: f64 = 1e-6;
/// Undeformed bracket relations, absolute.
pub const BRACKET_CANONICAL_TOL: f64 = 1e-8;
/// Cyclic Jacobi sum, absolute.
pub const JACOBI_TOL: f64 = 1e-4;
/// Accepted band for the gap ratio when `τ` doubles.
pub const CONTRACTION_BAND: (f64, f64) = (3.5, 4.5);

/// The finite `τ` values paired with each family in the standard sweep.
pub const STANDARD_TAUS: [f64; 2] = [1.0, 10.0];

/// Every family at each of [`STANDARD_TAUS`] followed by its polynomial limit.
pub fn standard_families(kappa: f64) -> Vec<DeformationFamily> {
    let mut out = Vec::with_capacity(FamilyId::ALL.len() * (STANDARD_TAUS.len() + 1));
    for id in FamilyId::ALL {
        for tau in STANDARD_TAUS {
            out.push(DeformationFamily::hyperbolic(id, kappa, tau).expect("standard family"));
        }
        out.push(DeformationFamily::limit(id, kappa).expect("standard family"));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub kappa: f64,
    pub samples: usize,
    pub seed: u64,
    pub domain: SampleBox,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { kappa: 1.0, samples: 100, seed: 0x5eed, domain: SampleBox::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable acceptance condition, e.g. `<= 1e-8`.
    pub bound: String,
    pub passed: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:<44} {:>12.4e}  ({})", self.name, self.value, self.bound)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn upper(name: String, value: f64, tol: f64) -> Check {
    Check { name, value, bound: format!("<= {tol:e}"), passed: value <= tol }
}

fn band(name: String, value: f64) -> Check {
    let (lo, hi) = CONTRACTION_BAND;
    Check { name, value, bound: format!("in [{lo}, {hi}]"), passed: (lo..=hi).contains(&value) }
}

fn label(family: &DeformationFamily) -> String {
    format!("{}/tau={}", family.id(), family.tau())
}

/// Gap ratio `|f_τ − f_∞| / |f_2τ − f_∞|` at time `t`.
pub fn f_contraction_ratio(id: FamilyId, kappa: f64, tau: f64, t: f64) -> Result<f64> {
    let limit = DeformationFamily::limit(id, kappa)?.eval_f(t)?;
    let gap = |tau: f64| -> Result<f64> {
        Ok((DeformationFamily::hyperbolic(id, kappa, tau)?.eval_f(t)? - limit).abs())
    };
    Ok(gap(tau)? / gap(2.0 * tau)?)
}

/// Same ratio for `a(t)` on one axis.
pub fn a_contraction_ratio(coeffs: AxisCoefficients, tau: f64, t: f64) -> Result<f64> {
    let limit = TransformFamily::from_axes(coeffs, coeffs, Tau::Infinite).eval_a(Axis::One, t)?;
    let gap = |tau: f64| -> Result<f64> {
        let tf = TransformFamily::from_axes(coeffs, coeffs, Tau::finite(tau)?);
        Ok((tf.eval_a(Axis::One, t)? - limit).abs())
    };
    Ok(gap(tau)? / gap(2.0 * tau)?)
}

pub fn run_property_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let mut checks = Vec::new();
    let samples = config.domain.sample(config.samples, config.seed);

    for family in standard_families(config.kappa) {
        let report = phase_space::verify_bracket_relations(&family, &samples)?;
        for rel in &report.relations {
            let check = if rel.relation == REL_X1_X2 {
                upper(
                    format!("bracket {} {} (scaled)", label(&family), rel.relation),
                    rel.max_scaled_residual,
                    BRACKET_F_TOL,
                )
            } else {
                upper(
                    format!("bracket {} {}", label(&family), rel.relation),
                    rel.max_residual,
                    BRACKET_CANONICAL_TOL,
                )
            };
            checks.push(check);
        }
        let jacobi = phase_space::jacobi_scan(&family, &samples)?;
        checks.push(upper(format!("jacobi {}", label(&family)), jacobi.max_residual, JACOBI_TOL));
    }

    for id in FamilyId::ALL {
        let ratio = f_contraction_ratio(id, config.kappa, 100.0, 1.0)?;
        checks.push(band(format!("contraction f {id} tau 100->200"), ratio));
    }
    let coeffs = AxisCoefficients { a: 1.0, v: 1.0, b: 1.0, c: 1.0 };
    let ratio = a_contraction_ratio(coeffs, 100.0, 1.0)?;
    checks.push(band("contraction a(t) tau 100->200".to_string(), ratio));

    Ok(SuiteReport { config: *config, checks })
}

//! Particle in a constant force on the Bopp-represented deformed phase space.
//!
//! With `f = f(t)` the Hamiltonian becomes
//!
//! ```text
//! H = p²/2m − F·x + F₁ f/2 p₂ − F₂ f/2 p₁
//! ```
//!
//! whose canonical equations give `m ẍ = G(t)` with
//! `G = (F₁ − m ḟ/2 F₂, F₂ + m ḟ/2 F₁, F₃)`.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::classical::TransformFamily;
use crate::deformation::DeformationFamily;
use crate::error::{ensure_finite, Error, Result};
use crate::phase_space::PhaseState;
use crate::Vec3;

/// Constant external force.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ForceField(pub Vec3);

impl ForceField {
    pub const ZERO: ForceField = ForceField([0.0; 3]);

    pub fn new(components: Vec3) -> Result<Self> {
        for (i, c) in components.iter().enumerate() {
            ensure_finite(&format!("F{}", i + 1), *c)?;
        }
        Ok(Self(components))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.map(|c| c * factor))
    }
}

/// Everything needed to integrate one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub mass: f64,
    pub force: ForceField,
    /// `None` is the undeformed particle.
    pub family: Option<DeformationFamily>,
    /// Canonical state at the start time `initial.t`.
    pub initial: PhaseState,
    pub t_end: f64,
    pub step: f64,
}

impl Scenario {
    /// Build from initial position and velocity at `t0`; momenta are `m·v0`.
    pub fn from_velocity(
        mass: f64,
        force: ForceField,
        family: Option<DeformationFamily>,
        x0: Vec3,
        v0: Vec3,
        t_span: (f64, f64),
        step: f64,
    ) -> Result<Self> {
        let scenario = Self {
            mass,
            force,
            family,
            initial: PhaseState::new(t_span.0, x0, v0.map(|v| mass * v)),
            t_end: t_span.1,
            step,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {}", self.mass)));
        }
        ForceField::new(self.force.0).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        if !self.initial.is_finite() {
            return Err(Error::InvalidParameter("initial state must be finite".into()));
        }
        if !(self.t_end.is_finite() && self.t_end > self.initial.t) {
            return Err(Error::InvalidParameter(format!(
                "t_end ({}) must exceed the start time ({})",
                self.t_end, self.initial.t
            )));
        }
        if !(self.step.is_finite() && self.step > 0.0 && self.step <= self.t_end - self.initial.t) {
            return Err(Error::InvalidParameter(format!(
                "step must lie in (0, t_end - t0], got {}",
                self.step
            )));
        }
        if let Some(family) = &self.family {
            DeformationFamily::new(family.id(), family.kappa(), family.tau())?;
        }
        Ok(())
    }

    pub fn t0(&self) -> f64 {
        self.initial.t
    }

    pub fn x0(&self) -> Vec3 {
        self.initial.x
    }

    pub fn v0(&self) -> Vec3 {
        self.initial.p.map(|p| p / self.mass)
    }

    pub fn with_family(&self, family: Option<DeformationFamily>) -> Self {
        Self { family, ..*self }
    }

    fn f(&self, t: f64) -> f64 {
        self.family.map_or(0.0, |fam| fam.f(t))
    }
}

/// Which equations of motion to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Treatment {
    /// Bopp-represented deformed dynamics with the scenario's family.
    Noncommutative,
    /// Plain constant-force motion; any family on the scenario is ignored.
    Undeformed,
    /// Constant-force motion seen through `xᵢ → xᵢ + aᵢ(t)`. The scenario's
    /// `x0`, `v0` are the untransformed initial data.
    Transformed(TransformFamily),
}

impl Treatment {
    pub fn label(&self) -> &'static str {
        match self {
            Treatment::Noncommutative => "noncommutative",
            Treatment::Undeformed => "undeformed",
            Treatment::Transformed(_) => "transformed",
        }
    }
}

/// Time derivative of a phase state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseRate {
    pub x_dot: Vec3,
    pub p_dot: Vec3,
}

/// Bopp-represented Hamiltonian at `state`.
pub fn hamiltonian(state: &PhaseState, scenario: &Scenario) -> f64 {
    let m = scenario.mass;
    let [f1, f2, f3] = scenario.force.0;
    let PhaseState { x, p, t } = *state;
    let half_f = 0.5 * scenario.f(t);
    let kinetic = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) / (2.0 * m);
    let potential = f1 * x[0] + f2 * x[1] + f3 * x[2];
    kinetic - potential + f1 * half_f * p[1] - f2 * half_f * p[0]
}

/// Canonical equations of motion.
pub fn eom_rhs(state: &PhaseState, scenario: &Scenario) -> PhaseRate {
    let m = scenario.mass;
    let [f1, f2, f3] = scenario.force.0;
    let half_f = 0.5 * scenario.f(state.t);
    let p = state.p;
    PhaseRate { x_dot: [p[0] / m - half_f * f2, p[1] / m + half_f * f1, p[2] / m], p_dot: [f1, f2, f3] }
}

/// Effective force `G(t)` in `m ẍ = G`.
pub fn generated_force_g(t: f64, scenario: &Scenario) -> Result<Vec3> {
    ensure_finite("t", t)?;
    Ok(deformation_force(scenario.family.as_ref(), &scenario.force, scenario.mass, t))
}

pub(crate) fn deformation_force(
    family: Option<&DeformationFamily>,
    force: &ForceField,
    mass: f64,
    t: f64,
) -> Vec3 {
    let [f1, f2, f3] = force.0;
    let f_dot = family.map_or(0.0, |fam| fam.f_dot(t));
    let half = 0.5 * mass * f_dot;
    [f1 - half * f2, f2 + half * f1, f3]
}

/// Closed-form position for the deformed dynamics, starting at `t0 = 0`.
pub fn analytic_solution_nc(t: f64, scenario: &Scenario) -> Result<Vec3> {
    ensure_finite("t", t)?;
    if scenario.t0() != 0.0 {
        return Err(Error::UnsupportedOrigin { t0: scenario.t0() });
    }
    let m = scenario.mass;
    let [f1, f2, f3] = scenario.force.0;
    let x0 = scenario.x0();
    let v0 = scenario.v0();
    let int_f = scenario.family.map_or(0.0, |fam| fam.f_integral(t));
    let free = |i: usize, fi: f64| fi * t * t / (2.0 * m) + v0[i] * t + x0[i];
    Ok([free(0, f1) - 0.5 * f2 * int_f, free(1, f2) + 0.5 * f1 * int_f, free(2, f3)])
}

/// Sampled solution of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<PhaseState>,
    pub scenario: Scenario,
    pub treatment: Treatment,
}

pub const CSV_HEADER: &str = "t,x1,x2,x3,p1,p2,p3";

impl Trajectory {
    pub fn last(&self) -> &PhaseState {
        self.samples.last().expect("trajectory always holds the initial sample")
    }

    /// `t,x1,x2,x3,p1,p2,p3` with 17 significant digits, LF line endings.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for s in &self.samples {
            let row = [s.t, s.x[0], s.x[1], s.x[2], s.p[0], s.p[1], s.p[2]];
            let mut first = true;
            for v in row {
                if !first {
                    out.write_all(b",")?;
                }
                first = false;
                write!(out, "{v:.16e}")?;
            }
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }

    /// Largest Euclidean distance between positions of two trajectories
    /// sampled on the same grid.
    pub fn max_position_gap(&self, other: &Trajectory) -> Result<f64> {
        if self.samples.len() != other.samples.len() {
            return Err(Error::InvalidArgument(format!(
                "trajectories have different lengths ({} vs {})",
                self.samples.len(),
                other.samples.len()
            )));
        }
        Ok(self.samples.iter().zip(&other.samples).map(|(a, b)| distance(&a.x, &b.x)).fold(0.0, f64::max))
    }
}

pub(crate) fn distance(a: &Vec3, b: &Vec3) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
}

/// Fixed-step classic RK4 from `t0` to `t_end`.
pub fn integrate(scenario: &Scenario, treatment: Treatment) -> Result<Trajectory> {
    scenario.validate()?;
    let m = scenario.mass;
    let start = match treatment {
        Treatment::Noncommutative | Treatment::Undeformed => scenario.initial,
        Treatment::Transformed(tf) => {
            tf.validate()?;
            let t0 = scenario.t0();
            let a = tf.a_vec(t0);
            let a_dot = tf.a_dot_vec(t0);
            let mut s = scenario.initial;
            for i in 0..3 {
                s.x[i] += a[i];
                s.p[i] += m * a_dot[i];
            }
            if !s.is_finite() {
                return Err(Error::Divergence { t: t0 });
            }
            s
        }
    };

    let dynamics = match treatment {
        Treatment::Noncommutative => *scenario,
        _ => scenario.with_family(None),
    };
    let rhs = |t: f64, y: &[f64; 6]| -> [f64; 6] {
        let state = PhaseState::new(t, [y[0], y[1], y[2]], [y[3], y[4], y[5]]);
        let rate = eom_rhs(&state, &dynamics);
        let mut p_dot = rate.p_dot;
        if let Treatment::Transformed(tf) = &treatment {
            let acc = tf.a_ddot_vec(t);
            for i in 0..3 {
                p_dot[i] += m * acc[i];
            }
        }
        [rate.x_dot[0], rate.x_dot[1], rate.x_dot[2], p_dot[0], p_dot[1], p_dot[2]]
    };

    let samples = rk4_fixed(rhs, start, scenario.t_end, scenario.step)?;
    Ok(Trajectory { samples, scenario: *scenario, treatment })
}

/// Number of steps of size `step` covering `span`; a span that is an integer
/// multiple of the step up to rounding does not get a sliver step at the end.
fn step_count(span: f64, step: f64) -> usize {
    let n = span / step;
    let nearest = n.round();
    if (n - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest.max(1.0) as usize
    } else {
        n.ceil() as usize
    }
}

fn rk4_fixed<F>(rhs: F, start: PhaseState, t_end: f64, step: f64) -> Result<Vec<PhaseState>>
where
    F: Fn(f64, &[f64; 6]) -> [f64; 6],
{
    let t0 = start.t;
    let n = step_count(t_end - t0, step);
    let mut y = [start.x[0], start.x[1], start.x[2], start.p[0], start.p[1], start.p[2]];
    // Kahan compensation terms for the state accumulation
    let mut comp = [0.0; 6];
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(start);

    let mut t = t0;
    for k in 1..=n {
        let t_next = if k == n { t_end } else { t0 + k as f64 * step };
        let h = t_next - t;
        let half = 0.5 * h;
        let k1 = rhs(t, &y);
        let k2 = rhs(t + half, &axpy(&y, half, &k1));
        let k3 = rhs(t + half, &axpy(&y, half, &k2));
        let k4 = rhs(t_next, &axpy(&y, h, &k3));
        for i in 0..6 {
            let inc = h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) - comp[i];
            let sum = y[i] + inc;
            comp[i] = (sum - y[i]) - inc;
            y[i] = sum;
        }
        t = t_next;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { t });
        }
        samples.push(PhaseState::new(t, [y[0], y[1], y[2]], [y[3], y[4], y[5]]));
    }
    Ok(samples)
}

fn axpy(y: &[f64; 6], a: f64, k: &[f64; 6]) -> [f64; 6] {
    std::array::from_fn(|i| y[i] + a * k[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::FamilyId;

    fn scenario(force: Vec3, family: Option<DeformationFamily>, x0: Vec3, v0: Vec3) -> Scenario {
        Scenario::from_velocity(1.0, ForceField(force), family, x0, v0, (0.0, 10.0), 1e-3).unwrap()
    }

    #[test]
    fn free_particle_hamiltonian_is_kinetic() {
        let sc = scenario([0.0; 3], None, [0.0; 3], [0.0; 3]);
        let s = PhaseState::new(0.0, [3.0, 1.0, -2.0], [1.0, 2.0, 2.0]);
        assert_eq!(hamiltonian(&s, &sc), 4.5);
    }

    #[test]
    fn hamiltonian_k2_by_hand() {
        let fam = DeformationFamily::limit(FamilyId::K2, 2.0).unwrap();
        let sc = scenario([1.0, 0.0, 0.0], Some(fam), [0.0; 3], [0.0; 3]);
        let s = PhaseState::new(1.0, [0.0; 3], [0.0, 1.0, 0.0]);
        assert_eq!(hamiltonian(&s, &sc), 1.5);
    }

    #[test]
    fn zero_kappa_hamiltonian_is_undeformed() {
        let fam = DeformationFamily::hyperbolic(FamilyId::K5, 0.0, 2.0).unwrap();
        let deformed = scenario([0.3, -0.7, 1.1], Some(fam), [0.0; 3], [0.0; 3]);
        let plain = deformed.with_family(None);
        let s = PhaseState::new(2.5, [1.0, 2.0, 3.0], [-1.0, 0.5, 0.25]);
        assert_eq!(hamiltonian(&s, &deformed), hamiltonian(&s, &plain));
    }

    #[test]
    fn eom_k1_drift() {
        let theta = 0.4;
        let fam = DeformationFamily::limit(FamilyId::K1, theta).unwrap();
        let sc = scenario([0.0, 2.0, 0.0], Some(fam), [0.0; 3], [0.0; 3]);
        let rate = eom_rhs(&PhaseState::new(3.0, [0.0; 3], [0.0; 3]), &sc);
        assert_eq!(rate.x_dot[0], -theta * 2.0 / 2.0);
        assert_eq!(rate.p_dot, [0.0, 2.0, 0.0]);
    }

    #[test]
    fn eom_axis3_force_invisible_to_deformation() {
        let fam = DeformationFamily::hyperbolic(FamilyId::K4, 1.0, 1.0).unwrap();
        let sc = scenario([0.0, 0.0, 5.0], Some(fam), [0.0; 3], [0.0; 3]);
        let s = PhaseState::new(1.2, [0.0; 3], [1.5, -2.0, 0.5]);
        let rate = eom_rhs(&s, &sc);
        assert_eq!(rate.x_dot, [1.5, -2.0, 0.5]);
    }

    #[test]
    fn g_reduces_to_f() {
        let fam = DeformationFamily::hyperbolic(FamilyId::K3, 0.0, 1.0).unwrap();
        let sc = scenario([0.2, 0.3, 0.4], Some(fam), [0.0; 3], [0.0; 3]);
        assert_eq!(generated_force_g(4.0, &sc).unwrap(), [0.2, 0.3, 0.4]);

        let k = DeformationFamily::limit(FamilyId::K6, 3.0).unwrap();
        let sc = scenario([0.0; 3], Some(k), [0.0; 3], [0.0; 3]);
        assert_eq!(generated_force_g(2.0, &sc).unwrap(), [0.0; 3]);
    }

    #[test]
    fn g_k2_constant_offset() {
        let k = DeformationFamily::limit(FamilyId::K2, 0.5).unwrap();
        let sc = scenario([1.0, 2.0, 0.0], Some(k), [0.0; 3], [0.0; 3]);
        for t in [0.0, 1.0, 9.0] {
            let g = generated_force_g(t, &sc).unwrap();
            assert_eq!(g[0], 1.0 - 0.5 * 2.0 / 2.0);
            assert_eq!(g[1], 2.0 + 0.5 * 1.0 / 2.0);
        }
    }

    #[test]
    fn straight_line_motion() {
        let sc = scenario([0.0; 3], None, [1.0, -2.0, 0.5], [0.3, 0.1, -0.2]);
        let traj = integrate(&sc, Treatment::Noncommutative).unwrap();
        for s in &traj.samples {
            for i in 0..3 {
                let expect = sc.x0()[i] + sc.v0()[i] * s.t;
                assert!((s.x[i] - expect).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn lands_exactly_on_end_time() {
        let mut sc = scenario([0.0; 3], None, [0.0; 3], [0.0; 3]);
        sc.step = 0.3;
        sc.t_end = 1.0;
        let traj = integrate(&sc, Treatment::Undeformed).unwrap();
        let times: Vec<f64> = traj.samples.iter().map(|s| s.t).collect();
        assert_eq!(times.len(), 5);
        assert_eq!(*times.last().unwrap(), 1.0);
        assert!(times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(traj.samples[0], sc.initial);
    }

    #[test]
    fn analytic_initial_value_and_k2_form() {
        let k = DeformationFamily::limit(FamilyId::K2, 0.8).unwrap();
        let sc = scenario([0.5, -1.5, 0.0], Some(k), [0.0; 3], [0.0; 3]);
        let t = 2.0;
        let x = analytic_solution_nc(t, &sc).unwrap();
        assert!((x[0] - (0.5 * t * t / 2.0 - (-1.5) * 0.8 * t * t / 4.0)).abs() < 1e-14);

        let sc = scenario([0.5, -1.5, 2.0], Some(k), [1.0, 2.0, 3.0], [4.0, 5.0, 6.0]);
        assert_eq!(analytic_solution_nc(0.0, &sc).unwrap(), [1.0, 2.0, 3.0]);
    }

    #[test]
    fn analytic_requires_zero_origin() {
        let sc = Scenario::from_velocity(1.0, ForceField::ZERO, None, [0.0; 3], [0.0; 3], (1.0, 2.0), 0.1)
            .unwrap();
        assert_eq!(analytic_solution_nc(1.5, &sc), Err(Error::UnsupportedOrigin { t0: 1.0 }));
    }

    #[test]
    fn scenario_validation() {
        let ok = |m: f64, span: (f64, f64), step: f64| {
            Scenario::from_velocity(m, ForceField::ZERO, None, [0.0; 3], [0.0; 3], span, step).is_ok()
        };
        assert!(ok(1.0, (0.0, 1.0), 0.1));
        assert!(!ok(0.0, (0.0, 1.0), 0.1));
        assert!(!ok(-1.0, (0.0, 1.0), 0.1));
        assert!(!ok(1.0, (1.0, 1.0), 0.1));
        assert!(!ok(1.0, (0.0, 1.0), 2.0));
        assert!(!ok(1.0, (0.0, 1.0), 0.0));
        assert!(ForceField::new([0.0, f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn divergence_reports_time() {
        let fam = DeformationFamily::hyperbolic(FamilyId::K4, 1.0, 1e-2).unwrap();
        let sc = scenario([1.0, 1.0, 0.0], Some(fam), [0.0; 3], [0.0; 3]);
        match integrate(&sc, Treatment::Noncommutative) {
            Err(Error::Divergence { t }) => assert!(t > 0.0 && t < 10.0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn csv_layout() {
        let mut sc = scenario([0.0; 3], None, [0.0; 3], [1.0, 0.0, 0.0]);
        sc.t_end = 0.002;
        let csv = integrate(&sc, Treatment::Undeformed).unwrap().to_csv_string();
        let lines: Vec<&str> = csv.split('\n').collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[4], "");
        assert_eq!(
            lines[1],
            "0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0,\
             1.0000000000000000e0,0.0000000000000000e0,0.0000000000000000e0"
        );
        assert!(!csv.contains('\r'));
    }
}

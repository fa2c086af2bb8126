//! Time-dependent translations `xᵢ → xᵢ + aᵢ(t)` of the doubly enlarged
//! Newton-Hooke group, and the force `H(t) = F + m ä(t)` they induce.
//!
//! ```text
//! a(t) = a cosh(t/τ) + v τ sinh(t/τ) + 2b τ² (cosh(t/τ) − 1) + 6c τ³ (sinh(t/τ) − t/τ)
//! a(t) = a + v t + b t² + c t³                                    (τ → ∞)
//! ```
//!
//! Only axes 1 and 2 are transformed; `a₃ ≡ 0`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::deformation::Tau;
use crate::dynamics::{ForceField, Scenario};
use crate::error::{ensure_finite, Error, Result};
use crate::hyperbolic::{cosh_m1, sinh_m_id};
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    One,
    Two,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::One, Axis::Two];

    pub fn from_index(axis: usize) -> Result<Self> {
        match axis {
            1 => Ok(Axis::One),
            2 => Ok(Axis::Two),
            _ => Err(Error::InvalidArgument(format!("transform axis must be 1 or 2, got {axis}"))),
        }
    }
}

/// Translation coefficients for axes 1 and 2 plus `τ`.
///
/// Serializes as a flat record `a1, a2, v1, v2, b1, b2, c1, c2, tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTransform")]
pub struct TransformFamily {
    pub a1: f64,
    pub a2: f64,
    pub v1: f64,
    pub v2: f64,
    pub b1: f64,
    pub b2: f64,
    pub c1: f64,
    pub c2: f64,
    pub tau: Tau,
}

#[derive(Deserialize)]
struct RawTransform {
    #[serde(default)]
    a1: f64,
    #[serde(default)]
    a2: f64,
    #[serde(default)]
    v1: f64,
    #[serde(default)]
    v2: f64,
    #[serde(default)]
    b1: f64,
    #[serde(default)]
    b2: f64,
    #[serde(default)]
    c1: f64,
    #[serde(default)]
    c2: f64,
    tau: Tau,
}

impl TryFrom<RawTransform> for TransformFamily {
    type Error = Error;

    fn try_from(r: RawTransform) -> Result<Self> {
        let tf = TransformFamily {
            a1: r.a1,
            a2: r.a2,
            v1: r.v1,
            v2: r.v2,
            b1: r.b1,
            b2: r.b2,
            c1: r.c1,
            c2: r.c2,
            tau: r.tau,
        };
        tf.validate()?;
        Ok(tf)
    }
}

/// Per-axis coefficients `(a, v, b, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AxisCoefficients {
    pub a: f64,
    pub v: f64,
    pub b: f64,
    pub c: f64,
}

impl TransformFamily {
    pub fn zero(tau: Tau) -> Self {
        Self::from_axes(AxisCoefficients::default(), AxisCoefficients::default(), tau)
    }

    pub fn from_axes(one: AxisCoefficients, two: AxisCoefficients, tau: Tau) -> Self {
        Self { a1: one.a, a2: two.a, v1: one.v, v2: two.v, b1: one.b, b2: two.b, c1: one.c, c2: two.c, tau }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.named_coefficients() {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("transform coefficient {name} must be finite")));
            }
        }
        self.tau.validate()
    }

    pub fn named_coefficients(&self) -> [(&'static str, f64); 8] {
        [
            ("a1", self.a1),
            ("a2", self.a2),
            ("v1", self.v1),
            ("v2", self.v2),
            ("b1", self.b1),
            ("b2", self.b2),
            ("c1", self.c1),
            ("c2", self.c2),
        ]
    }

    pub fn axis(&self, axis: Axis) -> AxisCoefficients {
        match axis {
            Axis::One => AxisCoefficients { a: self.a1, v: self.v1, b: self.b1, c: self.c1 },
            Axis::Two => AxisCoefficients { a: self.a2, v: self.v2, b: self.b2, c: self.c2 },
        }
    }

    /// Pure Galilean translation: no acceleration or jerk coefficients.
    pub fn is_galilean(&self) -> bool {
        self.b1 == 0.0 && self.b2 == 0.0 && self.c1 == 0.0 && self.c2 == 0.0
    }

    /// `aᵢ(t)`.
    pub fn eval_a(&self, axis: Axis, t: f64) -> Result<f64> {
        ensure_finite("t", t)?;
        Ok(self.a(axis, t))
    }

    /// `ȧᵢ(t)`.
    pub fn eval_a_dot(&self, axis: Axis, t: f64) -> Result<f64> {
        ensure_finite("t", t)?;
        Ok(self.a_dot(axis, t))
    }

    /// `äᵢ(t)`, exact.
    pub fn eval_a_ddot(&self, axis: Axis, t: f64) -> Result<f64> {
        ensure_finite("t", t)?;
        Ok(self.a_ddot(axis, t))
    }

    pub(crate) fn a(&self, axis: Axis, t: f64) -> f64 {
        let AxisCoefficients { a, v, b, c } = self.axis(axis);
        match self.tau {
            Tau::Infinite => a + v * t + b * t * t + c * t * t * t,
            Tau::Finite(tau) => {
                let u = t / tau;
                a * u.cosh()
                    + v * tau * u.sinh()
                    + 2.0 * b * tau * tau * cosh_m1(u)
                    + 6.0 * c * tau.powi(3) * sinh_m_id(u)
            }
        }
    }

    pub(crate) fn a_dot(&self, axis: Axis, t: f64) -> f64 {
        let AxisCoefficients { a, v, b, c } = self.axis(axis);
        match self.tau {
            Tau::Infinite => v + 2.0 * b * t + 3.0 * c * t * t,
            Tau::Finite(tau) => {
                let u = t / tau;
                let s = u.sinh();
                a / tau * s + v * u.cosh() + 2.0 * b * tau * s + 6.0 * c * tau * tau * cosh_m1(u)
            }
        }
    }

    pub(crate) fn a_ddot(&self, axis: Axis, t: f64) -> f64 {
        let AxisCoefficients { a, v, b, c } = self.axis(axis);
        match self.tau {
            Tau::Infinite => 2.0 * b + 6.0 * c * t,
            Tau::Finite(tau) => {
                let u = t / tau;
                let (s, ch) = (u.sinh(), u.cosh());
                a / (tau * tau) * ch + v / tau * s + 2.0 * b * ch + 6.0 * c * tau * s
            }
        }
    }

    pub(crate) fn a_vec(&self, t: f64) -> Vec3 {
        [self.a(Axis::One, t), self.a(Axis::Two, t), 0.0]
    }

    pub(crate) fn a_dot_vec(&self, t: f64) -> Vec3 {
        [self.a_dot(Axis::One, t), self.a_dot(Axis::Two, t), 0.0]
    }

    pub(crate) fn a_ddot_vec(&self, t: f64) -> Vec3 {
        [self.a_ddot(Axis::One, t), self.a_ddot(Axis::Two, t), 0.0]
    }
}

impl fmt::Display for TransformFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, v) in self.named_coefficients() {
            write!(f, "{name}={v} ")?;
        }
        write!(f, "tau={}", self.tau)
    }
}

/// Effective force `H(t)` in the transformed Newton law.
pub fn generated_force_h(t: f64, tf: &TransformFamily, force: &ForceField, mass: f64) -> Result<Vec3> {
    ensure_finite("t", t)?;
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
    }
    let acc = tf.a_ddot_vec(t);
    let [f1, f2, f3] = force.0;
    Ok([f1 + mass * acc[0], f2 + mass * acc[1], f3])
}

/// Closed-form position in transformed coordinates, starting at `t0 = 0`.
/// `x0` and `v0` of the scenario are the untransformed initial data.
pub fn analytic_solution_cl(t: f64, tf: &TransformFamily, scenario: &Scenario) -> Result<Vec3> {
    ensure_finite("t", t)?;
    if scenario.t0() != 0.0 {
        return Err(Error::UnsupportedOrigin { t0: scenario.t0() });
    }
    let m = scenario.mass;
    let x0 = scenario.x0();
    let v0 = scenario.v0();
    let shift = tf.a_vec(t);
    Ok(std::array::from_fn(|i| scenario.force.0[i] * t * t / (2.0 * m) + v0[i] * t + x0[i] + shift[i]))
}

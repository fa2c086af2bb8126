//! The six time-dependent noncommutativity functions `f(t)`.
//!
//! Each family carries a deformation parameter `κ` and a cosmological time
//! `τ`. Finite `τ` selects the hyperbolic (Newton-Hooke) form; [`Tau::Infinite`]
//! selects the polynomial form reached in the contraction `τ → ∞`. The limit
//! is a separate variant rather than a large float because `cosh(t/τ)` at
//! `τ = 1e300` rounds the polynomial content away.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ensure_finite, Error, Result};
use crate::hyperbolic::{cosh_m1, cosh_m1_sq_integral, sinh_m_id};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyId {
    K1,
    K2,
    K3,
    K4,
    K5,
    K6,
}

impl FamilyId {
    pub const ALL: [FamilyId; 6] =
        [FamilyId::K1, FamilyId::K2, FamilyId::K3, FamilyId::K4, FamilyId::K5, FamilyId::K6];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyId::K1 => "k1",
            FamilyId::K2 => "k2",
            FamilyId::K3 => "k3",
            FamilyId::K4 => "k4",
            FamilyId::K5 => "k5",
            FamilyId::K6 => "k6",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FamilyId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown family `{s}` (expected k1..k6)")))
    }
}

/// Cosmological time constant.
///
/// Serializes as a positive number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tau {
    Finite(f64),
    Infinite,
}

impl Tau {
    pub fn finite(tau: f64) -> Result<Self> {
        if tau.is_finite() && tau > 0.0 {
            Ok(Tau::Finite(tau))
        } else {
            Err(Error::InvalidParameter(format!("tau must be a positive finite number, got {tau}")))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Tau::Infinite)
    }

    pub(crate) fn validate(self) -> Result<()> {
        match self {
            Tau::Finite(t) => Tau::finite(t).map(|_| ()),
            Tau::Infinite => Ok(()),
        }
    }
}

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tau::Finite(t) => write!(f, "{t}"),
            Tau::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Tau {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") {
            return Ok(Tau::Infinite);
        }
        let v: f64 = s.parse().map_err(|_| Error::InvalidArgument(format!("cannot parse tau `{s}`")))?;
        if v == f64::INFINITY {
            Ok(Tau::Infinite)
        } else {
            Tau::finite(v)
        }
    }
}

impl Serialize for Tau {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Tau::Finite(t) => serializer.serialize_f64(*t),
            Tau::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Tau {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        let tau = match Raw::deserialize(deserializer)? {
            Raw::Num(v) if v == f64::INFINITY => Ok(Tau::Infinite),
            Raw::Num(v) => Tau::finite(v),
            Raw::Str(s) => s.parse(),
        };
        tau.map_err(serde::de::Error::custom)
    }
}

/// One of the six deformation families with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily")]
pub struct DeformationFamily {
    id: FamilyId,
    kappa: f64,
    tau: Tau,
}

#[derive(Deserialize)]
struct RawFamily {
    id: FamilyId,
    kappa: f64,
    tau: Tau,
}

impl TryFrom<RawFamily> for DeformationFamily {
    type Error = Error;

    fn try_from(raw: RawFamily) -> Result<Self> {
        DeformationFamily::new(raw.id, raw.kappa, raw.tau)
    }
}

impl DeformationFamily {
    pub fn new(id: FamilyId, kappa: f64, tau: Tau) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::InvalidParameter(format!("kappa must be finite, got {kappa}")));
        }
        tau.validate()?;
        Ok(Self { id, kappa, tau })
    }

    /// Polynomial (τ → ∞) form of a family.
    pub fn limit(id: FamilyId, kappa: f64) -> Result<Self> {
        Self::new(id, kappa, Tau::Infinite)
    }

    pub fn hyperbolic(id: FamilyId, kappa: f64, tau: f64) -> Result<Self> {
        Self::new(id, kappa, Tau::finite(tau)?)
    }

    pub fn id(&self) -> FamilyId {
        self.id
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn tau(&self) -> Tau {
        self.tau
    }

    /// Same family with a different `τ`.
    pub fn with_tau(&self, tau: Tau) -> Result<Self> {
        Self::new(self.id, self.kappa, tau)
    }

    /// The family's contraction limit. Idempotent on limit families.
    pub fn limit_form(&self) -> Self {
        Self { tau: Tau::Infinite, ..*self }
    }

    /// `f(t)`.
    pub fn eval_f(&self, t: f64) -> Result<f64> {
        ensure_finite("t", t)?;
        Ok(self.f(t))
    }

    /// `ḟ(t)`, the exact analytic derivative.
    pub fn eval_f_dot(&self, t: f64) -> Result<f64> {
        ensure_finite("t", t)?;
        Ok(self.f_dot(t))
    }

    /// `∫₀ᵗ f(s) ds` in closed form.
    pub fn eval_f_integral(&self, t: f64) -> Result<f64> {
        ensure_finite("t", t)?;
        Ok(self.f_integral(t))
    }

    pub(crate) fn f(&self, t: f64) -> f64 {
        let k = self.kappa;
        if k == 0.0 {
            return 0.0;
        }
        match self.tau {
            Tau::Infinite => match self.id {
                FamilyId::K1 => k,
                FamilyId::K2 => k * t,
                FamilyId::K3 => k * t * t,
                FamilyId::K4 => k * t.powi(4),
                FamilyId::K5 => 0.5 * k * t * t,
                FamilyId::K6 => 0.5 * k * t.powi(3),
            },
            Tau::Finite(tau) => {
                let u = t / tau;
                let (s, c) = (u.sinh(), u.cosh());
                match self.id {
                    FamilyId::K1 => k * c * c,
                    FamilyId::K2 => k * tau * c * s,
                    FamilyId::K3 => k * tau * tau * s * s,
                    FamilyId::K4 => {
                        let d = cosh_m1(u);
                        4.0 * k * tau.powi(4) * d * d
                    }
                    FamilyId::K5 => k * tau * tau * cosh_m1(u) * c,
                    FamilyId::K6 => k * tau.powi(3) * cosh_m1(u) * s,
                }
            }
        }
    }

    pub(crate) fn f_dot(&self, t: f64) -> f64 {
        let k = self.kappa;
        if k == 0.0 {
            return 0.0;
        }
        match self.tau {
            Tau::Infinite => match self.id {
                FamilyId::K1 => 0.0,
                FamilyId::K2 => k,
                FamilyId::K3 => 2.0 * k * t,
                FamilyId::K4 => 4.0 * k * t.powi(3),
                FamilyId::K5 => k * t,
                FamilyId::K6 => 1.5 * k * t * t,
            },
            Tau::Finite(tau) => {
                let u = t / tau;
                let (s, c) = (u.sinh(), u.cosh());
                match self.id {
                    FamilyId::K1 => 2.0 * k * s * c / tau,
                    FamilyId::K2 => k * (c * c + s * s),
                    FamilyId::K3 => 2.0 * k * tau * s * c,
                    FamilyId::K4 => 8.0 * k * tau.powi(3) * cosh_m1(u) * s,
                    FamilyId::K5 => k * tau * s * (1.0 + 2.0 * cosh_m1(u)),
                    FamilyId::K6 => k * tau * tau * (s * s + cosh_m1(u) * c),
                }
            }
        }
    }

    pub(crate) fn f_integral(&self, t: f64) -> f64 {
        let k = self.kappa;
        if k == 0.0 {
            return 0.0;
        }
        match self.tau {
            Tau::Infinite => match self.id {
                FamilyId::K1 => k * t,
                FamilyId::K2 => 0.5 * k * t * t,
                FamilyId::K3 => k * t.powi(3) / 3.0,
                FamilyId::K4 => k * t.powi(5) / 5.0,
                FamilyId::K5 => k * t.powi(3) / 6.0,
                FamilyId::K6 => k * t.powi(4) / 8.0,
            },
            Tau::Finite(tau) => {
                let u = t / tau;
                match self.id {
                    FamilyId::K1 => k * 0.5 * (t + tau * u.sinh() * u.cosh()),
                    FamilyId::K2 => {
                        let s = u.sinh();
                        0.5 * k * tau * tau * s * s
                    }
                    FamilyId::K3 => 0.25 * k * tau.powi(3) * sinh_m_id(2.0 * u),
                    FamilyId::K4 => 4.0 * k * tau.powi(5) * cosh_m1_sq_integral(u),
                    FamilyId::K5 => k * tau.powi(3) * (0.25 * sinh_m_id(2.0 * u) - sinh_m_id(u)),
                    FamilyId::K6 => {
                        let d = cosh_m1(u);
                        0.5 * k * tau.powi(4) * d * d
                    }
                }
            }
        }
    }
}

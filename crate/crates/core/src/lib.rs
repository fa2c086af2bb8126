//! Time-dependent force terms for a particle in a constant external force.
//!
//! Two mechanisms are modelled side by side:
//!
//! * a noncommutative phase space `{x̄₁, x̄₂} = f(t)` realised through a Bopp
//!   shift onto canonical coordinates ([`deformation`], [`phase_space`],
//!   [`dynamics`]), which produces the force `G(t)`;
//! * a time-dependent translation `xᵢ → xᵢ + aᵢ(t)` drawn from the doubly
//!   enlarged Newton-Hooke family ([`classical`]), which produces `H(t)`.
//!
//! [`matching`] decides when `G ≡ H` and solves for the transformation
//! coefficients that make the two coincide.

pub mod classical;
pub mod deformation;
pub mod dynamics;
pub mod error;
pub mod hyperbolic;
pub mod matching;
pub mod phase_space;
pub mod verify;

pub use classical::TransformFamily;
pub use deformation::{DeformationFamily, FamilyId, Tau};
pub use dynamics::{ForceField, Scenario, Trajectory, Treatment};
pub use error::{Error, Result};
pub use matching::{MatchKind, MatchResult};
pub use phase_space::{NcCoordinate, NcCoordinates, PhaseState};

/// Cartesian 3-vector.
pub type Vec3 = [f64; 3];

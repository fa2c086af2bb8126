//! Shared fixtures for the criterion benches.

use nhforce_core::{DeformationFamily, FamilyId, ForceField, Scenario};

/// Hyperbolic family at `τ = 2` with unit `κ`.
pub fn family(id: FamilyId) -> DeformationFamily {
    DeformationFamily::hyperbolic(id, 1.0, 2.0).expect("valid family")
}

/// Unit-mass particle over `[0, t_end]` with a force in the deformed plane.
pub fn scenario(id: FamilyId, t_end: f64, step: f64) -> Scenario {
    Scenario::from_velocity(
        1.0,
        ForceField([0.6, -0.8, 0.1]),
        Some(family(id)),
        [0.5, -0.25, 1.0],
        [0.1, 0.2, -0.3],
        (0.0, t_end),
        step,
    )
    .expect("valid scenario")
}

mod common;

use common::{adaptive_simpson, dist, norm, second_diff};
use nhforce_core::dynamics::{analytic_solution_nc, generated_force_g, integrate};
use nhforce_core::verify::standard_families;
use nhforce_core::{DeformationFamily, FamilyId, ForceField, Scenario, Tau, Treatment, Vec3};
use proptest::prelude::*;

const X0: Vec3 = [0.3, -0.7, 1.1];
const V0: Vec3 = [-0.4, 0.9, 0.25];
const FORCE: Vec3 = [0.8, -0.6, 0.5];

fn scenario(family: Option<DeformationFamily>, t_end: f64, step: f64) -> Scenario {
    Scenario::from_velocity(1.0, ForceField(FORCE), family, X0, V0, (0.0, t_end), step).unwrap()
}

/// Closed form built from quadrature of `f`, independent of the crate's solver.
fn quadrature_position(s: &Scenario, t: f64) -> Vec3 {
    let fam = s.family.unwrap();
    let g = |u: f64| fam.eval_f(u).unwrap();
    let scale = 1.0 + adaptive_simpson(&g, 0.0, t, 1e-6).abs();
    let int_f = adaptive_simpson(&g, 0.0, t, 1e-14 * scale);
    let (m, f, x0, v0) = (s.mass, s.force.0, s.x0(), s.v0());
    let free: Vec3 = std::array::from_fn(|i| x0[i] + v0[i] * t + f[i] * t * t / (2.0 * m));
    [free[0] - 0.5 * f[1] * int_f, free[1] + 0.5 * f[0] * int_f, free[2]]
}

#[test]
fn closed_form_agrees_with_quadrature_oracle() {
    for fam in standard_families(0.9) {
        let s = scenario(Some(fam), 10.0, 1e-3);
        for t in [0.0, 0.37, 2.5, 6.0, 10.0] {
            let exact = analytic_solution_nc(t, &s).unwrap();
            let oracle = quadrature_position(&s, t);
            assert!(dist(&exact, &oracle) <= 1e-10 * norm(&oracle).max(1.0), "{fam:?} t={t}");
        }
    }
}

#[test]
fn rk4_reproduces_closed_form_for_every_family() {
    for fam in standard_families(1.0) {
        let s = scenario(Some(fam), 10.0, 1e-3);
        let traj = integrate(&s, Treatment::Noncommutative).unwrap();
        assert_eq!(traj.samples.len(), 10_001);
        for state in &traj.samples {
            let exact = analytic_solution_nc(state.t, &s).unwrap();
            let err = dist(&state.x, &exact);
            assert!(err <= 1e-8 * norm(&exact).max(1.0), "{fam:?} t={} err={err:e}", state.t);
        }
    }
}

#[test]
fn newton_law_holds_along_trajectories() {
    let h = 1e-3;
    for fam in standard_families(1.0) {
        let s = scenario(Some(fam), 10.0, h);
        let traj = integrate(&s, Treatment::Noncommutative).unwrap();
        for k in (1..traj.samples.len() - 1).step_by(97) {
            let t = traj.samples[k].t;
            let g = generated_force_g(t, &s).unwrap();
            for (i, &gi) in g.iter().enumerate() {
                let acc = (traj.samples[k + 1].x[i] - 2.0 * traj.samples[k].x[i] + traj.samples[k - 1].x[i])
                    / (h * h);
                let want = gi / s.mass;
                assert!((acc - want).abs() <= 1e-4 * (1.0 + want.abs()), "{fam:?} t={t} axis {i}");
            }
        }
    }
}

#[test]
fn closed_form_satisfies_newton_law() {
    for fam in standard_families(0.7) {
        let s = scenario(Some(fam), 5.0, 1e-2);
        for t in [0.5, 1.7, 3.0, 4.5] {
            let g = generated_force_g(t, &s).unwrap();
            for (i, &gi) in g.iter().enumerate() {
                let acc = second_diff(|u| analytic_solution_nc(u, &s).unwrap()[i], t, 1e-3);
                assert!((acc - gi).abs() <= 1e-5 * (1.0 + gi.abs()), "{fam:?} t={t} axis {i}");
            }
        }
    }
}

#[test]
fn fourth_order_convergence() {
    // Polynomial `f` of degree ≤ 3 is integrated exactly by RK4, so the
    // order is measured on families with a truncation error.
    let mut families: Vec<_> =
        FamilyId::ALL.iter().map(|&id| DeformationFamily::hyperbolic(id, 1.0, 1.0).unwrap()).collect();
    families.push(DeformationFamily::limit(FamilyId::K4, 1.0).unwrap());
    for fam in families {
        let err = |step: f64| {
            let s = scenario(Some(fam), 10.0, step);
            let traj = integrate(&s, Treatment::Noncommutative).unwrap();
            let exact = analytic_solution_nc(10.0, &s).unwrap();
            dist(&traj.last().x, &exact)
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio >= 12.0, "{fam:?} ratio {ratio}");
    }
}

#[test]
fn undeformed_run_is_uniform_acceleration() {
    let s = scenario(None, 4.0, 0.01);
    for treatment in [Treatment::Noncommutative, Treatment::Undeformed] {
        let traj = integrate(&s, treatment).unwrap();
        for st in &traj.samples {
            for i in 0..3 {
                let want = X0[i] + V0[i] * st.t + 0.5 * FORCE[i] * st.t * st.t;
                assert!((st.x[i] - want).abs() <= 1e-12 * (1.0 + want.abs()));
            }
        }
    }
}

fn any_family() -> impl Strategy<Value = DeformationFamily> {
    let tau = prop_oneof![(0.5f64..20.0).prop_map(Tau::Finite), Just(Tau::Infinite)];
    (prop::sample::select(FamilyId::ALL.to_vec()), -1.0f64..1.0, tau)
        .prop_map(|(id, k, tau)| DeformationFamily::new(id, k, tau).unwrap())
}

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    [-r..r, -r..r, -r..r]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn momentum_grows_linearly(fam in any_family(), f in vec3(1.0), x0 in vec3(2.0), v0 in vec3(2.0),
                               mass in 0.2f64..5.0, t_end in 0.5f64..5.0) {
        let s = Scenario::from_velocity(mass, ForceField(f), Some(fam), x0, v0, (0.0, t_end), t_end / 500.0).unwrap();
        let traj = integrate(&s, Treatment::Noncommutative).unwrap();
        for st in &traj.samples {
            for i in 0..3 {
                let want = mass * v0[i] + f[i] * st.t;
                prop_assert!((st.p[i] - want).abs() <= 1e-12 * (1.0 + want.abs()));
            }
        }
    }

    #[test]
    fn third_axis_ignores_deformation(fam in any_family(), f in vec3(1.0), x0 in vec3(2.0), v0 in vec3(2.0),
                                      t_end in 0.5f64..5.0) {
        let s = Scenario::from_velocity(1.0, ForceField(f), Some(fam), x0, v0, (0.0, t_end), t_end / 300.0).unwrap();
        let deformed = integrate(&s, Treatment::Noncommutative).unwrap();
        let plain = integrate(&s.with_family(None), Treatment::Noncommutative).unwrap();
        for (a, b) in deformed.samples.iter().zip(&plain.samples) {
            prop_assert_eq!(a.x[2].to_bits(), b.x[2].to_bits());
            prop_assert_eq!(a.p[2].to_bits(), b.p[2].to_bits());
        }
    }

    #[test]
    fn last_node_lands_on_t_end(t_end in 0.1f64..20.0, n in 1usize..400, skew in 0.5f64..1.0) {
        let step = skew * t_end / n as f64;
        let s = scenario(None, t_end, step);
        let traj = integrate(&s, Treatment::Undeformed).unwrap();
        prop_assert_eq!(traj.last().t, t_end);
        prop_assert!(traj.samples.windows(2).all(|w| w[1].t > w[0].t));
    }
}

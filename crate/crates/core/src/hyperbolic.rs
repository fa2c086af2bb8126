//! Hyperbolic building blocks that stay accurate for small arguments.
//!
//! The deformation functions and the Newton-Hooke translations are built from
//! differences such as `cosh u - 1` and `sinh u - u`, which cancel
//! catastrophically as `u = t/τ → 0`. That is exactly the regime of large `τ`
//! where the polynomial limits are approached, so these helpers are used
//! everywhere instead of the naive forms.

/// Below this magnitude the odd remainders are summed as power series.
const SERIES_CUTOFF: f64 = 1.0;

/// `cosh(u) - 1`, evaluated as `2 sinh²(u/2)`.
#[inline]
pub fn cosh_m1(u: f64) -> f64 {
    let s = (0.5 * u).sinh();
    2.0 * s * s
}

/// `sinh(u) - u`.
pub fn sinh_m_id(u: f64) -> f64 {
    if u.abs() < SERIES_CUTOFF {
        odd_series(u, 3, |_| 1.0)
    } else {
        u.sinh() - u
    }
}

/// `sinh(2u)/4 - 2 sinh(u) + 3u/2`, i.e. `∫₀ᵘ (cosh s - 1)² ds`.
///
/// The leading `u³` terms of the two sinh pieces cancel exactly, so the
/// series form is used over a wider window than [`sinh_m_id`].
pub fn cosh_m1_sq_integral(u: f64) -> f64 {
    if u.abs() < 2.0 * SERIES_CUTOFF {
        // Σ_{n odd ≥ 5} (2ⁿ/4 - 2) uⁿ / n!
        odd_series(u, 5, |n| 2f64.powi(n as i32) / 4.0 - 2.0)
    } else {
        sinh_m_id(2.0 * u) / 4.0 - 2.0 * sinh_m_id(u)
    }
}

/// `Σ_{n odd ≥ first} weight(n) uⁿ / n!`, summed until the terms stop
/// contributing.
fn odd_series(u: f64, first: u32, weight: impl Fn(u32) -> f64) -> f64 {
    let u2 = u * u;
    let mut term = u.powi(first as i32) / factorial(first);
    let mut n = first;
    let mut sum = 0.0;
    loop {
        let contrib = weight(n) * term;
        sum += contrib;
        if contrib.abs() <= f64::EPSILON * 1e-3 * sum.abs() || n > 60 {
            break;
        }
        term *= u2 / f64::from((n + 1) * (n + 2));
        n += 2;
    }
    sum
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

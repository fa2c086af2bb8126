//! Deformed Poisson structure and its Bopp-shift representation.
//!
//! Noncommutative coordinates are realised on the canonical phase space as
//!
//! ```text
//! x̄₁ = x₁ − f(t)/2 · p₂     x̄₂ = x₂ + f(t)/2 · p₁     x̄₃ = x₃     p̄ᵢ = pᵢ
//! ```
//!
//! and every bracket is evaluated with the canonical structure
//! `{xᵢ, pⱼ} = δᵢⱼ` by central finite differences. Time is a parameter and
//! never a bracket argument.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::deformation::DeformationFamily;
use crate::error::{Error, Result};
use crate::Vec3;

/// Relative finite-difference step for a single bracket.
pub const BRACKET_STEP: f64 = 1e-6;

/// Relative step for the outer differentiation of a nested bracket. The inner
/// bracket carries rounding noise of order `ε/BRACKET_STEP`, which a second
/// differentiation at the same step would amplify to `ε/BRACKET_STEP²`.
pub const NESTED_BRACKET_STEP: f64 = 1e-4;

/// A point of the canonical phase space at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub t: f64,
    pub x: Vec3,
    pub p: Vec3,
}

impl PhaseState {
    pub fn new(t: f64, x: Vec3, p: Vec3) -> Self {
        Self { t, x, p }
    }

    /// Coordinate `index` of `(x1, x2, x3, p1, p2, p3)`.
    pub fn coord(&self, index: usize) -> f64 {
        if index < 3 {
            self.x[index]
        } else {
            self.p[index - 3]
        }
    }

    pub fn with_coord(mut self, index: usize, value: f64) -> Self {
        if index < 3 {
            self.x[index] = value;
        } else {
            self.p[index - 3] = value;
        }
        self
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().chain(&self.p).all(|v| v.is_finite())
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("phase state has non-finite components: {self:?}")))
        }
    }
}

/// Noncommutative coordinates `(x̄, p̄)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NcCoordinates {
    pub xbar: Vec3,
    pub pbar: Vec3,
}

/// Represent the noncommutative variables on the canonical phase space.
pub fn bopp_map(state: &PhaseState, family: &DeformationFamily) -> Result<NcCoordinates> {
    state.validate()?;
    Ok(bopp_unchecked(state, family))
}

fn bopp_unchecked(state: &PhaseState, family: &DeformationFamily) -> NcCoordinates {
    let half_f = 0.5 * family.f(state.t);
    let PhaseState { x, p, .. } = *state;
    NcCoordinates { xbar: [x[0] - half_f * p[1], x[1] + half_f * p[0], x[2]], pbar: p }
}

/// A real-valued phase-space function `A(x, p, t)`.
pub trait Observable {
    fn eval(&self, state: &PhaseState) -> f64;
}

impl<F> Observable for F
where
    F: Fn(&PhaseState) -> f64,
{
    fn eval(&self, state: &PhaseState) -> f64 {
        self(state)
    }
}

/// Coordinate functions of the noncommutative phase space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NcCoordinate {
    X1,
    X2,
    X3,
    P1,
    P2,
    P3,
}

impl NcCoordinate {
    pub const ALL: [NcCoordinate; 6] = [
        NcCoordinate::X1,
        NcCoordinate::X2,
        NcCoordinate::X3,
        NcCoordinate::P1,
        NcCoordinate::P2,
        NcCoordinate::P3,
    ];

    /// The coordinate as an observable on the canonical phase space.
    pub fn represented(self, family: &DeformationFamily) -> BoppCoordinate {
        BoppCoordinate { coord: self, family: *family }
    }

    pub fn name(self) -> &'static str {
        match self {
            NcCoordinate::X1 => "x1",
            NcCoordinate::X2 => "x2",
            NcCoordinate::X3 => "x3",
            NcCoordinate::P1 => "p1",
            NcCoordinate::P2 => "p2",
            NcCoordinate::P3 => "p3",
        }
    }
}

/// `x̄ᵢ` or `p̄ᵢ` composed with the Bopp map.
#[derive(Debug, Clone, Copy)]
pub struct BoppCoordinate {
    coord: NcCoordinate,
    family: DeformationFamily,
}

impl Observable for BoppCoordinate {
    fn eval(&self, state: &PhaseState) -> f64 {
        let nc = bopp_unchecked(state, &self.family);
        match self.coord {
            NcCoordinate::X1 => nc.xbar[0],
            NcCoordinate::X2 => nc.xbar[1],
            NcCoordinate::X3 => nc.xbar[2],
            NcCoordinate::P1 => nc.pbar[0],
            NcCoordinate::P2 => nc.pbar[1],
            NcCoordinate::P3 => nc.pbar[2],
        }
    }
}

/// Canonical Poisson bracket `{A, B} = Σᵢ ∂A/∂xᵢ ∂B/∂pᵢ − ∂A/∂pᵢ ∂B/∂xᵢ`.
pub fn poisson_bracket<A, B>(a: &A, b: &B, point: &PhaseState) -> Result<f64>
where
    A: Observable + ?Sized,
    B: Observable + ?Sized,
{
    bracket_with_step(a, b, point, BRACKET_STEP)
}

pub fn bracket_with_step<A, B>(a: &A, b: &B, point: &PhaseState, rel_step: f64) -> Result<f64>
where
    A: Observable + ?Sized,
    B: Observable + ?Sized,
{
    let mut da = [0.0; 6];
    let mut db = [0.0; 6];
    for index in 0..6 {
        let c = point.coord(index);
        let h = rel_step * (1.0 + c.abs());
        let (hi, lo) = (c + h, c - h);
        // the representable spacing, not 2h
        let span = hi - lo;
        let plus = point.with_coord(index, hi);
        let minus = point.with_coord(index, lo);
        da[index] = (a.eval(&plus) - a.eval(&minus)) / span;
        db[index] = (b.eval(&plus) - b.eval(&minus)) / span;
        if !da[index].is_finite() || !db[index].is_finite() {
            return Err(Error::NumericalFailure { index });
        }
    }
    Ok((0..3).map(|i| da[i] * db[i + 3] - da[i + 3] * db[i]).sum())
}

/// `|{{A,B},C} + {{B,C},A} + {{C,A},B}|` for arbitrary observables.
pub fn jacobi_cyclic_sum<A, B, C>(a: &A, b: &B, c: &C, point: &PhaseState) -> Result<f64>
where
    A: Observable + ?Sized,
    B: Observable + ?Sized,
    C: Observable + ?Sized,
{
    fn term<X, Y, Z>(x: &X, y: &Y, z: &Z, point: &PhaseState) -> Result<f64>
    where
        X: Observable + ?Sized,
        Y: Observable + ?Sized,
        Z: Observable + ?Sized,
    {
        let inner = |s: &PhaseState| poisson_bracket(x, y, s).unwrap_or(f64::NAN);
        bracket_with_step(&inner, z, point, NESTED_BRACKET_STEP)
    }
    let sum = term(a, b, c, point)? + term(b, c, a, point)? + term(c, a, b, point)?;
    Ok(sum.abs())
}

/// Jacobi residual for a triple of Bopp-represented coordinate functions.
pub fn jacobi_residual(
    family: &DeformationFamily,
    triple: [NcCoordinate; 3],
    point: &PhaseState,
) -> Result<f64> {
    point.validate()?;
    let [a, b, c] = triple.map(|coord| coord.represented(family));
    jacobi_cyclic_sum(&a, &b, &c, point)
}

/// Worst residual of one bracket relation over a sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationResidual {
    pub relation: String,
    /// `max |computed − expected|`.
    pub max_residual: f64,
    /// `max |computed − expected| / max(1, |expected|)`.
    pub max_scaled_residual: f64,
    pub argmax: PhaseState,
}

/// Compact box from which phase-space samples are drawn uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    /// Each of `x₁..x₃, p₁..p₃` is drawn from `[−half_width, half_width]`.
    pub half_width: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl Default for SampleBox {
    fn default() -> Self {
        Self { half_width: 5.0, t_min: 0.0, t_max: 1.0 }
    }
}

impl SampleBox {
    pub fn sample(&self, count: usize, seed: u64) -> Vec<PhaseState> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = self.half_width;
        (0..count)
            .map(|_| {
                let t = rng.gen_range(self.t_min..=self.t_max);
                let x = [0; 3].map(|_| rng.gen_range(-w..=w));
                let p = [0; 3].map(|_| rng.gen_range(-w..=w));
                PhaseState::new(t, x, p)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketReport {
    pub family: DeformationFamily,
    pub sample_count: usize,
    pub domain: Option<SampleBox>,
    pub relations: Vec<RelationResidual>,
}

impl BracketReport {
    pub fn relation(&self, name: &str) -> Option<&RelationResidual> {
        self.relations.iter().find(|r| r.relation == name)
    }
}

pub const REL_X1_X2: &str = "{x1,x2}=f";
pub const REL_X1_X3: &str = "{x1,x3}=0";
pub const REL_X2_X3: &str = "{x2,x3}=0";
pub const REL_X_P: &str = "{xi,pj}=delta";
pub const REL_P_P: &str = "{pi,pj}=0";

/// Check every deformed bracket relation through the Bopp representation.
pub fn verify_bracket_relations(family: &DeformationFamily, samples: &[PhaseState]) -> Result<BracketReport> {
    use NcCoordinate::*;

    if samples.is_empty() {
        return Err(Error::InvalidArgument("sample list is empty".into()));
    }
    let rep = |c: NcCoordinate| c.represented(family);
    let mut acc: Vec<RelationResidual> = [REL_X1_X2, REL_X1_X3, REL_X2_X3, REL_X_P, REL_P_P]
        .iter()
        .map(|name| RelationResidual {
            relation: (*name).to_string(),
            max_residual: 0.0,
            max_scaled_residual: 0.0,
            argmax: samples[0],
        })
        .collect();

    for s in samples {
        s.validate()?;
        let mut record = |slot: usize, computed: f64, expected: f64| {
            let r = (computed - expected).abs();
            let entry = &mut acc[slot];
            if r > entry.max_residual {
                entry.max_residual = r;
                entry.argmax = *s;
            }
            entry.max_scaled_residual = entry.max_scaled_residual.max(r / expected.abs().max(1.0));
        };

        let f = family.f(s.t);
        record(0, poisson_bracket(&rep(X1), &rep(X2), s)?, f);
        record(1, poisson_bracket(&rep(X1), &rep(X3), s)?, 0.0);
        record(2, poisson_bracket(&rep(X2), &rep(X3), s)?, 0.0);
        for (i, xi) in [X1, X2, X3].into_iter().enumerate() {
            for (j, pj) in [P1, P2, P3].into_iter().enumerate() {
                let delta = if i == j { 1.0 } else { 0.0 };
                record(3, poisson_bracket(&rep(xi), &rep(pj), s)?, delta);
            }
        }
        for (pi, pj) in [(P1, P2), (P1, P3), (P2, P3)] {
            record(4, poisson_bracket(&rep(pi), &rep(pj), s)?, 0.0);
        }
    }

    Ok(BracketReport { family: *family, sample_count: samples.len(), domain: None, relations: acc })
}

/// [`verify_bracket_relations`] on `count` seeded samples from `domain`.
pub fn verify_on_box(
    family: &DeformationFamily,
    domain: SampleBox,
    count: usize,
    seed: u64,
) -> Result<BracketReport> {
    let samples = domain.sample(count, seed);
    let mut report = verify_bracket_relations(family, &samples)?;
    report.domain = Some(domain);
    Ok(report)
}

/// All 20 unordered triples of distinct coordinate functions.
pub fn coordinate_triples() -> Vec<[NcCoordinate; 3]> {
    let all = NcCoordinate::ALL;
    let mut out = Vec::with_capacity(20);
    for i in 0..6 {
        for j in i + 1..6 {
            for k in j + 1..6 {
                out.push([all[i], all[j], all[k]]);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobiReport {
    pub family: DeformationFamily,
    pub max_residual: f64,
    pub worst_triple: [NcCoordinate; 3],
    pub argmax: PhaseState,
}

/// Largest Jacobi residual over all coordinate triples and samples.
pub fn jacobi_scan(family: &DeformationFamily, samples: &[PhaseState]) -> Result<JacobiReport> {
    let first = *samples.first().ok_or_else(|| Error::InvalidArgument("sample list is empty".into()))?;
    let triples = coordinate_triples();
    let mut report =
        JacobiReport { family: *family, max_residual: 0.0, worst_triple: triples[0], argmax: first };
    for s in samples {
        for triple in &triples {
            let r = jacobi_residual(family, *triple, s)?;
            if r > report.max_residual {
                report.max_residual = r;
                report.worst_triple = *triple;
                report.argmax = *s;
            }
        }
    }
    Ok(report)
}

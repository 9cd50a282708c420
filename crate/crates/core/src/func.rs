//! Closed-form functions on all of `R^N` with decay and smoothness metadata.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geom::{dist, Domain, Point};
use crate::params::FracParams;

/// Smoothness declaration used to decide where pointwise evaluation is safe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    C2Everywhere,
    /// Twice differentiable except at the listed points.
    C2ExceptPoints,
    /// No differentiability is claimed anywhere.
    ContinuousOnly,
}

/// Decay class at infinity; controls tail handling and finiteness checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailClass {
    /// Support contained in the closed ball `B_radius(center)`.
    CompactSupport { center: Point, radius: f64 },
    /// Bounded on all of `R^N` without compact support.
    Bounded,
    /// `|u(x)| <= C (1 + |x|)^gamma` and no better.
    PowerGrowth { gamma: f64 },
}

/// An analytically specified function together with the metadata the
/// quadrature needs: smoothness tag, tail class, declared non-smooth points,
/// and optional spherical surfaces across which derivatives may jump
/// (used only as quadrature breakpoints).
#[derive(Clone)]
pub struct ClosedFormFunction {
    eval: Arc<dyn Fn(Point) -> f64 + Send + Sync>,
    smoothness: Smoothness,
    tail: TailClass,
    singular_points: Vec<Point>,
    breakpoint_shells: Vec<(Point, f64)>,
}

impl fmt::Debug for ClosedFormFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClosedFormFunction")
            .field("smoothness", &self.smoothness)
            .field("tail", &self.tail)
            .field("singular_points", &self.singular_points)
            .field("breakpoint_shells", &self.breakpoint_shells)
            .finish_non_exhaustive()
    }
}

impl ClosedFormFunction {
    pub fn new(
        eval: impl Fn(Point) -> f64 + Send + Sync + 'static,
        smoothness: Smoothness,
        tail: TailClass,
        singular_points: Vec<Point>,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            smoothness,
            tail,
            singular_points,
            breakpoint_shells: Vec::new(),
        }
    }

    /// Adds a sphere `|y - center| = radius` across which the function or its
    /// derivatives may be non-smooth. Only affects quadrature panel layout.
    pub fn with_shell(mut self, center: Point, radius: f64) -> Self {
        self.breakpoint_shells.push((center, radius));
        self
    }

    pub fn value(&self, x: Point) -> f64 {
        (self.eval)(x)
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn tail(&self) -> TailClass {
        self.tail
    }

    pub fn singular_points(&self) -> &[Point] {
        &self.singular_points
    }

    pub fn breakpoint_shells(&self) -> &[(Point, f64)] {
        &self.breakpoint_shells
    }

    /// Distance from `x` to the nearest declared non-smooth point,
    /// or `None` when there is none.
    pub fn nearest_singular_distance(&self, x: Point) -> Option<f64> {
        self.singular_points
            .iter()
            .map(|&s| dist(x, s))
            .min_by(|a, b| a.total_cmp(b))
    }

    /// Checks that the tail integral `int |u|^{p-1} (1+|x|)^{-(N+sp)} dx`
    /// is finite for the declared tail class.
    pub fn check_tail_finite(&self, params: &FracParams) -> Result<()> {
        if let TailClass::PowerGrowth { gamma } = self.tail {
            // The integrand decays like |x|^{gamma (p-1) - N - sp}; it is
            // integrable at infinity iff gamma (p-1) < s p.
            if gamma * (params.p() - 1.0) >= params.sp() {
                return Err(Error::TailDivergent(format!(
                    "power growth {gamma} with p = {} gives gamma*(p-1) = {} >= s*p = {}",
                    params.p(),
                    gamma * (params.p() - 1.0),
                    params.sp()
                )));
            }
        }
        Ok(())
    }

    /// Radial distances from `x` at which quadrature panels should break:
    /// distances to singular points and to the declared shells.
    pub fn radial_breakpoints(&self, x: Point) -> Vec<f64> {
        let mut out = Vec::new();
        for &sp in &self.singular_points {
            out.push(dist(x, sp));
        }
        for &(c, r) in &self.breakpoint_shells {
            let d = dist(x, c);
            out.push((d - r).abs());
            out.push(d + r);
        }
        if let TailClass::CompactSupport { center, radius } = self.tail {
            let d = dist(x, center);
            out.push((d - radius).abs());
            out.push(d + radius);
        }
        out.retain(|t| t.is_finite() && *t > 0.0);
        out.sort_by(|a, b| a.total_cmp(b));
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * (1.0 + b.abs()));
        out
    }

    // --- constructors for the profiles used throughout -------------------

    pub fn constant(v: f64) -> Self {
        Self::new(move |_| v, Smoothness::C2Everywhere, TailClass::Bounded, vec![])
    }

    /// `delta^(s*multiple)` where `delta` is the boundary distance of
    /// `domain`; zero outside. `multiple = 1` is the canonical boundary
    /// profile, `multiple = 2` its square.
    pub fn boundary_distance_pow(domain: &Domain, params: &FracParams, multiple: f64) -> Self {
        let dom = domain.clone();
        let q = params.s() * multiple;
        let mut singular = vec![];
        match domain {
            Domain::Interval { a, b } => {
                singular.push([*a, 0.0]);
                singular.push([*b, 0.0]);
                singular.push([0.5 * (a + b), 0.0]);
            }
            Domain::Ball { center, .. } => singular.push(*center),
            Domain::Rectangle { lo, hi } => {
                singular.push([0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])]);
                singular.push(*lo);
                singular.push(*hi);
                singular.push([lo[0], hi[1]]);
                singular.push([hi[0], lo[1]]);
            }
        }
        let f = Self::new(
            move |x| dom.boundary_distance(x).powf(q),
            Smoothness::C2ExceptPoints,
            TailClass::CompactSupport {
                center: domain.center(),
                radius: domain.circumradius(),
            },
            singular,
        );
        match domain.as_ball() {
            Some((c, r)) => f.with_shell(c, r),
            None => f,
        }
    }

    /// `(1 - |x - center|^2 / radius^2)_+^s`, the bump profile supported on
    /// a ball.
    pub fn bump_profile(center: Point, radius: f64, s: f64) -> Self {
        let r2 = radius * radius;
        let singular = vec![
            [center[0] - radius, center[1]],
            [center[0] + radius, center[1]],
        ];
        Self::new(
            move |x| {
                let d2 = (x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2);
                let t = 1.0 - d2 / r2;
                if t > 0.0 {
                    t.powf(s)
                } else {
                    0.0
                }
            },
            Smoothness::C2ExceptPoints,
            TailClass::CompactSupport { center, radius },
            singular,
        )
        .with_shell(center, radius)
    }

    /// The touching barrier `-eps |x - x_star|^beta`. Requires `beta > 2`
    /// so it is twice differentiable at the vertex.
    pub fn power_barrier(x_star: Point, eps: f64, beta: f64) -> Self {
        Self::new(
            move |x| -eps * dist(x, x_star).powf(beta),
            Smoothness::C2Everywhere,
            TailClass::PowerGrowth { gamma: beta },
            vec![],
        )
    }

    /// Indicator of a domain times `value`; discontinuous, so tagged as
    /// merely continuous-free and unsuitable for pointwise evaluation on its
    /// support boundary.
    pub fn indicator(support: &Domain, value: f64) -> Self {
        let dom = support.clone();
        let f = Self::new(
            move |x| {
                if dom.distance_to_set(x) == 0.0 {
                    value
                } else {
                    0.0
                }
            },
            Smoothness::ContinuousOnly,
            TailClass::CompactSupport {
                center: support.center(),
                radius: support.circumradius(),
            },
            vec![],
        );
        match support.as_ball() {
            Some((c, r)) => f.with_shell(c, r),
            None => f,
        }
    }
}

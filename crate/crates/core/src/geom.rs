//! Bounded domains with exact distance functions.
//!
//! Points are stored as `[f64; 2]` in every dimension; 1D points keep the
//! second coordinate at zero, so the Euclidean distance formula is valid
//! uniformly.

use crate::error::{Error, Result};

/// A point of `R^1` or `R^2`; in 1D the second coordinate is zero.
pub type Point = [f64; 2];

/// Euclidean distance.
pub fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Volume of the unit ball: 2 in 1D, pi in 2D.
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => std::f64::consts::PI,
        d => panic!("unsupported dimension {d}"),
    }
}

/// Surface measure of the unit sphere: 2 in 1D, 2*pi in 2D.
pub fn unit_sphere_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        d => panic!("unsupported dimension {d}"),
    }
}

/// A bounded open domain with nonempty interior.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// Open interval `(a, b)` in 1D.
    Interval { a: f64, b: f64 },
    /// Open ball in 2D.
    Ball { center: Point, radius: f64 },
    /// Open axis-aligned rectangle in 2D.
    Rectangle { lo: Point, hi: Point },
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        let d = Domain::Interval { a, b };
        d.validate()?;
        Ok(d)
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        let d = Domain::Ball { center, radius };
        d.validate()?;
        Ok(d)
    }

    pub fn rectangle(lo: Point, hi: Point) -> Result<Self> {
        let d = Domain::Rectangle { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Domain::Interval { a, b } => a.is_finite() && b.is_finite() && b > a,
            Domain::Ball { center, radius } => {
                center.iter().all(|c| c.is_finite()) && radius.is_finite() && *radius > 0.0
            }
            Domain::Rectangle { lo, hi } => {
                lo.iter().chain(hi.iter()).all(|c| c.is_finite())
                    && hi[0] > lo[0]
                    && hi[1] > lo[1]
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("empty interior: {self:?}")))
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            _ => 2,
        }
    }

    pub fn center(&self) -> Point {
        match self {
            Domain::Interval { a, b } => [0.5 * (a + b), 0.0],
            Domain::Ball { center, .. } => *center,
            Domain::Rectangle { lo, hi } => [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])],
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => b - a,
            Domain::Ball { radius, .. } => 2.0 * radius,
            Domain::Rectangle { lo, hi } => (hi[0] - lo[0]).hypot(hi[1] - lo[1]),
        }
    }

    /// Radius of the largest ball contained in the domain.
    pub fn inradius(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => 0.5 * (b - a),
            Domain::Ball { radius, .. } => *radius,
            Domain::Rectangle { lo, hi } => 0.5 * (hi[0] - lo[0]).min(hi[1] - lo[1]),
        }
    }

    /// Radius of the smallest ball around the center containing the domain.
    pub fn circumradius(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => 0.5 * (b - a),
            Domain::Ball { radius, .. } => *radius,
            Domain::Rectangle { lo, hi } => 0.5 * (hi[0] - lo[0]).hypot(hi[1] - lo[1]),
        }
    }

    /// Open-set membership.
    pub fn contains(&self, x: Point) -> bool {
        self.boundary_distance(x) > 0.0
    }

    /// Distance to the complement: positive inside, zero on the boundary and
    /// outside. Exact closed form per shape.
    pub fn boundary_distance(&self, x: Point) -> f64 {
        match self {
            Domain::Interval { a, b } => (x[0] - a).min(b - x[0]).max(0.0),
            Domain::Ball { center, radius } => (radius - dist(*center, x)).max(0.0),
            Domain::Rectangle { lo, hi } => {
                let dx = (x[0] - lo[0]).min(hi[0] - x[0]);
                let dy = (x[1] - lo[1]).min(hi[1] - x[1]);
                dx.min(dy).max(0.0)
            }
        }
    }

    /// Distance from `x` to the closed set: zero inside and on the boundary.
    pub fn distance_to_set(&self, x: Point) -> f64 {
        match self {
            Domain::Interval { a, b } => (a - x[0]).max(x[0] - b).max(0.0),
            Domain::Ball { center, radius } => (dist(*center, x) - radius).max(0.0),
            Domain::Rectangle { lo, hi } => {
                let dx = (lo[0] - x[0]).max(x[0] - hi[0]).max(0.0);
                let dy = (lo[1] - x[1]).max(x[1] - hi[1]).max(0.0);
                dx.hypot(dy)
            }
        }
    }

    /// Distance from an interior point to the medial axis (the ridge of the
    /// distance function, where `boundary_distance` is not smooth).
    pub fn medial_distance(&self, x: Point) -> f64 {
        match self {
            Domain::Interval { a, b } => (x[0] - 0.5 * (a + b)).abs(),
            Domain::Ball { center, .. } => dist(*center, x),
            Domain::Rectangle { lo, hi } => {
                // Skeleton of a rectangle: a central segment along the long
                // axis plus four corner diagonals where the two nearest sides
                // tie. Swap axes so the x-extent is the long one.
                let c = self.center();
                let (mut ax, mut ay) = ((x[0] - c[0]).abs(), (x[1] - c[1]).abs());
                let (mut hx, mut hy) = (0.5 * (hi[0] - lo[0]), 0.5 * (hi[1] - lo[1]));
                if hx < hy {
                    std::mem::swap(&mut hx, &mut hy);
                    std::mem::swap(&mut ax, &mut ay);
                }
                let dx = hx - ax;
                let dy = hy - ay;
                let to_diagonal = (dx - dy).abs() / std::f64::consts::SQRT_2;
                let to_segment = (ax - (hx - hy)).max(0.0).hypot(ay);
                to_diagonal.min(to_segment)
            }
        }
    }

    /// Axis-aligned bounding box.
    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            Domain::Interval { a, b } => ([*a, 0.0], [*b, 0.0]),
            Domain::Ball { center, radius } => (
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            Domain::Rectangle { lo, hi } => (*lo, *hi),
        }
    }

    /// The domain viewed as a ball `(center, radius)` where that is exact:
    /// intervals and balls. Rectangles return `None`.
    pub fn as_ball(&self) -> Option<(Point, f64)> {
        match self {
            Domain::Interval { a, b } => Some(([0.5 * (a + b), 0.0], 0.5 * (b - a))),
            Domain::Ball { center, radius } => Some((*center, *radius)),
            Domain::Rectangle { .. } => None,
        }
    }

    /// Boundary base points with inward unit normals, placed away from
    /// corners and ridges; used for boundary-strip sampling.
    pub fn boundary_anchors(&self) -> Vec<(Point, Point)> {
        match self {
            Domain::Interval { a, b } => {
                vec![([*a, 0.0], [1.0, 0.0]), ([*b, 0.0], [-1.0, 0.0])]
            }
            Domain::Ball { center, radius } => {
                let n = 8;
                (0..n)
                    .map(|k| {
                        let phi = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
                        let dir = [phi.cos(), phi.sin()];
                        (
                            [center[0] + radius * dir[0], center[1] + radius * dir[1]],
                            [-dir[0], -dir[1]],
                        )
                    })
                    .collect()
            }
            Domain::Rectangle { lo, hi } => {
                // Two anchors per side at parameters 0.35 and 0.65, safely
                // away from the corner diagonals for shallow strips.
                let mut out = Vec::with_capacity(8);
                for t in [0.35, 0.65] {
                    let xt = lo[0] + t * (hi[0] - lo[0]);
                    let yt = lo[1] + t * (hi[1] - lo[1]);
                    out.push(([xt, lo[1]], [0.0, 1.0]));
                    out.push(([xt, hi[1]], [0.0, -1.0]));
                    out.push(([lo[0], yt], [1.0, 0.0]));
                    out.push(([hi[0], yt], [-1.0, 0.0]));
                }
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn interval_distances() {
        let d = Domain::interval(-1.0, 1.0).unwrap();
        assert_eq!(d.boundary_distance([0.0, 0.0]), 1.0);
        assert_eq!(d.boundary_distance([0.5, 0.0]), 0.5);
        assert_eq!(d.boundary_distance([1.0, 0.0]), 0.0);
        assert_eq!(d.boundary_distance([2.0, 0.0]), 0.0);
        assert_eq!(d.distance_to_set([2.0, 0.0]), 1.0);
        assert_eq!(d.distance_to_set([0.5, 0.0]), 0.0);
        assert_eq!(d.inradius(), 1.0);
    }

    #[test]
    fn rectangle_distances() {
        let d = Domain::rectangle([0.0, 0.0], [4.0, 2.0]).unwrap();
        assert_eq!(d.boundary_distance([2.0, 1.0]), 1.0);
        assert_eq!(d.boundary_distance([0.5, 1.0]), 0.5);
        assert_eq!(d.distance_to_set([5.0, 1.0]), 1.0);
        assert!((d.distance_to_set([5.0, 3.0]) - 2.0_f64.sqrt()).abs() < 1e-15);
        // Center lies on the skeleton of a 4x2 rectangle.
        assert_eq!(d.medial_distance([2.0, 1.0]), 0.0);
        // Near a side midpoint the skeleton is half the short extent away.
        assert!((d.medial_distance([2.0, 0.2]) - 0.8).abs() < 1e-12);
    }

    #[test]
    fn degenerate_domains_rejected() {
        assert!(Domain::interval(1.0, 1.0).is_err());
        assert!(Domain::ball([0.0, 0.0], 0.0).is_err());
        assert!(Domain::rectangle([0.0, 0.0], [1.0, 0.0]).is_err());
    }

    proptest! {
        // |dist(x) - dist(y)| <= |x - y| for the boundary distance.
        #[test]
        fn boundary_distance_is_1_lipschitz(
            shape in 0usize..3,
            x0 in -3.0f64..3.0, x1 in -3.0f64..3.0,
            y0 in -3.0f64..3.0, y1 in -3.0f64..3.0,
        ) {
            let d = match shape {
                0 => Domain::interval(-1.0, 1.5).unwrap(),
                1 => Domain::ball([0.2, -0.1], 1.1).unwrap(),
                _ => Domain::rectangle([-1.0, -0.5], [1.5, 1.0]).unwrap(),
            };
            let (x, y) = if d.dim() == 1 {
                ([x0, 0.0], [y0, 0.0])
            } else {
                ([x0, x1], [y0, y1])
            };
            let lhs = (d.boundary_distance(x) - d.boundary_distance(y)).abs();
            prop_assert!(lhs <= dist(x, y) + 1e-12);
        }
    }
}

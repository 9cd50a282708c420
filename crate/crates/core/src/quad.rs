//! Quadrature configuration and Gauss-Legendre panel primitives.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Relative tolerance for panel-refinement convergence.
pub const QUAD_REL_TOL: f64 = 1e-6;
/// Refinement factor per level.
pub const QUAD_REFINE_FACTOR: usize = 2;
/// Maximum number of refinement levels.
pub const QUAD_MAX_LEVELS: usize = 12;

/// How to account for the region beyond `far_radius`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailMode {
    /// Closed-form tail for compactly supported functions (exact there);
    /// falls back to truncation for merely bounded functions.
    AnalyticFromTailClass,
    /// Truncate: treat the integrand as zero beyond `far_radius`.
    ZeroBeyond,
}

/// Layout of the singular quadrature: a symmetric-pairing zone of radius
/// `pv_inner_radius` around the singularity, panel quadrature out to
/// `far_radius`, and a tail rule beyond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    /// Radius of the symmetric-pairing zone around the evaluation point.
    /// Clamped automatically to stay inside the region where the integrand
    /// is twice differentiable.
    pub pv_inner_radius: f64,
    /// Base panel count in the pairing zone (log-radial panels).
    pub near_panels: usize,
    /// Truncation radius for the far field.
    pub far_radius: f64,
    /// Base panel count between `pv_inner_radius` and `far_radius`.
    pub far_panels: usize,
    pub tail_mode: TailMode,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            pv_inner_radius: 0.125,
            near_panels: 12,
            far_radius: 64.0,
            far_panels: 16,
            tail_mode: TailMode::AnalyticFromTailClass,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.pv_inner_radius > 0.0 && self.pv_inner_radius < self.far_radius) {
            return Err(Error::InvalidParams(format!(
                "need 0 < pv_inner_radius < far_radius, got {} and {}",
                self.pv_inner_radius, self.far_radius
            )));
        }
        if self.near_panels < 8 || self.far_panels < 8 {
            return Err(Error::InvalidParams(format!(
                "panel counts must be at least 8, got near {} far {}",
                self.near_panels, self.far_panels
            )));
        }
        Ok(())
    }
}

/// A numerical value together with an absolute error estimate from
/// panel-refinement differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error_estimate: f64,
}

const GL_ORDER: usize = 16;

fn gauss_legendre_16() -> &'static ([f64; GL_ORDER], [f64; GL_ORDER]) {
    static CACHE: OnceLock<([f64; GL_ORDER], [f64; GL_ORDER])> = OnceLock::new();
    CACHE.get_or_init(|| {
        // Newton iteration on Legendre polynomials from Chebyshev guesses.
        let n = GL_ORDER;
        let mut nodes = [0.0; GL_ORDER];
        let mut weights = [0.0; GL_ORDER];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (pn, dpn) = legendre_and_derivative(n, x);
                let dx = pn / dpn;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dpn) = legendre_and_derivative(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dpn * dpn);
        }
        (nodes, weights)
    })
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// 16-point Gauss-Legendre rule on `[a, b]`.
pub fn gl_panel(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gauss_legendre_16();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..GL_ORDER {
        acc += weights[i] * f(mid + half * nodes[i]);
    }
    acc * half
}

/// Integrates `f` over consecutive segments given by sorted `breaks`,
/// subdividing each segment into `splits` equal panels. Accumulation is
/// sequential in segment order, so the result is independent of call context.
pub fn integrate_segments(f: &mut dyn FnMut(f64) -> f64, breaks: &[f64], splits: usize) -> f64 {
    let mut acc = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let step = (b - a) / splits as f64;
        for k in 0..splits {
            let lo = a + step * k as f64;
            let hi = if k + 1 == splits { b } else { lo + step };
            acc += gl_panel(f, lo, hi);
        }
    }
    acc
}

/// Inserts geometrically graded sub-breakpoints on both sides of each
/// interior breakpoint, which restores fast panel convergence when the
/// integrand has an algebraic kink there. `levels` halvings are used.
pub fn grade_breakpoints(breaks: &[f64], levels: usize) -> Vec<f64> {
    let mut out: Vec<f64> = breaks.to_vec();
    for i in 1..breaks.len().saturating_sub(1) {
        let t = breaks[i];
        let gap_lo = t - breaks[i - 1];
        let gap_hi = breaks[i + 1] - t;
        for k in 1..=levels {
            let frac = 0.5f64.powi(k as i32);
            out.push(t - gap_lo * frac);
            out.push(t + gap_hi * frac);
        }
    }
    out.sort_by(|a, b| a.total_cmp(b));
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-15 * (1.0 + b.abs()));
    out
}

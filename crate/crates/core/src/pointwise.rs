//! Pointwise evaluation of the operator by principal-value singular
//! quadrature, plus the glued test-function variant and the barrier
//! arithmetic built on it.
//!
//! The principal value is handled by symmetric pairing: contributions from
//! `y` and its reflection `2x - y` are summed before dividing by the kernel,
//! which cancels the odd leading term for twice differentiable functions.
//! The radial integral is computed in log-radius, where the paired integrand
//! decays exponentially toward the singularity, with panel breakpoints at
//! declared kink radii and an analytic tail for compactly supported
//! functions.

use crate::error::{Error, Result};
use crate::func::{ClosedFormFunction, Smoothness, TailClass};
use crate::geom::{dist, unit_ball_volume, unit_sphere_area, Domain, Point};
use crate::kernel::signed_power;
use crate::params::FracParams;
use crate::quad::{
    gl_panel, grade_breakpoints, Estimate, QuadConfig, TailMode, QUAD_MAX_LEVELS, QUAD_REL_TOL,
};

/// A function equal to `inner` on the ball `B_radius(center)` and to
/// `outer` elsewhere.
#[derive(Debug, Clone)]
pub struct GluedFunction {
    pub inner: ClosedFormFunction,
    pub outer: ClosedFormFunction,
    pub center: Point,
    pub radius: f64,
}

impl GluedFunction {
    pub fn value(&self, y: Point) -> f64 {
        if dist(y, self.center) < self.radius {
            self.inner.value(y)
        } else {
            self.outer.value(y)
        }
    }
}

struct RadialEngine<'a> {
    dim: usize,
    sp: f64,
    pm1: f64,
    ux: f64,
    x: Point,
    f: &'a dyn Fn(Point) -> f64,
}

impl RadialEngine<'_> {
    /// Sum of the paired integrand numerators at radius `t`:
    /// 1D directly, 2D integrated over half the circle (each antipodal pair
    /// is visited once).
    fn pair_sum(&self, t: f64, n_phi: usize) -> f64 {
        if self.dim == 1 {
            let plus = (self.f)([self.x[0] + t, 0.0]);
            let minus = (self.f)([self.x[0] - t, 0.0]);
            signed_power(self.ux - plus, self.pm1) + signed_power(self.ux - minus, self.pm1)
        } else {
            let mut acc = 0.0;
            let dphi = std::f64::consts::PI / n_phi as f64;
            for k in 0..n_phi {
                let mut f = |phi: f64| {
                    let (sn, cs) = phi.sin_cos();
                    let y_plus = [self.x[0] + t * cs, self.x[1] + t * sn];
                    let y_minus = [self.x[0] - t * cs, self.x[1] - t * sn];
                    signed_power(self.ux - (self.f)(y_plus), self.pm1)
                        + signed_power(self.ux - (self.f)(y_minus), self.pm1)
                };
                acc += gl_panel(&mut f, k as f64 * dphi, (k + 1) as f64 * dphi);
            }
            acc
        }
    }

    /// Integrand in log-radius: `G(tau) = pair_sum(e^tau) e^{-sp tau}`.
    fn g_tau(&self, tau: f64, n_phi: usize) -> f64 {
        let t = tau.exp();
        self.pair_sum(t, n_phi) * (-self.sp * tau).exp()
    }

    fn integrate_tau(&self, segments: &[(f64, f64, usize)], splits: usize, n_phi: usize) -> f64 {
        let mut acc = 0.0;
        for &(lo, hi, base) in segments {
            let n = base * splits;
            let step = (hi - lo) / n as f64;
            for k in 0..n {
                let a = lo + step * k as f64;
                let b = if k + 1 == n { hi } else { a + step };
                let mut g = |tau: f64| self.g_tau(tau, n_phi);
                acc += gl_panel(&mut g, a, b);
            }
        }
        acc
    }
}

struct PvSetup {
    r_inner: f64,
    far: f64,
    breakpoints: Vec<f64>,
    tail_value: f64,
    decay_exponent: f64,
    /// Radius below which the paired residual drowns in floating-point
    /// rounding noise; the quadrature never samples below it. The omitted
    /// true mass there is `O(t_floor^{p(1-s)})` and is reported through the
    /// error estimate.
    noise_floor: f64,
}

/// Core radial principal-value integral `int_0^far P(t) dt + tail`, where
/// `P(t) = pair_sum(t) t^{-(1 + sp)}` in the unified radial form. Refines
/// panels by factor two up to the level cap and extends the inner log-range
/// when the integrand has not decayed there, stopping at the rounding-noise
/// floor.
fn radial_pv(engine: &RadialEngine, setup: &PvSetup, quad: &QuadConfig) -> Result<Estimate> {
    let tau_in = setup.r_inner.ln();
    let tau_far = setup.far.ln();
    let decay = setup.decay_exponent.clamp(1e-3, 34.0);
    let span_cap = (setup.r_inner / setup.noise_floor).ln().max(1.0);
    let mut t_span = (34.0 / decay).min(span_cap);

    // Zone B: panel segments between the pairing radius and the far
    // truncation, broken and graded at declared kink radii.
    let mut taus: Vec<f64> = vec![tau_in, tau_far];
    for &b in &setup.breakpoints {
        if b > setup.r_inner * 1.0000001 && b < setup.far * 0.9999999 {
            taus.push(b.ln());
        }
    }
    taus.sort_by(|a, b| a.total_cmp(b));
    taus.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    let taus = grade_breakpoints(&taus, 6);
    let span_b = tau_far - tau_in;
    let width_target = span_b / quad.far_panels as f64;
    let zone_b: Vec<(f64, f64, usize)> = taus
        .windows(2)
        .map(|w| {
            let base = ((w[1] - w[0]) / width_target).ceil().max(1.0) as usize;
            (w[0], w[1], base.min(64))
        })
        .collect();

    let mut last = 0.0;
    let mut last_err = f64::INFINITY;
    for _extension in 0..4 {
        let at_floor = t_span >= span_cap - 1e-9;
        let tau_min = tau_in - t_span;
        let mut segments = vec![(tau_min, tau_in, quad.near_panels)];
        segments.extend_from_slice(&zone_b);

        let mut prev: Option<f64> = None;
        for level in 0..=QUAD_MAX_LEVELS {
            let splits = 1usize << level;
            let n_phi = (4usize << level.min(6)).min(128);
            let inner = engine.integrate_tau(&segments, splits, n_phi);
            let value = inner + setup.tail_value;
            if let Some(p) = prev {
                let err = (value - p).abs();
                last = value;
                last_err = err;
                if err <= QUAD_REL_TOL * value.abs() + 1e-13 * (1.0 + value.abs()) {
                    // Converged on the truncated range; account for what is
                    // left below tau_min.
                    let g0 = engine.g_tau(tau_min, n_phi).abs();
                    if g0 == 0.0 {
                        return Ok(Estimate {
                            value,
                            error_estimate: err,
                        });
                    }
                    let tol = QUAD_REL_TOL * value.abs() + 1e-13 * (1.0 + value.abs());
                    if at_floor {
                        // Below the noise floor the measured integrand is
                        // rounding noise; extrapolate the remainder with the
                        // assumed decay and fold it into the estimate.
                        let remaining = g0 / decay.max(0.05);
                        if remaining <= 0.02 * (value.abs() + 1e-12) {
                            return Ok(Estimate {
                                value,
                                error_estimate: err + remaining,
                            });
                        }
                        return Err(Error::QuadratureNotConverged {
                            value,
                            error_estimate: remaining,
                            levels: level,
                        });
                    }
                    let g1 = engine.g_tau(tau_min + 1.0, n_phi).abs();
                    let rate = if g1 > 0.0 { (g1 / g0).ln() } else { 1.0 };
                    let remaining = if rate > 1e-3 { g0 / rate } else { f64::INFINITY };
                    if remaining <= tol {
                        return Ok(Estimate {
                            value,
                            error_estimate: err.max(remaining),
                        });
                    }
                    break; // extend the log-range and retry
                }
            }
            prev = Some(value);
        }
        t_span = (t_span * 3.0).min(span_cap);
    }
    Err(Error::QuadratureNotConverged {
        value: last,
        error_estimate: last_err,
        levels: QUAD_MAX_LEVELS,
    })
}

/// Radius below which differences `u(x) - u(x + t)` are dominated by
/// rounding; `eps^{1/p}` balances integrated noise against the omitted mass.
fn noise_floor(x: Point, params: &FracParams) -> f64 {
    f64::EPSILON.powf(1.0 / params.p()) * (1.0 + x[0].hypot(x[1]))
}

/// Decides how close to `x` the pairing zone may extend and which decay
/// exponent to assume for the paired integrand, based on the declared
/// smoothness of `u` at `x`. Errors when the principal value may not exist.
fn singularity_guard(
    u: &ClosedFormFunction,
    x: Point,
    params: &FracParams,
    quad: &QuadConfig,
    breakpoints: &[f64],
) -> Result<(f64, f64)> {
    let p = params.p();
    let s = params.s();
    let smooth_decay = p * (1.0 - s);
    let kink_index = params.sp() / (p - 1.0);

    let at_singular = match u.smoothness() {
        Smoothness::C2Everywhere => false,
        Smoothness::ContinuousOnly => true,
        Smoothness::C2ExceptPoints => u
            .nearest_singular_distance(x)
            .map(|d| d < 1e-12 * (1.0 + x[0].abs() + x[1].abs()))
            .unwrap_or(false),
    };
    if at_singular && kink_index >= 1.0 {
        return Err(Error::SingularPoint {
            x: x[0],
            y: x[1],
            index: kink_index,
        });
    }

    let mut r_inner = quad.pv_inner_radius;
    if let Some(&first) = breakpoints.first() {
        r_inner = r_inner.min(0.45 * first);
    }
    if r_inner <= 0.0 {
        r_inner = quad.pv_inner_radius.min(1e-6);
    }
    let decay = if at_singular {
        smooth_decay.min(p - 1.0 - params.sp())
    } else {
        smooth_decay
    };
    Ok((r_inner, decay.max(1e-3)))
}

fn tail_contribution(
    tail: TailClass,
    mode: TailMode,
    ux: f64,
    x: Point,
    params: &FracParams,
    far_radius: f64,
) -> (f64, f64) {
    match (mode, tail) {
        (TailMode::AnalyticFromTailClass, TailClass::CompactSupport { center, radius }) => {
            // Beyond the support everything reduces to the constant u(x);
            // the remaining kernel integral has a closed form.
            let far = far_radius.max(dist(x, center) + radius + 1e-12);
            let sp = params.sp();
            let tail = signed_power(ux, params.p() - 1.0)
                * unit_sphere_area(params.dim())
                * far.powf(-sp)
                / sp;
            (far, tail)
        }
        // Merely bounded or power-growth functions are truncated; the
        // truncation error is O(far_radius^{-sp}) and the caller controls
        // far_radius.
        _ => (far_radius, 0.0),
    }
}

/// Evaluates `(-Delta_p)^s u (x) = 2 PV int signed_power(u(x) - u(y), p-1)
/// |x - y|^{-(dim + sp)} dy` with an error estimate from panel refinement.
pub fn evaluate_op(
    u: &ClosedFormFunction,
    x: Point,
    params: &FracParams,
    quad: &QuadConfig,
) -> Result<Estimate> {
    quad.validate()?;
    u.check_tail_finite(params)?;
    let ux = u.value(x);
    let breakpoints = u.radial_breakpoints(x);
    let (r_inner, decay) = singularity_guard(u, x, params, quad, &breakpoints)?;
    let (far, tail_value) =
        tail_contribution(u.tail(), quad.tail_mode, ux, x, params, quad.far_radius);

    let eval = |y: Point| u.value(y);
    let engine = RadialEngine {
        dim: params.dim(),
        sp: params.sp(),
        pm1: params.p() - 1.0,
        ux,
        x,
        f: &eval,
    };
    let setup = PvSetup {
        r_inner,
        far,
        breakpoints,
        tail_value,
        decay_exponent: decay,
        noise_floor: noise_floor(x, params),
    };
    let est = radial_pv(&engine, &setup, quad)?;
    let scale = 2.0 * params.norm_const();
    Ok(Estimate {
        value: scale * est.value,
        error_estimate: scale * est.error_estimate,
    })
}

/// Operator value of the glued function at its center: the inner function
/// supplies the singular part on the gluing ball, the outer function the
/// regular exterior integral and the tail.
pub fn evaluate_glued(
    g: &GluedFunction,
    x0: Point,
    params: &FracParams,
    quad: &QuadConfig,
) -> Result<Estimate> {
    quad.validate()?;
    if dist(x0, g.center) > 1e-12 * (1.0 + g.radius) {
        return Err(Error::PreconditionViolated(
            "glued evaluation point must be the gluing center".into(),
        ));
    }
    if g.radius <= 0.0 {
        return Err(Error::PreconditionViolated(
            "gluing radius must be positive".into(),
        ));
    }
    g.outer.check_tail_finite(params)?;
    let ux = g.inner.value(x0);

    // Breakpoints: the gluing sphere plus both functions' kink radii.
    let mut breakpoints = vec![g.radius];
    breakpoints.extend(g.inner.radial_breakpoints(x0));
    breakpoints.extend(g.outer.radial_breakpoints(x0));
    breakpoints.retain(|t| *t > 0.0);
    breakpoints.sort_by(|a, b| a.total_cmp(b));
    breakpoints.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * (1.0 + b.abs()));

    // The pairing zone must stay inside the gluing ball, where the inner
    // function is twice differentiable by hypothesis.
    let inner_guard = g
        .inner
        .nearest_singular_distance(x0)
        .filter(|d| *d > 0.0)
        .unwrap_or(f64::INFINITY);
    let r_inner = quad
        .pv_inner_radius
        .min(0.95 * g.radius)
        .min(0.45 * inner_guard);
    let (far, tail_value) =
        tail_contribution(g.outer.tail(), quad.tail_mode, ux, x0, params, quad.far_radius);

    let eval = |y: Point| g.value(y);
    let engine = RadialEngine {
        dim: params.dim(),
        sp: params.sp(),
        pm1: params.p() - 1.0,
        ux,
        x: x0,
        f: &eval,
    };
    let setup = PvSetup {
        r_inner,
        far,
        breakpoints,
        tail_value,
        decay_exponent: (params.p() * (1.0 - params.s())).min(1.0),
        noise_floor: noise_floor(x0, params),
    };
    let est = radial_pv(&engine, &setup, quad)?;
    let scale = 2.0 * params.norm_const();
    Ok(Estimate {
        value: scale * est.value,
        error_estimate: scale * est.error_estimate,
    })
}

/// Closed form of the barrier's interior term:
/// `eps^{p-1} * omega_dim / (beta (p-1) - p s) * r^{beta (p-1) - p s}`,
/// with `omega_dim` the unit-ball volume (2 in 1D, pi in 2D).
pub fn barrier_inner_term(eps: f64, beta: f64, r: f64, params: &FracParams) -> Result<f64> {
    let p = params.p();
    let s = params.s();
    let threshold = 2.0f64.max(2.0 / (2.0 - s));
    if beta <= threshold {
        return Err(Error::InvalidBeta(format!(
            "beta = {beta} must exceed max(2, 2/(2-s)) = {threshold}"
        )));
    }
    let q = beta * (p - 1.0) - params.sp();
    if q <= 0.0 {
        return Err(Error::InvalidBeta(format!(
            "beta (p-1) - p s = {q} must be positive (beta > sp/(p-1))"
        )));
    }
    if eps < 0.0 || r <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "need eps >= 0 and r > 0, got eps = {eps}, r = {r}"
        )));
    }
    let eps_pow = if eps == 0.0 {
        0.0
    } else {
        eps.powf(p - 1.0)
    };
    Ok(eps_pow * unit_ball_volume(params.dim()) / q * r.powf(q))
}

/// The perturbation right-hand side produced by adding a jump
/// `v = v_value * chi_{support}` to `u`:
/// `h(x) = 2 int_supp [ (u(x)-u(y)-v)^{p-1} - (u(x)-u(y))^{p-1} ]
/// |x - y|^{-(dim + sp)} dy`, a regular integral away from the support.
pub fn jump_perturbation_h(
    u: &ClosedFormFunction,
    v_support: &Domain,
    v_value: f64,
    x: Point,
    params: &FracParams,
    quad: &QuadConfig,
) -> Result<Estimate> {
    quad.validate()?;
    v_support.validate()?;
    let d = v_support.distance_to_set(x);
    if d < quad.pv_inner_radius {
        return Err(Error::SupportTooClose {
            dist: d,
            min: quad.pv_inner_radius,
        });
    }
    let pm1 = params.p() - 1.0;
    let exponent = params.kernel_exponent();
    let ux = u.value(x);
    let density = |y: Point| {
        let diff = ux - u.value(y);
        (signed_power(diff - v_value, pm1) - signed_power(diff, pm1))
            * dist(x, y).powf(-exponent)
    };

    let mut prev: Option<f64> = None;
    let mut last = 0.0;
    let mut err = f64::INFINITY;
    for level in 0..=QUAD_MAX_LEVELS {
        let splits = 1usize << level;
        let value = 2.0 * integrate_over_domain(v_support, u, &density, splits);
        if let Some(p0) = prev {
            err = (value - p0).abs();
            last = value;
            if err <= QUAD_REL_TOL * value.abs() + 1e-13 * (1.0 + value.abs()) {
                return Ok(Estimate {
                    value,
                    error_estimate: err,
                });
            }
        } else {
            last = value;
        }
        prev = Some(value);
    }
    Err(Error::QuadratureNotConverged {
        value: last,
        error_estimate: err,
        levels: QUAD_MAX_LEVELS,
    })
}

fn integrate_over_domain(
    support: &Domain,
    u: &ClosedFormFunction,
    density: &dyn Fn(Point) -> f64,
    splits: usize,
) -> f64 {
    match support {
        Domain::Interval { a, b } => {
            let mut breaks = vec![*a, *b];
            for &s in u.singular_points() {
                if s[0] > *a && s[0] < *b {
                    breaks.push(s[0]);
                }
            }
            breaks.sort_by(|x, y| x.total_cmp(y));
            breaks.dedup();
            let mut f = |t: f64| density([t, 0.0]);
            crate::quad::integrate_segments(&mut f, &breaks, 4 * splits)
        }
        Domain::Ball { center, radius } => {
            let two_pi = 2.0 * std::f64::consts::PI;
            let n_phi = 8 * splits;
            let mut radial = |r: f64| {
                let mut acc = 0.0;
                let dphi = two_pi / n_phi as f64;
                for k in 0..n_phi {
                    let mut f = |phi: f64| {
                        density([center[0] + r * phi.cos(), center[1] + r * phi.sin()])
                    };
                    acc += gl_panel(&mut f, k as f64 * dphi, (k + 1) as f64 * dphi);
                }
                acc * r
            };
            crate::quad::integrate_segments(&mut radial, &[0.0, *radius], 4 * splits)
        }
        Domain::Rectangle { lo, hi } => {
            let mut outer = |y: f64| {
                let mut f = |x: f64| density([x, y]);
                crate::quad::integrate_segments(&mut f, &[lo[0], hi[0]], 4 * splits)
            };
            crate::quad::integrate_segments(&mut outer, &[lo[1], hi[1]], 4 * splits)
        }
    }
}

/// One sample of the boundary-strip scan.
#[derive(Debug, Clone, Copy)]
pub struct ScanSample {
    pub point: Point,
    pub delta: f64,
    pub value: f64,
    pub error_estimate: f64,
}

/// Result of scanning the operator on the boundary-distance profile.
#[derive(Debug, Clone)]
pub struct BoundednessScan {
    pub samples: Vec<ScanSample>,
    pub max_abs: f64,
    pub median_abs: f64,
}

impl BoundednessScan {
    /// Bounded in the scan's own terms: no sample exceeds `factor` times
    /// the median magnitude.
    pub fn bounded_within(&self, factor: f64) -> bool {
        self.max_abs <= factor * self.median_abs + 1e-12
    }
}

/// Samples the boundary strip `{0 < delta(x) < strip_width}` away from the
/// ridge of the distance function and evaluates the operator on `delta^s`
/// pointwise. The profile is a bounded right-hand side there, so the
/// headline quantity is the maximum magnitude against the median.
pub fn delta_s_boundedness_scan(
    domain: &Domain,
    strip_width: f64,
    n_samples: usize,
    params: &FracParams,
    quad: &QuadConfig,
) -> Result<BoundednessScan> {
    domain.validate()?;
    if !(strip_width > 0.0 && strip_width < domain.inradius()) {
        return Err(Error::PreconditionViolated(format!(
            "strip width {strip_width} must lie in (0, inradius = {})",
            domain.inradius()
        )));
    }
    if n_samples < 2 {
        return Err(Error::PreconditionViolated(
            "need at least 2 scan samples".into(),
        ));
    }
    let profile = ClosedFormFunction::boundary_distance_pow(domain, params, 1.0);
    let anchors = domain.boundary_anchors();
    let per_anchor = (n_samples / anchors.len()).max(1);
    // Geometric depths probe the approach to the boundary.
    let ratio = if per_anchor > 1 {
        (1.0f64 / 64.0).powf(1.0 / (per_anchor as f64 - 1.0))
    } else {
        1.0
    };
    let mut samples = Vec::new();
    for (base, normal) in &anchors {
        for j in 0..per_anchor {
            let delta = 0.9 * strip_width * ratio.powi(j as i32);
            let x = [base[0] + delta * normal[0], base[1] + delta * normal[1]];
            // Stay off the ridge, where delta^s is not twice differentiable.
            if domain.medial_distance(x) < strip_width / 10.0 {
                continue;
            }
            let est = evaluate_op(&profile, x, params, quad)?;
            samples.push(ScanSample {
                point: x,
                delta,
                value: est.value,
                error_estimate: est.error_estimate,
            });
        }
    }
    let mut mags: Vec<f64> = samples.iter().map(|s| s.value.abs()).collect();
    mags.sort_by(|a, b| a.total_cmp(b));
    let max_abs = mags.last().copied().unwrap_or(0.0);
    let median_abs = if mags.is_empty() {
        0.0
    } else if mags.len() % 2 == 1 {
        mags[mags.len() / 2]
    } else {
        0.5 * (mags[mags.len() / 2 - 1] + mags[mags.len() / 2])
    };
    Ok(BoundednessScan {
        samples,
        max_abs,
        median_abs,
    })
}

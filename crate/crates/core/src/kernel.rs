//! Signed powers, the tail norm, and the discrete Gagliardo seminorm.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::func::{ClosedFormFunction, TailClass};
use crate::geom::dist;
use crate::grid::{GridFunction, KernelTable};
use crate::params::FracParams;
use crate::quad::{
    gl_panel, grade_breakpoints, integrate_segments, Estimate, QuadConfig, QUAD_MAX_LEVELS,
    QUAD_REL_TOL,
};

/// The signed power `t -> |t|^{q-1} t`; odd and strictly increasing in `t`.
/// Requires `q > 0`; the value at `t = 0` is zero.
#[inline]
pub fn signed_power(t: f64, q: f64) -> f64 {
    debug_assert!(q > 0.0, "signed_power requires q > 0");
    if t == 0.0 {
        return 0.0;
    }
    let mag = if q == 1.0 {
        t.abs()
    } else if q == 2.0 {
        t * t
    } else {
        t.abs().powf(q)
    };
    if t < 0.0 {
        -mag
    } else {
        mag
    }
}

/// `|t|^q` with the same fast paths as [`signed_power`].
#[inline]
pub(crate) fn abs_power(t: f64, q: f64) -> f64 {
    if q == 1.0 {
        t.abs()
    } else if q == 2.0 {
        t * t
    } else {
        t.abs().powf(q)
    }
}

/// Numerical value of the tail norm
/// `[u]_{s,p} = int_{R^N} |u(x)|^{p-1} (1 + |x|)^{-(N + s p)} dx`,
/// with an error estimate from panel refinement.
///
/// Divergence is detected symbolically from the declared tail class, not
/// numerically: a truncated quadrature cannot see it.
pub fn tail_norm(
    u: &ClosedFormFunction,
    params: &FracParams,
    quad: &QuadConfig,
) -> Result<Estimate> {
    quad.validate()?;
    u.check_tail_finite(params)?;
    let pm1 = params.p() - 1.0;
    let wexp = params.kernel_exponent();
    let dim = params.dim();

    // Radial breakpoints: the weight has a kink at the origin, and u may
    // have its own non-smooth radii.
    let mut result_prev: Option<f64> = None;
    let mut last = 0.0;
    let mut err = f64::INFINITY;
    for level in 0..=QUAD_MAX_LEVELS {
        let splits = 1usize << level;
        let value = if dim == 1 {
            let mut integrand = |x: f64| {
                abs_power(u.value([x, 0.0]), pm1) * (1.0 + x.abs()).powf(-wexp)
            };
            match u.tail() {
                TailClass::CompactSupport { center, radius } => {
                    let lo = center[0] - radius;
                    let hi = center[0] + radius;
                    let mut breaks: Vec<f64> = vec![lo, hi];
                    if lo < 0.0 && hi > 0.0 {
                        breaks.push(0.0);
                    }
                    for &s in u.singular_points() {
                        if s[0] > lo && s[0] < hi {
                            breaks.push(s[0]);
                        }
                    }
                    breaks.sort_by(|a, b| a.total_cmp(b));
                    breaks.dedup();
                    let graded = grade_breakpoints(&breaks, 6);
                    integrate_segments(&mut integrand, &graded, 2 * splits)
                }
                _ => {
                    // Compactify with x = tan(theta); the weight keeps the
                    // transformed integrand bounded for bounded u.
                    let mut g = |theta: f64| {
                        let x = theta.tan();
                        let sec2 = 1.0 + x * x;
                        integrand(x) * sec2
                    };
                    let half_pi = std::f64::consts::FRAC_PI_2;
                    let mut breaks = vec![-half_pi + 1e-12, 0.0, half_pi - 1e-12];
                    for &s in u.singular_points() {
                        breaks.push(s[0].atan());
                    }
                    breaks.sort_by(|a, b| a.total_cmp(b));
                    breaks.dedup();
                    integrate_segments(&mut g, &breaks, 4 * splits)
                }
            }
        } else {
            // Polar coordinates around the origin; the angular integral is
            // resolved with panels that refine together with the radial ones.
            let n_phi = 8 * splits;
            let two_pi = 2.0 * std::f64::consts::PI;
            let mut radial = |r: f64| {
                let mut acc = 0.0;
                let dphi = two_pi / n_phi as f64;
                for k in 0..n_phi {
                    let mut f = |phi: f64| abs_power(u.value([r * phi.cos(), r * phi.sin()]), pm1);
                    acc += gl_panel(&mut f, k as f64 * dphi, (k + 1) as f64 * dphi);
                }
                acc * r * (1.0 + r).powf(-wexp)
            };
            match u.tail() {
                TailClass::CompactSupport { center, radius } => {
                    let rmax = center[0].hypot(center[1]) + radius;
                    let breaks = vec![0.0, 0.5 * rmax, rmax];
                    integrate_segments(&mut radial, &breaks, 4 * splits)
                }
                _ => {
                    let half_pi = std::f64::consts::FRAC_PI_2;
                    let mut g = |psi: f64| {
                        let r = psi.tan();
                        radial(r) * (1.0 + r * r)
                    };
                    let breaks = vec![1e-12, 0.7, half_pi - 1e-12];
                    integrate_segments(&mut g, &breaks, 4 * splits)
                }
            }
        };
        if let Some(prev) = result_prev {
            err = (value - prev).abs();
            last = value;
            if err <= QUAD_REL_TOL * value.abs() + 1e-13 {
                return Ok(Estimate {
                    value,
                    error_estimate: err,
                });
            }
        } else {
            last = value;
        }
        result_prev = Some(value);
    }
    Err(Error::QuadratureNotConverged {
        value: last,
        error_estimate: err,
        levels: QUAD_MAX_LEVELS,
    })
}

/// Discrete Gagliardo seminorm over the interior nodes:
/// `sum_{i != j} |u_i - u_j|^p |x_i - x_j|^{-(dim + s p)} h^{2 dim}`.
///
/// Pair rows are reduced in chunks of fixed order (one sequential partial
/// per row, partials summed in row order), so the result is bit-identical
/// across runs and thread counts.
pub fn gagliardo_seminorm(u: &GridFunction, params: &FracParams) -> f64 {
    let grid = u.grid();
    let table = KernelTable::build(grid, params);
    let interior = grid.interior_nodes();
    let vals = u.values();
    let p = params.p();

    let partials: Vec<f64> = interior
        .par_iter()
        .enumerate()
        .map(|(a, &i)| {
            let i = i as usize;
            let (ix, iy) = grid.lattice_coords(i);
            let ui = vals[i];
            let mut acc = 0.0;
            // Count each unordered pair once here; doubled below.
            for &j in &interior[a + 1..] {
                let j = j as usize;
                let (jx, jy) = grid.lattice_coords(j);
                acc += abs_power(ui - vals[j], p) * table.weight(ix - jx, iy - jy);
            }
            acc
        })
        .collect();
    let total: f64 = partials.iter().sum();
    2.0 * total * grid.pair_measure()
}

/// Positive part node-wise.
pub fn positive_part(u: &GridFunction) -> GridFunction {
    let mut v = u.clone();
    for x in v.values_mut() {
        *x = x.max(0.0);
    }
    v
}

/// Negative part node-wise (`max(-u, 0)`).
pub fn negative_part(u: &GridFunction) -> GridFunction {
    let mut v = u.clone();
    for x in v.values_mut() {
        *x = (-*x).max(0.0);
    }
    v
}

/// Collar nodes of `u` together with their distances to a point; used by
/// harness checks that integrate over the exterior.
pub fn exterior_weighted_sum(
    u: &GridFunction,
    x0: crate::geom::Point,
    exclude_radius: f64,
    params: &FracParams,
    transform: impl Fn(f64) -> f64,
) -> f64 {
    let grid = u.grid();
    let exponent = params.kernel_exponent();
    let mut acc = 0.0;
    for i in 0..grid.len() {
        let r = dist(grid.position(i), x0);
        if r > exclude_radius {
            acc += transform(u.value(i)) * r.powf(-exponent);
        }
    }
    acc * grid.cell_measure()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::Smoothness;
    use crate::geom::Domain;
    use crate::grid::Grid;
    use proptest::prelude::*;
    use std::sync::Arc;

    fn params_1d() -> FracParams {
        FracParams::new(0.5, 2.0, 1).unwrap()
    }

    #[test]
    fn signed_power_examples() {
        assert_eq!(signed_power(2.0, 2.0), 4.0);
        assert_eq!(signed_power(-2.0, 2.0), -4.0);
        assert_eq!(signed_power(-3.0, 1.0), -3.0);
        assert_eq!(signed_power(0.0, 0.7), 0.0);
    }

    #[test]
    fn tail_norm_of_zero_is_zero() {
        let est = tail_norm(
            &ClosedFormFunction::constant(0.0),
            &params_1d(),
            &QuadConfig::default(),
        )
        .unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn tail_norm_of_one_matches_closed_form() {
        // int (1 + |x|)^{-2} dx over R equals 2.
        let est = tail_norm(
            &ClosedFormFunction::constant(1.0),
            &params_1d(),
            &QuadConfig::default(),
        )
        .unwrap();
        assert!(
            (est.value - 2.0).abs() < 1e-8,
            "value {} err {}",
            est.value,
            est.error_estimate
        );
    }

    #[test]
    fn tail_norm_divergence_detected_symbolically() {
        let f = ClosedFormFunction::new(
            |x| x[0].abs(),
            Smoothness::C2ExceptPoints,
            TailClass::PowerGrowth { gamma: 1.0 },
            vec![[0.0, 0.0]],
        );
        match tail_norm(&f, &params_1d(), &QuadConfig::default()) {
            Err(Error::TailDivergent(_)) => {}
            other => panic!("expected TailDivergent, got {other:?}"),
        }
    }

    #[test]
    fn tail_norm_2d_constant() {
        // int_{R^2} (1+r)^{-3} dA = 2 pi int_0^inf r (1+r)^{-3} dr = pi.
        let prm = FracParams::new(0.5, 2.0, 2).unwrap();
        let est = tail_norm(
            &ClosedFormFunction::constant(1.0),
            &prm,
            &QuadConfig::default(),
        )
        .unwrap();
        assert!(
            (est.value - std::f64::consts::PI).abs() < 1e-6,
            "value {}",
            est.value
        );
    }

    fn three_node_grid() -> Arc<Grid> {
        // Interior nodes land at 0, h, 2h for the interval (-h, 3h).
        let h = 0.25;
        let dom = Domain::interval(-h, 3.0 * h).unwrap();
        Arc::new(Grid::build(&dom, 3, 4.0 * h).unwrap())
    }

    #[test]
    fn seminorm_hand_enumerated_three_nodes() {
        let grid = three_node_grid();
        let prm = params_1d();
        let mut u = GridFunction::zeros(grid.clone());
        let mid = grid.interior_nodes()[1] as usize;
        u.values_mut()[mid] = 1.0;
        // Pairs (0,1) and (1,2) each contribute |1|^2 / h^2, pair (0,2)
        // contributes 0; the ordered double sum doubles that, and the cell
        // weight h^2 cancels the kernel: total 4.
        let got = gagliardo_seminorm(&u, &prm);
        assert!((got - 4.0).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn seminorm_zero_iff_constant() {
        let grid = three_node_grid();
        let prm = params_1d();
        let c = GridFunction::from_fn(grid.clone(), |_| 3.7).unwrap();
        assert_eq!(gagliardo_seminorm(&c, &prm), 0.0);
        let mut u = GridFunction::zeros(grid.clone());
        u.values_mut()[grid.interior_nodes()[0] as usize] = 1.0;
        assert!(gagliardo_seminorm(&u, &prm) > 0.0);
    }

    #[test]
    fn seminorm_brute_force_cross_check() {
        let dom = Domain::interval(-1.0, 1.0).unwrap();
        let grid = Arc::new(Grid::build(&dom, 17, 2.0).unwrap());
        let prm = FracParams::new(0.3, 2.5, 1).unwrap();
        let u = GridFunction::from_fn(grid.clone(), |x| (3.0 * x[0]).sin()).unwrap();
        let got = gagliardo_seminorm(&u, &prm);
        // Independent dense loop over interior pairs from positions.
        let interior = grid.interior_nodes();
        let mut want = 0.0;
        for &i in interior {
            for &j in interior {
                if i == j {
                    continue;
                }
                let (xi, xj) = (grid.position(i as usize), grid.position(j as usize));
                let d = (xi[0] - xj[0]).abs();
                want += (u.value(i as usize) - u.value(j as usize)).abs().powf(prm.p())
                    / d.powf(prm.kernel_exponent());
            }
        }
        want *= grid.pair_measure();
        assert!((got - want).abs() <= 1e-10 * want.abs(), "{got} vs {want}");
    }

    proptest! {
        #[test]
        fn signed_power_is_odd(t in -100.0f64..100.0, q in 0.05f64..8.0) {
            prop_assert_eq!(signed_power(-t, q), -signed_power(t, q));
        }

        #[test]
        fn signed_power_monotone(a in -50.0f64..50.0, b in -50.0f64..50.0, q in 0.05f64..8.0) {
            if a < b {
                prop_assert!(signed_power(a, q) <= signed_power(b, q));
            }
        }
    }

    #[test]
    fn seminorm_translation_and_scaling() {
        let grid = three_node_grid();
        let prm = FracParams::new(0.4, 3.0, 1).unwrap();
        let u = GridFunction::from_fn(grid.clone(), |x| x[0] * x[0] - 0.3 * x[0]).unwrap();
        let base = gagliardo_seminorm(&u, &prm);

        let shifted = GridFunction::new(
            grid.clone(),
            u.values().iter().map(|v| v + 5.0).collect(),
        )
        .unwrap();
        // Exact up to the rounding of the shifted nodal values themselves.
        let got = gagliardo_seminorm(&shifted, &prm);
        assert!((got - base).abs() <= 1e-12 * base.abs());

        let lam = -2.5f64;
        let scaled =
            GridFunction::new(grid.clone(), u.values().iter().map(|v| lam * v).collect()).unwrap();
        let got = gagliardo_seminorm(&scaled, &prm);
        let want = lam.abs().powf(prm.p()) * base;
        assert!((got - want).abs() <= 1e-12 * want.abs());
    }

    #[test]
    fn parts_do_not_increase_seminorm() {
        let grid = three_node_grid();
        let prm = params_1d();
        let u = GridFunction::from_fn(grid, |x| (5.0 * x[0]).sin() - 0.2).unwrap();
        let s = gagliardo_seminorm(&u, &prm);
        assert!(gagliardo_seminorm(&positive_part(&u), &prm) <= s + 1e-15);
        assert!(gagliardo_seminorm(&negative_part(&u), &prm) <= s + 1e-15);
    }
}

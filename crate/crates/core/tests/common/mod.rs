//! Independent oracles used by the integration tests. These deliberately
//! avoid the library's quadrature and solver paths: the operator oracle is
//! a Taylor-assisted adaptive Simpson rule on the paired integrand, and the
//! solver oracle is a dense linear solve assembled from node positions.

#![allow(dead_code)]

use fracp_core::{dist, Grid};
use nalgebra::{DMatrix, DVector};

/// Classic recursive adaptive Simpson on `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 40)
}

/// High-resolution oracle for the 1D operator at `p = 2`:
/// `2 PV int (u(x) - u(y)) |x - y|^{-(1 + 2s)} dy`.
///
/// The core below `t_core` uses a Taylor model of the second difference
/// with coefficients measured by Richardson finite differences, which
/// sidesteps rounding noise; the rest is adaptive Simpson split at the
/// declared kink radii; compactly supported functions get the exact tail.
pub fn oracle_op_p2_1d(
    u: &dyn Fn(f64) -> f64,
    x: f64,
    s: f64,
    kink_radii: &[f64],
    support_radius: Option<f64>,
    far: f64,
) -> f64 {
    let d2 = |t: f64| (u(x + t) - u(x)) + (u(x - t) - u(x));
    let t_core = {
        let mut tc = 1e-3 * (1.0 + x.abs());
        for &k in kink_radii {
            if k > 0.0 {
                tc = tc.min(0.25 * k);
            }
        }
        tc
    };
    // D2(h) = a h^2 + b h^4 + O(h^6); solve from h and 2h.
    let h = 0.05 * t_core;
    let (d_h, d_2h) = (d2(h), d2(2.0 * h));
    let a = (16.0 * d_h - d_2h) / (12.0 * h * h);
    let b = (d_2h - 4.0 * d_h) / (12.0 * h.powi(4));
    let core = -(a * t_core.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s)
        + b * t_core.powf(4.0 - 2.0 * s) / (4.0 - 2.0 * s));

    let paired = |t: f64| -d2(t) * t.powf(-(1.0 + 2.0 * s));
    let mut breaks: Vec<f64> = vec![t_core];
    let mut t = t_core;
    while t < far {
        t *= 4.0;
        breaks.push(t.min(far));
    }
    for &k in kink_radii {
        if k > t_core && k < far {
            breaks.push(k);
        }
    }
    breaks.push(far);
    breaks.sort_by(|p, q| p.total_cmp(q));
    breaks.dedup_by(|p, q| (*p - *q).abs() < 1e-14 * (1.0 + q.abs()));
    let mut mid = 0.0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            mid += adaptive_simpson(&paired, w[0], w[1], 1e-11);
        }
    }

    let tail = match support_radius {
        Some(r0) if far >= x.abs() + r0 => u(x) * 2.0 * far.powf(-2.0 * s) / (2.0 * s),
        _ => 0.0,
    };
    2.0 * (core + mid + tail)
}

/// Dense linear-solve oracle for `p = 2`: assembles the nodal system from
/// positions (independently of the kernel table) and solves it directly.
/// Returns interior values in interior-node order.
pub fn dense_p2_solution(grid: &Grid, s: f64, f: &[f64], g: &[f64], c: &[f64]) -> Vec<f64> {
    let interior = grid.interior_nodes();
    let collar = grid.collar_nodes();
    let n = interior.len();
    let exponent = grid.dim() as f64 + 2.0 * s;
    let h2 = grid.pair_measure();
    let hd = grid.cell_measure();

    let mut interior_index = vec![usize::MAX; grid.len()];
    for (a, &i) in interior.iter().enumerate() {
        interior_index[i as usize] = a;
    }
    let mut collar_index = vec![usize::MAX; grid.len()];
    for (k, &i) in collar.iter().enumerate() {
        collar_index[i as usize] = k;
    }

    let mut mat = DMatrix::<f64>::zeros(n, n);
    let mut rhs = DVector::<f64>::zeros(n);
    for (a, &i) in interior.iter().enumerate() {
        let i = i as usize;
        let xi = grid.position(i);
        let mut diag = 0.0;
        for j in 0..grid.len() {
            if j == i {
                continue;
            }
            let w = dist(xi, grid.position(j)).powf(-exponent);
            diag += w;
            if interior_index[j] != usize::MAX {
                mat[(a, interior_index[j])] -= 2.0 * h2 * w;
            } else {
                rhs[a] += 2.0 * h2 * w * g[collar_index[j]];
            }
        }
        mat[(a, a)] = 2.0 * h2 * diag - c[a] * hd;
        rhs[a] += f[a] * hd;
    }
    let sol = mat.lu().solve(&rhs).expect("dense system is invertible");
    sol.iter().copied().collect()
}

/// Maximum absolute difference between two slices.
pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

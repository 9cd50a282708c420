//! Discrete weak operator, convex nonlocal energy, and the Dirichlet solver.
//!
//! The energy is minimized by damped Newton with backtracking line search
//! for `p >= 2`; for `p < 2` the Hessian degenerates where nodal values tie,
//! so the search direction is preconditioned by a regularized Hessian while
//! gradient and energy stay exact. All pair sums reduce in fixed node order
//! (one sequential partial per row, partials combined in row order), so
//! results are bit-identical across runs and thread counts.

use nalgebra::{Cholesky, DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geom::dist;
use crate::grid::{Grid, GridFunction, KernelTable};
use crate::kernel::{abs_power, signed_power};
use crate::params::FracParams;
use crate::problem::DirichletProblem;

/// Options for [`solve_dirichlet`].
#[derive(Debug, Clone)]
pub struct SolverOpts {
    /// Sup-norm tolerance on the interior energy gradient. Defaults to
    /// `1e-8` for `p = 2` and `1e-6` otherwise.
    pub grad_tol: Option<f64>,
    pub max_iter: usize,
    pub init: InitGuess,
}

#[derive(Debug, Clone, Default)]
pub enum InitGuess {
    /// Start from the `p = 2` solution when `p != 2`, from zero otherwise.
    #[default]
    Auto,
    Zeros,
    Values(Vec<f64>),
}

impl Default for SolverOpts {
    fn default() -> Self {
        Self {
            grad_tol: None,
            max_iter: 10_000,
            init: InitGuess::Auto,
        }
    }
}

impl SolverOpts {
    pub fn effective_grad_tol(&self, params: &FracParams) -> f64 {
        self.grad_tol
            .unwrap_or(if params.p() == 2.0 { 1e-8 } else { 1e-6 })
    }
}

/// Hessian regularization used in the preconditioner only, for `p < 2`.
const PRECOND_MU: f64 = 1e-10;
const ARMIJO_C1: f64 = 1e-4;

/// Precomputed tables shared by energy, gradient, and Hessian assembly.
struct Workspace<'a> {
    grid: &'a Grid,
    table: KernelTable,
    problem: &'a DirichletProblem,
    params: FracParams,
    /// Kernel mass of the region beyond the truncation ball, per interior
    /// node; present only for a nonzero constant far datum.
    far_weight: Option<Vec<f64>>,
}

impl<'a> Workspace<'a> {
    fn new(problem: &'a DirichletProblem, params: &FracParams) -> Self {
        let grid = problem.grid().as_ref();
        let far_weight = problem.far_g().map(|_| far_field_weights(grid, params));
        Workspace {
            grid,
            table: KernelTable::build(grid, params),
            problem,
            params: *params,
            far_weight,
        }
    }

    fn full_values(&self, interior: &[f64]) -> Vec<f64> {
        let mut values = vec![0.0; self.grid.len()];
        for (k, &i) in self.grid.interior_nodes().iter().enumerate() {
            values[i as usize] = interior[k];
        }
        for (k, &i) in self.grid.collar_nodes().iter().enumerate() {
            values[i as usize] = self.problem.g()[k];
        }
        values
    }

    /// Energy up to the constant collar-collar pair contribution, which the
    /// minimization never sees.
    fn energy(&self, interior: &[f64]) -> f64 {
        let values = self.full_values(interior);
        let p = self.params.p();
        let grid = self.grid;
        let interior_ids = grid.interior_nodes();
        let partials: Vec<f64> = interior_ids
            .par_iter()
            .map(|&i| {
                let i = i as usize;
                let (ix, iy) = grid.lattice_coords(i);
                let ui = values[i];
                let mut acc = 0.0;
                for (j, &vj) in values.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let (jx, jy) = grid.lattice_coords(j);
                    let term = abs_power(ui - vj, p) * self.table.weight(ix - jx, iy - jy);
                    // Interior-interior pairs appear in two rows; halve.
                    acc += match grid.mask(j) {
                        crate::grid::NodeMask::Interior => 0.5 * term,
                        crate::grid::NodeMask::Collar => term,
                    };
                }
                acc
            })
            .collect();
        let pair_part: f64 = partials.iter().sum::<f64>() * 2.0 * grid.pair_measure() / p;

        let hd = grid.cell_measure();
        let mut data_part = 0.0;
        for (k, &v) in interior.iter().enumerate() {
            data_part -= self.problem.f()[k] * v * hd;
            data_part -= self.problem.c()[k] * abs_power(v, p) * hd / p;
        }
        let mut far_part = 0.0;
        if let (Some(w), Some(g_far)) = (&self.far_weight, self.problem.far_g()) {
            for (k, &v) in interior.iter().enumerate() {
                far_part += 2.0 * hd / p * abs_power(v - g_far, p) * w[k];
            }
        }
        pair_part + data_part + far_part
    }

    /// Gradient of the energy with respect to interior values.
    fn gradient(&self, interior: &[f64]) -> Vec<f64> {
        let values = self.full_values(interior);
        let a = weak_operator_values(self.grid, &self.table, &values, &self.params);
        let hd = self.grid.cell_measure();
        let pm1 = self.params.p() - 1.0;
        let mut g: Vec<f64> = a;
        for (k, gi) in g.iter_mut().enumerate() {
            *gi -= (self.problem.f()[k] + self.problem.c()[k] * signed_power(interior[k], pm1))
                * hd;
        }
        if let (Some(w), Some(g_far)) = (&self.far_weight, self.problem.far_g()) {
            for (k, gi) in g.iter_mut().enumerate() {
                *gi += 2.0 * hd * signed_power(interior[k] - g_far, pm1) * w[k];
            }
        }
        g
    }

    /// Hessian over interior unknowns. For `p < 2` the pair curvature uses
    /// `(t^2 + mu^2)^{(p-2)/2}` so the matrix stays finite; this touches the
    /// search direction only, never the gradient or the energy.
    fn hessian(&self, interior: &[f64]) -> DMatrix<f64> {
        let values = self.full_values(interior);
        let grid = self.grid;
        let params = &self.params;
        let p = params.p();
        let pm1 = p - 1.0;
        let n = grid.interior_nodes().len();
        let h2 = grid.pair_measure();
        let hd = grid.cell_measure();
        let regularized = p < 2.0;
        let curvature = |t: f64| -> f64 {
            if regularized {
                (t * t + PRECOND_MU * PRECOND_MU).powf(0.5 * (p - 2.0))
            } else if p == 2.0 {
                1.0
            } else {
                abs_power(t, p - 2.0)
            }
        };

        let rows: Vec<Vec<f64>> = grid
            .interior_nodes()
            .par_iter()
            .enumerate()
            .map(|(a, &i)| {
                let i = i as usize;
                let (ix, iy) = grid.lattice_coords(i);
                let ui = values[i];
                let mut row = vec![0.0; n];
                let mut diag = 0.0;
                for (j, &vj) in values.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let (jx, jy) = grid.lattice_coords(j);
                    let w = self.table.weight(ix - jx, iy - jy);
                    diag += curvature(ui - vj) * w;
                }
                for (b, &j) in grid.interior_nodes().iter().enumerate() {
                    let j = j as usize;
                    if j == i {
                        continue;
                    }
                    let (jx, jy) = grid.lattice_coords(j);
                    let w = self.table.weight(ix - jx, iy - jy);
                    row[b] = -2.0 * h2 * pm1 * curvature(ui - values[j]) * w;
                }
                // Diagonal carries all pair curvature, including collar links.
                row[a] = 2.0 * h2 * pm1 * diag;
                row
            })
            .collect();

        let mut hess = DMatrix::zeros(n, n);
        for (a, row) in rows.iter().enumerate() {
            for (b, &v) in row.iter().enumerate() {
                hess[(a, b)] = v;
            }
        }
        for k in 0..n {
            hess[(k, k)] -= self.problem.c()[k] * pm1 * curvature(interior[k]) * hd;
            if let (Some(w), Some(g_far)) = (&self.far_weight, self.problem.far_g()) {
                hess[(k, k)] += 2.0 * hd * pm1 * curvature(interior[k] - g_far) * w[k];
            }
        }
        hess
    }
}

/// Kernel mass of the region beyond the truncation ball, seen from each
/// interior node: `int_{|y - center| > R_T} |x_i - y|^{-(dim + sp)} dy`.
/// Closed form in 1D, radial-angular quadrature in 2D.
fn far_field_weights(grid: &Grid, params: &FracParams) -> Vec<f64> {
    let sp = params.sp();
    let rt = grid.truncation_radius();
    let center = grid.domain().center();
    grid.interior_nodes()
        .iter()
        .map(|&i| {
            let x = grid.position(i as usize);
            if grid.dim() == 1 {
                let d = x[0] - center[0];
                ((rt - d).powf(-sp) + (rt + d).powf(-sp)) / sp
            } else {
                // int_{|z| > rt} |z - q|^{-(2+sp)} dz with q = x - center,
                // |q| < rt; integrate rho over (rt, inf) via rho = rt/v.
                let q = dist(x, center);
                let two_pi = 2.0 * std::f64::consts::PI;
                let mut outer = |v: f64| {
                    let rho = rt / v;
                    let jac = rt / (v * v);
                    let mut inner = |phi: f64| {
                        let r2 = rho * rho + q * q - 2.0 * rho * q * phi.cos();
                        r2.powf(-0.5 * (2.0 + sp))
                    };
                    let mut acc = 0.0;
                    let n_phi = 16;
                    let dphi = two_pi / n_phi as f64;
                    for k in 0..n_phi {
                        acc += crate::quad::gl_panel(
                            &mut inner,
                            k as f64 * dphi,
                            (k + 1) as f64 * dphi,
                        );
                    }
                    acc * rho * jac
                };
                crate::quad::integrate_segments(&mut outer, &[1e-12, 0.5, 1.0], 16)
            }
        })
        .collect()
}

fn weak_operator_values(
    grid: &Grid,
    table: &KernelTable,
    values: &[f64],
    params: &FracParams,
) -> Vec<f64> {
    let pm1 = params.p() - 1.0;
    let scale = 2.0 * grid.pair_measure();
    grid.interior_nodes()
        .par_iter()
        .map(|&i| {
            let i = i as usize;
            let (ix, iy) = grid.lattice_coords(i);
            let ui = values[i];
            let mut acc = 0.0;
            for (j, &vj) in values.iter().enumerate() {
                if j == i {
                    continue;
                }
                let (jx, jy) = grid.lattice_coords(j);
                acc += signed_power(ui - vj, pm1) * table.weight(ix - jx, iy - jy);
            }
            scale * acc
        })
        .collect()
}

/// The discrete weak operator tested against the nodal basis:
/// `A(u)_i = 2 h^{2 dim} sum_{j != i} signed_power(u_i - u_j, p-1)
/// |x_i - x_j|^{-(dim + sp)}` for interior `i`, summing over all nodes.
/// This is the gradient of the pair part of the discrete energy.
pub fn apply_weak_operator(u: &GridFunction, params: &FracParams) -> Vec<f64> {
    let grid = u.grid();
    let table = KernelTable::build(grid, params);
    weak_operator_values(grid, &table, u.values(), params)
}

/// The discrete energy over all grid node pairs,
/// `J(u) = (1/p) sum_{i<j} 2 h^{2 dim} |u_i - u_j|^p |x_i - x_j|^{-(dim+sp)}
/// minus sum_i f_i u_i h^dim minus (1/p) sum_i c_i |u_i|^p h^dim`,
/// plus the far-field term when the exterior datum has a nonzero constant
/// beyond the truncation ball.
///
/// Errors with `CollarMismatch` when `u` disagrees with `g` on the collar.
pub fn discrete_energy(
    u: &GridFunction,
    problem: &DirichletProblem,
    params: &FracParams,
) -> Result<f64> {
    problem.check_collar(u)?;
    let ws = Workspace::new(problem, params);
    let interior = problem.interior_slice(u);
    // Add back the constant collar-collar part so the value matches the
    // full double sum over grid pairs.
    let grid = problem.grid();
    let collar = grid.collar_nodes();
    let p = params.p();
    let collar_part: f64 = collar
        .par_iter()
        .enumerate()
        .map(|(a, &i)| {
            let i = i as usize;
            let (ix, iy) = grid.lattice_coords(i);
            let ui = u.value(i);
            let mut acc = 0.0;
            for &j in &collar[a + 1..] {
                let j = j as usize;
                let (jx, jy) = grid.lattice_coords(j);
                acc += abs_power(ui - u.value(j), p) * ws.table.weight(ix - jx, iy - jy);
            }
            acc
        })
        .sum::<f64>()
        * 2.0
        * grid.pair_measure()
        / p;
    Ok(ws.energy(&interior) + collar_part)
}

/// Gradient of [`discrete_energy`] with respect to interior values:
/// `A(u)_i - (f_i + c_i signed_power(u_i, p-1)) h^dim` plus the far-field
/// term. Exposed for finite-difference verification.
pub fn energy_gradient(
    u: &GridFunction,
    problem: &DirichletProblem,
    params: &FracParams,
) -> Result<Vec<f64>> {
    problem.check_collar(u)?;
    let ws = Workspace::new(problem, params);
    Ok(ws.gradient(&problem.interior_slice(u)))
}

/// Minimizer of the discrete energy with collar values pinned to `g`.
///
/// First-order optimality: the sup-norm of the interior gradient is at most
/// the configured tolerance. Deterministic given the options.
pub fn solve_dirichlet(
    problem: &DirichletProblem,
    params: &FracParams,
    opts: &SolverOpts,
) -> Result<GridFunction> {
    problem.require_nonpositive_c()?;
    let n = problem.grid().interior_nodes().len();
    let tol = opts.effective_grad_tol(params);

    let start = match &opts.init {
        InitGuess::Zeros => vec![0.0; n],
        InitGuess::Values(v) => {
            if v.len() != n {
                return Err(Error::InvalidParams(format!(
                    "initial guess has {} values, expected {n}",
                    v.len()
                )));
            }
            v.clone()
        }
        InitGuess::Auto => {
            if params.p() == 2.0 {
                vec![0.0; n]
            } else {
                let warm_params = params.with_p2();
                let warm_opts = SolverOpts {
                    grad_tol: Some(1e-8),
                    max_iter: opts.max_iter,
                    init: InitGuess::Zeros,
                };
                let ws = Workspace::new(problem, &warm_params);
                minimize(&ws, vec![0.0; n], 1e-8, warm_opts.max_iter)?
            }
        }
    };

    let ws = Workspace::new(problem, params);
    let interior = minimize(&ws, start, tol, opts.max_iter)?;
    Ok(problem.with_interior(&interior))
}

fn minimize(ws: &Workspace, mut v: Vec<f64>, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = v.len();
    let mut energy = ws.energy(&v);
    for iter in 0..max_iter {
        let grad = ws.gradient(&v);
        let gnorm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if gnorm <= tol {
            return Ok(v);
        }

        let hess = ws.hessian(&v);
        let dir = newton_direction(hess, &grad, n);
        let slope: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
        let (mut dir, mut slope) = if slope < 0.0 {
            (dir, slope)
        } else {
            // Fall back to a plain descent direction.
            let d: Vec<f64> = grad.iter().map(|g| -g).collect();
            let s: f64 = -grad.iter().map(|g| g * g).sum::<f64>();
            (d, s)
        };
        // Cap the step against a trust radius; a near-singular Hessian
        // (all nodal differences tied at p > 2) can otherwise blow the
        // direction past floating-point range.
        let dmax = dir.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let trust = 10.0 * (1.0 + v.iter().fold(0.0f64, |m, x| m.max(x.abs())));
        if dmax > trust {
            let scale = trust / dmax;
            for d in &mut dir {
                *d *= scale;
            }
            slope *= scale;
        }

        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = v
                .iter()
                .zip(&dir)
                .map(|(x, d)| x + step * d)
                .collect();
            let e = ws.energy(&trial);
            if e <= energy + ARMIJO_C1 * step * slope {
                v = trial;
                energy = e;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(Error::NotConverged {
                iterations: iter,
                grad_norm: gnorm,
            });
        }
    }
    let grad = ws.gradient(&v);
    let gnorm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    if gnorm <= tol {
        Ok(v)
    } else {
        Err(Error::NotConverged {
            iterations: max_iter,
            grad_norm: gnorm,
        })
    }
}

fn newton_direction(mut hess: DMatrix<f64>, grad: &[f64], n: usize) -> Vec<f64> {
    let rhs = DVector::from_iterator(n, grad.iter().map(|g| -g));
    let mut shift = 0.0;
    let grad_scale = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let base = hess
        .diagonal()
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()))
        .max(grad_scale)
        .max(1e-30);
    for _ in 0..40 {
        if shift > 0.0 {
            for k in 0..n {
                hess[(k, k)] += shift;
            }
        }
        if let Some(chol) = Cholesky::new(hess.clone()) {
            let d = chol.solve(&rhs);
            return d.iter().copied().collect();
        }
        shift = if shift == 0.0 { 1e-12 * base } else { shift * 10.0 };
    }
    grad.iter().map(|g| -g).collect()
}

/// Minimum over interior nodes of the discrete super-solution residual
/// `A(u)_i (+ far term) - (c_i signed_power(u_i, p-1) + f_i) h^dim`,
/// testing against the nodal hat basis. A margin at or above `-tol`
/// certifies a discrete super-solution.
pub fn weak_supersolution_margin(
    u: &GridFunction,
    problem: &DirichletProblem,
    params: &FracParams,
) -> f64 {
    residuals(u, problem, params)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// Minimum over interior nodes of the sub-solution residual (the negated
/// super-solution residual).
pub fn weak_subsolution_margin(
    u: &GridFunction,
    problem: &DirichletProblem,
    params: &FracParams,
) -> f64 {
    residuals(u, problem, params)
        .into_iter()
        .fold(f64::INFINITY, |m, r| m.min(-r))
}

fn residuals(u: &GridFunction, problem: &DirichletProblem, params: &FracParams) -> Vec<f64> {
    let ws = Workspace::new(problem, params);
    ws.gradient(&problem.interior_slice(u))
}

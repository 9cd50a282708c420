//! Solver tests against the dense linear-solve oracle and the energy's own
//! finite differences.

mod common;

use std::sync::Arc;

use fracp_core::{
    discrete_energy, energy_gradient, solve_dirichlet, DirichletProblem, Domain, FracParams,
    Grid, InitGuess, SolverOpts,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn interval_problem(
    n: usize,
    f: f64,
    g: f64,
    c: f64,
) -> (Arc<Grid>, DirichletProblem) {
    let dom = Domain::interval(-1.0, 1.0).unwrap();
    let grid = Arc::new(Grid::build(&dom, n, 4.0).unwrap());
    let far = if g != 0.0 { Some(g) } else { None };
    let prob =
        DirichletProblem::from_fns(grid.clone(), |_| f, |_| g, |_| c, far).unwrap();
    (grid, prob)
}

#[test]
fn solver_matches_dense_linear_solve() {
    let (_, prob) = interval_problem(101, 1.0, 0.0, 0.0);
    let prm = FracParams::new(0.5, 2.0, 1).unwrap();
    let u = solve_dirichlet(&prob, &prm, &SolverOpts::default()).unwrap();
    let got = prob.interior_slice(&u);
    let want = common::dense_p2_solution(prob.grid(), 0.5, prob.f(), prob.g(), prob.c());
    let diff = common::sup_diff(&got, &want);
    assert!(diff < 1e-8, "sup difference {diff:.2e}");
    // Mid-domain value is positive and O(0.1) for this normalization.
    let mid = got[got.len() / 2];
    assert!(mid > 0.05 && mid < 0.5, "mid value {mid}");
}

#[test]
fn gradient_matches_central_finite_differences() {
    let dom = Domain::interval(-1.0, 1.0).unwrap();
    let grid = Arc::new(Grid::build(&dom, 31, 2.0).unwrap());
    let mut rng = StdRng::seed_from_u64(7);
    for p in [1.5, 2.0, 3.0] {
        let prm = FracParams::new(0.5, p, 1).unwrap();
        let prob = DirichletProblem::from_fns(
            grid.clone(),
            |x| 1.0 + x[0],
            |_| 0.0,
            |x| -0.5 - 0.1 * x[0].abs(),
            None,
        )
        .unwrap();
        let interior: Vec<f64> = (0..grid.interior_nodes().len())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let u = prob.with_interior(&interior);
        let grad = energy_gradient(&u, &prob, &prm).unwrap();

        for _ in 0..10 {
            let k = rng.random_range(0..interior.len());
            let eps = 1e-6 * (1.0 + interior[k].abs());
            let mut up = interior.clone();
            up[k] += eps;
            let mut dn = interior.clone();
            dn[k] -= eps;
            let jp = discrete_energy(&prob.with_interior(&up), &prob, &prm).unwrap();
            let jn = discrete_energy(&prob.with_interior(&dn), &prob, &prm).unwrap();
            let fd = (jp - jn) / (2.0 * eps);
            let rel = (grad[k] - fd).abs() / grad[k].abs().max(1e-8);
            assert!(rel < 1e-5, "p = {p}, node {k}: {} vs {fd} (rel {rel:.2e})", grad[k]);
        }
    }
}

#[test]
fn energy_is_strictly_convex_between_distinct_points() {
    let (_, prob) = interval_problem(21, 1.0, 0.0, -1.0);
    let prm = FracParams::new(0.5, 3.0, 1).unwrap();
    let mut rng = StdRng::seed_from_u64(11);
    let n = prob.grid().interior_nodes().len();
    for _ in 0..5 {
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        let ja = discrete_energy(&prob.with_interior(&a), &prob, &prm).unwrap();
        let jb = discrete_energy(&prob.with_interior(&b), &prob, &prm).unwrap();
        let jm = discrete_energy(&prob.with_interior(&mid), &prob, &prm).unwrap();
        assert!(
            jm < 0.5 * (ja + jb),
            "midpoint energy {jm} not below chord {}",
            0.5 * (ja + jb)
        );
    }
}

#[test]
fn minimizer_is_independent_of_the_start() {
    let (_, prob) = interval_problem(51, 1.0, 0.0, 0.0);
    for p in [1.5, 3.0] {
        let prm = FracParams::new(0.5, p, 1).unwrap();
        let tol = 1e-6;
        let a = solve_dirichlet(
            &prob,
            &prm,
            &SolverOpts {
                grad_tol: Some(tol),
                init: InitGuess::Zeros,
                ..SolverOpts::default()
            },
        )
        .unwrap();
        let n = prob.grid().interior_nodes().len();
        let b = solve_dirichlet(
            &prob,
            &prm,
            &SolverOpts {
                grad_tol: Some(tol),
                init: InitGuess::Values(vec![0.3; n]),
                ..SolverOpts::default()
            },
        )
        .unwrap();
        let diff = common::sup_diff(a.values(), b.values());
        assert!(diff <= 10.0 * tol, "p = {p}: starts disagree by {diff:.2e}");
    }
}

#[test]
fn solution_beats_random_perturbations() {
    let (_, prob) = interval_problem(31, 1.0, 0.0, 0.0);
    let prm = FracParams::new(0.5, 2.0, 1).unwrap();
    let star = solve_dirichlet(&prob, &prm, &SolverOpts::default()).unwrap();
    let j_star = discrete_energy(&star, &prob, &prm).unwrap();
    let base = prob.interior_slice(&star);
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..20 {
        let perturbed: Vec<f64> = base
            .iter()
            .map(|v| v + rng.random_range(-0.05..0.05))
            .collect();
        let j = discrete_energy(&prob.with_interior(&perturbed), &prob, &prm).unwrap();
        assert!(j >= j_star, "perturbation undercuts the minimizer: {j} < {j_star}");
    }
}

#[test]
fn grid_refinement_is_consistent_mid_domain() {
    let prm = FracParams::new(0.5, 2.0, 1).unwrap();
    let mut mids = Vec::new();
    for n in [101usize, 201] {
        let (_, prob) = interval_problem(n, 1.0, 0.0, 0.0);
        let u = solve_dirichlet(&prob, &prm, &SolverOpts::default()).unwrap();
        mids.push(u.interpolate([0.0, 0.0]).unwrap());
    }
    let rel = (mids[1] - mids[0]).abs() / mids[1].abs();
    assert!(rel < 0.05, "mid-domain drift {rel:.3} between refinements");
}

#[test]
fn three_node_weak_operator_matches_energy_differentiation() {
    // Hand-checkable instance: interior nodes at 0, h, 2h with a unit bump
    // in the middle; the weak operator must equal central finite
    // differences of the energy.
    let h = 0.25;
    let dom = Domain::interval(-h, 3.0 * h).unwrap();
    let grid = Arc::new(Grid::build(&dom, 3, 4.0 * h).unwrap());
    let prm = FracParams::new(0.5, 2.0, 1).unwrap();
    let prob =
        DirichletProblem::from_fns(grid.clone(), |_| 0.0, |_| 0.0, |_| 0.0, None).unwrap();
    let interior = vec![0.0, 1.0, 0.0];
    let u = prob.with_interior(&interior);
    let a = fracp_core::apply_weak_operator(&u, &prm);
    for k in 0..3 {
        let eps = 1e-6;
        let mut up = interior.clone();
        up[k] += eps;
        let mut dn = interior.clone();
        dn[k] -= eps;
        let jp = discrete_energy(&prob.with_interior(&up), &prob, &prm).unwrap();
        let jn = discrete_energy(&prob.with_interior(&dn), &prob, &prm).unwrap();
        let fd = (jp - jn) / (2.0 * eps);
        assert!(
            (a[k] - fd).abs() < 1e-6 * a[k].abs().max(1.0),
            "node {k}: {} vs {fd}",
            a[k]
        );
    }
    // The middle node's gradient is positive (pulled down toward its
    // neighbors), the outer nodes' negative.
    assert!(a[1] > 0.0 && a[0] < 0.0 && a[2] < 0.0);
}

#[test]
fn margin_sign_pattern_after_interior_bump() {
    // Solution of the zero problem is zero; bumping one interior node makes
    // that node's residual positive and every other residual negative, so
    // the super-solution margin goes negative.
    let (grid, prob) = interval_problem(5, 0.0, 0.0, 0.0);
    let prm = FracParams::new(0.5, 2.0, 1).unwrap();
    let mut interior = vec![0.0; 5];
    interior[2] = 1.0;
    let u = prob.with_interior(&interior);
    let residuals = energy_gradient(&u, &prob, &prm).unwrap();
    assert!(residuals[2] > 0.0);
    for k in [0usize, 1, 3, 4] {
        assert!(residuals[k] < 0.0, "node {k}: {}", residuals[k]);
    }
    let margin = fracp_core::weak_supersolution_margin(&u, &prob, &prm);
    assert!(margin < 0.0);
    assert_eq!(
        margin,
        residuals.iter().cloned().fold(f64::INFINITY, f64::min),
        "margin must be the minimal residual"
    );
    // Restricting to nonnegative c keeps grid alive for reuse.
    drop(grid);
}

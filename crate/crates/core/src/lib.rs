#![forbid(unsafe_code)]

//! Numerics for the fractional p-Laplacian on bounded 1D/2D domains:
//! pointwise principal-value evaluation of the operator on closed-form
//! functions, Dirichlet problems solved by minimizing the convex nonlocal
//! energy on a uniform grid with an exterior collar, and a harness of
//! structural checks (comparison, strong minimum principle, boundary ratio
//! profiles, logarithmic estimates, touching barriers, boundary exponents).

pub mod error;
pub mod func;
pub mod geom;
pub mod grid;
pub mod harness;
pub mod kernel;
pub mod params;
pub mod pointwise;
pub mod problem;
pub mod quad;
pub mod report;
pub mod solver;

pub use error::{Error, Result};
pub use func::{ClosedFormFunction, Smoothness, TailClass};
pub use geom::{dist, unit_ball_volume, unit_sphere_area, Domain, Point};
pub use grid::{fmt_float, Grid, GridFunction, KernelTable, NodeMask};
pub use harness::{
    check_comparison, check_log_lemma, check_min_principle, construct_hopf_barrier,
    estimate_holder_exponent, hopf_ratio_profile, sign_split_c, viscosity_touch_test, HopfBarrier,
};
pub use kernel::{gagliardo_seminorm, signed_power, tail_norm};
pub use params::FracParams;
pub use pointwise::{
    barrier_inner_term, delta_s_boundedness_scan, evaluate_glued, evaluate_op,
    jump_perturbation_h, BoundednessScan, GluedFunction, ScanSample,
};
pub use problem::DirichletProblem;
pub use quad::{Estimate, QuadConfig, TailMode};
pub use report::{CheckStatus, VerificationReport};
pub use solver::{
    apply_weak_operator, discrete_energy, energy_gradient, solve_dirichlet,
    weak_subsolution_margin, weak_supersolution_margin, InitGuess, SolverOpts,
};

//! Experiment driver: solve the configured problem, run the requested
//! checks in a fixed declared order, and write deterministic CSV artifacts
//! plus a manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sha2::{Digest, Sha256};

use fracp_core::{
    check_comparison, check_log_lemma, check_min_principle, construct_hopf_barrier,
    delta_s_boundedness_scan, discrete_energy, energy_gradient, estimate_holder_exponent,
    fmt_float, hopf_ratio_profile, solve_dirichlet, viscosity_touch_test, CheckStatus,
    DirichletProblem, Domain, Error as CoreError, FracParams, Grid, GridFunction, Point,
    QuadConfig, VerificationReport,
};

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// All checks the driver knows, in the order reports are merged.
pub const CHECK_REGISTRY: [&str; 9] = [
    "comparison",
    "min_principle",
    "hopf",
    "log_lemma",
    "barrier",
    "touch",
    "holder",
    "delta_scan",
    "energy_gradient_fd",
];

#[derive(Debug, Clone, Copy)]
pub struct SolutionStats {
    pub u_mid: f64,
    pub u_min_interior: f64,
    pub u_max_abs: f64,
}

#[derive(Debug)]
pub struct ExperimentOutcome {
    pub reports: Vec<VerificationReport>,
    pub all_passed: bool,
    pub any_precondition: bool,
    pub stats: SolutionStats,
    pub written: Vec<PathBuf>,
}

impl ExperimentOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.any_precondition {
            2
        } else if self.all_passed {
            0
        } else {
            1
        }
    }
}

struct Built {
    params: FracParams,
    domain: Domain,
    grid: Arc<Grid>,
    problem: DirichletProblem,
    quad: QuadConfig,
}

fn build(cfg: &ExperimentConfig) -> Result<Built, CliError> {
    let params = cfg.build_params()?;
    let domain = cfg.build_domain()?;
    let grid = cfg.build_grid(&domain)?;
    let quad = cfg.build_quad(&domain);
    let f = cfg.problem.f.to_closed_form(&domain, &params)?;
    let g = cfg.problem.g.to_closed_form(&domain, &params)?;
    let c = cfg.problem.c.to_closed_form(&domain, &params)?;
    let far_g = cfg.problem.g.far_value();
    let problem = DirichletProblem::from_fns(
        grid.clone(),
        |x| f.value(x),
        |x| g.value(x),
        |x| c.value(x),
        if far_g != 0.0 { Some(far_g) } else { None },
    )
    .map_err(|e| CliError::ConfigInvalid(format!("problem: {e}")))?;
    Ok(Built {
        params,
        domain,
        grid,
        problem,
        quad,
    })
}

/// Inscribed ball of the domain, as a domain of the right dimension.
fn inscribed_ball(domain: &Domain) -> Domain {
    match domain.as_ball() {
        Some((c, r)) => {
            if domain.dim() == 1 {
                Domain::Interval {
                    a: c[0] - r,
                    b: c[0] + r,
                }
            } else {
                Domain::Ball {
                    center: c,
                    radius: r,
                }
            }
        }
        None => Domain::Ball {
            center: domain.center(),
            radius: domain.inradius(),
        },
    }
}

fn ray_directions(dim: usize) -> Vec<Point> {
    if dim == 1 {
        vec![[1.0, 0.0], [-1.0, 0.0]]
    } else {
        (0..8)
            .map(|k| {
                let phi = std::f64::consts::PI * k as f64 / 4.0;
                [phi.cos(), phi.sin()]
            })
            .collect()
    }
}

fn run_check(
    name: &str,
    cfg: &ExperimentConfig,
    built: &Built,
    u: &GridFunction,
    rng: &mut StdRng,
) -> Result<VerificationReport, CoreError> {
    let cp = &cfg.check_params;
    let params = &built.params;
    let domain = &built.domain;
    let grid = &built.grid;
    let inradius = domain.inradius();
    match name {
        "comparison" => {
            let halved = built
                .problem
                .scaled_data(0.5)
                .expect("scaling preserves shapes");
            let v = solve_dirichlet(&halved, params, &cfg.solver_opts())?;
            check_comparison(u, &v, &built.problem, params)
        }
        "min_principle" => check_min_principle(u, &built.problem, params),
        "hopf" => {
            let ball = inscribed_ball(domain);
            let rays = ray_directions(domain.dim());
            let n = cp.hopf_points.unwrap_or(48);
            hopf_ratio_profile(u, &ball, &rays, n, params)
        }
        "log_lemma" => {
            let offset = cp.log_x0_offset.unwrap_or(0.3);
            let c0 = domain.center();
            let x0 = [c0[0] + offset * inradius, c0[1]];
            let big_r = 0.8 * (inradius - offset.abs() * inradius);
            let r0 = cp.log_r0.unwrap_or(0.4 * big_r).min(0.5 * big_r);
            let h0 = cp.log_h0.unwrap_or(0.1);
            check_log_lemma(u, x0, big_r, r0, h0, built.problem.c(), params)
        }
        "barrier" => {
            let ball = inscribed_ball(domain);
            let (bc, br) = ball.as_ball().expect("inscribed ball");
            let rho = 0.25 * br;
            let k_ball = if domain.dim() == 1 {
                Domain::Interval {
                    a: bc[0] - 0.25 * br,
                    b: bc[0] + 0.25 * br,
                }
            } else {
                Domain::Ball {
                    center: bc,
                    radius: 0.25 * br,
                }
            };
            construct_hopf_barrier(&ball, &k_ball, u, built.problem.c(), rho, params, &built.quad)
                .map(|(_, rep)| rep)
        }
        "touch" => {
            // Both dichotomy branches on constructed functions: the zero
            // function and a cone vanishing at the domain center.
            let beta_floor = (2.0f64).max(2.0 / (2.0 - params.s()));
            let beta_needed = params.sp() / (params.p() - 1.0);
            let beta = cp
                .beta
                .unwrap_or((3.0f64).max(1.5 * beta_needed).max(1.1 * beta_floor));
            let eps = cp.eps.unwrap_or(0.01);
            let r = 0.25 * inradius;
            let c0 = domain.center();
            let zero = GridFunction::zeros(grid.clone());
            let rep_zero =
                viscosity_touch_test(&zero, c0, eps, beta, r, params, &built.quad)?;
            let half = 0.5 * inradius;
            let cone = GridFunction::from_fn(grid.clone(), move |x| {
                (fracp_core::dist(x, c0) - half).max(0.0)
            })
            .expect("finite cone values");
            let rep_cone = viscosity_touch_test(&cone, c0, eps, beta, r, params, &built.quad)?;
            let status = if rep_zero.status.is_pass() && rep_cone.status.is_pass() {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            };
            let mut rep = VerificationReport::new("touch", status, rep_cone.tolerance);
            for (k, v) in &rep_zero.measured {
                rep.record(format!("zero_{k}"), *v);
            }
            for (k, v) in &rep_cone.measured {
                rep.record(format!("cone_{k}"), *v);
            }
            rep.narrative = format!(
                "zero branch: {}; cone branch: {}",
                rep_zero.narrative, rep_cone.narrative
            );
            Ok(rep)
        }
        "holder" => {
            let band = cp.band.unwrap_or(0.05 * domain.diameter());
            estimate_holder_exponent(u, domain, band, params)
        }
        "delta_scan" => {
            let strip = cp.strip_width.unwrap_or(0.2 * inradius);
            let scan = delta_s_boundedness_scan(domain, strip, 50, params, &built.quad)?;
            let status = if scan.bounded_within(10.0) {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            };
            let mut rep = VerificationReport::new("delta_scan", status, 10.0)
                .with("max_abs", scan.max_abs)
                .with("median_abs", scan.median_abs)
                .with("n_samples", scan.samples.len() as f64);
            rep.narrative = format!(
                "operator on the boundary-distance profile stays within {:.2} x median over the strip",
                scan.max_abs / scan.median_abs.max(1e-300)
            );
            Ok(rep)
        }
        "energy_gradient_fd" => {
            // Seeded spot check of the analytic gradient against central
            // finite differences of the energy, at a random point: at the
            // minimizer itself both sides vanish and the comparison would
            // be pure cancellation noise.
            let interior: Vec<f64> = built
                .problem
                .interior_slice(u)
                .iter()
                .map(|v| v + rng.random_range(-0.5..0.5))
                .collect();
            let probe = built.problem.with_interior(&interior);
            let grad = energy_gradient(&probe, &built.problem, params)?;
            let mut worst = 0.0f64;
            for _ in 0..10 {
                let k = rng.random_range(0..interior.len());
                let eps = 1e-6 * (1.0 + interior[k].abs());
                let mut up = interior.clone();
                up[k] += eps;
                let mut dn = interior.clone();
                dn[k] -= eps;
                let jp = discrete_energy(&built.problem.with_interior(&up), &built.problem, params)?;
                let jn = discrete_energy(&built.problem.with_interior(&dn), &built.problem, params)?;
                let fd = (jp - jn) / (2.0 * eps);
                let rel = (grad[k] - fd).abs() / grad[k].abs().max(1e-8);
                worst = worst.max(rel);
            }
            let status = if worst < 1e-5 {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            };
            Ok(VerificationReport::new("energy_gradient_fd", status, 1e-5)
                .with("worst_rel_error", worst)
                .with_narrative(
                    "analytic energy gradient vs central finite differences at 10 seeded nodes",
                ))
        }
        other => Err(CoreError::PreconditionViolated(format!(
            "unknown check name: {other}"
        ))),
    }
}

fn solution_stats(u: &GridFunction, domain: &Domain) -> SolutionStats {
    let grid = u.grid();
    let u_mid = u.interpolate(domain.center()).unwrap_or(f64::NAN);
    let u_min_interior = grid
        .interior_nodes()
        .iter()
        .map(|&i| u.value(i as usize))
        .fold(f64::INFINITY, f64::min);
    let u_max_abs = u.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    SolutionStats {
        u_mid,
        u_min_interior,
        u_max_abs,
    }
}

fn config_hash(raw: &[u8]) -> String {
    let digest = Sha256::digest(raw);
    digest.iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Runs the configured experiment: solves, runs the selected checks in
/// registry order, writes `solution.csv` (+ sidecar), one `report_*.csv`
/// per check, the merged `reports.csv`, `summary.txt`, and `manifest.txt`.
/// Deterministic given the config bytes and seed.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    raw_config: &[u8],
    out_dir: &Path,
    seed_override: Option<u64>,
    checks_override: Option<&[String]>,
) -> Result<ExperimentOutcome, CliError> {
    let built = build(cfg)?;
    std::fs::create_dir_all(out_dir)?;
    let seed = seed_override.unwrap_or(cfg.output.seed);
    let mut rng = StdRng::seed_from_u64(seed);

    // An override, even an empty one, replaces the config's check list.
    let requested: Vec<String> = match checks_override {
        Some(list) => list.to_vec(),
        None => cfg.checks.names.clone(),
    };
    for name in &requested {
        if !CHECK_REGISTRY.contains(&name.as_str()) {
            return Err(CliError::ConfigInvalid(format!(
                "unknown check: {name} (known: {})",
                CHECK_REGISTRY.join(", ")
            )));
        }
    }

    let u = solve_dirichlet(&built.problem, &built.params, &cfg.solver_opts())
        .map_err(|e| CliError::Precondition(format!("solve: {e}")))?;
    let stats = solution_stats(&u, &built.domain);

    let mut written = Vec::new();
    let sol_path = out_dir.join("solution.csv");
    u.write_csv(&sol_path, Some(&built.params))?;
    written.push(sol_path);
    written.push(out_dir.join("solution.meta"));

    // Fixed merge order: the registry order, filtered by request.
    let mut reports = Vec::new();
    let mut any_precondition = false;
    for name in CHECK_REGISTRY {
        if !requested.iter().any(|r| r == name) {
            continue;
        }
        let report = match run_check(name, cfg, &built, &u, &mut rng) {
            Ok(rep) => rep,
            Err(e) => {
                any_precondition = true;
                VerificationReport::new(name, CheckStatus::Inconclusive, 0.0)
                    .with_narrative(format!("{e}"))
            }
        };
        let path = out_dir.join(format!("report_{name}.csv"));
        std::fs::write(
            &path,
            format!("{}\n{}\n", VerificationReport::csv_header(), report.to_csv_row()),
        )?;
        written.push(path);
        reports.push(report);
    }

    let merged_path = out_dir.join("reports.csv");
    let mut merged = String::from(VerificationReport::csv_header());
    merged.push('\n');
    for r in &reports {
        merged.push_str(&r.to_csv_row());
        merged.push('\n');
    }
    std::fs::write(&merged_path, merged)?;
    written.push(merged_path);

    let all_passed = reports.iter().all(|r| r.status.is_pass());
    let status_word = if any_precondition {
        "precondition_error"
    } else if all_passed {
        "pass"
    } else {
        "fail"
    };

    let mut summary = String::new();
    for r in &reports {
        summary.push_str(&r.to_text());
    }
    let _ = writeln!(summary, "overall: {status_word}");
    let summary_path = out_dir.join("summary.txt");
    std::fs::write(&summary_path, summary)?;
    written.push(summary_path);

    let mut manifest = String::new();
    let _ = writeln!(manifest, "config_sha256 = {}", config_hash(raw_config));
    let _ = writeln!(manifest, "seed = {seed}");
    let _ = writeln!(manifest, "dim = {}", built.params.dim());
    let _ = writeln!(manifest, "s = {}", fmt_float(built.params.s()));
    let _ = writeln!(manifest, "p = {}", fmt_float(built.params.p()));
    let _ = writeln!(manifest, "grid_h = {}", fmt_float(built.grid.spacing()));
    let _ = writeln!(manifest, "n_interior = {}", built.grid.interior_nodes().len());
    let _ = writeln!(manifest, "n_collar = {}", built.grid.collar_nodes().len());
    let _ = writeln!(
        manifest,
        "collar_radius = {}",
        fmt_float(built.grid.collar_radius())
    );
    let _ = writeln!(manifest, "checks = {}", requested.join(","));
    let _ = writeln!(manifest, "u_mid = {}", fmt_float(stats.u_mid));
    let _ = writeln!(
        manifest,
        "u_min_interior = {}",
        fmt_float(stats.u_min_interior)
    );
    let _ = writeln!(manifest, "u_max_abs = {}", fmt_float(stats.u_max_abs));
    let _ = writeln!(manifest, "status = {status_word}");
    let manifest_path = out_dir.join("manifest.txt");
    std::fs::write(&manifest_path, manifest)?;
    written.push(manifest_path);

    Ok(ExperimentOutcome {
        reports,
        all_passed,
        any_precondition,
        stats,
        written,
    })
}

/// Axes the sweep understands.
pub const SWEEP_AXES: [&str; 5] = ["s", "p", "grid_nodes", "r", "h"];

pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub all_passed: bool,
    pub any_precondition: bool,
}

pub struct SweepRow {
    pub value: f64,
    pub status: String,
    pub u_mid: f64,
    pub measured: std::collections::BTreeMap<String, f64>,
}

/// Runs one experiment per axis value into `out_dir/run_NNN/`, continuing
/// past failures, and writes `sweep_summary.csv` with one row per value in
/// input order.
pub fn sweep(
    cfg: &ExperimentConfig,
    raw_config: &[u8],
    axis: &str,
    values: &[f64],
    out_dir: &Path,
    seed_override: Option<u64>,
) -> Result<SweepOutcome, CliError> {
    if !SWEEP_AXES.contains(&axis) {
        return Err(CliError::ConfigInvalid(format!(
            "unknown sweep axis: {axis} (known: {})",
            SWEEP_AXES.join(", ")
        )));
    }
    std::fs::create_dir_all(out_dir)?;
    let mut rows = Vec::new();
    let mut all_ok = true;
    let mut any_pre = false;
    for (idx, &value) in values.iter().enumerate() {
        let mut run_cfg = cfg.clone();
        match axis {
            "s" => run_cfg.params.s = value,
            "p" => run_cfg.params.p = value,
            "grid_nodes" => {
                if value < 3.0 || value.fract() != 0.0 {
                    return Err(CliError::ConfigInvalid(format!(
                        "grid_nodes sweep needs integer values >= 3, got {value}"
                    )));
                }
                run_cfg.grid.interior_nodes = value as usize;
            }
            "r" => run_cfg.check_params.log_r0 = Some(value),
            "h" => run_cfg.check_params.log_h0 = Some(value),
            _ => unreachable!(),
        }
        let run_dir = out_dir.join(format!("run_{idx:03}"));
        match run_experiment(&run_cfg, raw_config, &run_dir, seed_override, None) {
            Ok(outcome) => {
                let status = if outcome.any_precondition {
                    any_pre = true;
                    "precondition_error"
                } else if outcome.all_passed {
                    "pass"
                } else {
                    all_ok = false;
                    "fail"
                };
                let mut measured = std::collections::BTreeMap::new();
                for rep in &outcome.reports {
                    for (k, v) in &rep.measured {
                        measured.insert(format!("{}_{k}", rep.check_name), *v);
                    }
                }
                rows.push(SweepRow {
                    value,
                    status: status.to_string(),
                    u_mid: outcome.stats.u_mid,
                    measured,
                });
            }
            Err(e) => {
                // Mark the row and continue the sweep.
                all_ok = false;
                any_pre = any_pre || matches!(e, CliError::ConfigInvalid(_) | CliError::Precondition(_));
                rows.push(SweepRow {
                    value,
                    status: format!("error: {e}").replace(',', ";"),
                    u_mid: f64::NAN,
                    measured: std::collections::BTreeMap::new(),
                });
            }
        }
    }

    // Deterministic column set: union of measured keys in sorted order.
    let mut columns: Vec<String> = rows
        .iter()
        .flat_map(|r| r.measured.keys().cloned())
        .collect();
    columns.sort();
    columns.dedup();
    let mut csv = String::from("index,value,status,u_mid");
    for c in &columns {
        csv.push(',');
        csv.push_str(c);
    }
    csv.push('\n');
    for (idx, row) in rows.iter().enumerate() {
        let _ = write!(csv, "{idx},{},{},{}", fmt_float(row.value), row.status, fmt_float(row.u_mid));
        for c in &columns {
            csv.push(',');
            if let Some(v) = row.measured.get(c) {
                csv.push_str(&fmt_float(*v));
            }
        }
        csv.push('\n');
    }
    std::fs::write(out_dir.join("sweep_summary.csv"), csv)?;

    Ok(SweepOutcome {
        rows,
        all_passed: all_ok && !any_pre,
        any_precondition: any_pre,
    })
}

/// Evaluates the configured closed-form function at the configured points
/// and writes `evaluate.csv` with values and error estimates.
pub fn run_evaluate(
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<Vec<(Point, f64, f64)>, CliError> {
    let params = cfg.build_params()?;
    let domain = cfg.build_domain()?;
    let quad = cfg.build_quad(&domain);
    let ev = cfg
        .evaluate
        .as_ref()
        .ok_or_else(|| CliError::ConfigInvalid("missing [evaluate] section".into()))?;
    let func = ev.function.to_closed_form(&domain, &params)?;
    std::fs::create_dir_all(out_dir)?;

    let mut results = Vec::new();
    let mut csv = String::from(if params.dim() == 1 {
        "x,value,error_estimate\n"
    } else {
        "x,y,value,error_estimate\n"
    });
    for raw in &ev.points {
        let x: Point = match raw.as_slice() {
            [a] if params.dim() == 1 => [*a, 0.0],
            [a, b] if params.dim() == 2 => [*a, *b],
            _ => {
                return Err(CliError::ConfigInvalid(format!(
                    "evaluate point {raw:?} does not match dim {}",
                    params.dim()
                )))
            }
        };
        let est = fracp_core::evaluate_op(&func, x, &params, &quad)
            .map_err(|e| CliError::Precondition(format!("evaluate at {x:?}: {e}")))?;
        if params.dim() == 1 {
            let _ = writeln!(
                csv,
                "{},{},{}",
                fmt_float(x[0]),
                fmt_float(est.value),
                fmt_float(est.error_estimate)
            );
        } else {
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                fmt_float(x[0]),
                fmt_float(x[1]),
                fmt_float(est.value),
                fmt_float(est.error_estimate)
            );
        }
        results.push((x, est.value, est.error_estimate));
    }
    std::fs::write(out_dir.join("evaluate.csv"), csv)?;
    Ok(results)
}

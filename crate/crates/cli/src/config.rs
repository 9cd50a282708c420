//! Experiment configuration: a TOML schema mapping onto domains, grids,
//! problem data, and check selections.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use fracp_core::{Domain, FracParams, Grid, QuadConfig, TailMode};

use crate::error::CliError;
use crate::presets::PresetCfg;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub params: ParamsCfg,
    pub domain: DomainCfg,
    pub grid: GridCfg,
    pub problem: ProblemCfg,
    #[serde(default)]
    pub solver: SolverCfg,
    #[serde(default)]
    pub checks: ChecksCfg,
    #[serde(default)]
    pub check_params: CheckParamsCfg,
    #[serde(default)]
    pub output: OutputCfg,
    #[serde(default)]
    pub evaluate: Option<EvaluateCfg>,
    #[serde(default)]
    pub sweep: Option<SweepCfg>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsCfg {
    pub s: f64,
    pub p: f64,
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainCfg {
    pub shape: String,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub center: Option<Vec<f64>>,
    pub radius: Option<f64>,
    pub lo: Option<Vec<f64>>,
    pub hi: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridCfg {
    pub interior_nodes: usize,
    /// Collar radius as a multiple of the domain diameter; at least 1.
    #[serde(default = "default_collar_factor")]
    pub collar_factor: f64,
}

fn default_collar_factor() -> f64 {
    2.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemCfg {
    pub f: PresetCfg,
    pub g: PresetCfg,
    pub c: PresetCfg,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverCfg {
    pub grad_tol: Option<f64>,
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksCfg {
    #[serde(default)]
    pub names: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckParamsCfg {
    /// Base radius for the logarithmic-estimate sweep.
    pub log_r0: Option<f64>,
    /// Headline h for the logarithmic estimate (the sweep set is fixed).
    pub log_h0: Option<f64>,
    /// Offset of the estimate's center from the domain center, as a
    /// fraction of the inradius.
    pub log_x0_offset: Option<f64>,
    /// Boundary-strip width for the distance-profile scan (absolute).
    pub strip_width: Option<f64>,
    /// Fit band for the boundary exponent (absolute).
    pub band: Option<f64>,
    /// Touching-barrier exponent.
    pub beta: Option<f64>,
    /// Headline barrier amplitude for the touch test.
    pub eps: Option<f64>,
    /// Samples per ray in the boundary ratio profile.
    pub hopf_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputCfg {
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateCfg {
    pub function: PresetCfg,
    pub points: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCfg {
    pub axis: String,
    pub values: Vec<f64>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::ConfigInvalid(e.to_string()))
    }

    pub fn build_params(&self) -> Result<FracParams, CliError> {
        FracParams::new(self.params.s, self.params.p, self.params.dim)
            .map_err(|e| CliError::ConfigInvalid(format!("params: {e}")))
    }

    pub fn build_domain(&self) -> Result<Domain, CliError> {
        let d = &self.domain;
        let get2 = |v: &Option<Vec<f64>>, name: &str| -> Result<[f64; 2], CliError> {
            let v = v
                .as_ref()
                .ok_or_else(|| CliError::ConfigInvalid(format!("domain.{name} missing")))?;
            if v.len() != 2 {
                return Err(CliError::ConfigInvalid(format!(
                    "domain.{name} needs 2 coordinates"
                )));
            }
            Ok([v[0], v[1]])
        };
        let dom = match d.shape.as_str() {
            "interval" => {
                let a = d
                    .a
                    .ok_or_else(|| CliError::ConfigInvalid("domain.a missing".into()))?;
                let b = d
                    .b
                    .ok_or_else(|| CliError::ConfigInvalid("domain.b missing".into()))?;
                Domain::interval(a, b)
            }
            "ball" => {
                let c = get2(&d.center, "center")?;
                let r = d
                    .radius
                    .ok_or_else(|| CliError::ConfigInvalid("domain.radius missing".into()))?;
                Domain::ball(c, r)
            }
            "rectangle" => Domain::rectangle(get2(&d.lo, "lo")?, get2(&d.hi, "hi")?),
            other => {
                return Err(CliError::ConfigInvalid(format!(
                    "domain.shape must be interval, ball, or rectangle, got {other}"
                )))
            }
        }
        .map_err(|e| CliError::ConfigInvalid(format!("domain: {e}")))?;
        let dim_ok = dom.dim() == self.params.dim;
        if !dim_ok {
            return Err(CliError::ConfigInvalid(format!(
                "domain dimension {} does not match params.dim {}",
                dom.dim(),
                self.params.dim
            )));
        }
        Ok(dom)
    }

    pub fn build_grid(&self, domain: &Domain) -> Result<Arc<Grid>, CliError> {
        if self.grid.collar_factor < 1.0 {
            return Err(CliError::ConfigInvalid(format!(
                "grid.collar_factor must be at least 1, got {}",
                self.grid.collar_factor
            )));
        }
        let collar = self.grid.collar_factor * domain.diameter();
        Grid::build(domain, self.grid.interior_nodes, collar)
            .map(Arc::new)
            .map_err(|e| CliError::ConfigInvalid(format!("grid: {e}")))
    }

    /// Quadrature defaults scaled to the domain: pairing radius an eighth
    /// of the inradius, far truncation at 100 diameters (the truncation
    /// error bound is O(far^{-sp}) for merely bounded functions).
    pub fn build_quad(&self, domain: &Domain) -> QuadConfig {
        QuadConfig {
            pv_inner_radius: domain.inradius() / 8.0,
            near_panels: 12,
            far_radius: (100.0 * domain.diameter()).max(64.0),
            far_panels: 16,
            tail_mode: TailMode::AnalyticFromTailClass,
        }
    }

    pub fn solver_opts(&self) -> fracp_core::SolverOpts {
        fracp_core::SolverOpts {
            grad_tol: self.solver.grad_tol,
            max_iter: self.solver.max_iter.unwrap_or(10_000),
            init: fracp_core::InitGuess::Auto,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[params]
s = 0.5
p = 2.0
dim = 1

[domain]
shape = "interval"
a = -1.0
b = 1.0

[grid]
interior_nodes = 21

[problem]
f = { kind = "constant", value = 1.0 }
g = { kind = "constant", value = 0.0 }
c = { kind = "constant", value = 0.0 }
"#;

    #[test]
    fn minimal_config_parses_and_builds() {
        let cfg = ExperimentConfig::parse(MINIMAL).unwrap();
        let prm = cfg.build_params().unwrap();
        assert_eq!(prm.p(), 2.0);
        let dom = cfg.build_domain().unwrap();
        let grid = cfg.build_grid(&dom).unwrap();
        assert_eq!(grid.interior_nodes().len(), 21);
        assert_eq!(cfg.output.seed, 0);
    }

    #[test]
    fn out_of_range_p_is_config_invalid() {
        let text = MINIMAL.replace("p = 2.0", "p = 0.5");
        let cfg = ExperimentConfig::parse(&text).unwrap();
        match cfg.build_params() {
            Err(CliError::ConfigInvalid(msg)) => assert!(msg.contains("p out of range")),
            other => panic!("expected ConfigInvalid, got {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = format!("{MINIMAL}\n[typo_section]\nx = 1\n");
        assert!(ExperimentConfig::parse(&text).is_err());
    }

    #[test]
    fn dimension_mismatch_is_flagged() {
        let text = MINIMAL.replace("dim = 1", "dim = 2");
        let cfg = ExperimentConfig::parse(&text).unwrap();
        assert!(matches!(
            cfg.build_domain(),
            Err(CliError::ConfigInvalid(_))
        ));
    }
}

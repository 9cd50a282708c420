//! Registry of named closed-form presets for problem data and evaluation
//! targets: constants, indicator patches, boundary-distance powers, the
//! bump profile, and the touching barrier.

use serde::{Deserialize, Serialize};

use fracp_core::{ClosedFormFunction, Domain, FracParams, Point};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PresetCfg {
    /// `value` everywhere.
    Constant { value: f64 },
    /// `value` on a ball patch, zero elsewhere.
    Indicator {
        value: f64,
        center: Vec<f64>,
        radius: f64,
    },
    /// `delta^s` of the experiment domain.
    DistS,
    /// `delta^{2s}` of the experiment domain.
    Dist2s,
    /// `(1 - |x - center|^2 / radius^2)_+^s`; defaults to the domain's
    /// inscribed ball.
    Bump {
        center: Option<Vec<f64>>,
        radius: Option<f64>,
    },
    /// `-eps |x - x_star|^beta`.
    Barrier {
        eps: f64,
        beta: f64,
        x_star: Vec<f64>,
    },
}

fn to_point(v: &[f64], what: &str) -> Result<Point, CliError> {
    match v {
        [x] => Ok([*x, 0.0]),
        [x, y] => Ok([*x, *y]),
        _ => Err(CliError::ConfigInvalid(format!(
            "{what} must have 1 or 2 coordinates, got {}",
            v.len()
        ))),
    }
}

impl PresetCfg {
    pub fn to_closed_form(
        &self,
        domain: &Domain,
        params: &FracParams,
    ) -> Result<ClosedFormFunction, CliError> {
        match self {
            PresetCfg::Constant { value } => Ok(ClosedFormFunction::constant(*value)),
            PresetCfg::Indicator {
                value,
                center,
                radius,
            } => {
                let c = to_point(center, "indicator.center")?;
                let patch = if domain.dim() == 1 {
                    Domain::interval(c[0] - radius, c[0] + radius)
                } else {
                    Domain::ball(c, *radius)
                }
                .map_err(|e| CliError::ConfigInvalid(format!("indicator: {e}")))?;
                Ok(ClosedFormFunction::indicator(&patch, *value))
            }
            PresetCfg::DistS => Ok(ClosedFormFunction::boundary_distance_pow(
                domain, params, 1.0,
            )),
            PresetCfg::Dist2s => Ok(ClosedFormFunction::boundary_distance_pow(
                domain, params, 2.0,
            )),
            PresetCfg::Bump { center, radius } => {
                let c = match center {
                    Some(v) => to_point(v, "bump.center")?,
                    None => domain.center(),
                };
                let r = radius.unwrap_or_else(|| domain.inradius());
                if r <= 0.0 {
                    return Err(CliError::ConfigInvalid("bump.radius must be positive".into()));
                }
                Ok(ClosedFormFunction::bump_profile(c, r, params.s()))
            }
            PresetCfg::Barrier { eps, beta, x_star } => {
                let c = to_point(x_star, "barrier.x_star")?;
                if *beta <= 2.0 {
                    return Err(CliError::ConfigInvalid(
                        "barrier.beta must exceed 2".into(),
                    ));
                }
                Ok(ClosedFormFunction::power_barrier(c, *eps, *beta))
            }
        }
    }

    /// The constant the preset takes far from the domain; nonzero only for
    /// constants. Drives the solver's far-field term.
    pub fn far_value(&self) -> f64 {
        match self {
            PresetCfg::Constant { value } => *value,
            _ => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_sample_expected_values() {
        let dom = Domain::interval(-1.0, 1.0).unwrap();
        let prm = FracParams::new(0.5, 2.0, 1).unwrap();

        let c: PresetCfg = toml::from_str(r#"kind = "constant"
value = 2.5"#)
            .unwrap();
        assert_eq!(c.to_closed_form(&dom, &prm).unwrap().value([0.3, 0.0]), 2.5);
        assert_eq!(c.far_value(), 2.5);

        let ind: PresetCfg = toml::from_str(
            r#"kind = "indicator"
value = 1.0
center = [1.5]
radius = 0.3"#,
        )
        .unwrap();
        let f = ind.to_closed_form(&dom, &prm).unwrap();
        assert_eq!(f.value([1.5, 0.0]), 1.0);
        assert_eq!(f.value([0.0, 0.0]), 0.0);
        assert_eq!(ind.far_value(), 0.0);

        let d: PresetCfg = toml::from_str(r#"kind = "dist_s""#).unwrap();
        let f = d.to_closed_form(&dom, &prm).unwrap();
        assert!((f.value([0.5, 0.0]) - 0.5f64.sqrt()).abs() < 1e-15);

        let b: PresetCfg = toml::from_str(r#"kind = "bump""#).unwrap();
        let f = b.to_closed_form(&dom, &prm).unwrap();
        assert!((f.value([0.0, 0.0]) - 1.0).abs() < 1e-15);
        assert_eq!(f.value([1.2, 0.0]), 0.0);

        let bar: PresetCfg = toml::from_str(
            r#"kind = "barrier"
eps = 0.01
beta = 3.0
x_star = [0.0]"#,
        )
        .unwrap();
        let f = bar.to_closed_form(&dom, &prm).unwrap();
        assert!((f.value([0.5, 0.0]) + 0.01 * 0.125).abs() < 1e-15);
    }
}

use serde::{Deserialize, Serialize};

use super::{circle_rotation, ode_flow, torus_linear, Domain, FlowKind, FlowSystem, VectorField};
use crate::error::{Error, Result};

/// JSON description of a flow: `{kind, dim, params{…}, rk_step?}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub kind: FlowKind,
    pub dim: usize,
    #[serde(default)]
    pub params: FlowParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rk_step: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowParams {
    /// Rotation rate (kind `rotation`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Rates per torus coordinate (kind `torus-linear`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    /// Vector field name for kind `ode`: `zero`, `rotation`, `limit-cycle`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exit_margin: Option<f64>,
}

pub const DEFAULT_RK_STEP: f64 = 1e-3;
pub const DEFAULT_EXIT_MARGIN: f64 = 1e-6;

impl FlowSpec {
    pub fn circle(alpha: f64) -> Self {
        FlowSpec {
            kind: FlowKind::Rotation,
            dim: 1,
            params: FlowParams {
                alpha: Some(alpha),
                ..Default::default()
            },
            rk_step: None,
        }
    }

    pub fn limit_cycle() -> Self {
        FlowSpec {
            kind: FlowKind::Ode,
            dim: 2,
            params: FlowParams {
                field: Some("limit-cycle".into()),
                omega: Some(1.0),
                attraction: Some(1.0),
                exit_margin: Some(DEFAULT_EXIT_MARGIN),
                ..Default::default()
            },
            rk_step: Some(DEFAULT_RK_STEP),
        }
    }

    /// Writes every default into the spec so it echoes completely.
    pub fn with_defaults(mut self) -> Self {
        if self.kind == FlowKind::Ode {
            let field = self.params.field.clone().unwrap_or_else(|| "limit-cycle".into());
            self.rk_step.get_or_insert(DEFAULT_RK_STEP);
            self.params.exit_margin.get_or_insert(DEFAULT_EXIT_MARGIN);
            match field.as_str() {
                "limit-cycle" => {
                    self.params.omega.get_or_insert(1.0);
                    self.params.attraction.get_or_insert(1.0);
                }
                "rotation" => {
                    self.params.omega.get_or_insert(1.0);
                    self.params.inner.get_or_insert(0.0);
                    self.params.outer.get_or_insert(1.0);
                }
                _ => {}
            }
            self.params.field = Some(field);
        }
        self
    }

    pub fn build(&self) -> Result<FlowSystem> {
        let p = &self.params;
        let need =
            |name: &str| Error::InvalidConfig(format!("flow kind {:?} needs params.{name}", self.kind));
        match self.kind {
            FlowKind::Rotation => {
                if self.dim != 1 {
                    return Err(Error::InvalidConfig("rotation flows have dim 1".into()));
                }
                Ok(circle_rotation(p.alpha.ok_or_else(|| need("alpha"))?))
            }
            FlowKind::TorusLinear => {
                let alphas = p.alphas.clone().ok_or_else(|| need("alphas"))?;
                if alphas.len() != self.dim {
                    return Err(Error::InvalidConfig(format!(
                        "dim {} but {} rates given",
                        self.dim,
                        alphas.len()
                    )));
                }
                torus_linear(alphas)
            }
            FlowKind::Ode => {
                let spec = self.clone().with_defaults();
                let p = &spec.params;
                let rk_step = spec.rk_step.unwrap_or(DEFAULT_RK_STEP);
                let margin = p.exit_margin.unwrap_or(DEFAULT_EXIT_MARGIN);
                let field_name = p.field.as_deref().unwrap_or("limit-cycle");
                let (field, domain) = match field_name {
                    "zero" => (
                        VectorField::zero(self.dim),
                        Domain::Box {
                            bounds: vec![[-1.0, 1.0]; self.dim],
                        },
                    ),
                    "rotation" => (
                        VectorField::planar_rotation(p.omega.unwrap_or(1.0)),
                        Domain::Annulus {
                            inner: p.inner.unwrap_or(0.0),
                            outer: p.outer.unwrap_or(1.0),
                        },
                    ),
                    "limit-cycle" => {
                        if p.inner.is_some() || p.outer.is_some() {
                            return Err(Error::InvalidConfig(
                                "the limit-cycle flow lives on the closed unit disk; inner/outer do not apply".into(),
                            ));
                        }
                        (
                            VectorField::limit_cycle(p.omega.unwrap_or(1.0), p.attraction.unwrap_or(1.0)),
                            Domain::Annulus {
                                inner: 0.0,
                                outer: 1.0,
                            },
                        )
                    }
                    other => return Err(Error::InvalidConfig(format!("unknown vector field {other:?}"))),
                };
                if field.dim() != self.dim {
                    return Err(Error::InvalidConfig(format!(
                        "field {field_name} has dim {} but spec says {}",
                        field.dim(),
                        self.dim
                    )));
                }
                ode_flow(field, domain, rk_step, margin)
            }
            FlowKind::Custom => Err(Error::InvalidConfig(
                "custom flows cannot be loaded from JSON".into(),
            )),
        }
    }
}

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flows::{FlowSpec, FlowSystem, State, DOMAIN_TOL};
use crate::function_space::MetricConfig;
use crate::hilbert::{CoordEmbedding, DenseEmbedding, DenseSet, Embedding};
use crate::orbit::OrbitConfig;
use crate::smoothing::{pairs, QuadConfig, DEFAULT_DEPTH_K};

/// Which map `ψ : X → [0, 1]^ℕ` to use.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PsiChoice {
    /// Rescaled coordinates (sin/cos pairs on tori).
    #[default]
    Coords,
    /// Distances to a seeded random dense set.
    Dense { points: usize, seed: u64 },
}

impl PsiChoice {
    pub fn build(&self, sys: &FlowSystem) -> Result<Box<dyn Embedding>> {
        let domain = sys.domain().clone();
        Ok(match self {
            PsiChoice::Coords => Box::new(CoordEmbedding::new(domain)),
            PsiChoice::Dense { points, seed } => {
                Box::new(DenseEmbedding::new(DenseSet::random(domain, *points, *seed)?))
            }
        })
    }
}

/// Budgets of the individual properties checked by `verify`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Group law and identity of closed-form flows (rounding of `frac`).
    pub group_law_exact: f64,
    /// Group-law defect per unit time of integrated flows.
    pub group_law_ode_per_unit_time: f64,
    /// Allowed `|log2(ratio) - 4|` of the integrator's step-halving ratio.
    pub integrator_order: f64,
    /// Orbit-map equivariance for closed-form flows at grid-aligned shifts.
    pub orbit_equivariance_exact: f64,
    /// Orbit-map equivariance for integrated flows, `|r| ≤ 1`.
    pub orbit_equivariance_ode: f64,
    /// Smoothing equivariance at grid-aligned shifts.
    pub smoothing_equivariance: f64,
    /// Slack over `|s|` in `metric(T_s f, f) ≤ |s|`.
    pub translation_continuity: f64,
    /// Allowed `|order - 2|` of the derivative identity.
    pub derivative_order: f64,
    /// State distance below which pairs count as equal.
    pub injectivity_resolution: f64,
    /// Image differences at or below this are treated as equal.
    pub image_tol: f64,
    /// Rounding slack in the orbit continuity bound.
    pub continuity_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            group_law_exact: 1e-15,
            group_law_ode_per_unit_time: 1e-8,
            integrator_order: 1.0,
            orbit_equivariance_exact: 1e-12,
            orbit_equivariance_ode: 1e-7,
            smoothing_equivariance: 1e-12,
            translation_continuity: 1e-9,
            derivative_order: 0.2,
            injectivity_resolution: 1e-2,
            image_tol: 1e-12,
            continuity_slack: 1e-12,
        }
    }
}

impl Tolerances {
    fn entries(&self) -> [(&'static str, f64); 11] {
        [
            ("group_law_exact", self.group_law_exact),
            ("group_law_ode_per_unit_time", self.group_law_ode_per_unit_time),
            ("integrator_order", self.integrator_order),
            ("orbit_equivariance_exact", self.orbit_equivariance_exact),
            ("orbit_equivariance_ode", self.orbit_equivariance_ode),
            ("smoothing_equivariance", self.smoothing_equivariance),
            ("translation_continuity", self.translation_continuity),
            ("derivative_order", self.derivative_order),
            ("injectivity_resolution", self.injectivity_resolution),
            ("image_tol", self.image_tol),
            ("continuity_slack", self.continuity_slack),
        ]
    }
}

fn default_flow() -> FlowSpec {
    FlowSpec::circle(std::f64::consts::SQRT_2 - 1.0)
}

fn default_depth_k() -> u64 {
    DEFAULT_DEPTH_K
}

fn default_samples() -> usize {
    1000
}

fn default_seed() -> u64 {
    0x5eed
}

/// Everything a run depends on. Loaded from one JSON document; missing
/// fields take their defaults and every default is written back on echo.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_flow")]
    pub flow: FlowSpec,
    #[serde(default)]
    pub psi: PsiChoice,
    #[serde(default)]
    pub orbit: OrbitConfig,
    #[serde(default)]
    pub quad: QuadConfig,
    #[serde(default)]
    pub metric: MetricConfig,
    #[serde(default = "default_depth_k")]
    pub depth_k: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Random samples per property.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// States embedded by `embed`; empty means one state drawn from `seed`.
    #[serde(default)]
    pub initial_states: Vec<State>,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("config: {e}")))?;
        Ok(cfg.resolved())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Same config with flow defaults spelled out.
    pub fn resolved(mut self) -> Self {
        self.flow = self.flow.with_defaults();
        self
    }

    /// Largest sequence index `i` among the first `depth_k` pairs.
    pub fn required_depth(&self) -> usize {
        pairs(self.depth_k).map(|p| p.i()).max().unwrap_or(1) as usize
    }

    pub fn validate(&self) -> Result<FlowSystem> {
        for (name, v) in self.tolerances.entries() {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "tolerance {name} must be positive, got {v}"
                )));
            }
        }
        if self.samples == 0 {
            return Err(Error::InvalidConfig("samples must be at least 1".into()));
        }
        if self.depth_k == 0 {
            return Err(Error::InvalidConfig("depth_k must be at least 1".into()));
        }
        self.orbit.validate()?;
        // room for shifts of size up to one and the longest averaging interval
        if self.orbit.half_width < 1.0 {
            return Err(Error::InvalidConfig(format!(
                "orbit half_width must be at least 1, got {}",
                self.orbit.half_width
            )));
        }
        if self.orbit.hilbert_depth < self.required_depth() {
            return Err(Error::InvalidConfig(format!(
                "depth_k = {} reads sequence entry {} but orbit.hilbert_depth is {}",
                self.depth_k,
                self.required_depth(),
                self.orbit.hilbert_depth
            )));
        }
        self.quad.validate()?;
        self.metric.validate()?;
        if let PsiChoice::Dense { points: 0, .. } = self.psi {
            return Err(Error::InvalidConfig("dense psi needs at least one point".into()));
        }
        let sys = self.flow.build()?;
        for x in &self.initial_states {
            if x.len() != sys.dim() || !sys.domain().contains(x, DOMAIN_TOL) {
                return Err(Error::InvalidConfig(format!(
                    "initial state {x:?} is not in the flow's domain"
                )));
            }
        }
        Ok(sys)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}

use serde::{Deserialize, Serialize};

use super::RunConfig;

/// Outcome of one property suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    /// The statement being checked.
    pub claim: String,
    pub samples: usize,
    /// `None` when the suite could not be evaluated; see `error`.
    pub max_defect: Option<f64>,
    pub budget: f64,
    /// Where the budget comes from.
    pub budget_basis: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl PropertyResult {
    pub fn passes(max_defect: Option<f64>, budget: f64) -> bool {
        max_defect.is_some_and(|d| d <= budget)
    }
}

/// Static description of the build; no clocks, hostnames or paths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub package: String,
    pub version: String,
    pub os: String,
    pub arch: String,
    pub float: String,
}

impl Environment {
    pub fn current() -> Self {
        Environment {
            package: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            float: "IEEE 754 binary64".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub seed: u64,
    pub pass: bool,
    pub properties: Vec<PropertyResult>,
    pub environment: Environment,
    pub config: RunConfig,
}

impl Report {
    pub fn new(properties: Vec<PropertyResult>, config: RunConfig) -> Self {
        let pass = properties.iter().all(|p| p.pass);
        Report {
            seed: config.seed,
            pass,
            properties,
            environment: Environment::current(),
            config,
        }
    }

    /// Recomputes every verdict from the stored defects and budgets.
    pub fn is_consistent(&self) -> bool {
        let each = self
            .properties
            .iter()
            .all(|p| p.pass == PropertyResult::passes(p.max_defect, p.budget));
        each && self.pass == self.properties.iter().all(|p| p.pass) && self.seed == self.config.seed
    }

    pub fn property(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyResult> {
        self.properties.iter().filter(|p| !p.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

//! Run configuration: the field corpus, precision, samples and alpha policy.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use lcft::extension::{Context, FieldSpec};
use lcft::padic::{BaseField, Precision};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::serial::ElementJson;
use crate::suites::Suite;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Samples {
    /// Random Weil elements per extension for the group laws.
    pub laws: usize,
    /// Random gamma per extension for the solver suite.
    pub solver: usize,
    /// Samples per tower for the kernel and transitivity checks.
    pub tower: usize,
}

impl Default for Samples {
    fn default() -> Self {
        Samples { laws: 100, solver: 1000, tower: 4 }
    }
}

/// `"auto"` uses the standard alpha of each extension; explicit entries give
/// the split components of alpha by extension name.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaPolicy {
    #[default]
    Auto,
    Explicit(BTreeMap<String, Vec<ElementJson>>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerSpec {
    pub name: String,
    /// The top field E.
    pub top: String,
    /// Intermediate Galois subextensions L of E/K.
    pub middle: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseSpec {
    pub name: String,
    pub base: BaseField,
    pub extensions: Vec<FieldSpec>,
    #[serde(default)]
    pub towers: Vec<TowerSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub precision: Precision,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub samples: Samples,
    #[serde(default)]
    pub alpha: AlphaPolicy,
    #[serde(default)]
    pub format: Format,
    /// Suite run by `verify` when none is given on the command line.
    #[serde(default)]
    pub suite: Suite,
    pub bases: Vec<BaseSpec>,
}

/// One extension resolved to a context holding only itself.
#[derive(Debug, Clone)]
pub struct ExtTarget {
    pub name: String,
    pub base: String,
    pub ctx: Arc<Context>,
    pub top: usize,
}

/// A tower resolved to a context holding its middle fields and its top.
#[derive(Debug, Clone)]
pub struct TowerTarget {
    pub name: String,
    pub ctx: Arc<Context>,
    pub top: usize,
    /// `(name, index)` of each middle field.
    pub middle: Vec<(String, usize)>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.precision.validate()?;
        let mut seen = std::collections::BTreeSet::new();
        for b in &self.bases {
            b.base.validate()?;
            for e in &b.extensions {
                if !seen.insert(e.name.clone()) {
                    return Err(CliError::Config(format!("duplicate extension name {}", e.name)));
                }
            }
            for t in &b.towers {
                for n in t.middle.iter().chain([&t.top]) {
                    if !b.extensions.iter().any(|e| &e.name == n) {
                        return Err(CliError::Config(format!("tower {}: unknown extension {n}", t.name)));
                    }
                }
            }
        }
        if let AlphaPolicy::Explicit(map) = &self.alpha {
            if let Some(n) = map.keys().find(|n| !seen.contains(*n)) {
                return Err(CliError::Config(format!("alpha given for unknown extension {n}")));
            }
        }
        Ok(())
    }

    fn spec(&self, name: &str) -> Option<(&BaseSpec, &FieldSpec)> {
        self.bases.iter().find_map(|b| b.extensions.iter().find(|e| e.name == name).map(|e| (b, e)))
    }

    pub fn extension(&self, name: &str) -> Result<ExtTarget, CliError> {
        let (b, spec) = self.spec(name).ok_or_else(|| CliError::Config(format!("unknown extension {name}")))?;
        let ctx = Context::new(b.base, self.precision, std::slice::from_ref(spec))?;
        Ok(ExtTarget { name: name.into(), base: b.name.clone(), ctx: Arc::new(ctx), top: 1 })
    }

    pub fn extensions(&self) -> Vec<String> {
        self.bases.iter().flat_map(|b| b.extensions.iter().map(|e| e.name.clone())).collect()
    }

    pub fn tower(&self, name: &str) -> Result<TowerTarget, CliError> {
        let (b, t) = self
            .bases
            .iter()
            .find_map(|b| b.towers.iter().find(|t| t.name == name).map(|t| (b, t)))
            .ok_or_else(|| CliError::Config(format!("unknown tower {name}")))?;
        let specs: Vec<FieldSpec> =
            t.middle.iter().chain([&t.top]).map(|n| self.spec(n).map(|(_, s)| s.clone()).unwrap()).collect();
        let ctx = Context::new(b.base, self.precision, &specs)?;
        let middle = t.middle.iter().enumerate().map(|(i, n)| (n.clone(), i + 1)).collect();
        Ok(TowerTarget { name: name.into(), ctx: Arc::new(ctx), top: specs.len(), middle })
    }

    pub fn towers(&self) -> Vec<String> {
        self.bases.iter().flat_map(|b| b.towers.iter().map(|t| t.name.clone())).collect()
    }
}

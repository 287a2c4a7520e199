//! The JSON configuration document.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use qmod::semiinv::BlockDetSI;
use qmod::{DimVector, ExtDimVector, ExtensionData, IntMatrix, Quiver};

pub const DEFAULT_BUDGET: u128 = 100_000_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub quiver: QuiverSpec,
    pub extension: ExtensionSpec,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub seed: u64,
    /// Keys `s:d1,d2,...`.
    #[serde(default)]
    pub gamma_overrides: BTreeMap<String, bool>,
    #[serde(default)]
    pub semi_invariants: Vec<SemiInvariantSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverSpec {
    pub vertices: Vec<String>,
    #[serde(default)]
    pub arrows: Vec<ArrowSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowSpec {
    pub name: String,
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionSpec {
    pub t: Vec<usize>,
    /// Arrow name → t(target) × t(source) integer matrix.
    #[serde(default)]
    pub matrices: Option<BTreeMap<String, Vec<Vec<i64>>>>,
    #[serde(default)]
    pub assume_rigid: bool,
    #[serde(default)]
    pub assume_end_trivial: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    #[serde(default = "default_budget")]
    pub max_enumeration: u128,
}

fn default_budget() -> u128 {
    DEFAULT_BUDGET
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets { max_enumeration: DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemiInvariantSpec {
    pub name: String,
    /// `s:d1,d2,...`
    pub dim: String,
    #[serde(default = "one")]
    pub sign: i64,
    /// Rows of block expressions such as `m*rho1@1`, `rho1@1+rho3@1` or `0`.
    pub grid: Vec<Vec<String>>,
}

fn one() -> i64 {
    1
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg: Config = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        Ok(cfg)
    }

    pub fn extension(&self) -> Result<ExtensionData> {
        let arrows: Vec<(&str, &str, &str)> =
            self.quiver.arrows.iter().map(|a| (a.name.as_str(), a.source.as_str(), a.target.as_str())).collect();
        let verts: Vec<&str> = self.quiver.vertices.iter().map(String::as_str).collect();
        let q = Quiver::new(&verts, &arrows)?;
        let matrices = match &self.extension.matrices {
            None => None,
            Some(map) => {
                let mut out = BTreeMap::new();
                for (name, rows) in map {
                    let a = q
                        .arrows()
                        .iter()
                        .find(|a| &a.name == name)
                        .ok_or_else(|| qmod::Error::Shape(format!("matrix given for unknown arrow '{name}'")))?;
                    let cols = self.extension.t.get(a.source).copied().unwrap_or(0);
                    out.insert(name.clone(), IntMatrix::from_rows(rows, cols)?);
                }
                Some(out)
            }
        };
        Ok(ExtensionData::new(
            q,
            DimVector(self.extension.t.clone()),
            matrices,
            self.extension.assume_rigid,
            self.extension.assume_end_trivial,
        )?)
    }

    pub fn gamma_table(&self) -> Result<HashMap<ExtDimVector, bool>> {
        self.gamma_overrides
            .iter()
            .map(|(k, &b)| Ok((ExtDimVector::parse(k)?, b)))
            .collect()
    }

    pub fn semi_invariants(&self) -> Result<Vec<BlockDetSI>> {
        self.semi_invariants
            .iter()
            .map(|s| {
                let grid: Vec<Vec<&str>> = s.grid.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
                Ok(BlockDetSI::parse(&s.name, ExtDimVector::parse(&s.dim)?, s.sign, &grid)?)
            })
            .collect()
    }
}

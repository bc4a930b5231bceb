//! JSON run configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog::{builtin, CatalogEntry};
use crate::error::{Error, Result};
use crate::field::{Tolerances, UnitField};
use crate::geometry::{ChartedManifold, DiffConfig, Grid, Point3};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ManifoldSpec {
    Named(String),
    Custom(CustomManifold),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomManifold {
    /// Rows of the metric matrix; only the upper triangle is read.
    pub metric: [[String; 3]; 3],
    /// `"true"` for the whole chart, otherwise an expression that must be positive.
    #[serde(default = "everywhere")]
    pub domain: String,
}

fn everywhere() -> String {
    "true".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub components: [String; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitSpec {
    pub start: [f64; 3],
    pub t_end: f64,
    #[serde(default = "default_step")]
    pub step: f64,
}

fn default_step() -> f64 {
    crate::flow::DEFAULT_STEP
}

pub const DEFAULT_ORBIT_T: f64 = 2.0;
pub const DEFAULT_VOLUME_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumeSpec {
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub manifold: ManifoldSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orbit: Option<OrbitSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diff: Option<DiffConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<VolumeSpec>,
}

impl Config {
    pub fn for_entry(name: &str) -> Self {
        Config {
            manifold: ManifoldSpec::Named(name.to_string()),
            field: None,
            grid: None,
            orbit: None,
            diff: None,
            tolerances: Tolerances::default(),
            volume: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
        Config::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(g) = &self.grid {
            if g.counts.contains(&0) {
                return Err(Error::InvalidInput("grid counts must be at least 1".into()));
            }
            if g.min.iter().chain(&g.max).any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("grid bounds must be finite".into()));
            }
        }
        if let Some(o) = &self.orbit {
            if !(o.step > 0.0) || !o.step.is_finite() {
                return Err(Error::InvalidInput("orbit step must be positive".into()));
            }
            if !(o.t_end >= 0.0) || !o.t_end.is_finite() {
                return Err(Error::InvalidInput("orbit t_end must be non-negative".into()));
            }
        }
        if let Some(d) = &self.diff {
            if !(d.step > 0.0) || !d.step.is_finite() {
                return Err(Error::InvalidInput("diff step must be positive".into()));
            }
        }
        if let Some(v) = &self.volume {
            if v.nodes == 0 {
                return Err(Error::InvalidInput("volume nodes must be at least 1".into()));
            }
        }
        Ok(())
    }

    /// Build the (manifold, field) pair described by the config.
    pub fn entry(&self) -> Result<CatalogEntry> {
        let mut entry = match &self.manifold {
            ManifoldSpec::Named(name) => {
                let mut e = builtin(name)?;
                if let Some(f) = &self.field {
                    e.field = custom_field(f)?;
                    e.name = format!("{}+custom_field", e.name);
                    e.expected.clear();
                }
                e
            }
            ManifoldSpec::Custom(m) => {
                let f = self
                    .field
                    .as_ref()
                    .ok_or_else(|| Error::InvalidInput("a custom manifold needs a field".into()))?;
                let g = &m.metric;
                let upper = [&g[0][0], &g[0][1], &g[0][2], &g[1][1], &g[1][2], &g[2][2]].map(|s| s.as_str());
                let domain = (m.domain.trim() != "true").then_some(m.domain.as_str());
                let man = ChartedManifold::from_expressions("custom", upper, domain)?;
                let grid = self
                    .grid
                    .clone()
                    .unwrap_or_else(|| Grid::cube(-1.0, 1.0, 5));
                let start = self.orbit.map(|o| Point3::from(o.start)).unwrap_or_else(Point3::origin);
                CatalogEntry::custom("custom", man, custom_field(f)?, grid, start)
            }
        };
        if let Some(d) = self.diff {
            entry.manifold = entry.manifold.with_diff(d);
        }
        if let Some(g) = &self.grid {
            entry.grid = g.clone();
        }
        Ok(entry)
    }

    pub fn orbit_or_default(&self, entry: &CatalogEntry) -> OrbitSpec {
        self.orbit.unwrap_or(OrbitSpec {
            start: [entry.orbit_start.x, entry.orbit_start.y, entry.orbit_start.z],
            t_end: DEFAULT_ORBIT_T,
            step: default_step(),
        })
    }

    pub fn volume_nodes(&self) -> usize {
        self.volume.map_or(DEFAULT_VOLUME_NODES, |v| v.nodes)
    }

    /// Single-line JSON echo.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

fn custom_field(f: &FieldSpec) -> Result<UnitField> {
    let c = &f.components;
    UnitField::from_expressions("custom", [c[0].as_str(), c[1].as_str(), c[2].as_str()])
}

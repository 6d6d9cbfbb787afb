//! JSON scenario documents.
//!
//! ```json
//! {
//!   "name": "optional label",
//!   "positions": [[x, y], ...],
//!   "edges": [[j, i], ...],
//!   "root": 1,
//!   "target": [x, y],
//!   "root_heading": [x, y],
//!   "angles": [[j, i, alpha_radians], ...],
//!   "initial_headings": [[x, y], ...],
//!   "seed": 42
//! }
//! ```
//!
//! Exactly one of `target` or the pair `root_heading` + `angles` must be
//! present; a target is turned into set points by
//! [`synthesize_angles`](crate::scenario::synthesize_angles). Exactly one of
//! `initial_headings` or `seed` must be present. `root` defaults to 1.
//! Headings given as vectors are normalized on load.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dynamics::sample_initial_headings;
use crate::geometry::{Angle, UnitVec2, Vec2};
use crate::graph::Digraph;
use crate::scenario::{synthesize_angles, DesiredAngles, Scenario, ScenarioError};

#[derive(Debug, Error)]
pub enum ScenarioFileError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed scenario document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("scenario schema error: {0}")]
    Schema(String),
    #[error("invalid scenario: {0}")]
    Invalid(#[from] ScenarioError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub positions: Vec<[f64; 2]>,
    pub edges: Vec<[usize; 2]>,
    #[serde(default = "default_root")]
    pub root: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_heading: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<Vec<(usize, usize, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_headings: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn default_root() -> usize {
    1
}

/// A validated scenario plus the provenance needed to reproduce it.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub name: Option<String>,
    pub scenario: Scenario,
    /// Seed the initial headings were drawn from, if they were sampled.
    pub seed: Option<u64>,
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self, ScenarioFileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioFileError> {
        let text = fs::read_to_string(path)
            .map_err(|source| ScenarioFileError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    /// Builds the scenario. `seed_override` forces sampled initial headings.
    pub fn resolve(&self, seed_override: Option<u64>) -> Result<LoadedScenario, ScenarioFileError> {
        let n = self.positions.len();
        let positions: Vec<Vec2> = self.positions.iter().map(|&p| Vec2::from(p)).collect();
        let graph = Digraph::new(n, self.edges.iter().map(|&[j, i]| (j, i))).map_err(ScenarioError::from)?;

        let (root_desired_heading, desired_angles) = match (&self.target, &self.root_heading, &self.angles) {
            (Some(t), None, None) => {
                let syn = synthesize_angles(&positions, &graph, self.root, Vec2::from(*t))?;
                (syn.root_desired_heading, syn.desired_angles)
            }
            (None, Some(h), Some(angles)) => {
                let b = UnitVec2::new(h[0], h[1]).map_err(ScenarioError::from)?;
                let mut map = DesiredAngles::new();
                for &(j, i, alpha) in angles {
                    if !alpha.is_finite() {
                        return Err(ScenarioFileError::Schema(format!("angle on ({j}, {i}) is not finite")));
                    }
                    if map.insert(j, i, Angle::new(alpha)).is_some() {
                        return Err(ScenarioFileError::Schema(format!("angle on ({j}, {i}) given twice")));
                    }
                }
                (b, map)
            }
            _ => {
                return Err(ScenarioFileError::Schema(
                    "give exactly one of `target` or both `root_heading` and `angles`".into(),
                ))
            }
        };

        if self.root == 0 || self.root > n {
            return Err(ScenarioError::Graph(crate::graph::GraphError::BadRoot(self.root)).into());
        }
        let (initial_headings, seed) = match (seed_override, &self.initial_headings, self.seed) {
            (Some(seed), _, _) | (None, None, Some(seed)) => {
                (sample_initial_headings(n, self.root, root_desired_heading, seed)?, Some(seed))
            }
            (None, Some(hs), None) => {
                let hs = hs
                    .iter()
                    .map(|&[x, y]| UnitVec2::new(x, y))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(ScenarioError::from)?;
                (hs, None)
            }
            _ => return Err(ScenarioFileError::Schema("give exactly one of `initial_headings` or `seed`".into())),
        };

        let scenario =
            Scenario::new(positions, graph, self.root, root_desired_heading, desired_angles, initial_headings)?;
        Ok(LoadedScenario { name: self.name.clone(), scenario, seed })
    }

    /// Fully explicit document for an already-built scenario.
    pub fn from_scenario(scenario: &Scenario, name: Option<String>) -> Self {
        ScenarioFile {
            name,
            positions: scenario.positions().iter().map(|&p| p.into()).collect(),
            edges: scenario.graph().edges().iter().map(|&(j, i)| [j, i]).collect(),
            root: scenario.root(),
            target: None,
            root_heading: Some(scenario.root_desired_heading().into()),
            angles: Some(scenario.desired_angles().iter().map(|((j, i), a)| (j, i, a.radians())).collect()),
            initial_headings: Some(scenario.initial_headings().iter().map(|&h| h.into()).collect()),
            seed: None,
        }
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario documents always serialize")
    }
}

/// SHA-256 over the explicit, unnamed JSON form of the scenario.
pub fn scenario_hash(scenario: &Scenario) -> String {
    let doc = ScenarioFile::from_scenario(scenario, None);
    let bytes = serde_json::to_vec(&doc).expect("scenario documents always serialize");
    hex::encode(Sha256::digest(&bytes))
}

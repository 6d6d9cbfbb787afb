//! Reference scenarios, embedded so they need no files on disk.

use std::fmt;
use std::str::FromStr;

use crate::geometry::Vec2;
use crate::graph::Digraph;
use crate::scenario::Scenario;
use crate::scenario_file::{LoadedScenario, ScenarioFile, ScenarioFileError};

pub const HEXAGON_JSON: &str = include_str!("../scenarios/hexagon.json");
pub const HEXAGON_MISDIRECTED_JSON: &str = include_str!("../scenarios/hexagon-misdirected.json");
pub const TORRICELLI_JSON: &str = include_str!("../scenarios/torricelli.json");
pub const TORRICELLI_MISDIRECTED_JSON: &str = include_str!("../scenarios/torricelli-misdirected.json");

/// The four bundled reference runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// Six agents on a regular hexagon aimed at its center.
    Hexagon,
    /// Same, with the root set point turned 45 degrees off target.
    HexagonMisdirected,
    /// Three agents on an equilateral triangle aimed at its Torricelli point.
    Torricelli,
    /// Same, with the root set point turned by 0.3 rad.
    TorricelliMisdirected,
}

impl Builtin {
    pub const ALL: [Builtin; 4] =
        [Builtin::Hexagon, Builtin::HexagonMisdirected, Builtin::Torricelli, Builtin::TorricelliMisdirected];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Hexagon => "hexagon",
            Builtin::HexagonMisdirected => "hexagon-misdirected",
            Builtin::Torricelli => "torricelli",
            Builtin::TorricelliMisdirected => "torricelli-misdirected",
        }
    }

    pub fn json(self) -> &'static str {
        match self {
            Builtin::Hexagon => HEXAGON_JSON,
            Builtin::HexagonMisdirected => HEXAGON_MISDIRECTED_JSON,
            Builtin::Torricelli => TORRICELLI_JSON,
            Builtin::TorricelliMisdirected => TORRICELLI_MISDIRECTED_JSON,
        }
    }

    pub fn file(self) -> ScenarioFile {
        ScenarioFile::from_json(self.json()).expect("bundled scenarios parse")
    }

    pub fn load(self) -> Result<LoadedScenario, ScenarioFileError> {
        self.file().resolve(None)
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| format!("unknown scenario `{s}` (expected one of hexagon, hexagon-misdirected, torricelli, torricelli-misdirected)"))
    }
}

pub fn hexagon() -> Result<Scenario, ScenarioFileError> {
    Builtin::Hexagon.load().map(|l| l.scenario)
}

pub fn hexagon_misdirected() -> Result<Scenario, ScenarioFileError> {
    Builtin::HexagonMisdirected.load().map(|l| l.scenario)
}

pub fn torricelli() -> Result<Scenario, ScenarioFileError> {
    Builtin::Torricelli.load().map(|l| l.scenario)
}

pub fn torricelli_misdirected() -> Result<Scenario, ScenarioFileError> {
    Builtin::TorricelliMisdirected.load().map(|l| l.scenario)
}

/// Regular hexagon of circumradius 2 and its communication graph, with
/// edge `(4, 5)` giving vertex 5 an in-neighbor.
pub fn hexagon_layout() -> (Vec<Vec2>, Digraph) {
    let s3 = 3.0_f64.sqrt();
    let positions = vec![
        Vec2::new(2.0, 0.0),
        Vec2::new(1.0, s3),
        Vec2::new(-1.0, s3),
        Vec2::new(-2.0, 0.0),
        Vec2::new(-1.0, -s3),
        Vec2::new(1.0, -s3),
    ];
    let graph = Digraph::new(6, [(1, 2), (1, 3), (2, 3), (3, 4), (4, 5), (4, 6), (1, 6), (5, 6)])
        .expect("hexagon graph is well formed");
    (positions, graph)
}

/// Equilateral triangle of unit circumradius centered at the origin, vertices
/// counterclockwise from `(1, 0)`, with edges `1 -> 2`, `2 -> 3`, `1 -> 3`.
pub fn triangle_layout() -> (Vec<Vec2>, Digraph) {
    let positions = (0..3)
        .map(|k| {
            let (s, c) = (k as f64 * std::f64::consts::TAU / 3.0).sin_cos();
            Vec2::new(c, s)
        })
        .collect();
    let graph = Digraph::new(3, [(1, 2), (2, 3), (1, 3)]).expect("triangle graph is well formed");
    (positions, graph)
}

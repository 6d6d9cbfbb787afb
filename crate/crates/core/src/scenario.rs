//! Problem instances: agent positions, topology, set points and initial headings.
//!
//! A [`Scenario`] can only be built through [`Scenario::new`], which checks
//! the structural invariants, the rooted out-branching topology and the
//! non-degeneracy conditions on the root's initial heading and on the
//! root's first child. Whether the set points actually describe a common
//! target is a separate question answered by [`check_feasibility`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::geometry::{angle_between, projector, rotation, solve_2x2, Angle, GeometryError, UnitVec2, Vec2};
use crate::graph::{Digraph, GraphError};

/// Minimum agent-to-target distance for a bearing to be defined (meters).
pub const TARGET_CLEARANCE: f64 = 1e-9;
/// Tolerance on the root antipode test and on the first angle avoiding `{0, pi}`.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Agreement tolerance between desired headings propagated along different edges.
pub const PROPAGATION_TOL: f64 = 1e-9;
/// Maximum perpendicular miss distance for a ray to count as concurrent (meters).
pub const CONCURRENCE_TOL: f64 = 1e-6;

/// Which standing assumption a validation failure breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assumption {
    /// The graph is a rooted out-branching (and acyclic).
    RootedOutBranching,
    /// The desired angles and root heading describe a common target.
    Feasibility,
    /// The root does not start antipodal to its goal and the first angle avoids `{0, pi}`.
    NonDegenerate,
    /// Not an assumption; the input is malformed.
    WellFormed,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Assumption::RootedOutBranching => "Assumption 1 (rooted out-branching graph)",
            Assumption::Feasibility => "Assumption 2 (feasible desired angles)",
            Assumption::NonDegenerate => "Assumption 3 (non-degenerate root heading and first angle)",
            Assumption::WellFormed => "well-formed scenario",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("expected {expected} {what}, got {got}")]
    LengthMismatch { what: &'static str, expected: usize, got: usize },
    #[error("edge ({0}, {1}) has no desired angle")]
    MissingAngle(usize, usize),
    #[error("desired angle given for ({0}, {1}), which is not an edge")]
    UnexpectedAngle(usize, usize),
    #[error("root initial heading is antipodal to its desired heading (|b1 + b1*| = {gap:e})")]
    RootAntipodal { gap: f64 },
    #[error("desired angle on edge ({from}, {to}) is {alpha} rad; it must avoid 0 and pi")]
    DegenerateFirstAngle { from: usize, to: usize, alpha: f64 },
    #[error("target coincides with agent {0}")]
    TargetCoincidesWithAgent(usize),
    #[error("desired headings propagated into vertex {vertex} disagree by {gap:e}")]
    InconsistentAngles { vertex: usize, gap: f64 },
    #[error("heading rays have no common point: agent {agent} misses {target} by {miss:e} m")]
    NoCommonTarget { agent: usize, target: Vec2, miss: f64 },
    #[error("common point {target} lies behind agent {agent}")]
    TargetBehindAgent { agent: usize, target: Vec2 },
    #[error("could not sample initial headings satisfying the root condition after {0} tries")]
    SamplingExhausted(usize),
}

impl ScenarioError {
    pub fn assumption(&self) -> Assumption {
        match self {
            ScenarioError::Graph(GraphError::NotRootedOutBranching(_))
            | ScenarioError::Graph(GraphError::CycleDetected(_))
            | ScenarioError::Graph(GraphError::BadRoot(_)) => Assumption::RootedOutBranching,
            ScenarioError::InconsistentAngles { .. }
            | ScenarioError::NoCommonTarget { .. }
            | ScenarioError::TargetBehindAgent { .. } => Assumption::Feasibility,
            ScenarioError::RootAntipodal { .. }
            | ScenarioError::DegenerateFirstAngle { .. }
            | ScenarioError::SamplingExhausted(_) => Assumption::NonDegenerate,
            _ => Assumption::WellFormed,
        }
    }
}

/// Desired angles keyed by edge `(j, i)`: agent `i` wants `b_i = R(alpha) b_j`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DesiredAngles(BTreeMap<(usize, usize), Angle>);

impl DesiredAngles {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the previous angle if the edge was already present.
    pub fn insert(&mut self, from: usize, to: usize, alpha: Angle) -> Option<Angle> {
        self.0.insert((from, to), alpha)
    }

    pub fn get(&self, from: usize, to: usize) -> Option<Angle> {
        self.0.get(&(from, to)).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), Angle)> + '_ {
        self.0.iter().map(|(&k, &v)| (k, v))
    }
}

impl FromIterator<((usize, usize), Angle)> for DesiredAngles {
    fn from_iter<T: IntoIterator<Item = ((usize, usize), Angle)>>(iter: T) -> Self {
        DesiredAngles(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    positions: Vec<Vec2>,
    graph: Digraph,
    root: usize,
    root_desired_heading: UnitVec2,
    desired_angles: DesiredAngles,
    initial_headings: Vec<UnitVec2>,
    order: Vec<usize>,
}

impl Scenario {
    pub fn new(
        positions: Vec<Vec2>,
        graph: Digraph,
        root: usize,
        root_desired_heading: UnitVec2,
        desired_angles: DesiredAngles,
        initial_headings: Vec<UnitVec2>,
    ) -> Result<Self, ScenarioError> {
        let n = graph.vertex_count();
        if positions.len() != n {
            return Err(ScenarioError::LengthMismatch { what: "positions", expected: n, got: positions.len() });
        }
        if initial_headings.len() != n {
            return Err(ScenarioError::LengthMismatch {
                what: "initial headings",
                expected: n,
                got: initial_headings.len(),
            });
        }
        for &(j, i) in graph.edges() {
            if desired_angles.get(j, i).is_none() {
                return Err(ScenarioError::MissingAngle(j, i));
            }
        }
        if let Some(((j, i), _)) = desired_angles.iter().find(|&((j, i), _)| !graph.has_edge(j, i)) {
            return Err(ScenarioError::UnexpectedAngle(j, i));
        }
        graph.validate_rooted_out_branching(root)?;
        let order = graph.topological_order()?;
        debug_assert_eq!(order[0], root);

        let scenario =
            Scenario { positions, graph, root, root_desired_heading, desired_angles, initial_headings, order };
        scenario.check_nondegenerate(&scenario.initial_headings)?;
        Ok(scenario)
    }

    /// Root heading must not start antipodal to `b_1*`, and the angle from the
    /// root to its first child must avoid `0` and `pi`.
    pub fn check_nondegenerate(&self, initial: &[UnitVec2]) -> Result<(), ScenarioError> {
        root_heading_ok(initial[self.root - 1], self.root_desired_heading)?;
        if let Some((from, to)) = self.first_edge() {
            let alpha = self.angle(from, to).radians();
            if alpha.abs() <= DEGENERACY_TOL || (PI - alpha.abs()) <= DEGENERACY_TOL {
                return Err(ScenarioError::DegenerateFirstAngle { from, to, alpha });
            }
        }
        Ok(())
    }

    pub fn agent_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Positions indexed by `vertex - 1`.
    pub fn positions(&self) -> &[Vec2] {
        &self.positions
    }

    pub fn position(&self, vertex: usize) -> Vec2 {
        self.positions[vertex - 1]
    }

    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn root_desired_heading(&self) -> UnitVec2 {
        self.root_desired_heading
    }

    pub fn desired_angles(&self) -> &DesiredAngles {
        &self.desired_angles
    }

    /// Desired angle on edge `(from, to)`. Panics if the edge does not exist.
    pub fn angle(&self, from: usize, to: usize) -> Angle {
        self.desired_angles.get(from, to).expect("angle exists for every edge")
    }

    pub fn initial_headings(&self) -> &[UnitVec2] {
        &self.initial_headings
    }

    /// Topological order, root first.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// The edge from the root into the first non-root vertex in topological order.
    pub fn first_edge(&self) -> Option<(usize, usize)> {
        self.order.get(1).map(|&second| (self.root, second))
    }

    /// Same set points, different initial headings.
    pub fn with_initial_headings(&self, initial_headings: Vec<UnitVec2>) -> Result<Self, ScenarioError> {
        if initial_headings.len() != self.agent_count() {
            return Err(ScenarioError::LengthMismatch {
                what: "initial headings",
                expected: self.agent_count(),
                got: initial_headings.len(),
            });
        }
        self.check_nondegenerate(&initial_headings)?;
        Ok(Scenario { initial_headings, ..self.clone() })
    }

    /// Same topology and angles, different root set point.
    pub fn with_root_desired_heading(&self, root_desired_heading: UnitVec2) -> Result<Self, ScenarioError> {
        let s = Scenario { root_desired_heading, ..self.clone() };
        s.check_nondegenerate(&s.initial_headings)?;
        Ok(s)
    }
}

pub(crate) fn root_heading_ok(initial: UnitVec2, desired: UnitVec2) -> Result<(), ScenarioError> {
    // chord length to the antipode; equals the angular gap to first order
    // and, unlike `1 + b . b*`, does not cancel catastrophically near it
    let gap = (initial.as_vec() + desired.as_vec()).norm();
    if gap <= DEGENERACY_TOL {
        return Err(ScenarioError::RootAntipodal { gap });
    }
    Ok(())
}

/// A target together with per-agent desired headings `b_i*`, indexed by `vertex - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityCertificate {
    pub target: Vec2,
    pub desired_headings: Vec<UnitVec2>,
}

impl FeasibilityCertificate {
    pub fn desired_heading(&self, vertex: usize) -> UnitVec2 {
        self.desired_headings[vertex - 1]
    }
}

/// Set points derived from a target.
#[derive(Debug, Clone, PartialEq)]
pub struct Synthesis {
    pub root_desired_heading: UnitVec2,
    pub desired_angles: DesiredAngles,
    pub certificate: FeasibilityCertificate,
}

/// Bearings from every agent to `target` and the induced angle on every edge.
pub fn synthesize_angles(
    positions: &[Vec2],
    graph: &Digraph,
    root: usize,
    target: Vec2,
) -> Result<Synthesis, ScenarioError> {
    let n = graph.vertex_count();
    if positions.len() != n {
        return Err(ScenarioError::LengthMismatch { what: "positions", expected: n, got: positions.len() });
    }
    graph.validate_rooted_out_branching(root)?;
    let mut desired_headings = Vec::with_capacity(n);
    for (k, &p) in positions.iter().enumerate() {
        if target.distance(p) <= TARGET_CLEARANCE {
            return Err(ScenarioError::TargetCoincidesWithAgent(k + 1));
        }
        desired_headings.push(UnitVec2::normalize(target - p)?);
    }
    let desired_angles = graph
        .edges()
        .iter()
        .map(|&(j, i)| ((j, i), angle_between(desired_headings[j - 1], desired_headings[i - 1])))
        .collect();
    Ok(Synthesis {
        root_desired_heading: desired_headings[root - 1],
        desired_angles,
        certificate: FeasibilityCertificate { target, desired_headings },
    })
}

/// Intersection of the lines `p1 + s b1` and `p2 + s b2`:
/// `(P_b1 + P_b2)^-1 (P_b1 p1 + P_b2 p2)`.
pub fn recover_target(p1: Vec2, p2: Vec2, b1: UnitVec2, b2: UnitVec2) -> Result<Vec2, GeometryError> {
    let (q1, q2) = (projector(b1), projector(b2));
    solve_2x2(&(q1 + q2), q1 * p1 + q2 * p2)
}

/// Propagates `b_i* = R(alpha_ij) b_j*` from the root in topological order.
/// Where several in-neighbors feed a vertex their results must agree; the
/// value from the smallest-id in-neighbor is kept.
pub fn propagate_desired_headings(scenario: &Scenario) -> Result<Vec<UnitVec2>, ScenarioError> {
    let n = scenario.agent_count();
    let mut desired: Vec<Option<UnitVec2>> = vec![None; n];
    desired[scenario.root() - 1] = Some(scenario.root_desired_heading());
    for &i in &scenario.order()[1..] {
        let mut first: Option<UnitVec2> = None;
        for &j in scenario.graph().in_neighbors(i) {
            let bj = desired[j - 1].expect("in-neighbors precede in topological order");
            let candidate = rotation(scenario.angle(j, i)).rotate(bj);
            match first {
                None => first = Some(candidate),
                Some(b) => {
                    let gap = (b.as_vec() - candidate.as_vec()).norm();
                    if gap > PROPAGATION_TOL {
                        return Err(ScenarioError::InconsistentAngles { vertex: i, gap });
                    }
                }
            }
        }
        desired[i - 1] = first;
    }
    Ok(desired.into_iter().map(|b| b.expect("every vertex is reachable")).collect())
}

/// Confirms the set points describe a common target in front of every agent.
pub fn check_feasibility(scenario: &Scenario) -> Result<FeasibilityCertificate, ScenarioError> {
    let desired_headings = propagate_desired_headings(scenario)?;
    let root = scenario.root();
    let target = match scenario.first_edge() {
        Some((_, second)) => recover_target(
            scenario.position(root),
            scenario.position(second),
            desired_headings[root - 1],
            desired_headings[second - 1],
        )?,
        // A lone agent points wherever its set point says; pick a point one meter ahead.
        None => scenario.position(root) + desired_headings[root - 1].as_vec(),
    };
    for (k, (&p, &b)) in scenario.positions().iter().zip(&desired_headings).enumerate() {
        let offset = target - p;
        let miss = b.as_vec().cross(offset).abs();
        if miss > CONCURRENCE_TOL {
            return Err(ScenarioError::NoCommonTarget { agent: k + 1, target, miss });
        }
        if b.as_vec().dot(offset) <= 0.0 {
            return Err(ScenarioError::TargetBehindAgent { agent: k + 1, target });
        }
    }
    Ok(FeasibilityCertificate { target, desired_headings })
}

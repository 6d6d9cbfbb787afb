//! Convergence metrics over a recorded trajectory.

use std::sync::Arc;

use serde::Serialize;

use crate::geometry::{rotation, solve_2x2, Angle, GeometryError, Mat2, UnitVec2, Vec2};
use crate::scenario::{recover_target, Scenario};

pub const DEFAULT_TOL_ANGLE: f64 = 1e-4;
pub const DEFAULT_TOL_RESIDUAL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub time: f64,
    /// Indexed by `vertex - 1`.
    pub headings: Vec<UnitVec2>,
}

/// Time-ordered heading samples of one run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    scenario: Arc<Scenario>,
    samples: Vec<Sample>,
}

impl Trajectory {
    /// Panics if times are not strictly increasing or the agent count varies.
    pub fn new(scenario: Arc<Scenario>, samples: Vec<Sample>) -> Self {
        let n = scenario.agent_count();
        assert!(samples.iter().all(|s| s.headings.len() == n), "agent count must be constant");
        assert!(samples.windows(2).all(|w| w[0].time < w[1].time), "sample times must increase");
        Trajectory { scenario, samples }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.time)
    }
}

/// `|b_i - R(alpha) b_j|`, in `[0, 2]`.
pub fn edge_error(b_i: UnitVec2, b_j: UnitVec2, alpha: Angle) -> f64 {
    (b_i.as_vec() - rotation(alpha) * b_j.as_vec()).norm()
}

/// Point minimizing the summed squared distance to the lines `p_i + s b_i`,
/// and the RMS perpendicular distance from it to those lines.
///
/// Each line is written as `n_i . x = n_i . p_i` with `n_i` the unit normal of
/// `b_i`, giving the normal equations `(sum n_i n_i^T) x = sum n_i (n_i . p_i)`.
pub fn least_squares_intersection(positions: &[Vec2], headings: &[UnitVec2]) -> Result<(Vec2, f64), GeometryError> {
    assert_eq!(positions.len(), headings.len());
    let mut normal = Mat2::new(0.0, 0.0, 0.0, 0.0);
    let mut rhs = Vec2::ZERO;
    for (&p, &b) in positions.iter().zip(headings) {
        let nrm = b.as_vec().perp();
        normal = normal + Mat2::new(nrm.x * nrm.x, nrm.x * nrm.y, nrm.y * nrm.x, nrm.y * nrm.y);
        rhs += nrm * nrm.dot(p);
    }
    let x = solve_2x2(&normal, rhs)?;
    let sum_sq: f64 = positions.iter().zip(headings).map(|(&p, &b)| b.as_vec().cross(x - p).powi(2)).sum();
    Ok((x, (sum_sq / positions.len() as f64).sqrt()))
}

/// Per-agent potential: `1/2 |b_r - b_r*|^2` for the root, otherwise
/// `1/2 sum_{j in N_i} |b_i - R(alpha_ij) b_j|^2`.
pub fn lyapunov_value(scenario: &Scenario, agent: usize, headings: &[UnitVec2]) -> f64 {
    let b = headings[agent - 1];
    if agent == scenario.root() {
        return 0.5 * (b.as_vec() - scenario.root_desired_heading().as_vec()).norm_squared();
    }
    0.5 * scenario
        .graph()
        .in_neighbors(agent)
        .iter()
        .map(|&j| edge_error(b, headings[j - 1], scenario.angle(j, agent)).powi(2))
        .sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Bound on final edge and root errors.
    pub angle: f64,
    /// Bound on the RMS miss distance of the heading lines (meters).
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { angle: DEFAULT_TOL_ANGLE, residual: DEFAULT_TOL_RESIDUAL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeSeries {
    pub from: usize,
    pub to: usize,
    /// Error at each sample time.
    pub errors: Vec<f64>,
}

impl EdgeSeries {
    pub fn last(&self) -> f64 {
        *self.errors.last().expect("series is non-empty")
    }
}

/// Where the heading lines of agents `a` and `b` cross, if they are not parallel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairIntersection {
    pub a: usize,
    pub b: usize,
    pub point: Option<Vec2>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub times: Vec<f64>,
    pub edge_error_series: Vec<EdgeSeries>,
    /// `|b_r - b_r*|` at each sample.
    pub root_error_series: Vec<f64>,
    /// `lyapunov_series[k][s]` is agent `k + 1`'s potential at sample `s`.
    pub lyapunov_series: Vec<Vec<f64>>,
    pub intersection_point: Option<Vec2>,
    pub intersection_residual: Option<f64>,
    pub pairwise_intersections: Vec<PairIntersection>,
    pub forward_pointing: bool,
    pub angles_satisfied: bool,
    pub consensus: bool,
    pub tolerances: Tolerances,
}

impl AnalysisReport {
    pub fn final_root_error(&self) -> f64 {
        *self.root_error_series.last().expect("series is non-empty")
    }

    pub fn max_final_edge_error(&self) -> f64 {
        self.edge_error_series.iter().map(EdgeSeries::last).fold(0.0, f64::max)
    }
}

/// Computes every series and the final verdicts. Panics on an empty trajectory.
pub fn analyze(trajectory: &Trajectory, tolerances: Tolerances) -> AnalysisReport {
    let scenario = trajectory.scenario();
    let samples = trajectory.samples();
    let last = samples.last().expect("trajectory has at least one sample");
    let root = scenario.root();
    let goal = scenario.root_desired_heading().as_vec();

    let edge_error_series: Vec<EdgeSeries> = scenario
        .graph()
        .edges()
        .iter()
        .map(|&(j, i)| {
            let alpha = scenario.angle(j, i);
            EdgeSeries {
                from: j,
                to: i,
                errors: samples.iter().map(|s| edge_error(s.headings[i - 1], s.headings[j - 1], alpha)).collect(),
            }
        })
        .collect();
    let root_error_series = samples.iter().map(|s| (s.headings[root - 1].as_vec() - goal).norm()).collect();
    let lyapunov_series = scenario
        .graph()
        .vertices()
        .map(|v| samples.iter().map(|s| lyapunov_value(scenario, v, &s.headings)).collect())
        .collect();

    let positions = scenario.positions();
    let (intersection_point, intersection_residual) = match least_squares_intersection(positions, &last.headings) {
        Ok((x, r)) => (Some(x), Some(r)),
        Err(_) => (None, None),
    };
    let forward_pointing = intersection_point
        .is_some_and(|x| positions.iter().zip(&last.headings).all(|(&p, &b)| (x - p).dot(b.as_vec()) > 0.0));

    let n = scenario.agent_count();
    let mut pairwise_intersections = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for a in 1..=n {
        for b in a + 1..=n {
            let point =
                recover_target(positions[a - 1], positions[b - 1], last.headings[a - 1], last.headings[b - 1]).ok();
            pairwise_intersections.push(PairIntersection { a, b, point });
        }
    }

    let mut report = AnalysisReport {
        times: trajectory.times().collect(),
        edge_error_series,
        root_error_series,
        lyapunov_series,
        intersection_point,
        intersection_residual,
        pairwise_intersections,
        forward_pointing,
        angles_satisfied: false,
        consensus: false,
        tolerances,
    };
    report.angles_satisfied = report.edge_error_series.iter().all(|e| e.last() < tolerances.angle);
    report.consensus = report.angles_satisfied
        && report.final_root_error() < tolerances.angle
        && intersection_residual.is_some_and(|r| r < tolerances.residual)
        && forward_pointing;
    report
}

//! Control laws and the fixed-step heading integrator.
//!
//! The root steers toward its set point with `db_r/dt = P_{b_r} b_r*`; every
//! other agent steers toward the rotated headings of its in-neighbors with
//! `db_i/dt = P_{b_i} sum_j R(alpha_ij) b_j`. The coupled system is advanced
//! with classical RK4 and each heading is renormalized after every step.

use std::f64::consts::TAU;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::analysis::{Sample, Trajectory};
use crate::geometry::{project, projector, rotation, Angle, Mat2, UnitVec2, Vec2};
use crate::graph::Digraph;
use crate::scenario::{root_heading_ok, DesiredAngles, Scenario, ScenarioError};

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_T_FINAL: f64 = 30.0;
pub const DEFAULT_RECORD_EVERY: usize = 10;
/// Draws attempted before giving up on a root heading that is not antipodal to its set point.
pub const SAMPLING_ATTEMPTS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("time step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("final time must be non-negative and finite, got {0}")]
    BadHorizon(f64),
    #[error("record interval must be at least 1 step")]
    BadRecordEvery,
    #[error("expected {expected} frame angles, got {got}")]
    FrameCount { expected: usize, got: usize },
}

/// Root law: `P_{b1} b1*`.
pub fn control_root(b1: UnitVec2, b1_star: UnitVec2) -> Vec2 {
    projector(b1) * b1_star.as_vec()
}

/// Follower law for vertex `i`: `P_{b_i} sum_{j in N_i} R(alpha_ij) b_j`.
/// `headings` is indexed by `vertex - 1`.
pub fn control_agent(i: usize, headings: &[UnitVec2], graph: &Digraph, angles: &DesiredAngles) -> Vec2 {
    let mut sum = Vec2::ZERO;
    for &j in graph.in_neighbors(i) {
        let alpha = angles.get(j, i).expect("angle exists for every edge");
        sum += rotation(alpha) * headings[j - 1].as_vec();
    }
    projector(headings[i - 1]) * sum
}

/// Magnitude of the angular velocity produced by `u`: `|P_b u|`.
pub fn angular_speed(b: UnitVec2, u: Vec2) -> f64 {
    (projector(b) * u).norm()
}

/// Control signal of every agent at `headings`, indexed by `vertex - 1`.
pub fn control_signals(scenario: &Scenario, headings: &[UnitVec2]) -> Vec<Vec2> {
    scenario
        .graph()
        .vertices()
        .map(|v| {
            if v == scenario.root() {
                control_root(headings[v - 1], scenario.root_desired_heading())
            } else {
                control_agent(v, headings, scenario.graph(), scenario.desired_angles())
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeadingState {
    pub headings: Vec<UnitVec2>,
    pub time: f64,
}

impl HeadingState {
    pub fn initial(scenario: &Scenario) -> Self {
        HeadingState { headings: scenario.initial_headings().to_vec(), time: 0.0 }
    }
}

/// Orientation `theta_i` of each agent's local frame relative to the global one.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFrameSet {
    angles: Vec<Angle>,
}

impl LocalFrameSet {
    pub fn new(angles: Vec<Angle>) -> Self {
        LocalFrameSet { angles }
    }

    pub fn aligned(n: usize) -> Self {
        LocalFrameSet { angles: vec![Angle::ZERO; n] }
    }

    /// Uniform orientations on the circle. Uses stream 1 of the generator so
    /// the draw is independent of initial headings sampled from the same seed.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        LocalFrameSet { angles: (0..n).map(|_| Angle::new(rng.random::<f64>() * TAU)).collect() }
    }

    pub fn angles(&self) -> &[Angle] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// Fixed-step integration settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    dt: f64,
    t_final: f64,
    record_every: usize,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams { dt: DEFAULT_DT, t_final: DEFAULT_T_FINAL, record_every: DEFAULT_RECORD_EVERY }
    }
}

impl SimParams {
    pub fn new(dt: f64, t_final: f64, record_every: usize) -> Result<Self, ParamError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(ParamError::BadStep(dt));
        }
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(ParamError::BadHorizon(t_final));
        }
        if record_every == 0 {
            return Err(ParamError::BadRecordEvery);
        }
        Ok(SimParams { dt, t_final, record_every })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn record_every(&self) -> usize {
        self.record_every
    }

    /// Number of steps to reach `t_final`; the last one is shortened when
    /// `t_final` is not a whole multiple of `dt`.
    pub fn step_count(&self) -> usize {
        let ratio = self.t_final / self.dt;
        (ratio - 1e-9).ceil().max(0.0) as usize
    }
}

enum Law {
    Root { goal: Vec2 },
    Follower { inputs: Vec<(usize, Mat2)> },
}

struct Frames {
    to_global: Vec<Mat2>,
    to_local: Vec<Mat2>,
}

/// The coupled vector field with rotations precomputed. State entries are
/// indexed by `vertex - 1` and expressed in each agent's own frame when
/// `frames` is set.
struct HeadingField {
    laws: Vec<Law>,
    frames: Option<Frames>,
}

impl HeadingField {
    fn new(scenario: &Scenario, frames: Option<&LocalFrameSet>) -> Self {
        let frames = frames.map(|f| Frames {
            to_global: f.angles().iter().map(|&a| rotation(a)).collect(),
            to_local: f.angles().iter().map(|&a| rotation(a).transpose()).collect(),
        });
        let laws = scenario
            .graph()
            .vertices()
            .map(|v| {
                if v == scenario.root() {
                    let goal = scenario.root_desired_heading().as_vec();
                    let goal = match &frames {
                        Some(f) => f.to_local[v - 1] * goal,
                        None => goal,
                    };
                    Law::Root { goal }
                } else {
                    let inputs = scenario
                        .graph()
                        .in_neighbors(v)
                        .iter()
                        .map(|&j| (j - 1, rotation(scenario.angle(j, v))))
                        .collect();
                    Law::Follower { inputs }
                }
            })
            .collect();
        HeadingField { laws, frames }
    }

    fn eval(&self, state: &[Vec2], out: &mut [Vec2]) {
        for (i, law) in self.laws.iter().enumerate() {
            let b = state[i];
            out[i] = match law {
                Law::Root { goal } => project(b, *goal),
                Law::Follower { inputs } => {
                    let mut sum = Vec2::ZERO;
                    for &(j, rot) in inputs {
                        // Neighbor heading as agent i would measure it.
                        let bj = match &self.frames {
                            None => state[j],
                            Some(f) => f.to_local[i] * (f.to_global[j] * state[j]),
                        };
                        sum += rot * bj;
                    }
                    project(b, sum)
                }
            };
        }
    }

    fn to_global(&self, state: &[Vec2]) -> Vec<UnitVec2> {
        match &self.frames {
            None => state.iter().map(|&v| UnitVec2::from_normalized(v)).collect(),
            Some(f) => state.iter().zip(&f.to_global).map(|(&v, r)| UnitVec2::from_normalized(*r * v)).collect(),
        }
    }
}

struct Rk4 {
    k1: Vec<Vec2>,
    k2: Vec<Vec2>,
    k3: Vec<Vec2>,
    k4: Vec<Vec2>,
    tmp: Vec<Vec2>,
}

impl Rk4 {
    fn new(n: usize) -> Self {
        Rk4 {
            k1: vec![Vec2::ZERO; n],
            k2: vec![Vec2::ZERO; n],
            k3: vec![Vec2::ZERO; n],
            k4: vec![Vec2::ZERO; n],
            tmp: vec![Vec2::ZERO; n],
        }
    }

    /// One RK4 step of size `h` followed by per-heading renormalization.
    fn step(&mut self, field: &HeadingField, y: &mut [Vec2], h: f64) {
        let half = 0.5 * h;
        field.eval(y, &mut self.k1);
        for ((t, &yi), &k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k1) {
            *t = yi + k * half;
        }
        field.eval(&self.tmp, &mut self.k2);
        for ((t, &yi), &k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k2) {
            *t = yi + k * half;
        }
        field.eval(&self.tmp, &mut self.k3);
        for ((t, &yi), &k) in self.tmp.iter_mut().zip(y.iter()).zip(&self.k3) {
            *t = yi + k * h;
        }
        field.eval(&self.tmp, &mut self.k4);
        let sixth = h / 6.0;
        for (i, yi) in y.iter_mut().enumerate() {
            let incr = self.k1[i] + self.k2[i] * 2.0 + self.k3[i] * 2.0 + self.k4[i];
            let next = *yi + incr * sixth;
            let n = next.norm();
            *yi = Vec2::new(next.x / n, next.y / n);
        }
    }
}

/// Advances every heading by one RK4 step of length `dt` in the global frame.
pub fn step(state: &HeadingState, scenario: &Scenario, dt: f64) -> HeadingState {
    let field = HeadingField::new(scenario, None);
    let mut y: Vec<Vec2> = state.headings.iter().map(|b| b.as_vec()).collect();
    Rk4::new(y.len()).step(&field, &mut y, dt);
    HeadingState { headings: field.to_global(&y), time: state.time + dt }
}

fn integrate(scenario: &Scenario, field: HeadingField, mut y: Vec<Vec2>, params: &SimParams) -> Trajectory {
    let n_steps = params.step_count();
    let every = params.record_every();
    let dt = params.dt();
    let mut rk = Rk4::new(y.len());
    let mut samples = Vec::with_capacity(n_steps / every + 2);
    samples.push(Sample { time: 0.0, headings: field.to_global(&y) });
    for k in 1..=n_steps {
        let (h, t) =
            if k == n_steps { (params.t_final() - (k - 1) as f64 * dt, params.t_final()) } else { (dt, k as f64 * dt) };
        rk.step(&field, &mut y, h);
        if k % every == 0 || k == n_steps {
            samples.push(Sample { time: t, headings: field.to_global(&y) });
        }
    }
    Trajectory::new(Arc::new(scenario.clone()), samples)
}

/// Integrates from the scenario's initial headings to `t_final`, recording
/// every `record_every`-th step, the initial state and the final state.
pub fn simulate(scenario: &Scenario, params: &SimParams) -> Trajectory {
    let field = HeadingField::new(scenario, None);
    let y = scenario.initial_headings().iter().map(|b| b.as_vec()).collect();
    integrate(scenario, field, y, params)
}

/// Same dynamics, with each agent integrating its heading in its own frame
/// from neighbor headings measured in that frame. Output is rotated back to
/// the global frame.
pub fn simulate_local_frame(
    scenario: &Scenario,
    frames: &LocalFrameSet,
    params: &SimParams,
) -> Result<Trajectory, ParamError> {
    if frames.len() != scenario.agent_count() {
        return Err(ParamError::FrameCount { expected: scenario.agent_count(), got: frames.len() });
    }
    let field = HeadingField::new(scenario, Some(frames));
    let y = scenario
        .initial_headings()
        .iter()
        .zip(frames.angles())
        .map(|(b, &a)| rotation(a).transpose() * b.as_vec())
        .collect();
    Ok(integrate(scenario, field, y, params))
}

/// Headings with uniformly distributed angles drawn from a seeded ChaCha8
/// stream. The whole set is redrawn while the root starts antipodal to its
/// set point, up to [`SAMPLING_ATTEMPTS`] times.
pub fn sample_initial_headings(
    n: usize,
    root: usize,
    root_desired_heading: UnitVec2,
    seed: u64,
) -> Result<Vec<UnitVec2>, ScenarioError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SAMPLING_ATTEMPTS {
        let headings: Vec<UnitVec2> = (0..n).map(|_| UnitVec2::from_angle(rng.random::<f64>() * TAU)).collect();
        if root_heading_ok(headings[root - 1], root_desired_heading).is_ok() {
            return Ok(headings);
        }
    }
    Err(ScenarioError::SamplingExhausted(SAMPLING_ATTEMPTS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::geometry::angle_between;
    use crate::scenario::check_feasibility;
    use proptest::prelude::*;

    fn lone_root(b0: UnitVec2, goal: UnitVec2) -> Scenario {
        Scenario::new(vec![Vec2::ZERO], Digraph::new(1, []).unwrap(), 1, goal, DesiredAngles::new(), vec![b0]).unwrap()
    }

    #[test]
    fn root_law_examples() {
        let goal = UnitVec2::new(-1.0, 0.0).unwrap();
        assert_eq!(control_root(goal, goal).norm(), 0.0);
        assert!(control_root(-goal, goal).norm() < 1e-16);
        let u = control_root(UnitVec2::E2, goal);
        assert!((u - Vec2::new(-1.0, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn follower_law_examples() {
        let graph = Digraph::new(2, [(1, 2)]).unwrap();
        let alpha = Angle::new(0.7);
        let angles: DesiredAngles = [((1, 2), alpha)].into_iter().collect();
        let bj = UnitVec2::from_angle(0.2);
        let aligned = rotation(alpha).rotate(bj);
        assert!(control_agent(2, &[bj, aligned], &graph, &angles).norm() < 1e-15);
        // |P_b v| = |sin angle(b, v)| for unit v
        let perpendicular = UnitVec2::from_angle(0.2 + 0.7 + std::f64::consts::FRAC_PI_2);
        let u = control_agent(2, &[bj, perpendicular], &graph, &angles);
        assert!((u.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn controls_vanish_at_certificate() {
        for s in [builtin::hexagon().unwrap(), builtin::torricelli().unwrap()] {
            let cert = check_feasibility(&s).unwrap();
            for u in control_signals(&s, &cert.desired_headings) {
                assert!(u.norm() <= 1e-12, "{u}");
            }
        }
    }

    #[test]
    fn angular_speed_examples() {
        let b = UnitVec2::E1;
        assert_eq!(angular_speed(b, Vec2::new(-4.0, 0.0)), 0.0);
        assert_eq!(angular_speed(b, Vec2::new(0.0, 3.0)), 3.0);
        assert_eq!(angular_speed(b, Vec2::new(1.0, 1.0)), 1.0);
    }

    #[test]
    fn equilibrium_is_stationary() {
        let s = builtin::hexagon().unwrap();
        let cert = check_feasibility(&s).unwrap();
        let state = HeadingState { headings: cert.desired_headings.clone(), time: 0.0 };
        let next = step(&state, &s, 1e-3);
        for (a, b) in next.headings.iter().zip(&cert.desired_headings) {
            assert!((a.as_vec() - b.as_vec()).norm() <= 1e-12);
        }
        assert_eq!(next.time, 1e-3);
    }

    #[test]
    fn root_step_turns_toward_goal() {
        let s = lone_root(UnitVec2::E2, UnitVec2::E1);
        let state = HeadingState::initial(&s);
        let next = step(&state, &s, 1e-3);
        assert!(next.headings[0].dot(UnitVec2::E1) > state.headings[0].dot(UnitVec2::E1));
        // d(alpha)/dt = -sin(alpha) from pi/2 gives tan(alpha/2) = exp(-t).
        let want = 2.0 * (-1e-3_f64).exp().atan();
        let got = angle_between(next.headings[0], UnitVec2::E1).radians().abs();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn zero_horizon_keeps_only_initial_state() {
        let s = builtin::hexagon().unwrap();
        let traj = simulate(&s, &SimParams::new(1e-3, 0.0, 1).unwrap());
        assert_eq!(traj.samples().len(), 1);
        assert_eq!(traj.samples()[0].headings, s.initial_headings());
    }

    #[test]
    fn partial_final_step_lands_on_horizon() {
        let s = builtin::torricelli().unwrap();
        let p = SimParams::new(0.1, 1.05, 2).unwrap();
        assert_eq!(p.step_count(), 11);
        let traj = simulate(&s, &p);
        let times: Vec<f64> = traj.samples().iter().map(|x| x.time).collect();
        assert_eq!(times.len(), 7);
        assert_eq!(*times.last().unwrap(), 1.05);
    }

    #[test]
    fn param_validation() {
        assert!(SimParams::new(0.0, 1.0, 1).is_err());
        assert!(SimParams::new(-1e-3, 1.0, 1).is_err());
        assert!(SimParams::new(1e-3, -1.0, 1).is_err());
        assert!(SimParams::new(1e-3, f64::NAN, 1).is_err());
        assert_eq!(SimParams::new(1e-3, 1.0, 0), Err(ParamError::BadRecordEvery));
        let s = builtin::torricelli().unwrap();
        let err = simulate_local_frame(&s, &LocalFrameSet::aligned(2), &SimParams::default()).unwrap_err();
        assert_eq!(err, ParamError::FrameCount { expected: 3, got: 2 });
    }

    #[test]
    fn sampling_is_seeded() {
        let a = sample_initial_headings(5, 2, UnitVec2::E1, 9).unwrap();
        assert_eq!(a, sample_initial_headings(5, 2, UnitVec2::E1, 9).unwrap());
        assert_ne!(a, sample_initial_headings(5, 2, UnitVec2::E1, 10).unwrap());
        assert_eq!(LocalFrameSet::random(4, 3), LocalFrameSet::random(4, 3),);
    }

    #[test]
    fn single_agent_local_frame_converges_like_global() {
        let s = lone_root(UnitVec2::from_angle(2.5), UnitVec2::E1);
        let p = SimParams::new(1e-3, 20.0, 1).unwrap();
        let global = simulate(&s, &p);
        let local =
            simulate_local_frame(&s, &LocalFrameSet::new(vec![Angle::new(std::f64::consts::FRAC_PI_2)]), &p).unwrap();
        let first_below = |t: &Trajectory| {
            t.samples().iter().find(|x| (x.headings[0].as_vec() - UnitVec2::E1.as_vec()).norm() < 1e-6).map(|x| x.time)
        };
        let (tg, tl) = (first_below(&global).unwrap(), first_below(&local).unwrap());
        assert_eq!(tg, tl);
    }

    proptest! {
        #[test]
        fn control_is_orthogonal_to_heading(angles in proptest::collection::vec(-4.0..4.0f64, 6)) {
            let s = builtin::hexagon().unwrap();
            let hs: Vec<UnitVec2> = angles.iter().map(|&a| UnitVec2::from_angle(a)).collect();
            for (u, b) in control_signals(&s, &hs).iter().zip(&hs) {
                prop_assert!(u.dot(b.as_vec()).abs() <= 1e-12);
            }
        }

        #[test]
        fn step_preserves_norm(angles in proptest::collection::vec(-4.0..4.0f64, 6), dt in 1e-4..0.1f64) {
            let s = builtin::hexagon().unwrap();
            let state = HeadingState { headings: angles.iter().map(|&a| UnitVec2::from_angle(a)).collect(), time: 0.0 };
            let next = step(&state, &s, dt);
            for b in &next.headings {
                prop_assert!((b.as_vec().norm() - 1.0).abs() <= 1e-15);
            }
        }
    }
}

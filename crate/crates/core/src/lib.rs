//! Planar pointing consensus.
//!
//! Agents sit at fixed points in the plane and rotate unit heading vectors.
//! One root agent knows the bearing to a target; every other agent knows only
//! the angles its heading should make with those of its in-neighbors on a
//! rooted, acyclic communication graph. A projection-based steering law
//! drives every heading toward the common target from almost every start.
//!
//! * [`geometry`]: rotations, projectors, 2x2 solves.
//! * [`graph`]: topology validation and cascade ordering.
//! * [`scenario`]: problem instances, set-point synthesis and feasibility.
//! * [`dynamics`]: control laws and the RK4 heading integrator.
//! * [`analysis`]: error series, Lyapunov values, ray intersection, verdicts.
//! * [`cli`]: the `heading-consensus` command's runs and reproductions.

pub mod analysis;
pub mod builtin;
pub mod cli;
pub mod dynamics;
pub mod geometry;
pub mod graph;
pub mod output;
pub mod scenario;
pub mod scenario_file;

pub use analysis::{analyze, AnalysisReport, Tolerances, Trajectory};
pub use dynamics::{simulate, simulate_local_frame, LocalFrameSet, SimParams};
pub use geometry::{Angle, Mat2, UnitVec2, Vec2};
pub use graph::Digraph;
pub use scenario::{check_feasibility, FeasibilityCertificate, Scenario};

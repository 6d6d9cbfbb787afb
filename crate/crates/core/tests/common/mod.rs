#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use heading_consensus::dynamics::sample_initial_headings;
use heading_consensus::geometry::{Angle, UnitVec2, Vec2};
use heading_consensus::graph::Digraph;
use heading_consensus::scenario::{synthesize_angles, DesiredAngles, Scenario};

/// Instances closer than this to a degenerate configuration are redrawn.
pub const DEGENERACY_MARGIN: f64 = 1e-3;
pub const BOX: f64 = 10.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn point_in_box(rng: &mut impl Rng) -> Vec2 {
    Vec2::new(rng.random_range(-BOX..BOX), rng.random_range(-BOX..BOX))
}

/// Acyclic graph reaching every vertex from its root, with vertex labels
/// shuffled so that id order and topological order differ. Returns the root.
pub fn random_rooted_dag(n: usize, rng: &mut impl Rng) -> (Digraph, usize) {
    let mut label: Vec<usize> = (1..=n).collect();
    label.shuffle(rng);
    let mut edges = Vec::new();
    for k in 1..n {
        let mut parents: Vec<usize> = (0..k).filter(|_| rng.random_bool(0.4)).collect();
        if parents.is_empty() {
            parents.push(rng.random_range(0..k));
        }
        edges.extend(parents.into_iter().map(|p| (label[p], label[k])));
    }
    (Digraph::new(n, edges).expect("generated graph is well formed"), label[0])
}

/// A feasible scenario with a planted target, plus that target.
pub struct Planted {
    pub scenario: Scenario,
    pub target: Vec2,
}

/// Positions and target uniform in the box; desired angles synthesized from
/// the target; initial headings drawn from `seed`. Redraws anything within
/// [`DEGENERACY_MARGIN`] of degeneracy.
pub fn planted_instance(n: usize, seed: u64) -> Planted {
    let mut rng = rng(seed);
    loop {
        let (graph, root) = random_rooted_dag(n, &mut rng);
        let target = point_in_box(&mut rng);
        let positions: Vec<Vec2> = (0..n).map(|_| point_in_box(&mut rng)).collect();
        if positions.iter().any(|p| p.distance(target) < DEGENERACY_MARGIN) {
            continue;
        }
        let Ok(syn) = synthesize_angles(&positions, &graph, root, target) else { continue };
        if near_degenerate_first_angle(&graph, root, &syn.desired_angles) {
            continue;
        }
        let Ok(initial) = sample_initial_headings(n, root, syn.root_desired_heading, rng.random()) else { continue };
        let Ok(scenario) = Scenario::new(positions, graph, root, syn.root_desired_heading, syn.desired_angles, initial)
        else {
            continue;
        };
        return Planted { scenario, target };
    }
}

fn near_degenerate_first_angle(graph: &Digraph, root: usize, angles: &DesiredAngles) -> bool {
    let order = graph.topological_order().expect("acyclic");
    let child = order[1..].iter().copied().find(|&v| graph.has_edge(root, v));
    match child.and_then(|c| angles.get(root, c)) {
        Some(a) => {
            let a = a.radians().abs();
            a < DEGENERACY_MARGIN || std::f64::consts::PI - a < DEGENERACY_MARGIN
        }
        None => false,
    }
}

/// A lone root at the origin whose heading starts `alpha0` away from its goal.
pub fn lone_root(goal: UnitVec2, alpha0: f64) -> Scenario {
    let b0 = UnitVec2::from_angle(goal.angle().radians() + alpha0);
    Scenario::new(vec![Vec2::ZERO], Digraph::new(1, []).unwrap(), 1, goal, DesiredAngles::new(), vec![b0])
        .expect("lone root is valid away from the antipode")
}

pub fn angle(r: f64) -> Angle {
    Angle::new(r)
}

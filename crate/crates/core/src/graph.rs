//! Directed communication topology.
//!
//! Vertices are numbered `1..=n`. An edge `(j, i)` means agent `i` receives
//! agent `j`'s heading, so `j` is an in-neighbor of `i`.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("edge ({0}, {1}) references a vertex outside 1..={2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("root {0} is not a vertex")]
    BadRoot(usize),
    #[error("directed cycle {}", fmt_cycle(.0))]
    CycleDetected(Vec<usize>),
    #[error("graph is not a rooted out-branching: {}", fmt_defects(.0))]
    NotRootedOutBranching(Vec<Defect>),
}

/// One structural reason a graph fails rooted out-branching validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Defect {
    /// Vertices with no directed path from the root.
    UnreachableVertex(Vec<usize>),
    /// A directed cycle, listed in traversal order (first vertex not repeated).
    CycleDetected(Vec<usize>),
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::UnreachableVertex(vs) => write!(f, "unreachable vertices {vs:?}"),
            Defect::CycleDetected(c) => write!(f, "directed cycle {}", fmt_cycle(c)),
        }
    }
}

fn fmt_cycle(c: &[usize]) -> String {
    let mut s: Vec<String> = c.iter().map(|v| v.to_string()).collect();
    if let Some(first) = c.first() {
        s.push(first.to_string());
    }
    s.join(" -> ")
}

fn fmt_defects(d: &[Defect]) -> String {
    d.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    in_neighbors: Vec<Vec<usize>>,
    out_neighbors: Vec<Vec<usize>>,
}

impl Digraph {
    /// Builds a graph on vertices `1..=n` from `(from, to)` pairs.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut set = BTreeSet::new();
        for (j, i) in edges {
            if j == 0 || i == 0 || j > n || i > n {
                return Err(GraphError::VertexOutOfRange(j, i, n));
            }
            if j == i {
                return Err(GraphError::SelfLoop(i));
            }
            if !set.insert((j, i)) {
                return Err(GraphError::DuplicateEdge(j, i));
            }
        }
        let mut in_neighbors = vec![Vec::new(); n + 1];
        let mut out_neighbors = vec![Vec::new(); n + 1];
        // BTreeSet iteration keeps both adjacency lists sorted.
        for &(j, i) in &set {
            in_neighbors[i].push(j);
            out_neighbors[j].push(i);
        }
        Ok(Digraph { n, edges: set.into_iter().collect(), in_neighbors, out_neighbors })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Edges in ascending `(from, to)` order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.binary_search(&(from, to)).is_ok()
    }

    /// Sorted in-neighbors `N_i` of vertex `i`.
    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        &self.in_neighbors[i]
    }

    pub fn out_neighbors(&self, j: usize) -> &[usize] {
        &self.out_neighbors[j]
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> {
        1..=self.n
    }

    fn reachable_from(&self, root: usize) -> Vec<bool> {
        let mut seen = vec![false; self.n + 1];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &self.out_neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Accepts iff every vertex is reachable from `root` and the graph is acyclic.
    /// All defects found are reported together.
    pub fn validate_rooted_out_branching(&self, root: usize) -> Result<(), GraphError> {
        if root == 0 || root > self.n {
            return Err(GraphError::BadRoot(root));
        }
        let seen = self.reachable_from(root);
        let unreachable: Vec<usize> = self.vertices().filter(|&v| !seen[v]).collect();
        let mut defects = Vec::new();
        if !unreachable.is_empty() {
            defects.push(Defect::UnreachableVertex(unreachable));
        }
        if let Err(GraphError::CycleDetected(c)) = self.topological_order() {
            defects.push(Defect::CycleDetected(c));
        }
        if defects.is_empty() {
            Ok(())
        } else {
            Err(GraphError::NotRootedOutBranching(defects))
        }
    }

    /// Kahn's algorithm with ties broken by smallest vertex id. Every vertex
    /// appears after all of its in-neighbors.
    pub fn topological_order(&self) -> Result<Vec<usize>, GraphError> {
        let mut indegree: Vec<usize> = self.in_neighbors.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<usize>> =
            self.vertices().filter(|&v| indegree[v] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(self.n);
        while let Some(Reverse(v)) = ready.pop() {
            order.push(v);
            for &w in &self.out_neighbors[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    ready.push(Reverse(w));
                }
            }
        }
        if order.len() == self.n {
            return Ok(order);
        }
        Err(GraphError::CycleDetected(self.find_cycle(&indegree)))
    }

    /// Every vertex left with positive in-degree after Kahn's pass has an
    /// in-neighbor that is also left, so walking backwards must revisit a vertex.
    fn find_cycle(&self, indegree: &[usize]) -> Vec<usize> {
        let start = self.vertices().find(|&v| indegree[v] > 0).expect("cycle search called on an acyclic graph");
        let mut pos = vec![usize::MAX; self.n + 1];
        let mut walk = Vec::new();
        let mut v = start;
        while pos[v] == usize::MAX {
            pos[v] = walk.len();
            walk.push(v);
            v = *self.in_neighbors[v]
                .iter()
                .find(|&&u| indegree[u] > 0)
                .expect("remaining vertex has a remaining in-neighbor");
        }
        // The backward walk lists the cycle against edge direction.
        let mut cycle = walk[pos[v]..].to_vec();
        cycle.reverse();
        let min_at = cycle.iter().enumerate().min_by_key(|&(_, &u)| u).map(|(k, _)| k).unwrap_or(0);
        cycle.rotate_left(min_at);
        cycle
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn hexagon() -> Digraph {
        Digraph::new(6, [(1, 2), (1, 3), (2, 3), (3, 4), (4, 5), (4, 6), (1, 6), (5, 6)]).unwrap()
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Digraph::new(0, []), Err(GraphError::Empty));
        assert_eq!(Digraph::new(2, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(Digraph::new(2, [(1, 2), (1, 2)]), Err(GraphError::DuplicateEdge(1, 2)));
        assert_eq!(Digraph::new(2, [(1, 3)]), Err(GraphError::VertexOutOfRange(1, 3, 2)));
        assert_eq!(Digraph::new(2, [(0, 1)]), Err(GraphError::VertexOutOfRange(0, 1, 2)));
    }

    #[test]
    fn in_neighbor_sets() {
        let g = hexagon();
        assert_eq!(g.in_neighbors(6), &[1, 4, 5]);
        assert_eq!(g.in_neighbors(3), &[1, 2]);
        assert!(g.in_neighbors(1).is_empty());
        for &(j, i) in g.edges() {
            assert!(g.in_neighbors(i).contains(&j));
        }
    }

    #[test]
    fn single_vertex_is_valid() {
        let g = Digraph::new(1, []).unwrap();
        assert_eq!(g.validate_rooted_out_branching(1), Ok(()));
        assert_eq!(g.topological_order().unwrap(), vec![1]);
    }

    #[test]
    fn hexagon_is_valid() {
        let g = hexagon();
        assert_eq!(g.validate_rooted_out_branching(1), Ok(()));
        assert_eq!(g.topological_order().unwrap(), vec![1, 2, 3, 4, 5, 6]);
    }

    #[test]
    fn hexagon_without_repair_edge_orphans_vertex_five() {
        let g = Digraph::new(6, [(1, 2), (2, 3), (3, 4), (5, 6), (1, 3), (4, 6), (1, 6)]).unwrap();
        assert_eq!(
            g.validate_rooted_out_branching(1),
            Err(GraphError::NotRootedOutBranching(vec![Defect::UnreachableVertex(vec![5])]))
        );
    }

    #[test]
    fn disconnected_cycle_reports_both_defects() {
        let g = Digraph::new(3, [(2, 3), (3, 2)]).unwrap();
        let err = g.validate_rooted_out_branching(1).unwrap_err();
        assert_eq!(
            err,
            GraphError::NotRootedOutBranching(vec![
                Defect::UnreachableVertex(vec![2, 3]),
                Defect::CycleDetected(vec![2, 3]),
            ])
        );
        assert!(err.to_string().contains("2 -> 3 -> 2"));
    }

    #[test]
    fn reachable_cycle_is_rejected() {
        let g = Digraph::new(4, [(1, 2), (2, 3), (3, 4), (4, 2)]).unwrap();
        assert_eq!(
            g.validate_rooted_out_branching(1),
            Err(GraphError::NotRootedOutBranching(vec![Defect::CycleDetected(vec![2, 3, 4])]))
        );
        assert_eq!(g.topological_order(), Err(GraphError::CycleDetected(vec![2, 3, 4])));
    }

    #[test]
    fn orders() {
        let chain = Digraph::new(3, [(1, 2), (2, 3)]).unwrap();
        assert_eq!(chain.topological_order().unwrap(), vec![1, 2, 3]);
        let star = Digraph::new(4, [(1, 2), (1, 3), (1, 4)]).unwrap();
        assert_eq!(star.topological_order().unwrap(), vec![1, 2, 3, 4]);
        let relabeled = Digraph::new(3, [(3, 1), (1, 2)]).unwrap();
        assert_eq!(relabeled.topological_order().unwrap(), vec![3, 1, 2]);
        assert_eq!(relabeled.validate_rooted_out_branching(3), Ok(()));
    }

    #[test]
    fn bad_root() {
        assert_eq!(hexagon().validate_rooted_out_branching(7), Err(GraphError::BadRoot(7)));
    }
}

//! Undirected network topologies and their coupling matrices.
//!
//! Node ids are 1-based at every external boundary (JSON, reports) and
//! 0-based inside the crate.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{input_err, PinError, Result};
use crate::numerics::{Matrix, SymMatrix};

#[derive(Deserialize)]
struct RawTopology {
    n: usize,
    edges: Vec<[usize; 2]>,
}

/// `n` nodes and a set of unordered edges `{i, j}` with `1 ≤ i, j ≤ n`, `i ≠ j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTopology")]
pub struct Topology {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<RawTopology> for Topology {
    type Error = PinError;
    fn try_from(raw: RawTopology) -> Result<Self> {
        Topology::new(raw.n, raw.edges.iter().map(|e| (e[0], e[1])))
    }
}

impl Topology {
    /// Validates and normalizes the edge list (each edge stored as `[min, max]`, sorted).
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return input_err("topology needs at least one node");
        }
        let mut seen = BTreeSet::new();
        for (i, j) in edges {
            if i == 0 || j == 0 || i > n || j > n {
                return input_err(format!("edge {{{i},{j}}} references a node outside 1..={n}"));
            }
            if i == j {
                return input_err(format!("self-loop on node {i}"));
            }
            let e = [i.min(j), i.max(j)];
            if !seen.insert(e) {
                return input_err(format!("duplicate edge {{{},{}}}", e[0], e[1]));
            }
        }
        Ok(Self { n, edges: seen.into_iter().collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 1-based, each `[i, j]` with `i < j`.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &[i, j] in &self.edges {
            adj[i - 1].push(j - 1);
            adj[j - 1].push(i - 1);
        }
        adj
    }

    /// `k_i`, the number of edges incident to node `i`.
    pub fn degrees(&self) -> Vec<usize> {
        let mut k = vec![0; self.n];
        for &[i, j] in &self.edges {
            k[i - 1] += 1;
            k[j - 1] += 1;
        }
        k
    }

    /// Number of connected components (breadth-first search).
    pub fn components(&self) -> usize {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut count = 0;
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        count
    }

    pub fn is_connected(&self) -> bool {
        self.components() == 1
    }
}

pub fn degrees(t: &Topology) -> Vec<usize> {
    t.degrees()
}

pub fn is_connected(t: &Topology) -> bool {
    t.is_connected()
}

/// The coupling matrix `A`: `a_ij = 1` for neighbours, `a_ii = −k_i`.
/// Every row sums to exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    topology: Topology,
    matrix: SymMatrix,
    components: usize,
}

pub fn coupling_matrix(t: &Topology) -> CouplingMatrix {
    let n = t.n();
    // Integer degrees first so the diagonal is exact.
    let k = t.degrees();
    let mut a = Matrix::zeros(n, n);
    for &[i, j] in t.edges() {
        a[(i - 1, j - 1)] = 1.0;
        a[(j - 1, i - 1)] = 1.0;
    }
    for (i, ki) in k.iter().enumerate() {
        a[(i, i)] = -(*ki as f64);
    }
    let matrix = SymMatrix::new(a).expect("coupling matrix is square and finite");
    CouplingMatrix { topology: t.clone(), matrix, components: t.components() }
}

impl CouplingMatrix {
    pub fn n(&self) -> usize {
        self.topology.n()
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn is_connected(&self) -> bool {
        self.components == 1
    }

    /// Fails with [`PinError::Disconnected`] unless the network has one component.
    pub fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(PinError::Disconnected { components: self.components })
        }
    }

    /// `A − diag(d)`.
    pub fn minus_diag(&self, d: &[f64]) -> Result<SymMatrix> {
        self.matrix.minus_diag(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn two_node_edge() {
        let a = coupling_matrix(&Topology::new(2, [(1, 2)]).unwrap());
        assert_eq!(a.matrix().as_matrix().to_rows(), vec![vec![-1.0, 1.0], vec![1.0, -1.0]]);
    }

    #[test]
    fn paper_topology_degrees() {
        let t = fixtures::paper_fig2();
        assert_eq!(t.degrees(), vec![1, 1, 1, 6, 3, 3, 3, 1, 1]);
        assert!(t.is_connected());
        let a = coupling_matrix(&t);
        for i in 0..9 {
            assert_eq!(a.matrix()[(i, i)], -(t.degrees()[i] as f64));
            assert_eq!(a.matrix().as_matrix().row(i).iter().sum::<f64>(), 0.0);
        }
    }

    #[test]
    fn empty_edge_set() {
        let t = Topology::new(3, []).unwrap();
        let a = coupling_matrix(&t);
        assert_eq!(a.matrix().as_matrix().max_abs(), 0.0);
        assert!(!t.is_connected());
        assert_eq!(a.require_connected(), Err(PinError::Disconnected { components: 3 }));
    }

    #[test]
    fn connectivity_cases() {
        assert!(!Topology::new(4, [(1, 2), (3, 4)]).unwrap().is_connected());
        assert!(Topology::new(1, []).unwrap().is_connected());
    }

    #[test]
    fn degree_cases() {
        let k4 = Topology::new(4, [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap();
        assert_eq!(degrees(&k4), vec![3, 3, 3, 3]);
        assert_eq!(degrees(&Topology::new(3, [(1, 2), (2, 3)]).unwrap()), vec![1, 2, 1]);
    }

    #[test]
    fn invalid_topologies() {
        assert!(Topology::new(3, [(1, 1)]).is_err());
        assert!(Topology::new(3, [(1, 4)]).is_err());
        assert!(Topology::new(3, [(0, 2)]).is_err());
        assert!(Topology::new(3, [(1, 2), (2, 1)]).is_err());
        assert!(Topology::new(0, []).is_err());
    }

    #[test]
    fn json_schema() {
        let t: Topology = serde_json::from_str(r#"{"n": 3, "edges": [[2, 1], [2, 3]]}"#).unwrap();
        assert_eq!(t.edges(), &[[1, 2], [2, 3]]);
        assert!(serde_json::from_str::<Topology>(r#"{"n": 2, "edges": [[1, 1]]}"#).is_err());
        let back: Topology = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
        assert_eq!(back, t);
    }
}

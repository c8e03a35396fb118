//! Simple undirected graphs: representation, ingestion, generators,
//! automorphism search and transitivity profiling.
//!
//! Vertices are `0..n` internally. Every text or JSON format uses 1-based
//! labels; the conversion happens in [`io`] and in the serde impls below.

mod automorphism;
pub mod generators;
pub mod io;
mod transitivity;

use std::collections::{BTreeSet, VecDeque};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use automorphism::{automorphisms, find_isomorphism, is_automorphism, AutGroup, Permutation, DEFAULT_SEARCH_BOUND};
pub use generators::generate;
pub use io::{parse_graph, GraphFormat};
pub use transitivity::{transitivity, TransitivityProfile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("vertex index {index} out of range 1..={n}")]
    VertexOutOfRange { index: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    Loop(usize),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("invalid parameters for `{generator}`: {reason}")]
    InvalidParameters { generator: String, reason: String },
    #[error("graph has {n} vertices, above the search bound {bound}")]
    SearchBoundExceeded { n: usize, bound: usize },
    #[error("group order {order} exceeds the enumeration cap {cap}")]
    CapExceeded { order: u128, cap: usize },
    #[error("permutation is not an automorphism: edge {0:?} is not preserved")]
    NotAnAutomorphism((usize, usize)),
}

/// A finite simple undirected graph on the vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    name: Option<String>,
}

impl Graph {
    /// Builds a graph from 0-based edges. Duplicates collapse, loops and
    /// out-of-range endpoints are rejected (reported 1-based).
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            for x in [a, b] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { index: x + 1, n });
                }
            }
            if a == b {
                return Err(GraphError::Loop(a + 1));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &set {
            adj[a].push(b);
            adj[b].push(a);
        }
        for nb in &mut adj {
            nb.sort_unstable();
        }
        Ok(Self { n, edges: set, adj, name: None })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// The common degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.adj.first().map_or(0, Vec::len);
        self.adj.iter().all(|nb| nb.len() == d).then_some(d)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for &(i, j) in &self.edges {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        a
    }

    /// Relabels vertices: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        let mut g = Graph::new(self.n, self.edges().map(|(a, b)| (perm[a], perm[b])))
            .expect("relabelling preserves simplicity");
        g.name = self.name.clone();
        g
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.bfs(0).iter().all(Option::is_some)
    }

    fn bfs(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].unwrap();
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(dv + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// All-pairs shortest path lengths by BFS from every vertex.
    pub fn distances(&self) -> Distances {
        let rows: Vec<Vec<Option<usize>>> = (0..self.n).map(|s| self.bfs(s)).collect();
        let connected = rows.iter().flatten().all(Option::is_some);
        let diameter = rows.iter().flatten().filter_map(|d| *d).max().unwrap_or(0);
        Distances { rows, diameter, connected }
    }
}

/// All-pairs distance table. `None` marks unreachable pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distances {
    rows: Vec<Vec<Option<usize>>>,
    /// Largest finite distance.
    pub diameter: usize,
    pub connected: bool,
}

impl Distances {
    pub fn get(&self, i: usize, j: usize) -> Option<usize> {
        self.rows[i][j]
    }

    /// Sorted multiset of finite distances from `v`; an isomorphism invariant.
    pub fn profile(&self, v: usize) -> Vec<usize> {
        let mut p: Vec<usize> = self.rows[v].iter().filter_map(|d| *d).collect();
        p.sort_unstable();
        p
    }
}

/// Convenience wrapper matching the operation name used by the CLI.
pub fn distances(g: &Graph) -> Distances {
    g.distances()
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    name: Option<String>,
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphJson {
            name: self.name.clone(),
            n: self.n,
            edges: self.edges().map(|(a, b)| [a + 1, b + 1]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        let mut edges = Vec::with_capacity(raw.edges.len());
        for [a, b] in raw.edges {
            if a == 0 || b == 0 {
                return Err(serde::de::Error::custom("vertex labels are 1-based"));
            }
            edges.push((a - 1, b - 1));
        }
        let g = Graph::new(raw.n, edges).map_err(serde::de::Error::custom)?;
        Ok(match raw.name {
            Some(name) => g.with_name(name),
            None => g,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_loops_and_out_of_range() {
        assert_eq!(Graph::new(3, [(1, 1)]), Err(GraphError::Loop(2)));
        assert_eq!(
            Graph::new(3, [(0, 3)]),
            Err(GraphError::VertexOutOfRange { index: 4, n: 3 })
        );
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = Graph::new(3, [(0, 1), (1, 0), (0, 1), (1, 2)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(1), &[0, 2]);
    }

    #[test]
    fn disconnected_distances_are_flagged() {
        let g = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        let d = g.distances();
        assert!(!d.connected);
        assert_eq!(d.get(0, 2), None);
        assert_eq!(d.diameter, 1);
    }

    #[test]
    fn json_dump_is_one_based() {
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap().with_name("path");
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"name":"path","n":3,"edges":[[1,2],[2,3]]}"#);
        let back: Graph = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
    }
}

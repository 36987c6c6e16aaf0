//! Circuit-topology graphs for BD-RIS architectures.
//!
//! Ports are vertices, tunable interconnecting admittances are edges. Vertex
//! indices are 1-based to match port numbering, and edges are stored
//! canonically with the smaller index first so that duplicate detection and
//! serialization are unambiguous. Graphs are immutable after construction.

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Errors arising from invalid graph construction or queries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex count must be at least 1")]
    EmptyVertexSet,
    #[error("edge ({0}, {0}) is a self-loop")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },
}

/// Simple undirected graph on RIS port indices.
///
/// Invariants (enforced by [`RisGraph::new`]): no self-loops, no duplicate
/// edges, all endpoints in `1..=n`, and `n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RisGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl RisGraph {
    /// Builds a graph on `n` vertices from an edge list.
    ///
    /// Edges may be given in either orientation; they are canonicalized to
    /// `(min, max)` and sorted.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyVertexSet);
        }
        let mut canonical = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            for w in [u, v] {
                if w < 1 || w > n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            canonical.push((u.min(v), u.max(v)));
        }
        canonical.sort_unstable();
        for pair in canonical.windows(2) {
            if pair[0] == pair[1] {
                return Err(GraphError::DuplicateEdge(pair[0].0, pair[0].1));
            }
        }
        Ok(Self {
            n,
            edges: canonical,
        })
    }

    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        Self::new(n, [])
    }

    /// Path graph: edges `(ℓ, ℓ+1)` for `ℓ = 1..n-1`.
    pub fn path_graph(n: usize) -> Result<Self, GraphError> {
        Self::new(n, (1..n).map(|v| (v, v + 1)))
    }

    /// Star graph with the given central vertex joined to every other vertex.
    pub fn star_graph(n: usize, center: usize) -> Result<Self, GraphError> {
        if center < 1 || center > n {
            return Err(GraphError::VertexOutOfRange { vertex: center, n });
        }
        Self::new(n, (1..=n).filter(|&v| v != center).map(|v| (center, v)))
    }

    /// Complete graph: every pair of distinct vertices joined by an edge.
    pub fn complete_graph(n: usize) -> Result<Self, GraphError> {
        Self::new(n, (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))))
    }

    /// Uniformly sampled labeled tree on `n` vertices.
    ///
    /// Sampling draws a random Prüfer sequence, whose decodings are in
    /// bijection with labeled trees, so every tree shape is equally likely.
    pub fn random_spanning_tree<R: Rng + ?Sized>(
        n: usize,
        rng: &mut R,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::EmptyVertexSet);
        }
        if n == 1 {
            return Self::empty(1);
        }
        if n == 2 {
            return Self::new(2, [(1, 2)]);
        }
        let seq: Vec<usize> = (0..n - 2).map(|_| rng.random_range(1..=n)).collect();
        let mut degree = vec![1usize; n + 1];
        for &s in &seq {
            degree[s] += 1;
        }
        // Min-ordered set of current leaves keeps the decoding deterministic.
        let mut leaves: std::collections::BTreeSet<usize> =
            (1..=n).filter(|&v| degree[v] == 1).collect();
        let mut edges = Vec::with_capacity(n - 1);
        for &s in &seq {
            let leaf = *leaves.iter().next().expect("prufer decode: leaf exists");
            leaves.remove(&leaf);
            edges.push((leaf, s));
            degree[s] -= 1;
            if degree[s] == 1 {
                leaves.insert(s);
            }
        }
        let mut rest = leaves.into_iter();
        let (u, v) = (rest.next().unwrap(), rest.next().unwrap());
        edges.push((u, v));
        Self::new(n, edges)
    }

    /// Number of vertices (RIS ports).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Canonicalized edge list, sorted with smaller endpoint first.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_edge(&self, u: usize, v: usize) -> bool {
        let e = (u.min(v), u.max(v));
        self.edges.binary_search(&e).is_ok()
    }

    /// Number of edges incident with `v`.
    pub fn degree(&self, v: usize) -> Result<usize, GraphError> {
        if v < 1 || v > self.n {
            return Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.n,
            });
        }
        Ok(self
            .edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count())
    }

    /// True iff every pair of vertices is joined by a path. A single-vertex
    /// graph is connected.
    pub fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.n);
        for &(u, v) in &self.edges {
            uf.union(u, v);
        }
        uf.component_count() == 1
    }

    /// True iff the graph contains no cycle.
    pub fn is_acyclic(&self) -> bool {
        let mut uf = UnionFind::new(self.n);
        for &(u, v) in &self.edges {
            if !uf.union(u, v) {
                return false;
            }
        }
        true
    }

    /// True iff the graph is connected and acyclic.
    pub fn is_tree(&self) -> bool {
        // A connected graph on n vertices with n-1 edges is acyclic.
        self.edges.len() + 1 == self.n && self.is_connected()
    }

    /// True iff the graph is acyclic (a disjoint union of trees).
    pub fn is_forest(&self) -> bool {
        self.is_acyclic()
    }

    /// Partition of `1..=n` into maximal connected vertex sets.
    ///
    /// Components are sorted internally and ordered by their smallest vertex;
    /// isolated vertices form singleton components.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.n);
        for &(u, v) in &self.edges {
            uf.union(u, v);
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for v in 1..=self.n {
            groups.entry(uf.find(v)).or_default().push(v);
        }
        let mut components: Vec<Vec<usize>> = groups.into_values().collect();
        components.sort_by_key(|c| c[0]);
        components
    }
}

impl Serialize for RisGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw<'a> {
            n: usize,
            edges: &'a [(usize, usize)],
        }
        Raw {
            n: self.n,
            edges: &self.edges,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RisGraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            edges: Vec<(usize, usize)>,
        }
        let raw = Raw::deserialize(deserializer)?;
        RisGraph::new(raw.n, raw.edges).map_err(serde::de::Error::custom)
    }
}

/// Union-find over 1-based vertices with path halving and union by size.
struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    components: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..=n).collect(),
            size: vec![1; n + 1],
            components: n,
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Returns false if `u` and `v` were already in the same component.
    fn union(&mut self, u: usize, v: usize) -> bool {
        let (mut ru, mut rv) = (self.find(u), self.find(v));
        if ru == rv {
            return false;
        }
        if self.size[ru] < self.size[rv] {
            std::mem::swap(&mut ru, &mut rv);
        }
        self.parent[rv] = ru;
        self.size[ru] += self.size[rv];
        self.components -= 1;
        true
    }

    fn component_count(&self) -> usize {
        self.components
    }
}

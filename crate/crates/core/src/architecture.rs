//! BD-RIS architecture taxonomy.
//!
//! An [`Architecture`] pairs a circuit-topology graph with a taxonomy tag and
//! (for grouped kinds) a partition of the ports into consecutive blocks. The
//! graph fixes which off-diagonal susceptance entries may be nonzero, and the
//! number of tunable admittance components follows as `N + |edges|`.

use std::collections::BTreeSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::graph::{GraphError, RisGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArchitectureError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("group size {group_size} does not divide port count {n}")]
    GroupSizeDoesNotDivide { n: usize, group_size: usize },
    #[error("group size must be at least 1")]
    ZeroGroupSize,
    #[error("center {center} is not a member of its group")]
    InvalidCenter { center: usize },
    #[error("graph is not a tree (n={n}, edges={edges})")]
    NotATree { n: usize, edges: usize },
    #[error("graph does not satisfy the {kind} invariant")]
    KindMismatch { kind: String },
}

/// Tree layout used inside each group of a forest-connected architecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum TreeShape {
    #[default]
    Tridiagonal,
    Arrowhead,
}

/// Taxonomy tag for a BD-RIS architecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArchitectureKind {
    /// Each port grounded through its own admittance; empty graph.
    Single,
    /// Tree-connected with a path graph; `B` is tridiagonal.
    Tridiagonal,
    /// Tree-connected with a star graph; `B` is arrowhead.
    Arrowhead,
    /// Tree-connected with an arbitrary tree graph.
    Tree,
    /// Disjoint trees, one per consecutive group of `group_size` ports.
    Forest { group_size: usize, inner: TreeShape },
    /// Complete subgraph per consecutive group of `group_size` ports.
    Group { group_size: usize },
    /// Complete graph; `B` is an arbitrary symmetric matrix.
    Fully,
}

impl ArchitectureKind {
    /// Stable lowercase label used in CSV output and CLI arguments.
    pub fn label(&self) -> &'static str {
        match self {
            Self::Single => "single",
            Self::Tridiagonal => "tridiagonal",
            Self::Arrowhead => "arrowhead",
            Self::Tree => "tree",
            Self::Forest { .. } => "forest",
            Self::Group { .. } => "group",
            Self::Fully => "fully",
        }
    }

    pub fn group_size(&self) -> Option<usize> {
        match self {
            Self::Forest { group_size, .. } | Self::Group { group_size } => Some(*group_size),
            _ => None,
        }
    }
}

/// Rule selecting the central vertex of a star from a group's port list.
pub type CenterRule<'a> = &'a dyn Fn(&[usize]) -> usize;

/// A circuit topology together with its taxonomy tag and group partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    graph: RisGraph,
    kind: ArchitectureKind,
    group_partition: Vec<Vec<usize>>,
}

impl Architecture {
    /// Builds the requested architecture on `n` ports with default choices
    /// (arrowhead centers at the lowest port index of each group; the generic
    /// `Tree` kind defaults to a path-shaped tree).
    pub fn build(kind: ArchitectureKind, n: usize) -> Result<Self, ArchitectureError> {
        Self::build_with_center_rule(kind, n, &|group: &[usize]| group[0])
    }

    /// As [`Architecture::build`], with an explicit rule for selecting star
    /// centers (used by the `Arrowhead` kind and arrowhead forests).
    pub fn build_with_center_rule(
        kind: ArchitectureKind,
        n: usize,
        center_rule: CenterRule,
    ) -> Result<Self, ArchitectureError> {
        match kind {
            ArchitectureKind::Single => Ok(Self {
                graph: RisGraph::empty(n)?,
                kind,
                group_partition: Vec::new(),
            }),
            ArchitectureKind::Tridiagonal => Ok(Self {
                graph: RisGraph::path_graph(n)?,
                kind,
                group_partition: Vec::new(),
            }),
            ArchitectureKind::Arrowhead => {
                let ports: Vec<usize> = (1..=n).collect();
                if ports.is_empty() {
                    return Err(GraphError::EmptyVertexSet.into());
                }
                let center = center_rule(&ports);
                if !ports.contains(&center) {
                    return Err(ArchitectureError::InvalidCenter { center });
                }
                Ok(Self {
                    graph: RisGraph::star_graph(n, center)?,
                    kind,
                    group_partition: Vec::new(),
                })
            }
            ArchitectureKind::Tree => Self::tree(RisGraph::path_graph(n)?),
            ArchitectureKind::Fully => Ok(Self {
                graph: RisGraph::complete_graph(n)?,
                kind,
                group_partition: Vec::new(),
            }),
            ArchitectureKind::Forest { group_size, inner } => {
                let partition = consecutive_partition(n, group_size)?;
                let mut edges = Vec::new();
                for group in &partition {
                    match inner {
                        TreeShape::Tridiagonal => {
                            edges.extend(group.windows(2).map(|w| (w[0], w[1])));
                        }
                        TreeShape::Arrowhead => {
                            let center = center_rule(group);
                            if !group.contains(&center) {
                                return Err(ArchitectureError::InvalidCenter { center });
                            }
                            edges.extend(
                                group.iter().filter(|&&v| v != center).map(|&v| (center, v)),
                            );
                        }
                    }
                }
                Ok(Self {
                    graph: RisGraph::new(n, edges)?,
                    kind,
                    group_partition: partition,
                })
            }
            ArchitectureKind::Group { group_size } => {
                let partition = consecutive_partition(n, group_size)?;
                let mut edges = Vec::new();
                for group in &partition {
                    for (i, &u) in group.iter().enumerate() {
                        for &v in &group[i + 1..] {
                            edges.push((u, v));
                        }
                    }
                }
                Ok(Self {
                    graph: RisGraph::new(n, edges)?,
                    kind,
                    group_partition: partition,
                })
            }
        }
    }

    pub fn single(n: usize) -> Result<Self, ArchitectureError> {
        Self::build(ArchitectureKind::Single, n)
    }

    pub fn tridiagonal(n: usize) -> Result<Self, ArchitectureError> {
        Self::build(ArchitectureKind::Tridiagonal, n)
    }

    pub fn arrowhead(n: usize) -> Result<Self, ArchitectureError> {
        Self::build(ArchitectureKind::Arrowhead, n)
    }

    pub fn arrowhead_with_center(n: usize, center: usize) -> Result<Self, ArchitectureError> {
        Self::build_with_center_rule(ArchitectureKind::Arrowhead, n, &move |_: &[usize]| center)
    }

    pub fn fully(n: usize) -> Result<Self, ArchitectureError> {
        Self::build(ArchitectureKind::Fully, n)
    }

    pub fn forest(
        n: usize,
        group_size: usize,
        inner: TreeShape,
    ) -> Result<Self, ArchitectureError> {
        Self::build(ArchitectureKind::Forest { group_size, inner }, n)
    }

    pub fn group(n: usize, group_size: usize) -> Result<Self, ArchitectureError> {
        Self::build(ArchitectureKind::Group { group_size }, n)
    }

    /// Wraps an arbitrary tree graph as a tree-connected architecture.
    pub fn tree(graph: RisGraph) -> Result<Self, ArchitectureError> {
        if !graph.is_tree() {
            return Err(ArchitectureError::NotATree {
                n: graph.n(),
                edges: graph.edge_count(),
            });
        }
        Ok(Self {
            graph,
            kind: ArchitectureKind::Tree,
            group_partition: Vec::new(),
        })
    }

    pub fn graph(&self) -> &RisGraph {
        &self.graph
    }

    pub fn kind(&self) -> &ArchitectureKind {
        &self.kind
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Group partition as consecutive port blocks; empty unless the kind is
    /// `Forest` or `Group`.
    pub fn group_partition(&self) -> &[Vec<usize>] {
        &self.group_partition
    }

    /// Number of tunable admittance components: one grounded admittance per
    /// port plus one interconnecting admittance per edge.
    pub fn admittance_count(&self) -> usize {
        self.graph.n() + self.graph.edge_count()
    }

    /// Allowed nonzero positions of the susceptance matrix: the diagonal plus
    /// `(i, j)` and `(j, i)` for every edge. Indices are 1-based.
    pub fn susceptance_support(&self) -> BTreeSet<(usize, usize)> {
        let mut support: BTreeSet<(usize, usize)> = (1..=self.n()).map(|i| (i, i)).collect();
        for &(u, v) in self.graph.edges() {
            support.insert((u, v));
            support.insert((v, u));
        }
        support
    }
}

fn consecutive_partition(
    n: usize,
    group_size: usize,
) -> Result<Vec<Vec<usize>>, ArchitectureError> {
    if group_size == 0 {
        return Err(ArchitectureError::ZeroGroupSize);
    }
    if !n.is_multiple_of(group_size) {
        return Err(ArchitectureError::GroupSizeDoesNotDivide { n, group_size });
    }
    Ok((0..n / group_size)
        .map(|g| (g * group_size + 1..=(g + 1) * group_size).collect())
        .collect())
}

#[derive(Serialize, Deserialize)]
struct ArchitectureRepr {
    kind: String,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    group_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inner: Option<TreeShape>,
    edges: Vec<(usize, usize)>,
}

impl Serialize for Architecture {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let inner = match self.kind {
            ArchitectureKind::Forest { inner, .. } => Some(inner),
            _ => None,
        };
        ArchitectureRepr {
            kind: self.kind.label().to_string(),
            n: self.n(),
            group_size: self.kind.group_size(),
            inner,
            edges: self.graph.edges().to_vec(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Architecture {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = ArchitectureRepr::deserialize(deserializer)?;
        let kind = match (repr.kind.as_str(), repr.group_size) {
            ("single", _) => ArchitectureKind::Single,
            ("tridiagonal", _) => ArchitectureKind::Tridiagonal,
            ("arrowhead", _) => ArchitectureKind::Arrowhead,
            ("tree", _) => ArchitectureKind::Tree,
            ("fully", _) => ArchitectureKind::Fully,
            ("forest", Some(g)) => ArchitectureKind::Forest {
                group_size: g,
                inner: repr.inner.unwrap_or_default(),
            },
            ("group", Some(g)) => ArchitectureKind::Group { group_size: g },
            ("forest" | "group", None) => {
                return Err(D::Error::custom("grouped kind requires a group_size"))
            }
            (other, _) => return Err(D::Error::custom(format!("unknown kind `{other}`"))),
        };
        let arch = if matches!(kind, ArchitectureKind::Tree) {
            // The generic tree kind carries its graph in the edge list.
            let graph = RisGraph::new(repr.n, repr.edges.clone()).map_err(D::Error::custom)?;
            Architecture::tree(graph).map_err(D::Error::custom)?
        } else {
            Architecture::build(kind, repr.n).map_err(D::Error::custom)?
        };
        // Reject payloads whose edge list is inconsistent with the kind.
        let mut given = repr.edges;
        for e in given.iter_mut() {
            *e = (e.0.min(e.1), e.0.max(e.1));
        }
        given.sort_unstable();
        if given != arch.graph.edges() {
            return Err(D::Error::custom(format!(
                "edge list does not match the `{}` construction",
                repr.kind
            )));
        }
        Ok(arch)
    }
}

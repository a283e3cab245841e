//! Labeled simple undirected graphs.
//!
//! A [`LabeledGraph`] stores categorical node labels (atom types) and edge
//! labels (bond types) as ids into a [`Vocab`]. Node ids are contiguous
//! `0..n`, edges are stored once with `u < v`, and parallel edges or
//! self-loops are rejected at construction.

mod canon;
mod io;
mod planarity;

pub use canon::{canonical_certificate, CanonicalCertificate};
pub use io::{read_graphs, read_graphs_from_path, write_graphs, write_graphs_to_path, GraphRecord};
pub use planarity::is_planar;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("node label id {0} not in vocabulary")]
    NodeLabelOutOfRange(u32),
    #[error("edge label id {0} not in vocabulary")]
    EdgeLabelOutOfRange(u32),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Ordered node and edge label strings; ids are indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vocab {
    pub node_labels: Vec<String>,
    pub edge_labels: Vec<String>,
}

impl Vocab {
    pub fn new<N, E>(node_labels: N, edge_labels: E) -> Self
    where
        N: IntoIterator,
        N::Item: Into<String>,
        E: IntoIterator,
        E::Item: Into<String>,
    {
        Self {
            node_labels: node_labels.into_iter().map(Into::into).collect(),
            edge_labels: edge_labels.into_iter().map(Into::into).collect(),
        }
    }

    pub fn node_id(&self, label: &str) -> Option<u32> {
        self.node_labels.iter().position(|l| l == label).map(|i| i as u32)
    }

    pub fn edge_id(&self, label: &str) -> Option<u32> {
        self.edge_labels.iter().position(|l| l == label).map(|i| i as u32)
    }

    pub fn intern_node(&mut self, label: &str) -> u32 {
        self.node_id(label).unwrap_or_else(|| {
            self.node_labels.push(label.to_string());
            (self.node_labels.len() - 1) as u32
        })
    }

    pub fn intern_edge(&mut self, label: &str) -> u32 {
        self.edge_id(label).unwrap_or_else(|| {
            self.edge_labels.push(label.to_string());
            (self.edge_labels.len() - 1) as u32
        })
    }

    /// Merges the labels of `other` into `self`, keeping existing ids.
    pub fn extend_from(&mut self, other: &Vocab) {
        for l in &other.node_labels {
            self.intern_node(l);
        }
        for l in &other.edge_labels {
            self.intern_edge(l);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub label: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    node_labels: Vec<u32>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, u32)>>,
    vocab: Vocab,
}

impl LabeledGraph {
    /// Builds a graph, normalizing each edge to `u < v` and sorting the edge list.
    pub fn new<I>(vocab: Vocab, node_labels: Vec<u32>, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, u32)>,
    {
        let n = node_labels.len();
        if let Some(&bad) = node_labels.iter().find(|&&l| l as usize >= vocab.node_labels.len()) {
            return Err(GraphError::NodeLabelOutOfRange(bad));
        }
        let mut list = Vec::new();
        for (a, b, label) in edges {
            for node in [a, b] {
                if node >= n {
                    return Err(GraphError::NodeOutOfRange { node, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            if label as usize >= vocab.edge_labels.len() {
                return Err(GraphError::EdgeLabelOutOfRange(label));
            }
            list.push(Edge { u: a.min(b), v: a.max(b), label });
        }
        list.sort_unstable();
        for w in list.windows(2) {
            if (w[0].u, w[0].v) == (w[1].u, w[1].v) {
                return Err(GraphError::DuplicateEdge(w[0].u, w[0].v));
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for e in &list {
            adjacency[e.u].push((e.v, e.label));
            adjacency[e.v].push((e.u, e.label));
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        Ok(Self { node_labels, edges: list, adjacency, vocab })
    }

    /// Convenience constructor from label strings; the vocabulary is built in
    /// order of first appearance.
    pub fn from_labels(node_labels: &[&str], edges: &[(usize, usize, &str)]) -> Result<Self, GraphError> {
        let mut vocab = Vocab::default();
        let nodes = node_labels.iter().map(|l| vocab.intern_node(l)).collect();
        let edges: Vec<_> = edges.iter().map(|&(u, v, l)| (u, v, vocab.intern_edge(l))).collect();
        Self::new(vocab, nodes, edges)
    }

    pub fn n(&self) -> usize {
        self.node_labels.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    pub fn node_labels(&self) -> &[u32] {
        &self.node_labels
    }

    pub fn node_label(&self, v: usize) -> u32 {
        self.node_labels[v]
    }

    pub fn node_label_str(&self, v: usize) -> &str {
        &self.vocab.node_labels[self.node_labels[v] as usize]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors of `v` with the connecting edge label, sorted by neighbor id.
    pub fn neighbors(&self, v: usize) -> &[(usize, u32)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> Result<usize, GraphError> {
        self.adjacency.get(v).map(Vec::len).ok_or(GraphError::NodeOutOfRange { node: v, n: self.n() })
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn edge_label(&self, u: usize, v: usize) -> Option<u32> {
        self.adjacency.get(u)?.binary_search_by_key(&v, |&(w, _)| w).ok().map(|i| self.adjacency[u][i].1)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_label(u, v).is_some()
    }

    /// Applies a node permutation: node `v` of `self` becomes node `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> LabeledGraph {
        assert_eq!(perm.len(), self.n(), "permutation length mismatch");
        let mut labels = vec![0; self.n()];
        for (v, &p) in perm.iter().enumerate() {
            labels[p] = self.node_labels[v];
        }
        let edges = self.edges.iter().map(|e| (perm[e.u], perm[e.v], e.label));
        LabeledGraph::new(self.vocab.clone(), labels, edges).expect("permutation preserves validity")
    }

    /// Reorders nodes so that new node `k` is old node `order[k]`.
    pub fn reorder(&self, order: &[usize]) -> LabeledGraph {
        let mut perm = vec![0; order.len()];
        for (k, &old) in order.iter().enumerate() {
            perm[old] = k;
        }
        self.permute(&perm)
    }

    /// Re-expresses the graph over `target`, interning any missing labels.
    pub fn with_vocab(&self, target: &mut Vocab) -> LabeledGraph {
        let nodes = self.node_labels.iter().map(|&l| target.intern_node(&self.vocab.node_labels[l as usize])).collect();
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|e| (e.u, e.v, target.intern_edge(&self.vocab.edge_labels[e.label as usize])))
            .collect();
        LabeledGraph::new(target.clone(), nodes, edges).expect("relabeling preserves validity")
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut stack = vec![root];
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &(w, _) in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.connected_components().len() == 1
    }
}

/// Brute-force label-respecting isomorphism over all `n!` node maps.
/// Intended for `n <= 8`; used as a test oracle.
pub fn brute_force_isomorphic(a: &LabeledGraph, b: &LabeledGraph) -> bool {
    if a.n() != b.n() || a.m() != b.m() {
        return false;
    }
    let n = a.n();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn extend(a: &LabeledGraph, b: &LabeledGraph, k: usize, map: &mut [usize], used: &mut [bool]) -> bool {
        if k == a.n() {
            return a.edges().iter().all(|e| {
                b.edge_label(map[e.u], map[e.v])
                    .is_some_and(|l| b.vocab().edge_labels[l as usize] == a.vocab().edge_labels[e.label as usize])
            });
        }
        for t in 0..b.n() {
            if used[t] || a.node_label_str(k) != b.node_label_str(t) {
                continue;
            }
            map[k] = t;
            used[t] = true;
            if extend(a, b, k + 1, map, used) {
                return true;
            }
            used[t] = false;
        }
        false
    }
    extend(a, b, 0, &mut map, &mut used)
}


#[cfg(test)]
mod tests {
    use super::testing::*;
    use super::*;

    #[test]
    fn degree_examples() {
        let s = star(3);
        assert_eq!(s.degree(0).unwrap(), 3);
        for leaf in 1..=3 {
            assert_eq!(s.degree(leaf).unwrap(), 1);
        }
        assert_eq!(uniform(1, &[]).degree(0).unwrap(), 0);
        assert!(matches!(s.degree(9), Err(GraphError::NodeOutOfRange { node: 9, n: 4 })));
    }

    #[test]
    fn degree_sum_is_twice_edge_count() {
        let g = complete(6);
        assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.m());
    }

    #[test]
    fn construction_rejects_invalid_edges() {
        assert!(matches!(LabeledGraph::from_labels(&["C", "C"], &[(0, 0, "single")]), Err(GraphError::SelfLoop(0))));
        assert!(matches!(
            LabeledGraph::from_labels(&["C", "C"], &[(0, 1, "single"), (1, 0, "double")]),
            Err(GraphError::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            LabeledGraph::from_labels(&["C"], &[(0, 3, "single")]),
            Err(GraphError::NodeOutOfRange { node: 3, n: 1 })
        ));
    }

    #[test]
    fn components_examples() {
        assert_eq!(path(3).connected_components(), vec![vec![0, 1, 2]]);
        assert_eq!(uniform(4, &[(0, 1), (2, 3)]).connected_components().len(), 2);
        assert_eq!(uniform(3, &[]).connected_components().len(), 3);
    }

    #[test]
    fn reorder_inverts_permute() {
        let g = LabeledGraph::from_labels(&["C", "O", "H"], &[(0, 1, "double"), (0, 2, "single")]).unwrap();
        let perm = [2, 0, 1];
        let p = g.permute(&perm);
        assert_eq!(p.node_label_str(2), "C");
        assert_eq!(p.edge_label(2, 0), g.edge_label(0, 1));
        // new node v of the result is node perm[v] of p, i.e. node v of g
        assert_eq!(p.reorder(&perm), g);
    }
}

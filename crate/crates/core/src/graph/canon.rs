//! Canonical certificates by color refinement and individualization.
//!
//! Node label strings seed the coloring. The coloring is refined to an
//! equitable partition; if it is not discrete, the search individualizes
//! each vertex of the first smallest non-singleton cell in turn and keeps the
//! lexicographically smallest leaf encoding. Twin vertices (same color, same
//! labeled neighborhood apart from each other) are interchangeable by an
//! automorphism, so only one of each twin class is branched on.

use std::collections::BTreeSet;

use super::LabeledGraph;

/// Byte string identifying the label-respecting isomorphism class of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCertificate(Vec<u8>);

impl CanonicalCertificate {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

pub fn canonical_certificate(g: &LabeledGraph) -> CanonicalCertificate {
    let n = g.n();
    let vocab = g.vocab();

    let node_strings: BTreeSet<&str> = (0..n).map(|v| g.node_label_str(v)).collect();
    let node_rank: Vec<u32> =
        (0..n).map(|v| node_strings.iter().position(|s| *s == g.node_label_str(v)).unwrap() as u32).collect();
    let edge_strings: BTreeSet<&str> = g.edges().iter().map(|e| vocab.edge_labels[e.label as usize].as_str()).collect();
    let edge_rank: Vec<u32> = (0..vocab.edge_labels.len())
        .map(|l| edge_strings.iter().position(|s| *s == vocab.edge_labels[l]).unwrap_or(u32::MAX as usize) as u32)
        .collect();
    let adj: Vec<Vec<(usize, u32)>> =
        (0..n).map(|v| g.neighbors(v).iter().map(|&(w, l)| (w, edge_rank[l as usize])).collect()).collect();

    let search = Search { n, adj: &adj, node_rank: &node_rank };
    let colors = search.refine(node_rank.clone());
    let mut best: Option<Vec<u8>> = None;
    search.explore(colors, &mut best);

    let mut bytes = Vec::new();
    push_u32(&mut bytes, node_strings.len() as u32);
    for s in &node_strings {
        push_str(&mut bytes, s);
    }
    push_u32(&mut bytes, edge_strings.len() as u32);
    for s in &edge_strings {
        push_str(&mut bytes, s);
    }
    // leaf encodings refer to labels by rank into the tables above
    bytes.extend(best.unwrap_or_default());
    CanonicalCertificate(bytes)
}

fn push_u32(buf: &mut Vec<u8>, x: u32) {
    buf.extend_from_slice(&x.to_be_bytes());
}

fn push_str(buf: &mut Vec<u8>, s: &str) {
    push_u32(buf, s.len() as u32);
    buf.extend_from_slice(s.as_bytes());
}

struct Search<'a> {
    n: usize,
    adj: &'a [Vec<(usize, u32)>],
    node_rank: &'a [u32],
}

impl Search<'_> {
    /// Refines until the number of cells stops growing. Colors are ranks of
    /// sorted signatures, so the result only depends on the isomorphism class
    /// of (graph, initial coloring).
    fn refine(&self, mut colors: Vec<u32>) -> Vec<u32> {
        let mut cells = count_distinct(&colors);
        loop {
            let sigs: Vec<(u32, Vec<(u32, u32)>)> = (0..self.n)
                .map(|v| {
                    let mut nb: Vec<(u32, u32)> = self.adj[v].iter().map(|&(w, l)| (colors[w], l)).collect();
                    nb.sort_unstable();
                    (colors[v], nb)
                })
                .collect();
            let mut sorted: Vec<&(u32, Vec<(u32, u32)>)> = sigs.iter().collect();
            sorted.sort();
            sorted.dedup();
            let next: Vec<u32> = sigs.iter().map(|s| sorted.binary_search(&s).unwrap() as u32).collect();
            let next_cells = sorted.len();
            colors = next;
            if next_cells == cells {
                return colors;
            }
            cells = next_cells;
        }
    }

    fn explore(&self, colors: Vec<u32>, best: &mut Option<Vec<u8>>) {
        let Some(target) = self.target_cell(&colors) else {
            let leaf = self.leaf(&colors);
            if best.as_ref().is_none_or(|b| leaf < *b) {
                *best = Some(leaf);
            }
            return;
        };
        let members: Vec<usize> = (0..self.n).filter(|&v| colors[v] == target).collect();
        let mut representatives: Vec<usize> = Vec::new();
        for &v in &members {
            if !representatives.iter().any(|&r| self.twins(r, v)) {
                representatives.push(v);
            }
        }
        for v in representatives {
            let split: Vec<u32> =
                (0..self.n).map(|u| 2 * colors[u] + u32::from(colors[u] == target && u != v)).collect();
            self.explore(self.refine(split), best);
        }
    }

    fn target_cell(&self, colors: &[u32]) -> Option<u32> {
        let mut sizes = vec![0usize; self.n];
        for &c in colors {
            sizes[c as usize] += 1;
        }
        sizes.iter().enumerate().filter(|(_, &s)| s > 1).min_by_key(|(c, &s)| (s, *c)).map(|(c, _)| c as u32)
    }

    fn twins(&self, a: usize, b: usize) -> bool {
        let strip = |v: usize, other: usize| -> Vec<(usize, u32)> {
            self.adj[v].iter().copied().filter(|&(w, _)| w != other).collect()
        };
        let la = self.adj[a].iter().find(|&&(w, _)| w == b).map(|&(_, l)| l);
        let lb = self.adj[b].iter().find(|&&(w, _)| w == a).map(|&(_, l)| l);
        la == lb && strip(a, b) == strip(b, a)
    }

    fn leaf(&self, colors: &[u32]) -> Vec<u8> {
        // discrete: color is the canonical position
        let mut order = vec![0usize; self.n];
        for (v, &c) in colors.iter().enumerate() {
            order[c as usize] = v;
        }
        let mut buf = Vec::new();
        push_u32(&mut buf, self.n as u32);
        for &v in &order {
            push_u32(&mut buf, self.node_rank[v]);
        }
        let mut edges: Vec<(u32, u32, u32)> = Vec::new();
        for (pos, &v) in order.iter().enumerate() {
            for &(w, l) in &self.adj[v] {
                let q = colors[w];
                if (pos as u32) < q {
                    edges.push((pos as u32, q, l));
                }
            }
        }
        edges.sort_unstable();
        push_u32(&mut buf, edges.len() as u32);
        for (a, b, l) in edges {
            push_u32(&mut buf, a);
            push_u32(&mut buf, b);
            push_u32(&mut buf, l);
        }
        buf
    }
}

fn count_distinct(colors: &[u32]) -> usize {
    colors.iter().collect::<BTreeSet<_>>().len()
}

#[cfg(test)]
mod tests {
    use super::super::testing::*;
    use super::super::{brute_force_isomorphic, LabeledGraph};
    use super::*;
    use crate::rng::stream;
    use rand::seq::SliceRandom;
    use rand::Rng;

    #[test]
    fn reversed_path_matches() {
        let a = LabeledGraph::from_labels(&["C", "O", "N"], &[(0, 1, "s"), (1, 2, "d")]).unwrap();
        let b = LabeledGraph::from_labels(&["N", "O", "C"], &[(0, 1, "d"), (1, 2, "s")]).unwrap();
        assert_eq!(canonical_certificate(&a), canonical_certificate(&b));
    }

    #[test]
    fn triangle_differs_from_path() {
        assert_ne!(canonical_certificate(&complete(3)), canonical_certificate(&path(3)));
    }

    #[test]
    fn label_multiset_matters_without_edges() {
        let a = LabeledGraph::from_labels(&["A", "B", "B"], &[]).unwrap();
        let b = LabeledGraph::from_labels(&["A", "A", "B"], &[]).unwrap();
        assert_ne!(canonical_certificate(&a), canonical_certificate(&b));
    }

    #[test]
    fn labels_matter() {
        let a = LabeledGraph::from_labels(&["C", "O"], &[(0, 1, "single")]).unwrap();
        let b = LabeledGraph::from_labels(&["C", "O"], &[(0, 1, "double")]).unwrap();
        let c = LabeledGraph::from_labels(&["C", "N"], &[(0, 1, "single")]).unwrap();
        assert_ne!(canonical_certificate(&a), canonical_certificate(&b));
        assert_ne!(canonical_certificate(&a), canonical_certificate(&c));
    }

    fn random_graph(rng: &mut impl Rng, n: usize) -> LabeledGraph {
        let labels: Vec<&str> = (0..n).map(|_| ["A", "B"][rng.gen_range(0..2)]).collect();
        let mut edges = Vec::new();
        let p = rng.gen_range(0.2..0.7);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v, ["s", "d"][rng.gen_range(0..2)]));
                }
            }
        }
        LabeledGraph::from_labels(&labels, &edges).unwrap()
    }

    fn shuffled(g: &LabeledGraph, rng: &mut impl Rng) -> LabeledGraph {
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.shuffle(rng);
        g.permute(&perm)
    }

    #[test]
    fn agrees_with_brute_force_on_random_pairs() {
        let mut rng = stream(11, 0, 0);
        let mut iso_pairs = 0;
        for _ in 0..200 {
            let n = rng.gen_range(1..=8);
            let a = random_graph(&mut rng, n);
            // half the time compare with a shuffled copy, half with an independent draw
            let b = if rng.gen_bool(0.5) { shuffled(&a, &mut rng) } else { random_graph(&mut rng, n) };
            let same = canonical_certificate(&a) == canonical_certificate(&b);
            let iso = brute_force_isomorphic(&a, &b);
            assert_eq!(same, iso, "{a:?} vs {b:?}");
            iso_pairs += usize::from(iso);
        }
        assert!(iso_pairs >= 50);
    }

    #[test]
    fn permutation_invariant() {
        let mut rng = stream(12, 0, 0);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=12);
            let g = random_graph(&mut rng, n);
            assert_eq!(canonical_certificate(&g), canonical_certificate(&shuffled(&g, &mut rng)));
        }
    }

    #[test]
    fn symmetric_graphs_are_fast() {
        let k = complete(12);
        let e = uniform(12, &[]);
        assert_ne!(canonical_certificate(&k), canonical_certificate(&e));
        // cycle of 12: refinement alone cannot split, twins do not apply
        let edges: Vec<_> = (0..12).map(|i| (i, (i + 1) % 12)).collect();
        let c = uniform(12, &edges);
        let mut rng = stream(1, 0, 0);
        assert_eq!(canonical_certificate(&c), canonical_certificate(&shuffled(&c, &mut rng)));
    }
}

//! Incremental grammar state: validation, decoding, statistics and the
//! next-token legality mask used for constrained generation.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Token, TokenSequence, TokenVocab};
use crate::graph::{GraphError, LabeledGraph, Vocab};

/// Positions are 1-based token positions.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error("unexpected token {found} at position {position}, expected {expected}")]
    Unexpected { position: usize, found: String, expected: String },
    #[error("self-loop at position {position}")]
    SelfLoop { position: usize },
    #[error("duplicate edge ({u}, {v}) at position {position}")]
    DuplicateEdge { position: usize, u: usize, v: usize },
    #[error("node index {index} at position {position} is not contiguous (next new index is {expected})")]
    NonContiguous { position: usize, index: usize, expected: usize },
    #[error("neighborhood entries out of ascending order at position {position}")]
    ChordOrder { position: usize },
    #[error("node index at position {position} exceeds the cap of {max} nodes")]
    NodeCap { position: usize, max: usize },
    #[error("label id out of range at position {position}")]
    LabelOutOfRange { position: usize },
    #[error("sequence ends before EOS (position {position})")]
    Incomplete { position: usize },
    #[error("decoded graph is invalid: {0}")]
    Graph(String),
}

impl From<GraphError> for DecodeError {
    fn from(e: GraphError) -> Self {
        DecodeError::Graph(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    ExpectBos,
    SegmentStart,
    NeedLabel,
    AfterLabel,
    NbrOpened,
    ChordEdge,
    AfterChord,
    AtNode,
    TrailEdge,
    Finished,
}

impl Phase {
    fn expected(self) -> &'static str {
        match self {
            Phase::ExpectBos => "BOS",
            Phase::SegmentStart => "NODE",
            Phase::NeedLabel => "NLABEL",
            Phase::AfterLabel => "NBR_OPEN, ELABEL, SEP or EOS",
            Phase::NbrOpened => "ELABEL",
            Phase::ChordEdge => "NODE (revisit)",
            Phase::AfterChord => "ELABEL or NBR_CLOSE",
            Phase::AtNode => "ELABEL, SEP or EOS",
            Phase::TrailEdge => "NODE",
            Phase::Finished => "end of sequence",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceStats {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub n_segments: usize,
    pub n_chords: usize,
    pub n_nonempty_nbr_sets: usize,
    /// Nodes per segment: the segment's first node plus one per trail step.
    pub trail_lengths: Vec<usize>,
}

impl SequenceStats {
    /// `n + 2m + 2s + 2c + 1`, which every grammatical sequence's length equals.
    pub fn predicted_length(&self) -> usize {
        self.n_nodes + 2 * self.n_edges + 2 * self.n_segments + 2 * self.n_nonempty_nbr_sets + 1
    }
}

#[derive(Debug, Clone)]
pub struct GrammarState {
    limits: TokenVocab,
    phase: Phase,
    consumed: usize,
    node_labels: Vec<Option<u32>>,
    adjacency: Vec<BTreeSet<usize>>,
    edges: Vec<(usize, usize, u32)>,
    current: usize,
    pending_label: u32,
    chord_last: Option<usize>,
    stats: SequenceStats,
}

impl GrammarState {
    pub fn new(limits: TokenVocab) -> Self {
        Self {
            limits,
            phase: Phase::ExpectBos,
            consumed: 0,
            node_labels: Vec::new(),
            adjacency: Vec::new(),
            edges: Vec::new(),
            current: 0,
            pending_label: 0,
            chord_last: None,
            stats: SequenceStats::default(),
        }
    }

    pub fn from_prefix(prefix: &[Token], limits: TokenVocab) -> Result<Self, DecodeError> {
        let mut st = Self::new(limits);
        for &t in prefix {
            st.push(t)?;
        }
        Ok(st)
    }

    pub fn is_finished(&self) -> bool {
        self.phase == Phase::Finished
    }

    /// True where EOS (or SEP) may follow.
    pub fn at_segment_boundary(&self) -> bool {
        matches!(self.phase, Phase::AfterLabel | Phase::AtNode)
    }

    pub fn n_nodes(&self) -> usize {
        self.node_labels.len()
    }

    pub fn stats(&self) -> &SequenceStats {
        &self.stats
    }

    fn unexpected(&self, token: Token) -> DecodeError {
        DecodeError::Unexpected {
            position: self.consumed + 1,
            found: token.to_string(),
            expected: self.phase.expected().to_string(),
        }
    }

    fn add_node(&mut self) {
        self.node_labels.push(None);
        self.adjacency.push(BTreeSet::new());
        self.stats.n_nodes += 1;
    }

    fn add_edge(&mut self, u: usize, v: usize, label: u32) {
        self.adjacency[u].insert(v);
        self.adjacency[v].insert(u);
        self.edges.push((u, v, label));
        self.stats.n_edges += 1;
    }

    /// Checks an edge from `self.current` to existing node `target`.
    fn check_back_edge(&self, target: usize, position: usize) -> Result<(), DecodeError> {
        if target == self.current {
            return Err(DecodeError::SelfLoop { position });
        }
        if self.adjacency[self.current].contains(&target) {
            return Err(DecodeError::DuplicateEdge {
                position,
                u: self.current.min(target),
                v: self.current.max(target),
            });
        }
        Ok(())
    }

    pub fn push(&mut self, token: Token) -> Result<(), DecodeError> {
        let position = self.consumed + 1;
        let n = self.n_nodes();
        match (self.phase, token) {
            (Phase::ExpectBos, Token::Bos) => self.phase = Phase::SegmentStart,
            (Phase::SegmentStart, Token::Node(i)) => {
                let i = i as usize;
                if i == n {
                    if n >= self.limits.max_nodes {
                        return Err(DecodeError::NodeCap { position, max: self.limits.max_nodes });
                    }
                    self.add_node();
                    self.phase = Phase::NeedLabel;
                } else if i < n {
                    self.phase = Phase::AtNode;
                } else {
                    return Err(DecodeError::NonContiguous { position, index: i, expected: n });
                }
                self.current = i;
                self.stats.n_segments += 1;
                self.stats.trail_lengths.push(1);
            }
            (Phase::NeedLabel, Token::NodeLabel(a)) => {
                if a as usize >= self.limits.n_node_labels {
                    return Err(DecodeError::LabelOutOfRange { position });
                }
                self.node_labels[self.current] = Some(a);
                self.phase = Phase::AfterLabel;
            }
            (Phase::AfterLabel, Token::NbrOpen) => {
                self.chord_last = None;
                self.stats.n_nonempty_nbr_sets += 1;
                self.phase = Phase::NbrOpened;
            }
            (Phase::AfterLabel | Phase::AtNode | Phase::NbrOpened | Phase::AfterChord, Token::EdgeLabel(b)) => {
                if b as usize >= self.limits.n_edge_labels {
                    return Err(DecodeError::LabelOutOfRange { position });
                }
                self.pending_label = b;
                self.phase = match self.phase {
                    Phase::AfterLabel | Phase::AtNode => Phase::TrailEdge,
                    _ => Phase::ChordEdge,
                };
            }
            (Phase::ChordEdge, Token::Node(u)) => {
                let u = u as usize;
                if u > n {
                    return Err(DecodeError::NonContiguous { position, index: u, expected: n });
                }
                if u == n {
                    return Err(self.unexpected(token));
                }
                self.check_back_edge(u, position)?;
                if self.chord_last.is_some_and(|last| u <= last) {
                    return Err(DecodeError::ChordOrder { position });
                }
                self.add_edge(self.current, u, self.pending_label);
                self.chord_last = Some(u);
                self.stats.n_chords += 1;
                self.phase = Phase::AfterChord;
            }
            (Phase::AfterChord, Token::NbrClose) => self.phase = Phase::AtNode,
            (Phase::TrailEdge, Token::Node(j)) => {
                let j = j as usize;
                if j == n {
                    if n >= self.limits.max_nodes {
                        return Err(DecodeError::NodeCap { position, max: self.limits.max_nodes });
                    }
                    self.add_node();
                    self.add_edge(self.current, j, self.pending_label);
                    self.phase = Phase::NeedLabel;
                } else if j < n {
                    self.check_back_edge(j, position)?;
                    self.add_edge(self.current, j, self.pending_label);
                    self.phase = Phase::AtNode;
                } else {
                    return Err(DecodeError::NonContiguous { position, index: j, expected: n });
                }
                self.current = j;
                *self.stats.trail_lengths.last_mut().expect("inside a segment") += 1;
            }
            (Phase::AfterLabel | Phase::AtNode, Token::Sep) => self.phase = Phase::SegmentStart,
            (Phase::AfterLabel | Phase::AtNode, Token::Eos) => self.phase = Phase::Finished,
            _ => return Err(self.unexpected(token)),
        }
        self.consumed += 1;
        Ok(())
    }

    fn open_targets_from(&self, lo: usize) -> usize {
        // candidates are [lo, current); all neighbors of current are existing nodes
        if lo >= self.current {
            return 0;
        }
        let taken = self.adjacency[self.current].range(lo..self.current).count();
        self.current - lo - taken
    }

    fn has_trail_target(&self) -> bool {
        let n = self.n_nodes();
        n < self.limits.max_nodes || n - 1 - self.adjacency[self.current].len() > 0
    }

    fn chord_lo(&self) -> usize {
        self.chord_last.map_or(0, |l| l + 1)
    }

    /// Every token that keeps the prefix completable to a grammatical sequence.
    pub fn legal_next(&self) -> Vec<Token> {
        let n = self.n_nodes();
        let mut out = Vec::new();
        let edge_labels =
            |out: &mut Vec<Token>| out.extend((0..self.limits.n_edge_labels as u32).map(Token::EdgeLabel));
        match self.phase {
            Phase::ExpectBos => out.push(Token::Bos),
            Phase::SegmentStart => {
                out.extend((0..n as u32).map(Token::Node));
                if n < self.limits.max_nodes {
                    out.push(Token::Node(n as u32));
                }
            }
            Phase::NeedLabel => out.extend((0..self.limits.n_node_labels as u32).map(Token::NodeLabel)),
            Phase::AfterLabel | Phase::AtNode => {
                if self.phase == Phase::AfterLabel && self.open_targets_from(0) > 0 {
                    out.push(Token::NbrOpen);
                }
                if self.has_trail_target() {
                    edge_labels(&mut out);
                }
                out.push(Token::Sep);
                out.push(Token::Eos);
            }
            Phase::NbrOpened => edge_labels(&mut out),
            Phase::AfterChord => {
                if self.open_targets_from(self.chord_lo()) > 0 {
                    edge_labels(&mut out);
                }
                out.push(Token::NbrClose);
            }
            Phase::ChordEdge => {
                for u in self.chord_lo()..self.current {
                    if !self.adjacency[self.current].contains(&u) {
                        out.push(Token::Node(u as u32));
                    }
                }
            }
            Phase::TrailEdge => {
                for j in 0..n {
                    if j != self.current && !self.adjacency[self.current].contains(&j) {
                        out.push(Token::Node(j as u32));
                    }
                }
                if n < self.limits.max_nodes {
                    out.push(Token::Node(n as u32));
                }
            }
            Phase::Finished => {}
        }
        out
    }

    /// Legality as a boolean mask over `self.limits` token indices.
    pub fn legal_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.limits.size()];
        for t in self.legal_next() {
            if let Some(i) = self.limits.index(t) {
                mask[i] = true;
            }
        }
        mask
    }

    /// Builds the decoded graph once the sequence is finished.
    pub fn into_graph(self, vocab: &Vocab) -> Result<LabeledGraph, DecodeError> {
        if !self.is_finished() {
            return Err(DecodeError::Incomplete { position: self.consumed + 1 });
        }
        let labels = self.node_labels.into_iter().map(|l| l.expect("finished sequences label every node")).collect();
        Ok(LabeledGraph::new(vocab.clone(), labels, self.edges)?)
    }
}

fn run(tokens: &[Token], limits: TokenVocab) -> Result<GrammarState, DecodeError> {
    let mut st = GrammarState::new(limits);
    for &t in tokens {
        st.push(t)?;
    }
    if !st.is_finished() {
        return Err(DecodeError::Incomplete { position: tokens.len() + 1 });
    }
    Ok(st)
}

/// Decodes a grammatical sequence to its graph; node `k` is the `k`-th node
/// to appear.
pub fn decode(seq: &TokenSequence, vocab: &Vocab) -> Result<LabeledGraph, DecodeError> {
    let limits = TokenVocab {
        max_nodes: TokenVocab::unbounded().max_nodes,
        n_node_labels: vocab.node_labels.len(),
        n_edge_labels: vocab.edge_labels.len(),
    };
    run(&seq.tokens, limits)?.into_graph(vocab)
}

pub fn legal_next_tokens(prefix: &[Token], limits: TokenVocab) -> Result<Vec<Token>, DecodeError> {
    Ok(GrammarState::from_prefix(prefix, limits)?.legal_next())
}

pub fn sequence_stats(seq: &TokenSequence) -> Result<SequenceStats, DecodeError> {
    Ok(run(&seq.tokens, TokenVocab::unbounded())?.stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::testing::*;

    fn vocab() -> Vocab {
        Vocab::new(["X"], ["e"])
    }

    fn seq(text: &str) -> TokenSequence {
        TokenSequence::parse(text, &vocab()).unwrap()
    }

    const P3: &str = "BOS N0 L:X E:e N1 L:X E:e N2 L:X EOS";
    const TRIANGLE: &str = "BOS N0 L:X E:e N1 L:X E:e N2 L:X [ E:e N0 ] EOS";

    #[test]
    fn decodes_examples() {
        assert_eq!(decode(&seq(P3), &vocab()).unwrap(), path(3));
        assert_eq!(decode(&seq(TRIANGLE), &vocab()).unwrap(), complete(3));
        assert_eq!(decode(&seq("BOS N0 L:X EOS"), &vocab()).unwrap(), uniform(1, &[]));
    }

    #[test]
    fn self_loop_reports_position() {
        let err = decode(&seq("BOS N0 L:X E:e N0 EOS"), &vocab()).unwrap_err();
        assert_eq!(err, DecodeError::SelfLoop { position: 5 });
        assert_eq!(err.to_string(), "self-loop at position 5");
    }

    #[test]
    fn structural_errors() {
        let v = vocab();
        assert!(matches!(
            decode(&seq("BOS N0 L:X E:e N1 L:X SEP N0 E:e N1 EOS"), &v),
            Err(DecodeError::DuplicateEdge { position: 10, u: 0, v: 1 })
        ));
        assert!(matches!(
            decode(&seq("BOS N0 L:X E:e N2 L:X EOS"), &v),
            Err(DecodeError::NonContiguous { position: 5, index: 2, expected: 1 })
        ));
        assert!(matches!(decode(&seq("BOS N1 L:X EOS"), &v), Err(DecodeError::NonContiguous { .. })));
        assert!(matches!(decode(&seq("BOS N0 L:X"), &v), Err(DecodeError::Incomplete { position: 4 })));
        assert!(matches!(decode(&seq("BOS N0 EOS"), &v), Err(DecodeError::Unexpected { position: 3, .. })));
        assert!(matches!(
            decode(&seq("BOS N0 L:X E:e N1 L:X E:e N2 L:X E:e N3 L:X [ E:e N1 E:e N0 ] EOS"), &v),
            Err(DecodeError::ChordOrder { position: 17 })
        ));
        assert!(matches!(decode(&seq("BOS N0 L:X EOS EOS"), &v), Err(DecodeError::Unexpected { position: 5, .. })));
        assert!(matches!(decode(&seq("BOS N0 L:X [ ] EOS"), &v), Err(DecodeError::Unexpected { position: 5, .. })));
    }

    #[test]
    fn stats_examples() {
        let s = sequence_stats(&seq(P3)).unwrap();
        assert_eq!((s.n_nodes, s.n_edges, s.n_segments, s.n_chords, s.n_nonempty_nbr_sets), (3, 2, 1, 0, 0));
        assert_eq!(s.trail_lengths, vec![3]);
        let s = sequence_stats(&seq(TRIANGLE)).unwrap();
        assert_eq!((s.n_nodes, s.n_edges, s.n_segments, s.n_chords, s.n_nonempty_nbr_sets), (3, 3, 1, 1, 1));
        assert_eq!(s.trail_lengths, vec![3]);
        assert_eq!(s.predicted_length(), 14);
        let s = sequence_stats(&seq("BOS N0 L:X EOS")).unwrap();
        assert_eq!((s.n_nodes, s.n_edges, s.n_segments, s.n_chords, s.n_nonempty_nbr_sets), (1, 0, 1, 0, 0));
        assert_eq!(s.trail_lengths, vec![1]);
    }

    #[test]
    fn mask_examples() {
        let tv = TokenVocab { max_nodes: 3, n_node_labels: 2, n_edge_labels: 1 };
        assert_eq!(legal_next_tokens(&[Token::Bos], tv).unwrap(), vec![Token::Node(0)]);
        assert_eq!(
            legal_next_tokens(&[Token::Bos, Token::Node(0)], tv).unwrap(),
            vec![Token::NodeLabel(0), Token::NodeLabel(1)]
        );
        let tri = seq(TRIANGLE);
        let prefix = &tri.tokens[..tri.len() - 1];
        assert_eq!(legal_next_tokens(prefix, tv).unwrap(), vec![Token::Sep, Token::Eos]);
        // with room for more nodes a trail step to a fresh node is also legal
        let wide = TokenVocab { max_nodes: 64, ..tv };
        assert_eq!(legal_next_tokens(prefix, wide).unwrap(), vec![Token::EdgeLabel(0), Token::Sep, Token::Eos]);
        assert!(legal_next_tokens(&[Token::Eos], tv).is_err());
    }

    #[test]
    fn mask_excludes_existing_edges() {
        let tv = TokenVocab { max_nodes: 8, n_node_labels: 1, n_edge_labels: 1 };
        // path 0-1-2 then a trail step from 2: may go to 0 (closing) or new 3, not 1 or 2
        let s = seq("BOS N0 L:X E:e N1 L:X E:e N2 L:X E:e");
        assert_eq!(legal_next_tokens(&s.tokens, tv).unwrap(), vec![Token::Node(0), Token::Node(3)]);
        // neighborhood of node 2: only node 0 is open
        let s = seq("BOS N0 L:X E:e N1 L:X E:e N2 L:X [ E:e");
        assert_eq!(legal_next_tokens(&s.tokens, tv).unwrap(), vec![Token::Node(0)]);
        let s = seq("BOS N0 L:X E:e N1 L:X E:e N2 L:X [ E:e N0");
        assert_eq!(legal_next_tokens(&s.tokens, tv).unwrap(), vec![Token::NbrClose]);
        // a freshly introduced node whose only earlier node is its predecessor cannot open a set
        let s = seq("BOS N0 L:X E:e N1 L:X");
        assert!(!legal_next_tokens(&s.tokens, tv).unwrap().contains(&Token::NbrOpen));
    }
}

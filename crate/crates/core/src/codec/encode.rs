use std::collections::BTreeSet;

use rand::Rng;

use super::{CodecError, Token, TokenSequence};
use crate::graph::LabeledGraph;
use crate::rng::stream;
use crate::strategy::Strategy;

pub const DEFAULT_MAX_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ChoiceKind {
    Start,
    Extension(usize),
    Restart,
}

/// Encoder mid-traversal. Choices are exposed one at a time so the same
/// machinery drives both sampling and exhaustive enumeration.
#[derive(Debug, Clone)]
struct EncoderState<'g> {
    g: &'g LabeledGraph,
    index: Vec<Option<u32>>,
    order: Vec<usize>,
    uncovered: Vec<usize>,
    component: Vec<usize>,
    touched: Vec<bool>,
    current: Option<usize>,
    tokens: Vec<Token>,
    finished: bool,
}

impl<'g> EncoderState<'g> {
    fn new(g: &'g LabeledGraph) -> Self {
        let comps = g.connected_components();
        let mut component = vec![0; g.n()];
        for (c, members) in comps.iter().enumerate() {
            for &v in members {
                component[v] = c;
            }
        }
        Self {
            g,
            index: vec![None; g.n()],
            order: Vec::with_capacity(g.n()),
            uncovered: g.degrees(),
            component,
            touched: vec![false; comps.len()],
            current: None,
            tokens: vec![Token::Bos],
            finished: false,
        }
    }

    /// The next decision and its candidates, or `None` once EOS is emitted.
    fn next_choice(&mut self) -> Option<(ChoiceKind, Vec<usize>)> {
        if self.finished {
            return None;
        }
        let n = self.g.n();
        let Some(c) = self.current else {
            let active: Vec<usize> = (0..n).filter(|&v| self.uncovered[v] > 0).collect();
            let cands = if active.is_empty() { (0..n).collect() } else { active };
            return Some((ChoiceKind::Start, cands));
        };
        // all uncovered edges touch an unvisited node, since introducing a
        // node covers every edge back to the visited set
        let ext: Vec<usize> =
            self.g.neighbors(c).iter().map(|&(w, _)| w).filter(|&w| self.index[w].is_none()).collect();
        if !ext.is_empty() {
            return Some((ChoiceKind::Extension(c), ext));
        }
        let active = |v: &usize| self.uncovered[*v] > 0;
        let near: Vec<usize> = (0..n).filter(active).filter(|&v| self.touched[self.component[v]]).collect();
        if !near.is_empty() {
            return Some((ChoiceKind::Restart, near));
        }
        let far: Vec<usize> = (0..n).filter(active).collect();
        if !far.is_empty() {
            return Some((ChoiceKind::Restart, far));
        }
        let isolated: Vec<usize> = (0..n).filter(|&v| self.index[v].is_none()).collect();
        if !isolated.is_empty() {
            return Some((ChoiceKind::Restart, isolated));
        }
        self.tokens.push(Token::Eos);
        self.finished = true;
        None
    }

    fn take(&mut self, kind: ChoiceKind, v: usize) {
        match kind {
            ChoiceKind::Start => self.introduce(v, None),
            ChoiceKind::Extension(c) => {
                let label = self.g.edge_label(c, v).expect("extension follows an edge");
                self.tokens.push(Token::EdgeLabel(label));
                self.introduce(v, Some(c));
            }
            ChoiceKind::Restart => {
                self.tokens.push(Token::Sep);
                match self.index[v] {
                    Some(i) => self.tokens.push(Token::Node(i)),
                    None => self.introduce(v, None),
                }
            }
        }
        self.current = Some(v);
    }

    fn introduce(&mut self, v: usize, pred: Option<usize>) {
        let idx = self.order.len() as u32;
        self.index[v] = Some(idx);
        self.order.push(v);
        self.touched[self.component[v]] = true;
        self.tokens.push(Token::Node(idx));
        self.tokens.push(Token::NodeLabel(self.g.node_label(v)));
        if let Some(p) = pred {
            self.uncovered[p] -= 1;
            self.uncovered[v] -= 1;
        }
        let mut chords: Vec<(u32, usize, u32)> = self
            .g
            .neighbors(v)
            .iter()
            .filter(|&&(w, _)| Some(w) != pred)
            .filter_map(|&(w, l)| self.index[w].map(|i| (i, w, l)))
            .filter(|&(i, _, _)| i != idx)
            .collect();
        if chords.is_empty() {
            return;
        }
        chords.sort_unstable();
        self.tokens.push(Token::NbrOpen);
        for (i, w, l) in chords {
            self.tokens.push(Token::EdgeLabel(l));
            self.tokens.push(Token::Node(i));
            self.uncovered[w] -= 1;
            self.uncovered[v] -= 1;
        }
        self.tokens.push(Token::NbrClose);
    }

    fn into_sequence(self) -> TokenSequence {
        TokenSequence { tokens: self.tokens, node_order: Some(self.order) }
    }
}

fn check_size(g: &LabeledGraph, max_nodes: usize) -> Result<(), CodecError> {
    if g.n() > max_nodes {
        return Err(CodecError::NodeCap { n: g.n(), max: max_nodes });
    }
    if g.n() == 0 {
        return Err(CodecError::EmptyGraph);
    }
    Ok(())
}

/// Encodes `g` with the stream for `(seed, 0, 0)`.
pub fn encode(g: &LabeledGraph, strategy: Strategy, seed: u64, max_nodes: usize) -> Result<TokenSequence, CodecError> {
    encode_with_rng(g, strategy, &mut stream(seed, 0, 0), max_nodes)
}

pub fn encode_with_rng<R: Rng + ?Sized>(
    g: &LabeledGraph,
    strategy: Strategy,
    rng: &mut R,
    max_nodes: usize,
) -> Result<TokenSequence, CodecError> {
    check_size(g, max_nodes)?;
    let mut state = EncoderState::new(g);
    while let Some((kind, cands)) = state.next_choice() {
        let v = match kind {
            ChoiceKind::Start => strategy.choose_start(g, &cands, rng)?,
            ChoiceKind::Extension(c) => strategy.choose_extension(g, c, &cands, rng)?,
            ChoiceKind::Restart => strategy.choose_restart(g, &cands, rng)?,
        };
        state.take(kind, v);
    }
    Ok(state.into_sequence())
}

/// Every distinct encoder output over all start, extension and restart
/// choices. Outputs are distinct as (tokens, node order) pairs, so the two
/// directions of a symmetric edge count separately. Sorted.
pub fn enumerate_linearizations(g: &LabeledGraph, limit: usize) -> Result<Vec<TokenSequence>, CodecError> {
    check_size(g, usize::MAX)?;
    let mut found = BTreeSet::new();
    explore(EncoderState::new(g), limit, &mut found)?;
    Ok(found.into_iter().collect())
}

fn explore(mut state: EncoderState<'_>, limit: usize, found: &mut BTreeSet<TokenSequence>) -> Result<(), CodecError> {
    match state.next_choice() {
        None => {
            found.insert(state.into_sequence());
            if found.len() > limit {
                return Err(CodecError::EnumerationLimit { limit, partial: found.len() - 1 });
            }
        }
        Some((kind, cands)) => {
            for v in cands {
                let mut next = state.clone();
                next.take(kind, v);
                explore(next, limit, found)?;
            }
        }
    }
    Ok(())
}

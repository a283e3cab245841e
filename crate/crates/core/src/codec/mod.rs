//! Segmented neighborhood-trail token sequences.
//!
//! ```text
//! sequence   := BOS segment (SEP segment)* EOS
//! segment    := node-intro trail-step*
//! node-intro := NODE(i) [NLABEL(a) [nbr-set]]     -- label and set only on first occurrence
//! trail-step := ELABEL(b) NODE(j) [NLABEL(a) [nbr-set]]
//! nbr-set    := NBR_OPEN (ELABEL(b) NODE(u))+ NBR_CLOSE
//! ```
//!
//! Node indices are assigned by first appearance. Trail steps create the edge
//! between consecutive trail nodes; neighborhood-set entries create edges from
//! the newly introduced node back to earlier nodes, in ascending index order.
//! Every edge is created exactly once.

mod encode;
mod grammar;

pub use encode::{encode, encode_with_rng, enumerate_linearizations, DEFAULT_MAX_NODES};
pub use grammar::{decode, legal_next_tokens, sequence_stats, DecodeError, GrammarState, SequenceStats};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Vocab;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Token {
    Bos,
    Eos,
    Sep,
    NbrOpen,
    NbrClose,
    Node(u32),
    NodeLabel(u32),
    EdgeLabel(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TokenType {
    NewNode,
    Revisit,
    NodeLabel,
    EdgeLabel,
    Special,
}

impl TokenType {
    pub const ALL: [TokenType; 5] =
        [TokenType::NewNode, TokenType::Revisit, TokenType::NodeLabel, TokenType::EdgeLabel, TokenType::Special];

    pub fn name(self) -> &'static str {
        match self {
            TokenType::NewNode => "new_node",
            TokenType::Revisit => "revisit",
            TokenType::NodeLabel => "node_label",
            TokenType::EdgeLabel => "edge_label",
            TokenType::Special => "special",
        }
    }

    pub fn is_node_index(self) -> bool {
        matches!(self, TokenType::NewNode | TokenType::Revisit)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("cannot encode a graph with no nodes")]
    EmptyGraph,
    #[error("graph has {n} nodes, more than the cap of {max}")]
    NodeCap { n: usize, max: usize },
    #[error("unrecognized token {text:?} at position {position}")]
    BadToken { position: usize, text: String },
    #[error("unknown label {label:?} at position {position}")]
    UnknownLabel { position: usize, label: String },
    #[error("position {position} out of range for sequence of length {len}")]
    OutOfRange { position: usize, len: usize },
    #[error("more than {limit} linearizations (stopped after {partial})")]
    EnumerationLimit { limit: usize, partial: usize },
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Strategy(#[from] crate::strategy::StrategyError),
}

/// Index space of the token alphabet seen by sequence models.
///
/// Layout: `BOS EOS SEP [ ]`, then `max_nodes` node indices, then node
/// labels, then edge labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TokenVocab {
    pub max_nodes: usize,
    pub n_node_labels: usize,
    pub n_edge_labels: usize,
}

const N_SPECIAL: usize = 5;

impl TokenVocab {
    pub fn new(max_nodes: usize, labels: &Vocab) -> Self {
        Self { max_nodes, n_node_labels: labels.node_labels.len(), n_edge_labels: labels.edge_labels.len() }
    }

    /// Limits that accept any node index or label id.
    pub fn unbounded() -> Self {
        Self { max_nodes: u32::MAX as usize, n_node_labels: u32::MAX as usize, n_edge_labels: u32::MAX as usize }
    }

    pub fn size(&self) -> usize {
        N_SPECIAL + self.max_nodes + self.n_node_labels + self.n_edge_labels
    }

    pub fn index(&self, token: Token) -> Option<usize> {
        let idx = match token {
            Token::Bos => 0,
            Token::Eos => 1,
            Token::Sep => 2,
            Token::NbrOpen => 3,
            Token::NbrClose => 4,
            Token::Node(i) if (i as usize) < self.max_nodes => N_SPECIAL + i as usize,
            Token::NodeLabel(a) if (a as usize) < self.n_node_labels => N_SPECIAL + self.max_nodes + a as usize,
            Token::EdgeLabel(b) if (b as usize) < self.n_edge_labels => {
                N_SPECIAL + self.max_nodes + self.n_node_labels + b as usize
            }
            _ => return None,
        };
        Some(idx)
    }

    pub fn token(&self, index: usize) -> Option<Token> {
        let labels_start = N_SPECIAL + self.max_nodes;
        let edges_start = labels_start + self.n_node_labels;
        Some(match index {
            0 => Token::Bos,
            1 => Token::Eos,
            2 => Token::Sep,
            3 => Token::NbrOpen,
            4 => Token::NbrClose,
            i if i < labels_start => Token::Node((i - N_SPECIAL) as u32),
            i if i < edges_start => Token::NodeLabel((i - labels_start) as u32),
            i if i < self.size() => Token::EdgeLabel((i - edges_start) as u32),
            _ => return None,
        })
    }
}

/// A token sequence, optionally with the encoder's node order:
/// `node_order[k]` is the input node that received index `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TokenSequence {
    pub tokens: Vec<Token>,
    pub node_order: Option<Vec<usize>>,
}

impl TokenSequence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Self { tokens, node_order: None }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Whitespace-separated text form, e.g. `BOS N0 L:C E:single N1 L:H EOS`.
    pub fn render(&self, vocab: &Vocab) -> String {
        let parts: Vec<String> = self.tokens.iter().map(|&t| render_token(t, vocab)).collect();
        parts.join(" ")
    }

    /// Parses the text form against a fixed vocabulary.
    pub fn parse(text: &str, vocab: &Vocab) -> Result<Self, CodecError> {
        parse_with(text, |kind, label, position| {
            let id = match kind {
                LabelKind::Node => vocab.node_id(label),
                LabelKind::Edge => vocab.edge_id(label),
            };
            id.ok_or_else(|| CodecError::UnknownLabel { position, label: label.to_string() })
        })
    }

    /// Parses the text form, adding unseen labels to `vocab`.
    pub fn parse_interning(text: &str, vocab: &mut Vocab) -> Result<Self, CodecError> {
        parse_with(text, |kind, label, _| {
            Ok(match kind {
                LabelKind::Node => vocab.intern_node(label),
                LabelKind::Edge => vocab.intern_edge(label),
            })
        })
    }
}

enum LabelKind {
    Node,
    Edge,
}

fn parse_with<F>(text: &str, mut label: F) -> Result<TokenSequence, CodecError>
where
    F: FnMut(LabelKind, &str, usize) -> Result<u32, CodecError>,
{
    let mut tokens = Vec::new();
    for (i, word) in text.split_whitespace().enumerate() {
        let position = i + 1;
        let token = match word {
            "BOS" => Token::Bos,
            "EOS" => Token::Eos,
            "SEP" => Token::Sep,
            "[" => Token::NbrOpen,
            "]" => Token::NbrClose,
            w => {
                if let Some(rest) = w.strip_prefix("L:") {
                    Token::NodeLabel(label(LabelKind::Node, rest, position)?)
                } else if let Some(rest) = w.strip_prefix("E:") {
                    Token::EdgeLabel(label(LabelKind::Edge, rest, position)?)
                } else if let Some(idx) = w.strip_prefix('N').and_then(|d| d.parse::<u32>().ok()) {
                    Token::Node(idx)
                } else {
                    return Err(CodecError::BadToken { position, text: w.to_string() });
                }
            }
        };
        tokens.push(token);
    }
    Ok(TokenSequence::new(tokens))
}

pub fn render_token(token: Token, vocab: &Vocab) -> String {
    match token {
        Token::Bos => "BOS".into(),
        Token::Eos => "EOS".into(),
        Token::Sep => "SEP".into(),
        Token::NbrOpen => "[".into(),
        Token::NbrClose => "]".into(),
        Token::Node(i) => format!("N{i}"),
        Token::NodeLabel(a) => match vocab.node_labels.get(a as usize) {
            Some(l) => format!("L:{l}"),
            None => format!("L:#{a}"),
        },
        Token::EdgeLabel(b) => match vocab.edge_labels.get(b as usize) {
            Some(l) => format!("E:{l}"),
            None => format!("E:#{b}"),
        },
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Bos => f.write_str("BOS"),
            Token::Eos => f.write_str("EOS"),
            Token::Sep => f.write_str("SEP"),
            Token::NbrOpen => f.write_str("["),
            Token::NbrClose => f.write_str("]"),
            Token::Node(i) => write!(f, "N{i}"),
            Token::NodeLabel(a) => write!(f, "L:#{a}"),
            Token::EdgeLabel(b) => write!(f, "E:#{b}"),
        }
    }
}

/// Types of every token: a node index is `NewNode` when it equals the number
/// of distinct indices seen before it, otherwise `Revisit`.
pub fn token_types(tokens: &[Token]) -> Vec<TokenType> {
    let mut distinct = 0u32;
    tokens
        .iter()
        .map(|&t| match t {
            Token::Node(i) if i == distinct => {
                distinct += 1;
                TokenType::NewNode
            }
            Token::Node(_) => TokenType::Revisit,
            Token::NodeLabel(_) => TokenType::NodeLabel,
            Token::EdgeLabel(_) => TokenType::EdgeLabel,
            _ => TokenType::Special,
        })
        .collect()
}

/// Type of the token at 0-based `position`.
pub fn classify_token(seq: &TokenSequence, position: usize) -> Result<TokenType, CodecError> {
    if position >= seq.len() {
        return Err(CodecError::OutOfRange { position, len: seq.len() });
    }
    Ok(token_types(&seq.tokens[..=position])[position])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab() -> Vocab {
        Vocab::new(["X"], ["e"])
    }

    #[test]
    fn text_form_is_stable() {
        let text = "BOS N0 L:X E:e N1 L:X E:e N2 L:X [ E:e N0 ] EOS";
        let seq = TokenSequence::parse(text, &vocab()).unwrap();
        assert_eq!(seq.len(), 14);
        assert_eq!(seq.render(&vocab()), text);
        assert_eq!(seq.tokens[9], Token::NbrOpen);
    }

    #[test]
    fn parse_errors_name_positions() {
        assert_eq!(
            TokenSequence::parse("BOS N0 L:Q EOS", &vocab()),
            Err(CodecError::UnknownLabel { position: 3, label: "Q".into() })
        );
        assert_eq!(
            TokenSequence::parse("BOS Nx", &vocab()),
            Err(CodecError::BadToken { position: 2, text: "Nx".into() })
        );
        let mut v = Vocab::default();
        let seq = TokenSequence::parse_interning("BOS N0 L:C E:single N1 L:H EOS", &mut v).unwrap();
        assert_eq!(v.node_labels, vec!["C", "H"]);
        assert_eq!(seq.tokens[5], Token::NodeLabel(1));
    }

    #[test]
    fn vocab_index_round_trip() {
        let tv = TokenVocab { max_nodes: 4, n_node_labels: 2, n_edge_labels: 3 };
        assert_eq!(tv.size(), 14);
        for i in 0..tv.size() {
            assert_eq!(tv.index(tv.token(i).unwrap()), Some(i));
        }
        assert_eq!(tv.index(Token::Node(4)), None);
        assert_eq!(tv.token(14), None);
    }

    #[test]
    fn classify_triangle() {
        let seq = TokenSequence::parse("BOS N0 L:X E:e N1 L:X E:e N2 L:X [ E:e N0 ] EOS", &vocab()).unwrap();
        assert_eq!(classify_token(&seq, 11).unwrap(), TokenType::Revisit);
        assert_eq!(classify_token(&seq, 7).unwrap(), TokenType::NewNode);
        assert_eq!(classify_token(&seq, 0).unwrap(), TokenType::Special);
        assert_eq!(classify_token(&seq, 2).unwrap(), TokenType::NodeLabel);
        assert_eq!(classify_token(&seq, 10).unwrap(), TokenType::EdgeLabel);
        assert!(classify_token(&seq, 14).is_err());
        let sep = TokenSequence::parse("BOS N0 L:X SEP N1 L:X EOS", &vocab()).unwrap();
        assert_eq!(classify_token(&sep, 3).unwrap(), TokenType::Special);
    }
}

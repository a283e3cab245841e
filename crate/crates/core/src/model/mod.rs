//! Autoregressive scorers over token sequences.

mod generate;
mod ngram;
mod nll;
mod oracle;

pub use generate::{generate, Generated};
pub use ngram::{build_corpus, train_ngram, NgramConfig, NgramModel, MODEL_VERSION};
pub use nll::{ingest_nll, ingest_nll_path, NllRecord, NLL_COLUMNS};
pub use oracle::{uniform_graph_oracle, UniformGraphOracle};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{token_types, CodecError, DecodeError, GrammarState, Token, TokenSequence, TokenType, TokenVocab};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("n-gram order must be between 1 and {max}, got {order}")]
    BadOrder { order: usize, max: usize },
    #[error("smoothing must be positive and finite, got {0}")]
    BadSmoothing(f64),
    #[error("token {token} at position {position} is outside the model vocabulary")]
    TokenOutOfVocab { position: usize, token: String },
    #[error("sequence must start with BOS")]
    MissingBos,
    #[error("scorer exposes sequence NLL only, not per-token distributions")]
    NoConditionals,
    #[error("graph is not in the oracle's graph set")]
    UnknownGraph,
    #[error("max_len must be at least 4, got {0}")]
    BadMaxLen(usize),
    #[error("temperature must be finite and >= 0, got {0}")]
    BadTemperature(f64),
    #[error("no decodable sequence within max_len {0}")]
    Discarded(usize),
    #[error("model file version {found} is not supported (expected {expected})")]
    Version { found: u32, expected: u32 },
    #[error("model file: {0}")]
    Format(String),
    #[error("line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("line {line}: duplicate record for graph {graph_id:?} permutation {perm_index}")]
    DuplicateRecord { line: u64, graph_id: String, perm_index: u64 },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScorerInfo {
    pub kind: String,
    pub strategy: Option<String>,
    pub order: Option<usize>,
}

/// Next-token model over a [`TokenVocab`] index space.
pub trait Scorer: Send + Sync {
    fn info(&self) -> ScorerInfo;

    fn token_vocab(&self) -> TokenVocab;

    /// Distribution over token indices given a prefix starting with BOS, or
    /// `None` for scorers that only assign whole-sequence likelihoods.
    fn conditional(&self, prefix: &[Token]) -> Option<Vec<f64>>;

    /// Total NLL (natural log) of a sequence; BOS is not scored.
    fn sequence_nll(&self, seq: &TokenSequence) -> Result<f64, ModelError> {
        Ok(score(self, seq, Convention::Unmasked)?.total_nll)
    }
}

/// The flat distribution over the whole token alphabet.
#[derive(Debug, Clone, Copy)]
pub struct UniformScorer {
    pub vocab: TokenVocab,
}

impl Scorer for UniformScorer {
    fn info(&self) -> ScorerInfo {
        ScorerInfo { kind: "uniform".into(), ..Default::default() }
    }

    fn token_vocab(&self) -> TokenVocab {
        self.vocab
    }

    fn conditional(&self, _prefix: &[Token]) -> Option<Vec<f64>> {
        let v = self.vocab.size();
        Some(vec![1.0 / v as f64; v])
    }
}

/// Which distribution teacher-forced scoring reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// The raw model conditional.
    Unmasked,
    /// The conditional restricted to grammatical continuations and renormalized.
    Masked,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TokenScore {
    pub nll: f64,
    /// Top-1 probability.
    pub confidence: f64,
    /// Whether the top-1 token is the target.
    pub correct: bool,
    pub token_type: TokenType,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredSequence {
    pub convention: Convention,
    /// One entry per token after BOS.
    pub per_token: Vec<TokenScore>,
    pub total_nll: f64,
    pub n_tokens: usize,
}

impl ScoredSequence {
    pub fn nll_per_token(&self) -> f64 {
        self.total_nll / self.n_tokens as f64
    }
}

/// Restricts `dist` to `mask` and renormalizes. Falls back to uniform over
/// the legal set when the model gives it no mass.
pub fn apply_mask(dist: &[f64], mask: &[bool]) -> Vec<f64> {
    let z: f64 = dist.iter().zip(mask).filter(|(_, &m)| m).map(|(p, _)| p).sum();
    if z > 0.0 {
        dist.iter().zip(mask).map(|(&p, &m)| if m { p / z } else { 0.0 }).collect()
    } else {
        let k = mask.iter().filter(|&&m| m).count() as f64;
        mask.iter().map(|&m| if m { 1.0 / k } else { 0.0 }).collect()
    }
}

fn top1(dist: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &p) in dist.iter().enumerate() {
        if p > best.1 {
            best = (i, p);
        }
    }
    best
}

/// Teacher-forced scoring.
pub fn score<S: Scorer + ?Sized>(
    scorer: &S,
    seq: &TokenSequence,
    convention: Convention,
) -> Result<ScoredSequence, ModelError> {
    let tv = scorer.token_vocab();
    let tokens = &seq.tokens;
    if tokens.first() != Some(&Token::Bos) {
        return Err(ModelError::MissingBos);
    }
    let types = token_types(tokens);
    let mut grammar = match convention {
        Convention::Masked => Some(GrammarState::from_prefix(&tokens[..1], tv)?),
        Convention::Unmasked => None,
    };
    let mut per_token = Vec::with_capacity(tokens.len() - 1);
    let mut total = 0.0;
    for t in 1..tokens.len() {
        let target = tv
            .index(tokens[t])
            .ok_or_else(|| ModelError::TokenOutOfVocab { position: t + 1, token: tokens[t].to_string() })?;
        let mut dist = scorer.conditional(&tokens[..t]).ok_or(ModelError::NoConditionals)?;
        if let Some(g) = grammar.as_mut() {
            dist = apply_mask(&dist, &g.legal_mask());
            g.push(tokens[t])?;
        }
        let nll = -dist[target].ln();
        let (arg, confidence) = top1(&dist);
        total += nll;
        per_token.push(TokenScore { nll, confidence, correct: arg == target, token_type: types[t] });
    }
    Ok(ScoredSequence { convention, n_tokens: per_token.len(), per_token, total_nll: total })
}

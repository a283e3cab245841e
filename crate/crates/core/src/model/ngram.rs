//! Smoothed n-gram baseline.
//!
//! The order-0 distribution is add-k smoothed. Each longer context that was
//! seen in training keeps relative frequencies for its observed successors
//! and gives every other token `backoff` times the next-shorter
//! distribution; the result is renormalized. An unseen context uses the
//! longest seen suffix.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ModelError, Scorer, ScorerInfo};
use crate::codec::{encode_with_rng, Token, TokenSequence, TokenVocab};
use crate::graph::{LabeledGraph, Vocab};
use crate::par;
use crate::rng::stream;
use crate::strategy::Strategy;

pub const MODEL_VERSION: u32 = 1;
const MAX_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NgramConfig {
    pub order: usize,
    pub smoothing: f64,
    pub backoff: f64,
}

impl Default for NgramConfig {
    fn default() -> Self {
        Self { order: 4, smoothing: 0.1, backoff: 0.4 }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Successors {
    total: u64,
    next: Vec<(u32, u64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NgramModel {
    config: NgramConfig,
    vocab: TokenVocab,
    labels: Vocab,
    strategy: Option<Strategy>,
    unigram: Vec<u64>,
    /// `contexts[k - 1]` holds contexts of length `k`.
    contexts: Vec<HashMap<u128, Successors>>,
}

fn pack(ctx: &[u32]) -> u128 {
    ctx.iter().enumerate().fold(ctx.len() as u128, |key, (i, &t)| key | (u128::from(t) << (8 + 16 * i)))
}

fn validate(config: &NgramConfig) -> Result<(), ModelError> {
    if config.order == 0 || config.order > MAX_ORDER {
        return Err(ModelError::BadOrder { order: config.order, max: MAX_ORDER });
    }
    if !(config.smoothing.is_finite() && config.smoothing > 0.0) {
        return Err(ModelError::BadSmoothing(config.smoothing));
    }
    Ok(())
}

fn indices(seq: &TokenSequence, vocab: &TokenVocab) -> Result<Vec<u32>, ModelError> {
    seq.tokens
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            vocab
                .index(t)
                .map(|x| x as u32)
                .ok_or_else(|| ModelError::TokenOutOfVocab { position: i + 1, token: t.to_string() })
        })
        .collect()
}

/// Counts n-grams over `corpus`. Every sequence must start with BOS.
pub fn train_ngram(
    corpus: &[TokenSequence],
    vocab: TokenVocab,
    labels: &Vocab,
    config: NgramConfig,
    strategy: Option<Strategy>,
) -> Result<NgramModel, ModelError> {
    validate(&config)?;
    if corpus.is_empty() {
        return Err(ModelError::EmptyCorpus);
    }
    if vocab.size() > u16::MAX as usize {
        return Err(ModelError::Format(format!("token vocabulary of {} is too large", vocab.size())));
    }
    let mut unigram = vec![0u64; vocab.size()];
    let mut raw: Vec<HashMap<u128, HashMap<u32, u64>>> = vec![HashMap::new(); config.order - 1];
    for seq in corpus {
        if seq.tokens.first() != Some(&Token::Bos) {
            return Err(ModelError::MissingBos);
        }
        let ids = indices(seq, &vocab)?;
        for t in 1..ids.len() {
            unigram[ids[t] as usize] += 1;
            for k in 1..=(config.order - 1).min(t) {
                *raw[k - 1].entry(pack(&ids[t - k..t])).or_default().entry(ids[t]).or_default() += 1;
            }
        }
    }
    let contexts = raw
        .into_iter()
        .map(|level| {
            level
                .into_iter()
                .map(|(key, next)| {
                    let mut next: Vec<(u32, u64)> = next.into_iter().collect();
                    next.sort_unstable();
                    (key, Successors { total: next.iter().map(|&(_, c)| c).sum(), next })
                })
                .collect()
        })
        .collect();
    Ok(NgramModel { config, vocab, labels: labels.clone(), strategy, unigram, contexts })
}

/// Training sequences for `epochs` passes over `graphs`, with a fresh
/// linearization of graph `i` in epoch `e` drawn from stream `(seed, i, e)`.
pub fn build_corpus(
    graphs: &[LabeledGraph],
    strategy: Strategy,
    epochs: usize,
    seed: u64,
    max_nodes: usize,
) -> Result<Vec<TokenSequence>, ModelError> {
    let mut out = Vec::with_capacity(graphs.len() * epochs);
    for e in 0..epochs {
        let batch = par::try_map(graphs, |i, g| {
            encode_with_rng(g, strategy, &mut stream(seed, i as u64, e as u64), max_nodes)
        })?;
        out.extend(batch);
    }
    Ok(out)
}

fn normalize(v: &mut [f64]) {
    let z: f64 = v.iter().sum();
    v.iter_mut().for_each(|p| *p /= z);
}

impl NgramModel {
    pub fn config(&self) -> NgramConfig {
        self.config
    }

    pub fn labels(&self) -> &Vocab {
        &self.labels
    }

    pub fn strategy(&self) -> Option<Strategy> {
        self.strategy
    }

    fn unigram_dist(&self) -> Vec<f64> {
        let n: u64 = self.unigram.iter().sum();
        let k = self.config.smoothing;
        let denom = n as f64 + k * self.unigram.len() as f64;
        self.unigram.iter().map(|&c| (c as f64 + k) / denom).collect()
    }

    /// Number of trailing prefix tokens the model conditions on.
    pub fn context_used(&self, prefix: &[Token]) -> usize {
        let ids: Vec<u32> = prefix.iter().filter_map(|&t| self.vocab.index(t).map(|x| x as u32)).collect();
        if ids.len() != prefix.len() {
            return 0;
        }
        (1..=(self.config.order - 1).min(ids.len()))
            .take_while(|&k| self.contexts[k - 1].contains_key(&pack(&ids[ids.len() - k..])))
            .last()
            .unwrap_or(0)
    }

    pub fn save<W: Write>(&self, w: W) -> Result<(), ModelError> {
        let mut contexts: Vec<ContextRecord> = Vec::new();
        for (k, level) in self.contexts.iter().enumerate() {
            for (&key, succ) in level {
                let context = (0..=k).map(|i| ((key >> (8 + 16 * i)) & 0xFFFF) as u32).collect();
                contexts.push(ContextRecord { context, next: succ.next.clone() });
            }
        }
        contexts.sort_unstable_by(|a, b| (a.context.len(), &a.context).cmp(&(b.context.len(), &b.context)));
        let file = ModelFile {
            version: MODEL_VERSION,
            kind: "ngram".into(),
            config: self.config,
            token_vocab: self.vocab,
            labels: self.labels.clone(),
            strategy: self.strategy,
            unigram: self.unigram.clone(),
            contexts,
        };
        serde_json::to_writer(w, &file).map_err(|e| ModelError::Format(e.to_string()))
    }

    pub fn load<R: Read>(r: R) -> Result<Self, ModelError> {
        let value: serde_json::Value = serde_json::from_reader(r).map_err(|e| ModelError::Format(e.to_string()))?;
        let version = value
            .get("version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| ModelError::Format("missing version".into()))?;
        if version != u64::from(MODEL_VERSION) {
            return Err(ModelError::Version { found: version as u32, expected: MODEL_VERSION });
        }
        let file: ModelFile = serde_json::from_value(value).map_err(|e| ModelError::Format(e.to_string()))?;
        validate(&file.config)?;
        if file.unigram.len() != file.token_vocab.size() {
            return Err(ModelError::Format("unigram table does not match the token vocabulary".into()));
        }
        let mut contexts = vec![HashMap::new(); file.config.order - 1];
        for rec in file.contexts {
            let k = rec.context.len();
            if k == 0 || k >= file.config.order {
                return Err(ModelError::Format(format!("context of length {k} for order {}", file.config.order)));
            }
            let total = rec.next.iter().map(|&(_, c)| c).sum();
            contexts[k - 1].insert(pack(&rec.context), Successors { total, next: rec.next });
        }
        Ok(Self {
            config: file.config,
            vocab: file.token_vocab,
            labels: file.labels,
            strategy: file.strategy,
            unigram: file.unigram,
            contexts,
        })
    }

    pub fn save_to_path(&self, path: &Path) -> Result<(), ModelError> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.save(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load_from_path(path: &Path) -> Result<Self, ModelError> {
        Self::load(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

#[derive(Serialize, Deserialize)]
struct ContextRecord {
    context: Vec<u32>,
    next: Vec<(u32, u64)>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    kind: String,
    config: NgramConfig,
    token_vocab: TokenVocab,
    labels: Vocab,
    strategy: Option<Strategy>,
    unigram: Vec<u64>,
    contexts: Vec<ContextRecord>,
}

impl Scorer for NgramModel {
    fn info(&self) -> ScorerInfo {
        ScorerInfo {
            kind: "ngram".into(),
            strategy: self.strategy.map(|s| s.name().to_string()),
            order: Some(self.config.order),
        }
    }

    fn token_vocab(&self) -> TokenVocab {
        self.vocab
    }

    fn conditional(&self, prefix: &[Token]) -> Option<Vec<f64>> {
        let mut dist = self.unigram_dist();
        let mut ids = Vec::with_capacity(self.config.order);
        for &t in prefix.iter().rev().take(self.config.order - 1) {
            match self.vocab.index(t) {
                Some(i) => ids.push(i as u32),
                None => break,
            }
        }
        ids.reverse();
        for k in 1..=ids.len() {
            let Some(succ) = self.contexts[k - 1].get(&pack(&ids[ids.len() - k..])) else {
                break;
            };
            dist.iter_mut().for_each(|p| *p *= self.config.backoff);
            for &(t, c) in &succ.next {
                dist[t as usize] = c as f64 / succ.total as f64;
            }
            normalize(&mut dist);
        }
        Some(dist)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{encode, enumerate_linearizations, DEFAULT_MAX_NODES};
    use crate::graph::testing::*;
    use crate::model::{score, Convention};
    use rand::Rng;

    fn tv() -> TokenVocab {
        TokenVocab::new(8, &Vocab::new(["X"], ["e"]))
    }

    fn labels() -> Vocab {
        Vocab::new(["X"], ["e"])
    }

    #[test]
    fn unigram_formula() {
        let seq = encode(&path(3), Strategy::MinDegree, 0, DEFAULT_MAX_NODES).unwrap();
        let cfg = NgramConfig { order: 1, smoothing: 0.5, backoff: 0.4 };
        let m = train_ngram(&[seq.clone(), seq], tv(), &labels(), cfg, None).unwrap();
        let d = m.conditional(&[Token::Bos, Token::Node(0)]).unwrap();
        // 9 scored tokens per sequence, twice; L:X occurs 3 times per sequence
        let v = tv().size() as f64;
        let lx = tv().index(Token::NodeLabel(0)).unwrap();
        assert!((d[lx] - (6.0 + 0.5) / (18.0 + 0.5 * v)).abs() < 1e-12);
        let unseen = tv().index(Token::Node(7)).unwrap();
        assert!((d[unseen] - 0.5 / (18.0 + 0.5 * v)).abs() < 1e-12);
    }

    #[test]
    fn conditionals_normalize() {
        let graphs: Vec<_> = (3..8).map(complete).chain((2..8).map(path)).collect();
        let corpus = build_corpus(&graphs, Strategy::Random, 3, 1, 8).unwrap();
        let m = train_ngram(&corpus, tv(), &labels(), NgramConfig::default(), None).unwrap();
        let mut rng = stream(2, 0, 0);
        for _ in 0..1000 {
            let len = rng.gen_range(0..6);
            let mut prefix = vec![Token::Bos];
            for _ in 0..len {
                prefix.push(tv().token(rng.gen_range(0..tv().size())).unwrap());
            }
            let d = m.conditional(&prefix).unwrap();
            let z: f64 = d.iter().sum();
            assert!((z - 1.0).abs() < 1e-9);
            assert!(d.iter().all(|&p| p > 0.0));
        }
    }

    #[test]
    fn unseen_context_backs_off() {
        let seq = encode(&complete(3), Strategy::Random, 0, DEFAULT_MAX_NODES).unwrap();
        let m = train_ngram(&[seq], tv(), &labels(), NgramConfig::default(), None).unwrap();
        // only the final "E:e" has been seen as a context
        let probe = [Token::Bos, Token::Node(5), Token::Sep, Token::EdgeLabel(0)];
        assert_eq!(m.context_used(&probe), 1);
        assert_eq!(m.conditional(&probe), m.conditional(&[Token::Bos, Token::EdgeLabel(0)]));
        // a completely unseen final token gives the smoothed unigram
        let probe = [Token::Bos, Token::Node(7)];
        assert_eq!(m.context_used(&probe), 0);
        assert_eq!(m.conditional(&probe).unwrap(), m.unigram_dist());
    }

    #[test]
    fn memorized_sequence_scores_best() {
        let target = encode(&path(3), Strategy::MinDegree, 0, DEFAULT_MAX_NODES).unwrap();
        let corpus = vec![target.clone(); 5];
        let m = train_ngram(&corpus, tv(), &labels(), NgramConfig::default(), None).unwrap();
        let own = score(&m, &target, Convention::Unmasked).unwrap().nll_per_token();
        let graphs = [uniform(3, &[]), uniform(3, &[(0, 1)]), path(3), complete(3)];
        let mut compared = 0;
        for g in &graphs {
            for s in enumerate_linearizations(g, 1000).unwrap() {
                if s.tokens == target.tokens {
                    continue;
                }
                compared += 1;
                assert!(score(&m, &s, Convention::Unmasked).unwrap().nll_per_token() > own);
            }
        }
        assert!(compared > 10);
    }

    #[test]
    fn save_load_round_trip() {
        let corpus = build_corpus(&[complete(4), path(5)], Strategy::Anchor, 2, 3, 8).unwrap();
        let m = train_ngram(&corpus, tv(), &labels(), NgramConfig::default(), Some(Strategy::Anchor)).unwrap();
        let mut buf = Vec::new();
        m.save(&mut buf).unwrap();
        let back = NgramModel::load(buf.as_slice()).unwrap();
        assert_eq!(back, m);
        let mut again = Vec::new();
        back.save(&mut again).unwrap();
        assert_eq!(buf, again);
        let bumped = String::from_utf8(buf).unwrap().replacen("\"version\":1", "\"version\":9", 1);
        assert!(matches!(NgramModel::load(bumped.as_bytes()), Err(ModelError::Version { found: 9, .. })));
    }

    #[test]
    fn training_errors() {
        assert!(matches!(
            train_ngram(&[], tv(), &labels(), NgramConfig::default(), None),
            Err(ModelError::EmptyCorpus)
        ));
        let seq = encode(&path(3), Strategy::Random, 0, 8).unwrap();
        let bad = NgramConfig { order: 0, ..Default::default() };
        assert!(matches!(
            train_ngram(std::slice::from_ref(&seq), tv(), &labels(), bad, None),
            Err(ModelError::BadOrder { .. })
        ));
        let bad = NgramConfig { smoothing: 0.0, ..Default::default() };
        assert!(matches!(train_ngram(&[seq], tv(), &labels(), bad, None), Err(ModelError::BadSmoothing(_))));
    }
}

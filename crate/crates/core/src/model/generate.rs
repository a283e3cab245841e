use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{apply_mask, ModelError, Scorer};
use crate::codec::{GrammarState, Token, TokenSequence};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generated {
    pub tokens: Vec<Token>,
    /// Generation NLL: the sampled trajectory under the masked, renormalized
    /// model at temperature 1, whatever temperature was used for sampling.
    pub nll: f64,
    /// Set when `max_len` forced an EOS the model did not sample.
    pub force_closed: bool,
}

impl Generated {
    pub fn sequence(&self) -> TokenSequence {
        TokenSequence::new(self.tokens.clone())
    }
}

fn pick<R: Rng + ?Sized>(probs: &[f64], temperature: f64, rng: &mut R) -> usize {
    if temperature == 0.0 {
        let mut best = 0;
        for (i, &p) in probs.iter().enumerate() {
            if p > probs[best] {
                best = i;
            }
        }
        return best;
    }
    let logs: Vec<f64> =
        probs.iter().map(|&p| if p > 0.0 { p.ln() / temperature } else { f64::NEG_INFINITY }).collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logs.iter().map(|&l| (l - top).exp()).collect();
    WeightedIndex::new(&weights).expect("at least one legal token").sample(rng)
}

/// Samples one sequence under the grammar mask. When `max_len` is reached
/// the sequence is cut back to the last point where EOS was legal and
/// closed there.
pub fn generate<S: Scorer + ?Sized, R: Rng + ?Sized>(
    scorer: &S,
    max_len: usize,
    temperature: f64,
    rng: &mut R,
) -> Result<Generated, ModelError> {
    if max_len < 4 {
        return Err(ModelError::BadMaxLen(max_len));
    }
    if !(temperature.is_finite() && temperature >= 0.0) {
        return Err(ModelError::BadTemperature(temperature));
    }
    let tv = scorer.token_vocab();
    let eos = tv.index(Token::Eos).expect("EOS is always in the vocabulary");
    let mut tokens = vec![Token::Bos];
    let mut state = GrammarState::from_prefix(&tokens, tv)?;
    let mut steps: Vec<f64> = Vec::new();
    // (prefix length, EOS contribution) at the latest segment boundary
    let mut boundary: Option<(usize, f64)> = None;
    while !state.is_finished() {
        let dist = scorer.conditional(&tokens).ok_or(ModelError::NoConditionals)?;
        let masked = apply_mask(&dist, &state.legal_mask());
        if state.at_segment_boundary() {
            boundary = Some((tokens.len(), -masked[eos].ln()));
        }
        if tokens.len() + 1 >= max_len {
            let (len, eos_nll) = boundary.ok_or(ModelError::Discarded(max_len))?;
            tokens.truncate(len);
            steps.truncate(len - 1);
            tokens.push(Token::Eos);
            steps.push(eos_nll);
            return Ok(Generated { tokens, nll: steps.iter().sum(), force_closed: true });
        }
        let i = pick(&masked, temperature, rng);
        let t = tv.token(i).expect("index from the vocabulary");
        state.push(t)?;
        tokens.push(t);
        steps.push(-masked[i].ln());
    }
    Ok(Generated { tokens, nll: steps.iter().sum(), force_closed: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{decode, encode, sequence_stats, TokenVocab};
    use crate::graph::testing::*;
    use crate::graph::Vocab;
    use crate::model::{build_corpus, score, train_ngram, Convention, NgramConfig, UniformScorer};
    use crate::rng::stream;
    use crate::strategy::Strategy;

    fn labels() -> Vocab {
        Vocab::new(["X"], ["e"])
    }

    #[test]
    fn uniform_generations_decode() {
        let u = UniformScorer { vocab: TokenVocab::new(10, &labels()) };
        for seed in 0..200 {
            let g = generate(&u, 400, 1.0, &mut stream(seed, 0, 0)).unwrap();
            let seq = g.sequence();
            decode(&seq, &labels()).unwrap();
            assert!(seq.len() <= 400);
            assert_eq!(sequence_stats(&seq).unwrap().predicted_length(), seq.len());
            let rescored = score(&u, &seq, Convention::Masked).unwrap().total_nll;
            assert!((rescored - g.nll).abs() < 1e-9, "{rescored} vs {}", g.nll);
        }
    }

    #[test]
    fn force_close_cuts_at_a_boundary() {
        let u = UniformScorer { vocab: TokenVocab::new(10, &labels()) };
        let mut closed = 0;
        for seed in 0..100 {
            let g = generate(&u, 12, 1.0, &mut stream(seed, 1, 0)).unwrap();
            assert!(g.tokens.len() <= 12);
            decode(&g.sequence(), &labels()).unwrap();
            closed += usize::from(g.force_closed);
            let rescored = score(&u, &g.sequence(), Convention::Masked).unwrap().total_nll;
            assert!((rescored - g.nll).abs() < 1e-9);
        }
        assert!(closed > 0);
        assert!(matches!(generate(&u, 3, 1.0, &mut stream(0, 0, 0)), Err(ModelError::BadMaxLen(3))));
    }

    #[test]
    fn greedy_reproduces_the_memorized_sequence() {
        // with order 4 every context of a path sequence has a single successor
        let target = encode(&path(5), Strategy::MinDegree, 0, 8).unwrap();
        let tv = TokenVocab::new(8, &labels());
        let m = train_ngram(&vec![target.clone(); 3], tv, &labels(), NgramConfig::default(), None).unwrap();
        let g = generate(&m, 200, 0.0, &mut stream(0, 0, 0)).unwrap();
        assert_eq!(g.tokens, target.tokens);
        assert!(!g.force_closed);
    }

    #[test]
    fn trained_generations_decode() {
        let graphs: Vec<_> = (3..9).map(complete).chain((2..9).map(path)).collect();
        let tv = TokenVocab::new(12, &labels());
        let corpus = build_corpus(&graphs, Strategy::Random, 4, 5, 12).unwrap();
        let m = train_ngram(&corpus, tv, &labels(), NgramConfig::default(), None).unwrap();
        for seed in 0..100 {
            let g = generate(&m, 300, 1.0, &mut stream(seed, 2, 0)).unwrap();
            decode(&g.sequence(), &labels()).unwrap();
        }
    }
}

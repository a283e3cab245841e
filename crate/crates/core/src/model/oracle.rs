use std::collections::hash_map::Entry;
use std::collections::HashMap;

use super::{ModelError, Scorer, ScorerInfo};
use crate::codec::{decode, enumerate_linearizations, Token, TokenSequence, TokenVocab};
use crate::graph::{canonical_certificate, CanonicalCertificate, LabeledGraph, Vocab};

/// Scores a sequence as `log |graphs| + log |preimage of its graph|`, so
/// every linearization of a graph gets the same likelihood.
#[derive(Debug, Clone)]
pub struct UniformGraphOracle {
    labels: Vocab,
    vocab: TokenVocab,
    n_graphs: usize,
    preimage: HashMap<CanonicalCertificate, usize>,
}

pub fn uniform_graph_oracle(graphs: &[LabeledGraph], limit: usize) -> Result<UniformGraphOracle, ModelError> {
    let mut labels = Vocab::default();
    let graphs: Vec<LabeledGraph> = graphs.iter().map(|g| g.with_vocab(&mut labels)).collect();
    let mut preimage = HashMap::new();
    let mut max_n = 1;
    for g in &graphs {
        max_n = max_n.max(g.n());
        let cert = canonical_certificate(g);
        if let Entry::Vacant(slot) = preimage.entry(cert) {
            slot.insert(enumerate_linearizations(g, limit)?.len());
        }
    }
    Ok(UniformGraphOracle { vocab: TokenVocab::new(max_n, &labels), labels, n_graphs: graphs.len(), preimage })
}

impl UniformGraphOracle {
    pub fn labels(&self) -> &Vocab {
        &self.labels
    }

    pub fn preimage_size(&self, g: &LabeledGraph) -> Option<usize> {
        self.preimage.get(&canonical_certificate(g)).copied()
    }
}

impl Scorer for UniformGraphOracle {
    fn info(&self) -> ScorerInfo {
        ScorerInfo { kind: "uniform-graph-oracle".into(), ..Default::default() }
    }

    fn token_vocab(&self) -> TokenVocab {
        self.vocab
    }

    fn conditional(&self, _prefix: &[Token]) -> Option<Vec<f64>> {
        None
    }

    /// Sequences use this oracle's label ids, i.e. those of [`Self::labels`].
    fn sequence_nll(&self, seq: &TokenSequence) -> Result<f64, ModelError> {
        let g = decode(seq, &self.labels)?;
        let count = self.preimage_size(&g).ok_or(ModelError::UnknownGraph)?;
        Ok((self.n_graphs as f64).ln() + (count as f64).ln())
    }
}

//! Experiment-level evaluations built from the metric primitives.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{
    ece_by_token_type, ece_of_scored, linearization_uncertainty, roc_auc, stability, LuResult, MetricsError,
    ValencyTable, DEFAULT_BINS,
};
use crate::codec::{decode, encode_with_rng, sequence_stats, CodecError, Token, TokenSequence};
use crate::graph::{LabeledGraph, Vocab};
use crate::model::{generate, score, Convention, ModelError, Scorer};
use crate::par;
use crate::rng::{derive_seed, stream};
use crate::strategy::Strategy;

pub const SWEEP_KS: [usize; 5] = [2, 4, 8, 16, 32];

/// Linearization `p` of graph `graph_index` draws from stream
/// `(seed, graph_index, p)`.
pub fn encode_k(
    g: &LabeledGraph,
    strategy: Strategy,
    seed: u64,
    graph_index: usize,
    k: usize,
    max_nodes: usize,
) -> Result<Vec<TokenSequence>, CodecError> {
    (0..k).map(|p| encode_with_rng(g, strategy, &mut stream(seed, graph_index as u64, p as u64), max_nodes)).collect()
}

/// Seed for evaluation encodings under `strategy`, shared by every scorer so
/// that grid rows see identical draws.
fn eval_seed(seed: u64, strategy: Strategy) -> u64 {
    derive_seed(seed, 0x5e40 + strategy as u64)
}

/// LU of `scorer` on K linearizations of each graph.
pub fn per_graph_lu<S: Scorer + ?Sized>(
    scorer: &S,
    graphs: &[LabeledGraph],
    strategy: Strategy,
    k: usize,
    seed: u64,
    max_nodes: usize,
) -> Result<Vec<LuResult>, MetricsError> {
    par::try_map(graphs, |i, g| {
        let seqs = encode_k(g, strategy, seed, i, k, max_nodes).map_err(ModelError::from)?;
        let nlls = seqs.iter().map(|s| scorer.sequence_nll(s)).collect::<Result<Vec<f64>, _>>()?;
        linearization_uncertainty(&nlls)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCell {
    pub train: String,
    pub eval: Strategy,
    pub nll_per_token: f64,
    /// Mean over graphs of per-graph LU.
    pub lu: f64,
    pub ece: f64,
    pub ece_by_type: BTreeMap<String, f64>,
    pub tok_per_graph: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyRow {
    pub strategy: String,
    pub nll_per_token_native: f64,
    pub nll_per_token_random: f64,
    pub lu_native: f64,
    pub lu_random: f64,
    pub ece_native: f64,
    pub ece_random: f64,
    pub tok_per_graph: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossGrid {
    pub k: usize,
    pub n_graphs: usize,
    pub cells: Vec<CrossCell>,
}

impl CrossGrid {
    pub fn cell(&self, train: &str, eval: Strategy) -> Option<&CrossCell> {
        self.cells.iter().find(|c| c.train == train && c.eval == eval)
    }

    /// Native versus random-order evaluation for each row whose name is a
    /// strategy.
    pub fn strategy_rows(&self) -> Vec<StrategyRow> {
        let mut trains: Vec<&str> = self.cells.iter().map(|c| c.train.as_str()).collect();
        trains.dedup();
        trains
            .into_iter()
            .filter_map(|t| {
                let native = self.cell(t, t.parse().ok()?)?;
                let random = self.cell(t, Strategy::Random)?;
                Some(StrategyRow {
                    strategy: t.to_string(),
                    nll_per_token_native: native.nll_per_token,
                    nll_per_token_random: random.nll_per_token,
                    lu_native: native.lu,
                    lu_random: random.lu,
                    ece_native: native.ece,
                    ece_random: random.ece,
                    tok_per_graph: native.tok_per_graph,
                })
            })
            .collect()
    }
}

/// Scores every (scorer, evaluation strategy) pair on K linearizations of each
/// test graph. Scoring is teacher-forced and unmasked.
pub fn cross_eval(
    scorers: &[(&str, &dyn Scorer)],
    eval_strategies: &[Strategy],
    graphs: &[LabeledGraph],
    k: usize,
    seed: u64,
    max_nodes: usize,
) -> Result<CrossGrid, MetricsError> {
    let Some((_, first)) = scorers.first() else {
        return Err(MetricsError::Empty);
    };
    if scorers.iter().any(|(_, s)| s.token_vocab() != first.token_vocab()) {
        return Err(MetricsError::VocabMismatch);
    }
    let mut cells = Vec::new();
    for &eval in eval_strategies {
        let encodings = par::try_map(graphs, |i, g| encode_k(g, eval, eval_seed(seed, eval), i, k, max_nodes))
            .map_err(ModelError::from)?;
        for &(name, scorer) in scorers {
            let scored: Vec<Vec<_>> = par::try_map(&encodings, |_, seqs| {
                seqs.iter().map(|s| score(scorer, s, Convention::Unmasked)).collect::<Result<Vec<_>, _>>()
            })?;
            let lus = scored
                .iter()
                .map(|per| {
                    linearization_uncertainty(&per.iter().map(|s| s.total_nll).collect::<Vec<_>>()).map(|r| r.lu)
                })
                .collect::<Result<Vec<f64>, _>>()?;
            let flat: Vec<_> = scored.into_iter().flatten().collect();
            let total_nll: f64 = flat.iter().map(|s| s.total_nll).sum();
            let total_tokens: usize = flat.iter().map(|s| s.n_tokens).sum();
            let ece = ece_of_scored(&flat, DEFAULT_BINS)?.ece;
            let ece_by_type = ece_by_token_type(&flat, DEFAULT_BINS)?
                .into_iter()
                .map(|(t, r)| (t.name().to_string(), r.ece))
                .collect();
            cells.push(CrossCell {
                train: name.to_string(),
                eval,
                nll_per_token: total_nll / total_tokens as f64,
                lu: lus.iter().sum::<f64>() / lus.len() as f64,
                ece,
                ece_by_type,
                // BOS is not scored but is part of the sequence
                tok_per_graph: (total_tokens + flat.len()) as f64 / flat.len() as f64,
            });
        }
    }
    cells.sort_by(|a, b| {
        let rank = |name: &str| scorers.iter().position(|(n, _)| *n == name);
        (rank(&a.train), a.eval).cmp(&(rank(&b.train), b.eval))
    });
    Ok(CrossGrid { k, n_graphs: graphs.len(), cells })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessedGeneration {
    pub gen_tokens: usize,
    pub resamp_tokens: f64,
    /// Masked NLL of the generated trajectory.
    pub gen_nll: f64,
    /// Mean unmasked NLL over the K re-linearizations.
    pub resamp_nll: f64,
    /// Mean masked NLL over the K re-linearizations, when the scorer exposes
    /// per-token distributions.
    pub resamp_nll_masked: Option<f64>,
    pub lu: f64,
    pub force_closed: bool,
    /// Valency stability, when the labels are chemical.
    pub mol_stable: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfAssessment {
    pub strategy: Strategy,
    pub k: usize,
    pub rows: Vec<AssessedGeneration>,
    pub gen_tokens: f64,
    pub resamp_tokens: f64,
    pub gen_nll: f64,
    pub resamp_nll: f64,
    pub lu: f64,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

/// Compares each generated trajectory with K native re-linearizations of
/// its decoded graph. `generations` holds (sequence, generation NLL,
/// force-closed flag).
pub fn assess_generations<S: Scorer + ?Sized>(
    scorer: &S,
    labels: &Vocab,
    generations: &[(TokenSequence, f64, bool)],
    strategy: Strategy,
    k: usize,
    seed: u64,
    max_nodes: usize,
) -> Result<SelfAssessment, MetricsError> {
    if k < 2 {
        return Err(MetricsError::TooFew { need: 2, got: k });
    }
    let table = ValencyTable::default();
    let rows = par::try_map(generations, |i, (seq, gen_nll, force_closed)| {
        let g = decode(seq, labels).map_err(ModelError::from)?;
        let resampled = encode_k(&g, strategy, seed, i, k, max_nodes).map_err(ModelError::from)?;
        let nlls = resampled.iter().map(|s| scorer.sequence_nll(s)).collect::<Result<Vec<f64>, _>>()?;
        let masked = match scorer.conditional(&[Token::Bos]) {
            Some(_) => Some(mean(
                resampled
                    .iter()
                    .map(|s| score(scorer, s, Convention::Masked).map(|r| r.total_nll))
                    .collect::<Result<Vec<f64>, _>>()?
                    .into_iter(),
            )),
            None => None,
        };
        let lu = linearization_uncertainty(&nlls)?;
        Ok::<_, MetricsError>(AssessedGeneration {
            gen_tokens: seq.len(),
            resamp_tokens: mean(resampled.iter().map(|s| s.len() as f64)),
            gen_nll: *gen_nll,
            resamp_nll: lu.mean,
            resamp_nll_masked: masked,
            lu: lu.lu,
            force_closed: *force_closed,
            mol_stable: stability(&g, &table).ok().map(|r| r.mol_stable),
        })
    })?;
    Ok(SelfAssessment {
        strategy,
        k,
        gen_tokens: mean(rows.iter().map(|r| r.gen_tokens as f64)),
        resamp_tokens: mean(rows.iter().map(|r| r.resamp_tokens)),
        gen_nll: mean(rows.iter().map(|r| r.gen_nll)),
        resamp_nll: mean(rows.iter().map(|r| r.resamp_nll)),
        lu: mean(rows.iter().map(|r| r.lu)),
        rows,
    })
}

/// Generates `n_gen` sequences (generation `i` from stream `(seed, i, 0)`)
/// and assesses them against native re-linearizations.
#[allow(clippy::too_many_arguments)]
pub fn self_assessment<S: Scorer + ?Sized>(
    scorer: &S,
    labels: &Vocab,
    strategy: Strategy,
    n_gen: usize,
    k: usize,
    seed: u64,
    max_len: usize,
    temperature: f64,
) -> Result<SelfAssessment, MetricsError> {
    let max_nodes = scorer.token_vocab().max_nodes;
    let gen_seed = derive_seed(seed, 1);
    let generations = par::try_map_range(n_gen, |i| {
        let g = generate(scorer, max_len, temperature, &mut stream(gen_seed, i as u64, 0))?;
        Ok::<_, ModelError>((g.sequence(), g.nll, g.force_closed))
    })?;
    assess_generations(scorer, labels, &generations, strategy, k, derive_seed(seed, 2), max_nodes)
}

/// LU computed from the first K of each graph's shared draws, for each K,
/// and its AUC as a predictor of `positive` (lower LU predicts positive).
pub fn k_sweep(nlls: &[Vec<f64>], positive: &[bool], ks: &[usize]) -> Result<Vec<(usize, f64)>, MetricsError> {
    let full = ks.iter().copied().max().unwrap_or(0);
    if let Some((graph, v)) = nlls.iter().enumerate().find(|(_, v)| v.len() != full) {
        return Err(MetricsError::MissingPermutations { graph, got: v.len(), expected: full });
    }
    ks.iter()
        .map(|&k| {
            let lu = nlls
                .iter()
                .map(|v| linearization_uncertainty(&v[..k]).map(|r| r.lu))
                .collect::<Result<Vec<f64>, _>>()?;
            Ok((k, stability_auc(&lu, positive)?))
        })
        .collect()
}

/// AUC of a metric where lower values should indicate the positive class.
pub fn stability_auc(metric: &[f64], positive: &[bool]) -> Result<f64, MetricsError> {
    let negated: Vec<f64> = metric.iter().map(|x| -x).collect();
    roc_auc(&negated, positive)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub stable: bool,
    /// Unmasked NLLs of the K random re-linearizations.
    pub nlls: Vec<f64>,
    pub lu: f64,
    pub mean_nll: f64,
    /// NLL of one native-strategy trajectory, masked when the scorer exposes
    /// per-token distributions.
    pub gen_nll: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityPredictors {
    pub k: usize,
    pub rows: Vec<StabilityRow>,
    pub auc_lu: f64,
    pub auc_gen_nll: f64,
    pub auc_mean_nll: f64,
}

/// How well LU, trajectory NLL and mean re-linearization NLL separate stable
/// from unstable molecules. Lower values predict stable for all three.
pub fn stability_predictors<S: Scorer + ?Sized>(
    scorer: &S,
    graphs: &[LabeledGraph],
    stable: &[bool],
    native: Strategy,
    k: usize,
    seed: u64,
) -> Result<StabilityPredictors, MetricsError> {
    if graphs.len() != stable.len() {
        return Err(MetricsError::LengthMismatch(graphs.len(), stable.len()));
    }
    let max_nodes = scorer.token_vocab().max_nodes;
    let masked = scorer.conditional(&[Token::Bos]).is_some();
    let rows = par::try_map(graphs, |i, g| {
        let draws = encode_k(g, Strategy::Random, derive_seed(seed, 1), i, k, max_nodes).map_err(ModelError::from)?;
        let nlls = draws.iter().map(|s| scorer.sequence_nll(s)).collect::<Result<Vec<f64>, _>>()?;
        let lu = linearization_uncertainty(&nlls)?;
        let trajectory =
            encode_k(g, native, derive_seed(seed, 2), i, 1, max_nodes).map_err(ModelError::from)?.remove(0);
        let gen_nll = if masked {
            score(scorer, &trajectory, Convention::Masked)?.total_nll
        } else {
            scorer.sequence_nll(&trajectory)?
        };
        Ok::<_, MetricsError>(StabilityRow { stable: stable[i], nlls, lu: lu.lu, mean_nll: lu.mean, gen_nll })
    })?;
    let col = |f: fn(&StabilityRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    Ok(StabilityPredictors {
        k,
        auc_lu: stability_auc(&col(|r| r.lu), stable)?,
        auc_gen_nll: stability_auc(&col(|r| r.gen_nll), stable)?,
        auc_mean_nll: stability_auc(&col(|r| r.mean_nll), stable)?,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthStats {
    pub n_sequences: usize,
    pub mean_length: f64,
    pub mean_chords: f64,
    pub length_histogram: BTreeMap<usize, usize>,
    pub chord_histogram: BTreeMap<usize, usize>,
    /// Mean trail length (nodes per segment) by relative position decile of
    /// the segment midpoint; `None` for empty deciles.
    pub trail_profile: Vec<Option<f64>>,
    pub identity_violations: usize,
}

pub fn length_analysis(
    groups: &BTreeMap<String, Vec<TokenSequence>>,
) -> Result<BTreeMap<String, LengthStats>, MetricsError> {
    groups
        .iter()
        .map(|(name, seqs)| {
            let mut stats = LengthStats {
                n_sequences: seqs.len(),
                mean_length: 0.0,
                mean_chords: 0.0,
                length_histogram: BTreeMap::new(),
                chord_histogram: BTreeMap::new(),
                trail_profile: vec![None; 10],
                identity_violations: 0,
            };
            let mut sums = [0.0; 10];
            let mut counts = [0usize; 10];
            for seq in seqs {
                let s = sequence_stats(seq).map_err(ModelError::from)?;
                *stats.length_histogram.entry(seq.len()).or_default() += 1;
                *stats.chord_histogram.entry(s.n_chords).or_default() += 1;
                stats.mean_length += seq.len() as f64;
                stats.mean_chords += s.n_chords as f64;
                stats.identity_violations += usize::from(s.predicted_length() != seq.len());
                // segments span [start, end) between BOS/SEP and SEP/EOS
                let mut start = 1;
                let mut seg = 0;
                for (i, &t) in seq.tokens.iter().enumerate().skip(1) {
                    if t == Token::Sep || t == Token::Eos {
                        let mid = (start + i - 1) as f64 / 2.0;
                        let decile = ((mid / seq.len() as f64 * 10.0) as usize).min(9);
                        sums[decile] += s.trail_lengths[seg] as f64;
                        counts[decile] += 1;
                        seg += 1;
                        start = i + 1;
                    }
                }
            }
            if !seqs.is_empty() {
                stats.mean_length /= seqs.len() as f64;
                stats.mean_chords /= seqs.len() as f64;
            }
            for d in 0..10 {
                if counts[d] > 0 {
                    stats.trail_profile[d] = Some(sums[d] / counts[d] as f64);
                }
            }
            Ok((name.clone(), stats))
        })
        .collect()
}

/// Distinct token sequences over total sequences.
pub fn sequence_diversity(seqs: &[TokenSequence]) -> Result<f64, MetricsError> {
    if seqs.is_empty() {
        return Err(MetricsError::Empty);
    }
    let distinct: HashSet<&[Token]> = seqs.iter().map(|s| s.tokens.as_slice()).collect();
    Ok(distinct.len() as f64 / seqs.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{enumerate_linearizations, TokenVocab, DEFAULT_MAX_NODES};
    use crate::graph::testing::*;
    use crate::model::{build_corpus, train_ngram, uniform_graph_oracle, NgramConfig};
    use rand::Rng;

    fn labels() -> Vocab {
        Vocab::new(["X"], ["e"])
    }

    fn small_graphs() -> Vec<LabeledGraph> {
        vec![complete(4), path(5), uniform(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]), star(4)]
    }

    #[test]
    fn oracle_grid_has_zero_lu() {
        let graphs = small_graphs();
        let oracle = uniform_graph_oracle(&graphs, 100_000).unwrap();
        for s in Strategy::ALL {
            for r in per_graph_lu(&oracle, &graphs, s, 8, 3, DEFAULT_MAX_NODES).unwrap() {
                assert!(r.lu.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cross_eval_shape_and_direction() {
        let graphs = small_graphs();
        let tv = TokenVocab::new(16, &labels());
        let models: Vec<_> = Strategy::ALL
            .iter()
            .map(|&s| {
                let corpus = build_corpus(&graphs, s, 4, 1, 16).unwrap();
                train_ngram(&corpus, tv, &labels(), NgramConfig::default(), Some(s)).unwrap()
            })
            .collect();
        let scorers: Vec<(&str, &dyn Scorer)> =
            Strategy::ALL.iter().zip(&models).map(|(s, m)| (s.name(), m as &dyn Scorer)).collect();
        let grid = cross_eval(&scorers, &Strategy::ALL, &graphs, 4, 7, 16).unwrap();
        assert_eq!(grid.cells.len(), 16);
        let rows = grid.strategy_rows();
        assert_eq!(rows.len(), 4);
        let random = &rows[0];
        assert_eq!(random.nll_per_token_native, random.nll_per_token_random);
        // identical draws, deterministic result
        assert_eq!(cross_eval(&scorers, &Strategy::ALL, &graphs, 4, 7, 16).unwrap(), grid);
    }

    #[test]
    fn oracle_self_assessment_is_invariant() {
        let graphs = small_graphs();
        let oracle = uniform_graph_oracle(&graphs, 100_000).unwrap();
        let mut generations = Vec::new();
        for (i, g) in graphs.iter().enumerate() {
            let all = enumerate_linearizations(&g.with_vocab(&mut oracle.labels().clone()), 100_000).unwrap();
            let s = all[stream(0, i as u64, 0).gen_range(0..all.len())].clone();
            let nll = oracle.sequence_nll(&s).unwrap();
            generations.push((s, nll, false));
        }
        let report = assess_generations(&oracle, oracle.labels(), &generations, Strategy::Random, 8, 1, 16).unwrap();
        for r in &report.rows {
            assert_eq!(r.gen_nll, r.resamp_nll);
            assert!(r.lu.abs() < 1e-12);
            assert!(r.resamp_nll_masked.is_none());
        }
        assert!(matches!(
            assess_generations(&oracle, oracle.labels(), &generations, Strategy::Random, 1, 1, 16),
            Err(MetricsError::TooFew { .. })
        ));
    }

    #[test]
    fn k_sweep_examples() {
        // positives have identical NLLs at every K, negatives do not
        let mut nlls = Vec::new();
        let mut labels = Vec::new();
        let mut rng = stream(5, 0, 0);
        for i in 0..20 {
            let stable = i % 2 == 0;
            nlls.push(
                (0..32).map(|p| if stable { 10.0 } else { 10.0 + f64::from(p % 2) + rng.gen::<f64>() }).collect(),
            );
            labels.push(stable);
        }
        let sweep = k_sweep(&nlls, &labels, &SWEEP_KS).unwrap();
        assert!(sweep.iter().all(|&(_, auc)| auc == 1.0));
        let full: Vec<f64> = nlls.iter().map(|v| linearization_uncertainty(v).unwrap().lu).collect();
        assert_eq!(sweep.last().unwrap().1, stability_auc(&full, &labels).unwrap());
        nlls[3].pop();
        assert!(matches!(k_sweep(&nlls, &labels, &SWEEP_KS), Err(MetricsError::MissingPermutations { graph: 3, .. })));
    }

    #[test]
    fn k_sweep_reuses_stability_draws() {
        use crate::datasets::{molecule_vocab, random_molecules, stability_pool, Perturbation};
        let labels = molecule_vocab();
        let tv = TokenVocab::new(24, &labels);
        let corpus = build_corpus(&random_molecules(60, 1, 3, 0), Strategy::Random, 2, 0, 24).unwrap();
        let model = train_ngram(&corpus, tv, &labels, NgramConfig::default(), Some(Strategy::Random)).unwrap();
        let pool = stability_pool(40, 1, 3, &Perturbation::ALL, 1);
        let graphs: Vec<_> = pool.iter().map(|m| m.graph.clone()).collect();
        let stable: Vec<bool> = pool.iter().map(|m| m.stable).collect();
        let sp = stability_predictors(&model, &graphs, &stable, Strategy::Random, 32, 5).unwrap();
        let nlls: Vec<Vec<f64>> = sp.rows.iter().map(|r| r.nlls.clone()).collect();
        let sweep = k_sweep(&nlls, &stable, &SWEEP_KS).unwrap();
        assert_eq!(sweep.last().unwrap(), &(32, sp.auc_lu));
        let lu2: Vec<f64> = nlls.iter().map(|v| linearization_uncertainty(&v[..2]).unwrap().lu).collect();
        assert_eq!(sweep[0], (2, stability_auc(&lu2, &stable).unwrap()));
    }

    #[test]
    fn k_sweep_shuffled_labels_near_half() {
        let mut rng = stream(6, 0, 0);
        let nlls: Vec<Vec<f64>> = (0..4000).map(|_| (0..32).map(|_| rng.gen_range(5.0..15.0)).collect()).collect();
        let labels: Vec<bool> = (0..4000).map(|_| rng.gen_bool(0.5)).collect();
        for (_, auc) in k_sweep(&nlls, &labels, &SWEEP_KS).unwrap() {
            assert!((auc - 0.5).abs() < 0.05, "{auc}");
        }
    }

    #[test]
    fn length_analysis_examples() {
        let trees = [path(6), star(5), uniform(7, &[(0, 1), (1, 2), (1, 3), (3, 4), (3, 5), (5, 6)])];
        let mut seqs = Vec::new();
        for (i, g) in trees.iter().enumerate() {
            seqs.extend(encode_k(g, Strategy::Random, 0, i, 10, 16).unwrap());
        }
        // hub-first traversal of a star only ever restarts at the visited hub
        let stars: Vec<_> =
            (2..7).flat_map(|n| encode_k(&star(n), Strategy::MaxDegree, 0, n, 4, 16).unwrap()).collect();
        let single: Vec<_> =
            (0..5).map(|i| encode_k(&complete(4), Strategy::Anchor, 0, i, 1, 16).unwrap()[0].clone()).collect();
        let groups: BTreeMap<String, Vec<TokenSequence>> =
            [("trees".to_string(), seqs), ("stars".to_string(), stars), ("single".to_string(), single)]
                .into_iter()
                .collect();
        let out = length_analysis(&groups).unwrap();
        assert_eq!(out["trees"].identity_violations, 0);
        assert_eq!(out["trees"].n_sequences, 30);
        assert_eq!(out["stars"].chord_histogram.keys().copied().collect::<Vec<_>>(), vec![0]);
        let s = &out["single"];
        assert_eq!(s.trail_profile.iter().filter(|d| d.is_some()).count(), 1);
        assert_eq!(s.mean_chords, 3.0);
    }

    #[test]
    fn diversity_examples() {
        let s = encode_k(&path(4), Strategy::MinDegree, 0, 0, 1, 8).unwrap().remove(0);
        assert_eq!(sequence_diversity(&vec![s.clone(); 4]).unwrap(), 0.25);
        let distinct: Vec<_> =
            (2..6).map(|n| encode_k(&path(n), Strategy::MinDegree, 0, 0, 1, 8).unwrap().remove(0)).collect();
        assert_eq!(sequence_diversity(&distinct).unwrap(), 1.0);
        assert!(sequence_diversity(&[]).is_err());
    }

    // Random encodings of a labeled-uniform triangle: all 6 traversals share
    // one token string, so the distinct-token ratio of 100 draws is 1/100,
    // while the 4-node path has 12 traversals and 5 distinct token strings
    // (by enumeration); 100 draws of those see all of them.
    #[test]
    fn diversity_matches_enumeration() {
        let tri = complete(3);
        let draws = encode_k(&tri, Strategy::Random, 1, 0, 100, 8).unwrap();
        let distinct_tokens: HashSet<Vec<Token>> =
            enumerate_linearizations(&tri, 100).unwrap().into_iter().map(|s| s.tokens).collect();
        assert_eq!(sequence_diversity(&draws).unwrap(), distinct_tokens.len() as f64 / 100.0);
        let p4 = path(4);
        let distinct_tokens: HashSet<Vec<Token>> =
            enumerate_linearizations(&p4, 100).unwrap().into_iter().map(|s| s.tokens).collect();
        let draws = encode_k(&p4, Strategy::Random, 1, 0, 100, 8).unwrap();
        assert_eq!(sequence_diversity(&draws).unwrap(), distinct_tokens.len() as f64 / 100.0);
    }
}

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use sentlin_core::codec::{decode as decode_seq, encode_with_rng, enumerate_linearizations, TokenSequence, TokenVocab};
use sentlin_core::datasets::{generate as generate_graphs, generate_tagged, DatasetSpec};
use sentlin_core::graph::{read_graphs, write_graphs, LabeledGraph, Vocab};
use sentlin_core::metrics::{encode_k, MetricsError};
use sentlin_core::model::{
    build_corpus, generate as sample, score as score_seq, train_ngram, uniform_graph_oracle, Convention, ModelError,
    NgramConfig, NgramModel, Scorer, NLL_COLUMNS,
};
use sentlin_core::par;
use sentlin_core::rng::stream;
use serde_json::{json, Value};

use crate::args::{
    ConventionArg, DecodeArgs, EncodeArgs, EnumerateArgs, GenDataArgs, GenerateArgs, ModelArgs, RoundtripArgs,
    ScoreArgs, ScorerKind, TrainArgs,
};
use crate::output::{to_value, with_writer, Report};
use crate::CliError;

pub const ENUMERATION_LIMIT: usize = 100_000;

pub fn read_graph_file(path: &Path) -> Result<Vec<LabeledGraph>, CliError> {
    let file = fs::File::open(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let graphs = read_graphs(file).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if graphs.is_empty() {
        return Err(CliError::Input(format!("{}: no graphs", path.display())));
    }
    Ok(graphs)
}

pub fn load_model(path: &Path) -> Result<NgramModel, CliError> {
    NgramModel::load_from_path(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Re-expresses graphs in the model's label ids; labels the model never saw
/// are an input error.
pub fn align(graphs: &[LabeledGraph], labels: &Vocab) -> Result<Vec<LabeledGraph>, CliError> {
    let mut vocab = labels.clone();
    let out: Vec<LabeledGraph> = graphs.iter().map(|g| g.with_vocab(&mut vocab)).collect();
    if vocab != *labels {
        let unseen: Vec<&String> = vocab
            .node_labels
            .iter()
            .filter(|l| !labels.node_labels.contains(l))
            .chain(vocab.edge_labels.iter().filter(|l| !labels.edge_labels.contains(l)))
            .collect();
        return Err(CliError::Input(format!("labels not in the model vocabulary: {unseen:?}")));
    }
    Ok(out)
}

pub fn check_fits(graphs: &[LabeledGraph], max_nodes: usize) -> Result<(), CliError> {
    match graphs.iter().position(|g| g.n() > max_nodes) {
        Some(i) => {
            Err(CliError::Input(format!("graph {i} has {} nodes, above --max-nodes {max_nodes}", graphs[i].n())))
        }
        None => Ok(()),
    }
}

pub fn model_error(e: ModelError) -> CliError {
    match e {
        ModelError::BadOrder { .. }
        | ModelError::BadSmoothing(_)
        | ModelError::BadMaxLen(_)
        | ModelError::BadTemperature(_)
        | ModelError::EmptyCorpus
        | ModelError::TokenOutOfVocab { .. }
        | ModelError::NoConditionals => CliError::Input(e.to_string()),
        other => CliError::Runtime(other.to_string()),
    }
}

pub fn metrics_error(e: MetricsError) -> CliError {
    match e {
        MetricsError::Model(m) => model_error(m),
        MetricsError::TooFew { .. }
        | MetricsError::MissingPermutations { .. }
        | MetricsError::VocabMismatch
        | MetricsError::LengthMismatch(..)
        | MetricsError::SingleClass
        | MetricsError::UnknownAtom(_)
        | MetricsError::UnknownBond(_) => CliError::Input(e.to_string()),
        other => CliError::Runtime(other.to_string()),
    }
}

pub fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

pub fn require_k(k: usize) -> Result<(), CliError> {
    if k < 2 {
        return Err(CliError::Input(format!("--k must be at least 2 for LU, got {k}")));
    }
    Ok(())
}

pub fn ngram_config(m: &ModelArgs) -> NgramConfig {
    NgramConfig { order: m.order, smoothing: m.smoothing, backoff: m.backoff }
}

pub fn train_model(
    graphs: &[LabeledGraph],
    strategy: sentlin_core::strategy::Strategy,
    model: &ModelArgs,
    seed: u64,
    max_nodes: usize,
) -> Result<NgramModel, CliError> {
    if model.epochs == 0 {
        return Err(CliError::Input("--epochs must be at least 1".into()));
    }
    if !(model.backoff.is_finite() && model.backoff > 0.0) {
        return Err(CliError::Input(format!("--backoff must be positive, got {}", model.backoff)));
    }
    check_fits(graphs, max_nodes)?;
    let labels = graphs[0].vocab().clone();
    let corpus = build_corpus(graphs, strategy, model.epochs, seed, max_nodes).map_err(model_error)?;
    train_ngram(&corpus, TokenVocab::new(max_nodes, &labels), &labels, ngram_config(model), Some(strategy))
        .map_err(model_error)
}

pub fn gen_data(a: GenDataArgs) -> Result<(), CliError> {
    let mut spec = DatasetSpec::new(a.kind, a.n_graphs, a.seed);
    if let Some(lo) = a.min_nodes {
        spec.min_nodes = lo;
    }
    if let Some(hi) = a.max_nodes {
        spec.max_nodes = hi;
    }
    spec.edge_prob = a.edge_prob;
    spec.connected = !a.allow_disconnected;
    let invalid = |e: sentlin_core::datasets::DatasetError| CliError::Input(e.to_string());
    let (graphs, tags) = if a.kind.is_molecular() {
        let tagged = generate_tagged(&spec).map_err(invalid)?;
        let tags: Vec<(String, bool)> = tagged.iter().map(|m| (m.name.clone(), m.stable)).collect();
        (tagged.into_iter().map(|m| m.graph).collect(), Some(tags))
    } else {
        (generate_graphs(&spec).map_err(invalid)?, None)
    };
    with_writer(Some(&a.out), |w| write_graphs(w, &graphs).map_err(std::io::Error::other))?;
    if let Some(path) = &a.tags_out {
        let tags = tags.ok_or_else(|| CliError::Input(format!("--tags-out needs a molecule kind, not {}", a.kind)))?;
        with_writer(Some(path), |w| {
            writeln!(w, "graph_id,name,stable")?;
            for (i, (name, stable)) in tags.iter().enumerate() {
                writeln!(w, "{i},{name},{stable}")?;
            }
            Ok(())
        })?;
    }
    eprintln!("wrote {} {} graphs to {}", graphs.len(), a.kind, a.out.display());
    Ok(())
}

pub fn encode(a: EncodeArgs) -> Result<(), CliError> {
    let graphs = read_graph_file(&a.input)?;
    check_fits(&graphs, a.max_nodes)?;
    let lines = par::try_map(&graphs, |i, g| {
        encode_k(g, a.strategy, a.seed, i, a.k, a.max_nodes)
            .map(|seqs| seqs.iter().map(|s| s.render(g.vocab())).collect::<Vec<_>>())
    })
    .map_err(runtime)?;
    with_writer(a.out.as_deref(), |w| {
        for line in lines.iter().flatten() {
            writeln!(w, "{line}")?;
        }
        Ok(())
    })?;
    eprintln!("encoded {} graphs x {} linearizations ({})", graphs.len(), a.k, a.strategy);
    Ok(())
}

pub fn decode(a: DecodeArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&a.input).map_err(|e| CliError::Input(format!("{}: {e}", a.input.display())))?;
    let mut vocab = Vocab::default();
    let mut graphs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let seq = TokenSequence::parse_interning(line, &mut vocab)
            .map_err(|e| CliError::Input(format!("line {}: {e}", i + 1)))?;
        let g = decode_seq(&seq, &vocab).map_err(|e| CliError::Input(format!("line {}: {e}", i + 1)))?;
        graphs.push(g);
    }
    with_writer(a.out.as_deref(), |w| write_graphs(w, &graphs).map_err(std::io::Error::other))?;
    eprintln!("decoded {} sequences", graphs.len());
    Ok(())
}

pub fn roundtrip(a: RoundtripArgs) -> Result<(), CliError> {
    let graphs = read_graph_file(&a.input)?;
    check_fits(&graphs, a.max_nodes)?;
    if a.k == 0 {
        return Err(CliError::Input("--k must be at least 1".into()));
    }
    let results = par::try_map(&graphs, |i, g| {
        (0..a.k)
            .map(|p| {
                let seq = encode_with_rng(g, a.strategy, &mut stream(a.seed, i as u64, p as u64), a.max_nodes)?;
                let order = seq.node_order.clone().expect("encoder records the node order");
                let exact = decode_seq(&seq, g.vocab()).is_ok_and(|d| d == g.reorder(&order));
                Ok::<_, sentlin_core::codec::CodecError>((p, seq.len(), exact))
            })
            .collect::<Result<Vec<_>, _>>()
    })
    .map_err(runtime)?;
    let config = json!({"in": a.input, "strategy": a.strategy, "seed": a.seed, "k": a.k, "max_nodes": a.max_nodes});
    let total = graphs.len() * a.k;
    let exact = results.iter().flatten().filter(|r| r.2).count();
    let mut report = Report::new("roundtrip", config)
        .columns(&["graph_id", "perm_index", "n_tokens", "exact"])
        .summary(json!({"total": total, "exact": exact}));
    for (i, rows) in results.iter().enumerate() {
        for &(p, len, ok) in rows {
            report.push(vec![json!(i), json!(p), json!(len), json!(ok)]);
        }
    }
    report.write(&a.output)?;
    eprintln!("{exact}/{total} exact");
    if exact != total {
        return Err(CliError::Runtime(format!("{} linearizations did not round-trip", total - exact)));
    }
    Ok(())
}

pub fn enumerate(a: EnumerateArgs) -> Result<(), CliError> {
    let graphs = read_graph_file(&a.input)?;
    let results = par::try_map(&graphs, |_, g| enumerate_linearizations(g, a.limit))
        .map_err(|e| CliError::Input(e.to_string()))?;
    let config = json!({"in": a.input, "limit": a.limit, "list": a.list});
    let mut cols = vec!["graph_id", "n_nodes", "n_edges", "n_linearizations", "n_token_strings"];
    if a.list {
        cols.push("sequences");
    }
    let mut report = Report::new("enumerate", config).columns(&cols);
    for (i, (g, seqs)) in graphs.iter().zip(&results).enumerate() {
        let distinct: HashSet<&Vec<_>> = seqs.iter().map(|s| &s.tokens).collect();
        let mut row = vec![json!(i), json!(g.n()), json!(g.m()), json!(seqs.len()), json!(distinct.len())];
        if a.list {
            row.push(Value::Array(seqs.iter().map(|s| Value::String(s.render(g.vocab()))).collect()));
        }
        report.push(row);
    }
    report.write(&a.output)
}

pub fn train(a: TrainArgs) -> Result<(), CliError> {
    let graphs = read_graph_file(&a.train)?;
    let model = train_model(&graphs, a.strategy, &a.model, a.seed, a.max_nodes)?;
    model.save_to_path(&a.out).map_err(|e| CliError::Input(format!("{}: {e}", a.out.display())))?;
    eprintln!(
        "trained order-{} model on {} graphs x {} epochs ({}) -> {}",
        a.model.order,
        graphs.len(),
        a.model.epochs,
        a.strategy,
        a.out.display()
    );
    Ok(())
}

pub fn score(a: ScoreArgs) -> Result<(), CliError> {
    let graphs = read_graph_file(&a.input)?;
    if a.k == 0 {
        return Err(CliError::Input("--k must be at least 1".into()));
    }
    let (scorer, graphs): (Box<dyn Scorer>, Vec<LabeledGraph>) = match a.scorer {
        ScorerKind::Ngram => {
            let path = a.model.as_ref().ok_or_else(|| CliError::Input("--scorer ngram needs --model".into()))?;
            let model = load_model(path)?;
            let aligned = align(&graphs, model.labels())?;
            (Box::new(model), aligned)
        }
        ScorerKind::Oracle => {
            if a.model.is_some() {
                return Err(CliError::Input("--model conflicts with --scorer oracle".into()));
            }
            if a.convention == ConventionArg::Masked {
                return Err(CliError::Input(
                    "the oracle only scores whole sequences; use --convention unmasked".into(),
                ));
            }
            let oracle = uniform_graph_oracle(&graphs, ENUMERATION_LIMIT).map_err(model_error)?;
            let aligned = align(&graphs, oracle.labels())?;
            (Box::new(oracle), aligned)
        }
    };
    let max_nodes = scorer.token_vocab().max_nodes;
    check_fits(&graphs, max_nodes)?;
    let convention = match a.convention {
        ConventionArg::Unmasked => Convention::Unmasked,
        ConventionArg::Masked => Convention::Masked,
    };
    let rows = par::try_map(&graphs, |i, g| {
        let seqs = encode_k(g, a.strategy, a.seed, i, a.k, max_nodes).map_err(ModelError::from)?;
        seqs.iter()
            .map(|s| {
                let nll = match convention {
                    Convention::Unmasked => scorer.sequence_nll(s)?,
                    Convention::Masked => score_seq(scorer.as_ref(), s, convention)?.total_nll,
                };
                Ok((nll, s.len() - 1))
            })
            .collect::<Result<Vec<_>, ModelError>>()
    })
    .map_err(model_error)?;
    with_writer(a.out.as_deref(), |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(NLL_COLUMNS)?;
        for (i, per) in rows.iter().enumerate() {
            for (p, (nll, n)) in per.iter().enumerate() {
                csv.write_record([
                    i.to_string(),
                    p.to_string(),
                    a.strategy.to_string(),
                    nll.to_string(),
                    n.to_string(),
                ])?;
            }
        }
        csv.flush()
    })?;
    eprintln!("scored {} graphs x {} linearizations", graphs.len(), a.k);
    Ok(())
}

pub fn generate(a: GenerateArgs) -> Result<(), CliError> {
    let model = load_model(&a.model)?;
    let results =
        par::map_range(a.n_gen, |i| sample(&model, a.max_len, a.temperature, &mut stream(a.seed, i as u64, 0)));
    let config = json!({
        "model": a.model, "n_gen": a.n_gen, "temperature": a.temperature, "max_len": a.max_len, "seed": a.seed,
        "model_config": to_value(model.config()), "model_strategy": model.strategy(),
    });
    let mut report = Report::new("generate", config).columns(&[
        "index",
        "status",
        "n_tokens",
        "n_nodes",
        "n_edges",
        "nll",
        "force_closed",
        "tokens",
    ]);
    let mut graphs = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(gen) => {
                let seq = gen.sequence();
                let g = decode_seq(&seq, model.labels()).map_err(runtime)?;
                report.push(vec![
                    json!(i),
                    json!("ok"),
                    json!(seq.len()),
                    json!(g.n()),
                    json!(g.m()),
                    json!(gen.nll),
                    json!(gen.force_closed),
                    json!(seq.render(model.labels())),
                ]);
                graphs.push(g);
            }
            Err(ModelError::Discarded(_)) => {
                report.push(vec![
                    json!(i),
                    json!("discarded"),
                    Value::Null,
                    Value::Null,
                    Value::Null,
                    Value::Null,
                    json!(false),
                    Value::Null,
                ]);
            }
            Err(e) => return Err(model_error(e)),
        }
    }
    report.write(&a.output)?;
    if let Some(path) = &a.graphs_out {
        with_writer(Some(path), |w| write_graphs(w, &graphs).map_err(std::io::Error::other))?;
    }
    eprintln!("generated {} sequences ({} decodable)", a.n_gen, graphs.len());
    Ok(())
}

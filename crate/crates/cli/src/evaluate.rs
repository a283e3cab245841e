use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use sentlin_core::codec::{decode as decode_seq, TokenSequence};
use sentlin_core::graph::{canonical_certificate, is_planar, LabeledGraph};
use sentlin_core::metrics::{
    self as m, ece_by_token_type, ece_of_scored, encode_k, length_analysis, linearization_uncertainty, per_graph_lu,
    self_assessment, sequence_diversity, stability, stability_predictors, ValencyTable,
};
use sentlin_core::model::{
    build_corpus, generate as sample, ingest_nll_path, score, Convention, ModelError, NllRecord, Scorer,
};
use sentlin_core::par;
use sentlin_core::rng::{derive_seed, stream};
use serde_json::{json, Value};

use crate::args::{
    CrossArgs, DiversityArgs, EceArgs, IngestNllArgs, KSweepArgs, LengthArgs, LuArgs, NllSource, SelfAssessArgs,
    StabilityAucArgs, SweepArgs, Validity, VunArgs,
};
use crate::commands::{
    align, check_fits, load_model, metrics_error, model_error, read_graph_file, require_k, runtime, train_model,
};
use crate::output::{to_value, Report};
use crate::CliError;

/// Numeric ids sort numerically, the rest after them by text.
fn id_order(a: &str, b: &str) -> std::cmp::Ordering {
    (a.parse::<u64>().ok().map_or(1, |_| 0), a.parse::<u64>().ok(), a).cmp(&(
        b.parse::<u64>().ok().map_or(1, |_| 0),
        b.parse::<u64>().ok(),
        b,
    ))
}

fn load_nll(path: &Path) -> Result<Vec<(String, Vec<NllRecord>)>, CliError> {
    let groups = ingest_nll_path(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mut groups: Vec<(String, Vec<NllRecord>)> = groups.into_iter().collect();
    groups.sort_by(|a, b| id_order(&a.0, &b.0));
    Ok(groups)
}

/// Per-graph NLL vectors, keyed by graph id, from whichever source the flags name.
fn nll_vectors(src: &NllSource, k: usize) -> Result<Vec<(String, Vec<f64>)>, CliError> {
    match (&src.nll_file, &src.model) {
        (Some(_), Some(_)) => Err(CliError::Input("--nll-file conflicts with --model".into())),
        (Some(path), None) => {
            Ok(load_nll(path)?.into_iter().map(|(id, recs)| (id, recs.iter().map(|r| r.nll).collect())).collect())
        }
        (None, Some(model_path)) => {
            let input = src.input.as_ref().ok_or_else(|| CliError::Input("--model needs --in".into()))?;
            let model = load_model(model_path)?;
            let graphs = align(&read_graph_file(input)?, model.labels())?;
            let max_nodes = model.token_vocab().max_nodes;
            check_fits(&graphs, max_nodes)?;
            let nlls = par::try_map(&graphs, |i, g| {
                let seqs = encode_k(g, src.strategy, src.seed, i, k, max_nodes).map_err(ModelError::from)?;
                seqs.iter().map(|s| model.sequence_nll(s)).collect::<Result<Vec<f64>, _>>()
            })
            .map_err(model_error)?;
            Ok(nlls.into_iter().enumerate().map(|(i, v)| (i.to_string(), v)).collect())
        }
        (None, None) => Err(CliError::Input("give --nll-file or --model with --in".into())),
    }
}

fn source_config(src: &NllSource) -> Value {
    json!({"nll_file": src.nll_file, "model": src.model, "in": src.input, "strategy": src.strategy, "seed": src.seed})
}

pub fn lu(a: LuArgs) -> Result<(), CliError> {
    require_k(a.k)?;
    let vectors = nll_vectors(&a.source, a.k)?;
    let mut report = Report::new("eval lu", json!({"source": source_config(&a.source), "k": a.k}))
        .columns(&["graph_id", "k", "mean_nll", "std_nll", "lu"]);
    let mut lus = Vec::new();
    for (id, nlls) in &vectors {
        let r = linearization_uncertainty(nlls).map_err(|e| CliError::Input(format!("graph {id}: {e}")))?;
        report.push(vec![json!(id), json!(r.k), json!(r.mean), json!(r.std), json!(r.lu)]);
        lus.push(r.lu);
    }
    let mean = lus.iter().sum::<f64>() / lus.len() as f64;
    report.summary(json!({"n_graphs": lus.len(), "mean_lu": mean})).write(&a.output)
}

pub fn ece(a: EceArgs) -> Result<(), CliError> {
    require_k(a.k)?;
    if a.bins == 0 {
        return Err(CliError::Input("--bins must be at least 1".into()));
    }
    let model = load_model(&a.model)?;
    let graphs = align(&read_graph_file(&a.input)?, model.labels())?;
    let max_nodes = model.token_vocab().max_nodes;
    check_fits(&graphs, max_nodes)?;
    let scored = par::try_map(&graphs, |i, g| {
        let seqs = encode_k(g, a.strategy, a.seed, i, a.k, max_nodes).map_err(ModelError::from)?;
        seqs.iter().map(|s| score(&model, s, Convention::Unmasked)).collect::<Result<Vec<_>, _>>()
    })
    .map_err(model_error)?;
    let flat: Vec<_> = scored.into_iter().flatten().collect();
    let all = ece_of_scored(&flat, a.bins).map_err(metrics_error)?;
    let by_type = ece_by_token_type(&flat, a.bins).map_err(metrics_error)?;
    let config =
        json!({"model": a.model, "in": a.input, "strategy": a.strategy, "seed": a.seed, "k": a.k, "bins": a.bins});
    let mut report = Report::new("eval ece", config).columns(&["token_type", "n_tokens", "ece"]);
    report.push(vec![json!("all"), json!(all.n), json!(all.ece)]);
    for (t, r) in &by_type {
        report.push(vec![json!(t.name()), json!(r.n), json!(r.ece)]);
    }
    report.summary(json!({"reliability": all.bins})).write(&a.output)
}

pub fn cross(a: CrossArgs) -> Result<(), CliError> {
    require_k(a.k)?;
    let models = a.models.iter().map(|p| load_model(p)).collect::<Result<Vec<_>, _>>()?;
    let labels = models[0].labels().clone();
    if models.iter().any(|m| *m.labels() != labels) {
        return Err(CliError::Input("models were trained on different label vocabularies".into()));
    }
    let names: Vec<String> = models
        .iter()
        .zip(&a.models)
        .map(|(m, p)| m.strategy().map_or_else(|| p.display().to_string(), |s| s.to_string()))
        .collect();
    if names.iter().collect::<HashSet<_>>().len() != names.len() {
        return Err(CliError::Input("two models share a row name (training strategy)".into()));
    }
    let graphs = align(&read_graph_file(&a.test)?, &labels)?;
    check_fits(&graphs, models[0].token_vocab().max_nodes)?;
    let scorers: Vec<(&str, &dyn Scorer)> =
        names.iter().zip(&models).map(|(n, m)| (n.as_str(), m as &dyn Scorer)).collect();
    let grid = m::cross_eval(&scorers, &a.strategy, &graphs, a.k, a.seed, models[0].token_vocab().max_nodes)
        .map_err(metrics_error)?;
    let config = json!({"models": a.models, "test": a.test, "strategy": a.strategy, "seed": a.seed, "k": a.k});
    let mut report = Report::new("eval cross", config).columns(&[
        "train",
        "eval",
        "nll_per_token",
        "lu",
        "ece",
        "tok_per_graph",
        "ece_by_type",
    ]);
    for c in &grid.cells {
        report.push(vec![
            json!(c.train),
            json!(c.eval),
            json!(c.nll_per_token),
            json!(c.lu),
            json!(c.ece),
            json!(c.tok_per_graph),
            to_value(&c.ece_by_type),
        ]);
    }
    report.summary(json!({"n_graphs": grid.n_graphs, "strategies": grid.strategy_rows()})).write(&a.output)
}

pub fn self_assess(a: SelfAssessArgs) -> Result<(), CliError> {
    require_k(a.k)?;
    let model = load_model(&a.model)?;
    let r = self_assessment(&model, model.labels(), a.strategy, a.n_gen, a.k, a.seed, a.max_len, a.temperature)
        .map_err(metrics_error)?;
    let config = json!({
        "model": a.model, "strategy": a.strategy, "n_gen": a.n_gen, "k": a.k,
        "temperature": a.temperature, "max_len": a.max_len, "seed": a.seed,
    });
    let mut report = Report::new("eval self-assess", config).columns(&[
        "index",
        "gen_tokens",
        "resamp_tokens",
        "gen_nll",
        "resamp_nll",
        "resamp_nll_masked",
        "lu",
        "force_closed",
        "mol_stable",
    ]);
    for (i, row) in r.rows.iter().enumerate() {
        report.push(vec![
            json!(i),
            json!(row.gen_tokens),
            json!(row.resamp_tokens),
            json!(row.gen_nll),
            json!(row.resamp_nll),
            json!(row.resamp_nll_masked),
            json!(row.lu),
            json!(row.force_closed),
            json!(row.mol_stable),
        ]);
    }
    let summary = json!({
        "gen_tokens": r.gen_tokens, "resamp_tokens": r.resamp_tokens,
        "gen_nll": r.gen_nll, "resamp_nll": r.resamp_nll, "lu": r.lu,
    });
    report.summary(summary).write(&a.output)
}

fn read_tags(path: &Path) -> Result<HashMap<String, bool>, CliError> {
    let bad = |e: String| CliError::Input(format!("{}: {e}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col =
        |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| bad(format!("missing column {name:?}")));
    let (id, stable) = (col("graph_id")?, col("stable")?);
    let mut tags = HashMap::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let flag =
            rec[stable].parse::<bool>().map_err(|_| bad(format!("line {}: stable must be true or false", i + 2)))?;
        tags.insert(rec[id].to_string(), flag);
    }
    Ok(tags)
}

fn valency_labels(graphs: &[LabeledGraph]) -> Result<Vec<bool>, CliError> {
    let table = ValencyTable::default();
    graphs.iter().map(|g| stability(g, &table).map(|r| r.mol_stable).map_err(metrics_error)).collect()
}

pub fn k_sweep(a: KSweepArgs) -> Result<(), CliError> {
    let full = a.ks.iter().copied().max().ok_or_else(|| CliError::Input("--ks is empty".into()))?;
    if a.ks.iter().any(|&k| k < 2) {
        return Err(CliError::Input("every K in --ks must be at least 2".into()));
    }
    let vectors = nll_vectors(&a.source, full)?;
    let stable: Vec<bool> = match (&a.tags, &a.source.input) {
        (Some(path), _) => {
            let tags = read_tags(path)?;
            vectors
                .iter()
                .map(|(id, _)| tags.get(id).copied().ok_or_else(|| CliError::Input(format!("no tag for graph {id}"))))
                .collect::<Result<_, _>>()?
        }
        (None, Some(input)) => {
            let labels = valency_labels(&read_graph_file(input)?)?;
            if labels.len() != vectors.len() {
                return Err(CliError::Input(format!("{} graphs but {} NLL groups", labels.len(), vectors.len())));
            }
            labels
        }
        (None, None) => return Err(CliError::Input("stability labels need --tags or --in".into())),
    };
    let nlls: Vec<Vec<f64>> = vectors.into_iter().map(|(_, v)| v).collect();
    let sweep = m::k_sweep(&nlls, &stable, &a.ks).map_err(metrics_error)?;
    let config = json!({"source": source_config(&a.source), "tags": a.tags, "ks": a.ks});
    let mut report = Report::new("eval k-sweep", config).columns(&["k", "auc_lu"]);
    for (k, auc) in &sweep {
        report.push(vec![json!(k), json!(auc)]);
    }
    let n_stable = stable.iter().filter(|&&s| s).count();
    report.summary(json!({"n_graphs": nlls.len(), "n_stable": n_stable})).write(&a.output)
}

pub fn stability_auc(a: StabilityAucArgs) -> Result<(), CliError> {
    require_k(a.k)?;
    let model = load_model(&a.model)?;
    let graphs = align(&read_graph_file(&a.input)?, model.labels())?;
    check_fits(&graphs, model.token_vocab().max_nodes)?;
    let stable = valency_labels(&graphs)?;
    let native = a
        .strategy
        .or(model.strategy())
        .ok_or_else(|| CliError::Input("model has no training strategy; pass --strategy".into()))?;
    let sp = stability_predictors(&model, &graphs, &stable, native, a.k, a.seed).map_err(metrics_error)?;
    let config = json!({"model": a.model, "in": a.input, "strategy": native, "seed": a.seed, "k": a.k});
    let mut report =
        Report::new("eval stability-auc", config).columns(&["graph_id", "stable", "lu", "mean_nll", "gen_nll"]);
    for (i, r) in sp.rows.iter().enumerate() {
        report.push(vec![json!(i), json!(r.stable), json!(r.lu), json!(r.mean_nll), json!(r.gen_nll)]);
    }
    let summary = json!({"auc_lu": sp.auc_lu, "auc_gen_nll": sp.auc_gen_nll, "auc_mean_nll": sp.auc_mean_nll});
    report.summary(summary).write(&a.output)
}

pub fn length(a: LengthArgs) -> Result<(), CliError> {
    let graphs = read_graph_file(&a.input)?;
    check_fits(&graphs, a.max_nodes)?;
    let mut groups: BTreeMap<String, Vec<TokenSequence>> = BTreeMap::new();
    for &s in &a.strategy {
        let seqs = par::try_map(&graphs, |i, g| encode_k(g, s, derive_seed(a.seed, s as u64), i, a.k, a.max_nodes))
            .map_err(runtime)?;
        groups.insert(s.to_string(), seqs.into_iter().flatten().collect());
    }
    let stats = length_analysis(&groups).map_err(metrics_error)?;
    let config = json!({"in": a.input, "strategy": a.strategy, "seed": a.seed, "k": a.k, "max_nodes": a.max_nodes});
    let mut report = Report::new("eval length", config).columns(&[
        "strategy",
        "n_sequences",
        "mean_length",
        "mean_chords",
        "identity_violations",
        "trail_profile",
        "length_histogram",
        "chord_histogram",
    ]);
    for s in &a.strategy {
        let st = &stats[&s.to_string()];
        report.push(vec![
            json!(s),
            json!(st.n_sequences),
            json!(st.mean_length),
            json!(st.mean_chords),
            json!(st.identity_violations),
            to_value(&st.trail_profile),
            to_value(&st.length_histogram),
            to_value(&st.chord_histogram),
        ]);
    }
    report.write(&a.output)
}

pub fn diversity(a: DiversityArgs) -> Result<(), CliError> {
    if a.epochs == 0 {
        return Err(CliError::Input("--epochs must be at least 1".into()));
    }
    let graphs = read_graph_file(&a.input)?;
    check_fits(&graphs, a.max_nodes)?;
    let config =
        json!({"in": a.input, "strategy": a.strategy, "seed": a.seed, "epochs": a.epochs, "max_nodes": a.max_nodes});
    let mut report =
        Report::new("eval diversity", config).columns(&["strategy", "n_sequences", "diversity", "per_graph_distinct"]);
    for &s in &a.strategy {
        let corpus = build_corpus(&graphs, s, a.epochs, a.seed, a.max_nodes).map_err(model_error)?;
        let div = sequence_diversity(&corpus).map_err(metrics_error)?;
        // corpus is epoch-major: graph i's draws sit at i, i + n, i + 2n, ...
        let n = graphs.len();
        let per_graph: f64 = (0..n)
            .map(|i| {
                let distinct: HashSet<_> = (0..a.epochs).map(|e| &corpus[e * n + i].tokens).collect();
                distinct.len() as f64
            })
            .sum::<f64>()
            / n as f64;
        report.push(vec![json!(s), json!(corpus.len()), json!(div), json!(per_graph)]);
    }
    report.write(&a.output)
}

fn validity_check(v: Validity) -> impl Fn(&LabeledGraph) -> bool {
    let table = ValencyTable::default();
    move |g: &LabeledGraph| match v {
        Validity::Planar => g.n() > 0 && is_planar(g),
        Validity::Stable => stability(g, &table).is_ok_and(|r| r.mol_stable),
        Validity::Any => true,
    }
}

pub fn vun(a: VunArgs) -> Result<(), CliError> {
    let generated = read_graph_file(&a.input)?;
    let train = read_graph_file(&a.train)?;
    let certs: HashSet<_> = train.iter().map(canonical_certificate).collect();
    let r = m::vun(&generated, &certs, validity_check(a.validity));
    let config = json!({"in": a.input, "train": a.train, "validity": a.validity});
    let mut report = Report::new("eval vun", config).columns(&[
        "n_generated",
        "n_valid",
        "n_unique",
        "n_novel",
        "validity",
        "uniqueness",
        "novelty",
        "vun",
    ]);
    report.push(vec![
        json!(r.n_generated),
        json!(r.n_valid),
        json!(r.n_unique),
        json!(r.n_novel),
        json!(r.validity),
        json!(r.uniqueness),
        json!(r.novelty),
        json!(r.vun),
    ]);
    report.write(&a.output)
}

pub fn sweep(a: SweepArgs) -> Result<(), CliError> {
    let pool = read_graph_file(&a.train)?;
    if let Some(&n) = a.train_sizes.iter().find(|&&n| n == 0 || n > pool.len()) {
        return Err(CliError::Input(format!("train size {n} outside 1..={}", pool.len())));
    }
    let test = match &a.test {
        Some(p) => Some(align(&read_graph_file(p)?, pool[0].vocab())?),
        None => None,
    };
    let valid = validity_check(a.validity);
    let config = json!({
        "train": a.train, "test": a.test, "train_sizes": a.train_sizes, "strategy": a.strategy, "seed": a.seed,
        "n_gen": a.n_gen, "temperature": a.temperature, "max_len": a.max_len, "max_nodes": a.max_nodes,
        "validity": a.validity, "model": to_value(&a.model),
    });
    let mut report = Report::new("sweep", config).columns(&[
        "train_size",
        "strategy",
        "validity",
        "uniqueness",
        "novelty",
        "vun",
        "corpus_diversity",
        "test_nll_per_token",
        "test_lu",
        "n_discarded",
        "n_force_closed",
    ]);
    for (si, &size) in a.train_sizes.iter().enumerate() {
        let train = &pool[..size];
        let certs: HashSet<_> = train.iter().map(canonical_certificate).collect();
        for &s in &a.strategy {
            eprintln!("sweep: N = {size}, {s}");
            let cell_seed = derive_seed(a.seed, (si as u64) << 8 | s as u64);
            let model = train_model(train, s, &a.model, cell_seed, a.max_nodes)?;
            let corpus = build_corpus(train, s, a.model.epochs, cell_seed, a.max_nodes).map_err(model_error)?;
            let diversity = sequence_diversity(&corpus).map_err(metrics_error)?;
            let gen_seed = derive_seed(cell_seed, 1);
            let samples = par::map_range(a.n_gen, |i| {
                sample(&model, a.max_len, a.temperature, &mut stream(gen_seed, i as u64, 0))
            });
            let mut graphs = Vec::new();
            let (mut discarded, mut forced) = (0, 0);
            for r in samples {
                match r {
                    Ok(g) => {
                        forced += usize::from(g.force_closed);
                        graphs.push(decode_seq(&g.sequence(), model.labels()).map_err(runtime)?);
                    }
                    Err(ModelError::Discarded(_)) => discarded += 1,
                    Err(e) => return Err(model_error(e)),
                }
            }
            let r = m::vun(&graphs, &certs, &valid);
            let (nll, lu) = match &test {
                Some(t) => {
                    let k = 4;
                    let lus =
                        per_graph_lu(&model, t, s, k, derive_seed(cell_seed, 2), a.max_nodes).map_err(metrics_error)?;
                    let tokens: f64 = t
                        .iter()
                        .enumerate()
                        .map(|(i, g)| {
                            encode_k(g, s, derive_seed(cell_seed, 2), i, k, a.max_nodes)
                                .map(|v| v.iter().map(|q| (q.len() - 1) as f64).sum::<f64>())
                        })
                        .sum::<Result<f64, _>>()
                        .map_err(runtime)?;
                    let total: f64 = lus.iter().map(|l| l.nlls.iter().sum::<f64>()).sum();
                    let mean_lu = lus.iter().map(|l| l.lu).sum::<f64>() / lus.len() as f64;
                    (json!(total / tokens), json!(mean_lu))
                }
                None => (Value::Null, Value::Null),
            };
            report.push(vec![
                json!(size),
                json!(s),
                json!(r.validity),
                json!(r.uniqueness),
                json!(r.novelty),
                json!(r.vun),
                json!(diversity),
                nll,
                lu,
                json!(discarded),
                json!(forced),
            ]);
        }
    }
    report.write(&a.output)
}

pub fn ingest_nll(a: IngestNllArgs) -> Result<(), CliError> {
    let groups = load_nll(&a.nll_file)?;
    let mut report = Report::new("ingest-nll", json!({"nll_file": a.nll_file})).columns(&[
        "graph_id",
        "n_records",
        "strategies",
        "mean_nll",
        "lu",
    ]);
    let mut n_records = 0;
    for (id, recs) in &groups {
        n_records += recs.len();
        let nlls: Vec<f64> = recs.iter().map(|r| r.nll).collect();
        let strategies: Vec<&str> =
            recs.iter().map(|r| r.strategy.as_str()).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let lu = linearization_uncertainty(&nlls).ok().map(|r| r.lu);
        let mean = nlls.iter().sum::<f64>() / nlls.len() as f64;
        report.push(vec![json!(id), json!(recs.len()), json!(strategies.join(";")), json!(mean), json!(lu)]);
    }
    report.summary(json!({"n_graphs": groups.len(), "n_records": n_records})).write(&a.output)
}

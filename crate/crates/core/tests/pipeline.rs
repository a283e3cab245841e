use proptest::prelude::{any, prop, prop_assert_eq, proptest};
use proptest::strategy::Strategy as _;
use sentlin_core::codec::{decode, encode, sequence_stats, TokenVocab, DEFAULT_MAX_NODES};
use sentlin_core::datasets::{generate, random_molecules, DatasetKind, DatasetSpec};
use sentlin_core::graph::{canonical_certificate, read_graphs, write_graphs, LabeledGraph, Vocab};
use sentlin_core::metrics::{stability, ValencyTable};
use sentlin_core::model::{build_corpus, generate as sample, train_ngram, NgramConfig, NgramModel, Scorer};
use sentlin_core::rng::stream;
use sentlin_core::strategy::Strategy;

fn arb_graph() -> impl proptest::strategy::Strategy<Value = LabeledGraph> {
    (1usize..10).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let m = pairs.len();
        (prop::collection::vec(0u32..3, n), prop::collection::vec((any::<bool>(), 0u32..2), m)).prop_map(
            move |(labels, keep)| {
                let edges: Vec<(usize, usize, u32)> =
                    pairs.iter().zip(&keep).filter(|(_, k)| k.0).map(|(&(u, v), k)| (u, v, k.1)).collect();
                LabeledGraph::new(Vocab::new(["A", "B", "C"], ["x", "y"]), labels, edges).unwrap()
            },
        )
    })
}

fn strategy() -> impl proptest::strategy::Strategy<Value = Strategy> {
    prop::sample::select(Strategy::ALL.to_vec())
}

proptest! {
    #[test]
    fn decode_inverts_encode_up_to_node_order(g in arb_graph(), s in strategy(), seed in any::<u64>()) {
        let seq = encode(&g, s, seed, DEFAULT_MAX_NODES).unwrap();
        let d = decode(&seq, g.vocab()).unwrap();
        prop_assert_eq!(&d, &g.reorder(seq.node_order.as_ref().unwrap()));
        prop_assert_eq!(canonical_certificate(&d), canonical_certificate(&g));
        prop_assert_eq!(sequence_stats(&seq).unwrap().predicted_length(), seq.len());
    }

    #[test]
    fn text_form_survives_render_and_parse(g in arb_graph(), seed in any::<u64>()) {
        let seq = encode(&g, Strategy::Random, seed, DEFAULT_MAX_NODES).unwrap();
        let parsed = sentlin_core::codec::TokenSequence::parse(&seq.render(g.vocab()), g.vocab()).unwrap();
        prop_assert_eq!(parsed.tokens, seq.tokens);
    }
}

#[test]
fn jsonl_roundtrip_keeps_graphs() {
    let graphs = generate(&DatasetSpec::new(DatasetKind::DelaunayPlanar, 20, 3)).unwrap();
    let mut buf = Vec::new();
    write_graphs(&mut buf, &graphs).unwrap();
    assert_eq!(read_graphs(&buf[..]).unwrap(), graphs);
}

fn small_model() -> (NgramModel, Vocab) {
    let graphs = generate(&DatasetSpec::new(DatasetKind::DelaunayPlanar, 40, 5)).unwrap();
    let labels = graphs[0].vocab().clone();
    let corpus = build_corpus(&graphs, Strategy::MinDegree, 2, 5, 32).unwrap();
    let model =
        train_ngram(&corpus, TokenVocab::new(32, &labels), &labels, NgramConfig::default(), Some(Strategy::MinDegree))
            .unwrap();
    (model, labels)
}

#[test]
fn saved_model_scores_identically() {
    let (model, labels) = small_model();
    let mut buf = Vec::new();
    model.save(&mut buf).unwrap();
    let loaded = NgramModel::load(&buf[..]).unwrap();
    let g = &generate(&DatasetSpec::new(DatasetKind::DelaunayPlanar, 1, 99)).unwrap()[0];
    let seq = encode(&g.with_vocab(&mut labels.clone()), Strategy::Random, 1, 32).unwrap();
    assert_eq!(model.sequence_nll(&seq).unwrap(), loaded.sequence_nll(&seq).unwrap());
    assert_eq!(loaded.strategy(), Some(Strategy::MinDegree));
}

#[test]
fn generated_graphs_reencode_to_the_same_graph() {
    let (model, labels) = small_model();
    for i in 0..50 {
        let out = sample(&model, 400, 1.0, &mut stream(11, i, 0)).unwrap();
        let g = decode(&out.sequence(), &labels).unwrap();
        let again = encode(&g, Strategy::Anchor, i, 32).unwrap();
        assert_eq!(canonical_certificate(&decode(&again, &labels).unwrap()), canonical_certificate(&g));
    }
}

#[test]
fn random_molecules_pass_the_valency_check() {
    let table = ValencyTable::default();
    for g in random_molecules(200, 1, 9, 4) {
        assert!(stability(&g, &table).unwrap().mol_stable);
    }
}

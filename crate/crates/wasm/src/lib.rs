//! Browser bindings for the demo page in `www/`. Every function takes and
//! returns JSON strings so the page needs no generated type glue.

use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

use sentlin_core::codec::{encode_with_rng, enumerate_linearizations, sequence_stats, DEFAULT_MAX_NODES};
use sentlin_core::datasets::delaunay_with_points;
use sentlin_core::graph::{is_planar, GraphRecord, LabeledGraph, Vocab};
use sentlin_core::rng::stream;
use sentlin_core::strategy::Strategy;

/// Sequences shown per call, whatever the caller asks for.
const MAX_SHOWN: usize = 200;

fn parse_graph(graph_json: &str) -> Result<LabeledGraph, JsError> {
    let record: GraphRecord =
        serde_json::from_str(graph_json).map_err(|e| JsError::new(&format!("graph JSON: {e}")))?;
    record.to_graph(&mut Vocab::default()).map_err(|e| JsError::new(&e.to_string()))
}

fn to_json(v: impl Serialize) -> String {
    serde_json::to_string(&v).expect("plain data serializes")
}

/// Delaunay triangulation of `n` random points in the unit square, with the
/// points for drawing.
#[wasm_bindgen]
pub fn random_planar(n: usize, seed: u64) -> Result<String, JsError> {
    if !(3..=DEFAULT_MAX_NODES).contains(&n) {
        return Err(JsError::new(&format!("node count must be in 3..={DEFAULT_MAX_NODES}")));
    }
    let vocab = Vocab::new(["X"], ["e"]);
    let (g, points) = delaunay_with_points(&vocab, n, &mut stream(seed, 0, 0));
    Ok(to_json(json!({
        "graph": GraphRecord::from_graph(&g),
        "points": points,
        "planar": is_planar(&g),
    })))
}

/// `k` linearizations under `strategy`. Each comes with its token text,
/// length, chord and segment counts, and the node order it used.
#[wasm_bindgen]
pub fn linearize(graph_json: &str, strategy: &str, seed: u64, k: usize) -> Result<String, JsError> {
    let g = parse_graph(graph_json)?;
    let strategy: Strategy =
        strategy.parse().map_err(|e: sentlin_core::strategy::StrategyError| JsError::new(&e.to_string()))?;
    let mut out = Vec::new();
    let mut distinct = std::collections::HashSet::new();
    for p in 0..k.min(MAX_SHOWN) {
        let seq = encode_with_rng(&g, strategy, &mut stream(seed, 0, p as u64), DEFAULT_MAX_NODES)
            .map_err(|e| JsError::new(&e.to_string()))?;
        let stats = sequence_stats(&seq).map_err(|e| JsError::new(&e.to_string()))?;
        distinct.insert(seq.tokens.clone());
        out.push(json!({
            "text": seq.render(g.vocab()),
            "length": seq.len(),
            "chords": stats.n_chords,
            "segments": stats.n_segments,
            "node_order": seq.node_order,
        }));
    }
    Ok(to_json(json!({ "strategy": strategy, "distinct": distinct.len(), "sequences": out })))
}

/// Every linearization of a small graph, or an error past `limit`.
/// `count` distinguishes node orders; `distinct_texts` does not.
#[wasm_bindgen]
pub fn enumerate(graph_json: &str, limit: usize) -> Result<String, JsError> {
    let g = parse_graph(graph_json)?;
    let all = enumerate_linearizations(&g, limit).map_err(|e| JsError::new(&e.to_string()))?;
    let shown: Vec<String> = all.iter().take(MAX_SHOWN).map(|s| s.render(g.vocab())).collect();
    let lengths: std::collections::BTreeMap<usize, usize> = all.iter().fold(Default::default(), |mut m, s| {
        *m.entry(s.len()).or_default() += 1;
        m
    });
    // node orders distinguish outputs that share their token text
    let texts: std::collections::BTreeSet<&[sentlin_core::codec::Token]> =
        all.iter().map(|s| s.tokens.as_slice()).collect();
    Ok(to_json(json!({ "count": all.len(), "distinct_texts": texts.len(), "lengths": lengths, "sequences": shown })))
}

//! Success paths of the bindings, run natively. Error paths build a
//! `JsError`, which needs a JavaScript host.

use sentlin_wasm::{enumerate, linearize, random_planar};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn planar_graph_comes_with_one_point_per_node() {
    let r = parse(random_planar(12, 4).unwrap());
    assert_eq!(r["points"].as_array().unwrap().len(), 12);
    assert_eq!(r["graph"]["node_labels"].as_array().unwrap().len(), 12);
    assert_eq!(r["planar"], true);
    // same seed, same graph
    assert_eq!(parse(random_planar(12, 4).unwrap()), r);
}

#[test]
fn linearize_reports_each_draw() {
    let g = parse(random_planar(9, 1).unwrap())["graph"].to_string();
    let r = parse(linearize(&g, "min-degree", 3, 5).unwrap());
    let seqs = r["sequences"].as_array().unwrap();
    assert_eq!(seqs.len(), 5);
    for s in seqs {
        let text = s["text"].as_str().unwrap();
        assert_eq!(text.split(' ').count() as u64, s["length"].as_u64().unwrap());
        assert!(text.starts_with("BOS N0") && text.ends_with("EOS"));
        assert_eq!(s["node_order"].as_array().unwrap().len(), 9);
    }
    assert!(r["distinct"].as_u64().unwrap() >= 1);
}

#[test]
fn single_edge_has_two_linearizations_with_one_text() {
    let g = r#"{"node_labels":["X","X"],"edges":[[0,1,"e"]]}"#;
    let r = parse(enumerate(g, 100).unwrap());
    assert_eq!(r["count"], 2);
    assert_eq!(r["distinct_texts"], 1);
    assert_eq!(r["sequences"][0], "BOS N0 L:X E:e N1 L:X EOS");
}

//! Newline-delimited JSON graph records.
//!
//! One graph per line: `{"node_labels": ["C","H"], "edges": [[0,1,"single"]]}`.
//! Labels are resolved into a vocabulary shared by every graph in the file,
//! in order of first appearance.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GraphError, LabeledGraph, Vocab};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub node_labels: Vec<String>,
    pub edges: Vec<(usize, usize, String)>,
}

impl GraphRecord {
    pub fn from_graph(g: &LabeledGraph) -> Self {
        let vocab = g.vocab();
        Self {
            node_labels: (0..g.n()).map(|v| g.node_label_str(v).to_string()).collect(),
            edges: g.edges().iter().map(|e| (e.u, e.v, vocab.edge_labels[e.label as usize].clone())).collect(),
        }
    }

    /// Resolves the record against `vocab`, interning new labels.
    pub fn to_graph(&self, vocab: &mut Vocab) -> Result<LabeledGraph, GraphError> {
        let nodes = self.node_labels.iter().map(|l| vocab.intern_node(l)).collect();
        let edges: Vec<_> = self.edges.iter().map(|(u, v, l)| (*u, *v, vocab.intern_edge(l))).collect();
        LabeledGraph::new(vocab.clone(), nodes, edges)
    }
}

/// Reads every graph; all returned graphs share the final vocabulary.
pub fn read_graphs<R: std::io::Read>(reader: R) -> Result<Vec<LabeledGraph>, GraphError> {
    let mut vocab = Vocab::default();
    let mut records = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: GraphRecord =
            serde_json::from_str(&line).map_err(|e| GraphError::Parse { line: line_no, message: e.to_string() })?;
        // validate eagerly so errors carry the line number
        record.to_graph(&mut vocab).map_err(|e| GraphError::Parse { line: line_no, message: e.to_string() })?;
        records.push(record);
    }
    let mut graphs = Vec::with_capacity(records.len());
    for r in &records {
        graphs.push(r.to_graph(&mut vocab)?);
    }
    Ok(graphs)
}

pub fn read_graphs_from_path(path: impl AsRef<Path>) -> Result<Vec<LabeledGraph>, GraphError> {
    read_graphs(std::fs::File::open(path)?)
}

pub fn write_graphs<W: Write>(mut writer: W, graphs: &[LabeledGraph]) -> Result<(), GraphError> {
    for g in graphs {
        let line = serde_json::to_string(&GraphRecord::from_graph(g)).expect("graph record serializes");
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

pub fn write_graphs_to_path(path: impl AsRef<Path>, graphs: &[LabeledGraph]) -> Result<(), GraphError> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_graphs(&mut w, graphs)?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_shared_vocab() {
        let text = r#"{"node_labels": ["C","H"], "edges": [[0,1,"single"]]}

{"node_labels": ["O","C"], "edges": [[1,0,"double"]]}
"#;
        let gs = read_graphs(text.as_bytes()).unwrap();
        assert_eq!(gs.len(), 2);
        assert_eq!(gs[0].vocab(), gs[1].vocab());
        assert_eq!(gs[0].vocab().node_labels, vec!["C", "H", "O"]);
        assert_eq!(gs[1].edges()[0].u, 0);
        assert_eq!(gs[1].node_label_str(1), "C");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "{\"node_labels\": [\"C\"], \"edges\": []}\n{\"node_labels\": [\"C\",\"C\"], \"edges\": [[0,1,\"s\"],[1,0,\"s\"]]}\n";
        match read_graphs(text.as_bytes()) {
            Err(GraphError::Parse { line: 2, message }) => assert!(message.contains("duplicate")),
            other => panic!("unexpected {other:?}"),
        }
        let text = "{\"node_labels\": [\"C\"], \"edges\": [[0,0,\"s\"]]}\n";
        assert!(matches!(read_graphs(text.as_bytes()), Err(GraphError::Parse { line: 1, .. })));
        assert!(matches!(read_graphs("{oops".as_bytes()), Err(GraphError::Parse { line: 1, .. })));
    }

    #[test]
    fn write_then_read() {
        let g = LabeledGraph::from_labels(&["C", "O"], &[(0, 1, "double")]).unwrap();
        let mut buf = Vec::new();
        write_graphs(&mut buf, std::slice::from_ref(&g)).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "{\"node_labels\":[\"C\",\"O\"],\"edges\":[[0,1,\"double\"]]}\n"
        );
        assert_eq!(read_graphs(buf.as_slice()).unwrap()[0], g);
    }
}

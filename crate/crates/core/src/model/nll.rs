//! Externally computed sequence NLLs.

use std::collections::{BTreeMap, HashSet};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ModelError;

pub const NLL_COLUMNS: [&str; 5] = ["graph_id", "perm_index", "strategy", "nll", "n_tokens"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NllRecord {
    pub graph_id: String,
    pub perm_index: u64,
    pub strategy: String,
    pub nll: f64,
    pub n_tokens: u64,
}

/// Parses NLL CSV rows and groups them by graph id, each group ordered by
/// permutation index.
pub fn ingest_nll<R: Read>(reader: R) -> Result<BTreeMap<String, Vec<NllRecord>>, ModelError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| ModelError::Csv { line: 1, message: e.to_string() })?.clone();
    let mut col = [0usize; 5];
    for (slot, name) in col.iter_mut().zip(NLL_COLUMNS) {
        *slot = headers.iter().position(|h| h == name).ok_or_else(|| ModelError::MissingColumn(name.to_string()))?;
    }
    let mut seen = HashSet::new();
    let mut groups: BTreeMap<String, Vec<NllRecord>> = BTreeMap::new();
    for row in rdr.records() {
        let row =
            row.map_err(|e| ModelError::Csv { line: e.position().map_or(0, |p| p.line()), message: e.to_string() })?;
        let line = row.position().map_or(0, |p| p.line());
        let field = |i: usize| row.get(col[i]).unwrap_or("");
        let bad = |what: &str| ModelError::Csv {
            line,
            message: format!("invalid {what} {:?}", field(NLL_COLUMNS.iter().position(|c| *c == what).unwrap())),
        };
        let perm_index: u64 = field(1).parse().map_err(|_| bad("perm_index"))?;
        let nll: f64 = field(3).parse().map_err(|_| bad("nll"))?;
        let n_tokens: u64 = field(4).parse().map_err(|_| bad("n_tokens"))?;
        if !nll.is_finite() {
            return Err(ModelError::Csv { line, message: format!("nll must be finite, got {nll}") });
        }
        if nll < 0.0 {
            return Err(ModelError::Csv { line, message: format!("negative nll {nll}") });
        }
        let graph_id = field(0).to_string();
        if !seen.insert((graph_id.clone(), perm_index)) {
            return Err(ModelError::DuplicateRecord { line, graph_id, perm_index });
        }
        let rec = NllRecord { graph_id: graph_id.clone(), perm_index, strategy: field(2).to_string(), nll, n_tokens };
        groups.entry(graph_id).or_default().push(rec);
    }
    for g in groups.values_mut() {
        g.sort_by_key(|r| r.perm_index);
    }
    Ok(groups)
}

pub fn ingest_nll_path(path: &Path) -> Result<BTreeMap<String, Vec<NllRecord>>, ModelError> {
    ingest_nll(std::fs::File::open(path)?)
}

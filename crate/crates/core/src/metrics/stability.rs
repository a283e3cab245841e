use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::graph::LabeledGraph;

/// Allowed total bond order per element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValencyTable {
    pub allowed: BTreeMap<String, Vec<u32>>,
}

impl Default for ValencyTable {
    fn default() -> Self {
        let entries: [(&str, &[u32]); 12] = [
            ("H", &[1]),
            ("C", &[4]),
            ("N", &[3]),
            ("O", &[2]),
            ("F", &[1]),
            ("B", &[3]),
            ("Si", &[4]),
            ("P", &[3, 5]),
            ("S", &[4]),
            ("Cl", &[1]),
            ("Br", &[1]),
            ("I", &[1]),
        ];
        Self { allowed: entries.iter().map(|(a, v)| (a.to_string(), v.to_vec())).collect() }
    }
}

pub fn bond_order(label: &str) -> Result<u32, MetricsError> {
    match label {
        "single" => Ok(1),
        "double" => Ok(2),
        "triple" => Ok(3),
        other => Err(MetricsError::UnknownBond(other.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub atom_stable: Vec<bool>,
    pub atom_stable_fraction: f64,
    pub mol_stable: bool,
}

pub fn stability(g: &LabeledGraph, table: &ValencyTable) -> Result<StabilityReport, MetricsError> {
    let mut order = vec![0u32; g.n()];
    for e in g.edges() {
        let b = bond_order(&g.vocab().edge_labels[e.label as usize])?;
        order[e.u] += b;
        order[e.v] += b;
    }
    let atom_stable = (0..g.n())
        .map(|v| {
            let label = g.node_label_str(v);
            let allowed = table.allowed.get(label).ok_or_else(|| MetricsError::UnknownAtom(label.to_string()))?;
            Ok(allowed.contains(&order[v]))
        })
        .collect::<Result<Vec<bool>, MetricsError>>()?;
    let stable = atom_stable.iter().filter(|&&s| s).count();
    let atom_stable_fraction = if g.n() == 0 { 1.0 } else { stable as f64 / g.n() as f64 };
    Ok(StabilityReport { mol_stable: stable == g.n(), atom_stable, atom_stable_fraction })
}

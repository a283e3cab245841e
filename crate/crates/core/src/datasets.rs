//! Synthetic corpora: random graphs, Delaunay triangulations and a small
//! hand-built set of explicit-hydrogen molecules.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{LabeledGraph, Vocab};
use crate::par;
use crate::rng::stream;

#[derive(Debug, Error, PartialEq)]
pub enum DatasetError {
    #[error("no connected graph after {attempts} attempts (n = {n}, p = {p})")]
    RejectionBudget { attempts: usize, n: usize, p: f64 },
    #[error("invalid dataset spec: {0}")]
    BadSpec(String),
    #[error("split leaves an empty side ({train} train, {test} test)")]
    EmptySplit { train: usize, test: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetKind {
    ErdosRenyi,
    DelaunayPlanar,
    ToyMolecules,
    /// Random stable C/N/O molecules.
    RandomMolecules,
    /// Random molecules, every other one broken by a valency perturbation.
    StabilityPool,
}

impl DatasetKind {
    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::ErdosRenyi => "erdos-renyi",
            DatasetKind::DelaunayPlanar => "delaunay-planar",
            DatasetKind::ToyMolecules => "toy-molecules",
            DatasetKind::RandomMolecules => "random-molecules",
            DatasetKind::StabilityPool => "stability-pool",
        }
    }

    pub fn is_molecular(self) -> bool {
        matches!(self, DatasetKind::ToyMolecules | DatasetKind::RandomMolecules | DatasetKind::StabilityPool)
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetKind {
    type Err = DatasetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "erdos-renyi" | "er" => Ok(DatasetKind::ErdosRenyi),
            "delaunay-planar" | "planar" => Ok(DatasetKind::DelaunayPlanar),
            "toy-molecules" | "molecules" => Ok(DatasetKind::ToyMolecules),
            "random-molecules" => Ok(DatasetKind::RandomMolecules),
            "stability-pool" => Ok(DatasetKind::StabilityPool),
            other => Err(DatasetError::BadSpec(format!("unknown dataset kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub kind: DatasetKind,
    pub n_graphs: usize,
    /// Inclusive node (or point) count range.
    pub min_nodes: usize,
    pub max_nodes: usize,
    /// Erdos-Renyi edge probability.
    pub edge_prob: f64,
    /// Erdos-Renyi only: reject disconnected draws.
    pub connected: bool,
    pub node_labels: Vec<String>,
    pub edge_labels: Vec<String>,
    pub seed: u64,
}

impl DatasetSpec {
    pub fn new(kind: DatasetKind, n_graphs: usize, seed: u64) -> Self {
        let (min_nodes, max_nodes) = match kind {
            DatasetKind::DelaunayPlanar => (12, 24),
            DatasetKind::RandomMolecules | DatasetKind::StabilityPool => (2, 9),
            _ => (4, 16),
        };
        Self {
            kind,
            n_graphs,
            min_nodes,
            max_nodes,
            edge_prob: 0.3,
            connected: true,
            node_labels: vec!["X".into()],
            edge_labels: vec!["e".into()],
            seed,
        }
    }
}

const REJECTION_BUDGET: usize = 10_000;

/// Graph `i` draws from stream `(seed, i, 0)`, so output does not depend on
/// thread count.
pub fn generate(spec: &DatasetSpec) -> Result<Vec<LabeledGraph>, DatasetError> {
    if spec.min_nodes == 0 || spec.min_nodes > spec.max_nodes {
        return Err(DatasetError::BadSpec(format!("node range {}..={}", spec.min_nodes, spec.max_nodes)));
    }
    if spec.kind.is_molecular() {
        return Ok(generate_tagged(spec)?.into_iter().map(|m| m.graph).collect());
    }
    if spec.node_labels.is_empty() || spec.edge_labels.is_empty() {
        return Err(DatasetError::BadSpec("label vocabularies must be non-empty".into()));
    }
    let vocab = Vocab::new(spec.node_labels.clone(), spec.edge_labels.clone());
    match spec.kind {
        DatasetKind::ErdosRenyi => {
            if !(0.0..=1.0).contains(&spec.edge_prob) {
                return Err(DatasetError::BadSpec(format!("edge probability {}", spec.edge_prob)));
            }
            par::map_range(spec.n_graphs, |i| {
                let mut rng = stream(spec.seed, i as u64, 0);
                let n = rng.gen_range(spec.min_nodes..=spec.max_nodes);
                erdos_renyi(&vocab, n, spec.edge_prob, spec.connected, &mut rng)
            })
            .into_iter()
            .collect()
        }
        DatasetKind::DelaunayPlanar => {
            if spec.min_nodes < 3 {
                return Err(DatasetError::BadSpec("Delaunay graphs need at least 3 points".into()));
            }
            Ok(par::map_range(spec.n_graphs, |i| {
                let mut rng = stream(spec.seed, i as u64, 0);
                let n = rng.gen_range(spec.min_nodes..=spec.max_nodes);
                delaunay_planar(&vocab, n, &mut rng)
            }))
        }
        _ => unreachable!("molecular kinds return early"),
    }
}

/// Molecule datasets with their expected stability. The toy list ignores
/// the size and count fields.
pub fn generate_tagged(spec: &DatasetSpec) -> Result<Vec<TaggedMolecule>, DatasetError> {
    let (lo, hi) = (spec.min_nodes, spec.max_nodes);
    match spec.kind {
        DatasetKind::ToyMolecules => Ok(toy_molecules()),
        DatasetKind::RandomMolecules => Ok(random_molecules(spec.n_graphs, lo, hi, spec.seed)
            .into_iter()
            .enumerate()
            .map(|(i, graph)| TaggedMolecule { name: format!("molecule-{i}"), graph, stable: true })
            .collect()),
        DatasetKind::StabilityPool => Ok(stability_pool(spec.n_graphs, lo, hi, &Perturbation::ALL, spec.seed)),
        other => Err(DatasetError::BadSpec(format!("{other} is not a molecule dataset"))),
    }
}

fn random_labels<R: Rng + ?Sized>(vocab: &Vocab, n: usize, rng: &mut R) -> Vec<u32> {
    (0..n).map(|_| rng.gen_range(0..vocab.node_labels.len()) as u32).collect()
}

pub fn erdos_renyi<R: Rng + ?Sized>(
    vocab: &Vocab,
    n: usize,
    p: f64,
    connected: bool,
    rng: &mut R,
) -> Result<LabeledGraph, DatasetError> {
    for _ in 0..REJECTION_BUDGET {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    edges.push((u, v, rng.gen_range(0..vocab.edge_labels.len()) as u32));
                }
            }
        }
        let g = LabeledGraph::new(vocab.clone(), random_labels(vocab, n, rng), edges).expect("simple by construction");
        if !connected || g.is_connected() {
            return Ok(g);
        }
    }
    Err(DatasetError::RejectionBudget { attempts: REJECTION_BUDGET, n, p })
}

/// Delaunay triangulation of `n` uniform points in the unit square. Draws
/// whose triangulation is degenerate (collinear or repeated points) are
/// redrawn.
pub fn delaunay_planar<R: Rng + ?Sized>(vocab: &Vocab, n: usize, rng: &mut R) -> LabeledGraph {
    delaunay_with_points(vocab, n, rng).0
}

/// As [`delaunay_planar`], also returning the point coordinates.
pub fn delaunay_with_points<R: Rng + ?Sized>(vocab: &Vocab, n: usize, rng: &mut R) -> (LabeledGraph, Vec<(f64, f64)>) {
    loop {
        let pts: Vec<delaunator::Point> =
            (0..n).map(|_| delaunator::Point { x: rng.gen::<f64>(), y: rng.gen::<f64>() }).collect();
        let tri = delaunator::triangulate(&pts);
        // a non-degenerate triangulation of n points with h on the hull has 2n - 2 - h triangles
        if tri.is_empty() || tri.len() + 2 + tri.hull.len() != 2 * n {
            continue;
        }
        let mut edges: Vec<(usize, usize)> = tri
            .triangles
            .chunks_exact(3)
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let labels = random_labels(vocab, n, rng);
        let edges: Vec<(usize, usize, u32)> =
            edges.into_iter().map(|(a, b)| (a, b, rng.gen_range(0..vocab.edge_labels.len()) as u32)).collect();
        let g = LabeledGraph::new(vocab.clone(), labels, edges).expect("triangulation edges are simple");
        return (g, pts.iter().map(|p| (p.x, p.y)).collect());
    }
}

/// Shuffles with stream `(seed, 0, 0)` and cuts at `round(fraction * len)`.
pub fn split<T: Clone>(items: &[T], train_fraction: f64, seed: u64) -> Result<(Vec<T>, Vec<T>), DatasetError> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(DatasetError::BadSpec(format!("train fraction {train_fraction} outside (0, 1)")));
    }
    let mut idx: Vec<usize> = (0..items.len()).collect();
    idx.shuffle(&mut stream(seed, 0, 0));
    let cut = (train_fraction * items.len() as f64).round() as usize;
    if cut == 0 || cut == items.len() {
        return Err(DatasetError::EmptySplit { train: cut, test: items.len() - cut });
    }
    let train = idx[..cut].iter().map(|&i| items[i].clone()).collect();
    let test = idx[cut..].iter().map(|&i| items[i].clone()).collect();
    Ok((train, test))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaggedMolecule {
    pub name: String,
    pub graph: LabeledGraph,
    /// Expected valency stability.
    pub stable: bool,
}

pub const ATOM_LABELS: [&str; 12] = ["H", "C", "N", "O", "F", "B", "Si", "P", "S", "Cl", "Br", "I"];
pub const BOND_LABELS: [&str; 3] = ["single", "double", "triple"];

pub fn molecule_vocab() -> Vocab {
    Vocab::new(ATOM_LABELS, BOND_LABELS)
}

/// Heavy atoms with bonds, then `hydrogens[i]` explicit H on heavy atom `i`.
pub fn molecule(heavy: &[&str], bonds: &[(usize, usize, &str)], hydrogens: &[usize]) -> LabeledGraph {
    let vocab = molecule_vocab();
    let mut labels: Vec<u32> = heavy.iter().map(|a| vocab.node_id(a).expect("known atom")).collect();
    let mut edges: Vec<(usize, usize, u32)> =
        bonds.iter().map(|&(a, b, l)| (a, b, vocab.edge_id(l).expect("known bond"))).collect();
    for (atom, &k) in hydrogens.iter().enumerate() {
        for _ in 0..k {
            edges.push((atom, labels.len(), 0));
            labels.push(0);
        }
    }
    LabeledGraph::new(vocab, labels, edges).expect("valid molecule")
}

/// Drops hydrogen `h` (a node labeled H); leaves its neighbor under-bonded.
pub fn remove_atom(g: &LabeledGraph, h: usize) -> LabeledGraph {
    let keep: Vec<usize> = (0..g.n()).filter(|&v| v != h).collect();
    let pos = |v: usize| keep.iter().position(|&k| k == v).unwrap();
    let edges = g.edges().iter().filter(|e| e.u != h && e.v != h).map(|e| (pos(e.u), pos(e.v), e.label));
    let labels = keep.iter().map(|&v| g.node_label(v)).collect();
    LabeledGraph::new(g.vocab().clone(), labels, edges).expect("subgraph of a valid graph")
}

/// Adds one hydrogen bonded to `atom`.
pub fn add_hydrogen(g: &LabeledGraph, atom: usize) -> LabeledGraph {
    let h = g.vocab().node_id("H").expect("molecule vocabulary");
    let single = g.vocab().edge_id("single").expect("molecule vocabulary");
    let mut labels = g.node_labels().to_vec();
    labels.push(h);
    let mut edges: Vec<(usize, usize, u32)> = g.edges().iter().map(|e| (e.u, e.v, e.label)).collect();
    edges.push((atom, g.n(), single));
    LabeledGraph::new(g.vocab().clone(), labels, edges).expect("new node")
}

pub fn toy_molecules() -> Vec<TaggedMolecule> {
    let s = "single";
    let d = "double";
    let t = "triple";
    let stable = [
        ("methane", molecule(&["C"], &[], &[4])),
        ("water", molecule(&["O"], &[], &[2])),
        ("ammonia", molecule(&["N"], &[], &[3])),
        ("ethanol", molecule(&["C", "C", "O"], &[(0, 1, s), (1, 2, s)], &[3, 2, 1])),
        ("benzene", molecule(&["C"; 6], &[(0, 1, d), (1, 2, s), (2, 3, d), (3, 4, s), (4, 5, d), (5, 0, s)], &[1; 6])),
        ("formaldehyde", molecule(&["C", "O"], &[(0, 1, d)], &[2, 0])),
        ("hydrogen fluoride", molecule(&["F"], &[], &[1])),
        ("ethene", molecule(&["C", "C"], &[(0, 1, d)], &[2, 2])),
        ("ethyne", molecule(&["C", "C"], &[(0, 1, t)], &[1, 1])),
        ("methylamine", molecule(&["C", "N"], &[(0, 1, s)], &[3, 2])),
        ("methanol", molecule(&["C", "O"], &[(0, 1, s)], &[3, 1])),
        ("hydrogen cyanide", molecule(&["C", "N"], &[(0, 1, t)], &[1, 0])),
        ("carbon dioxide", molecule(&["O", "C", "O"], &[(0, 1, d), (1, 2, d)], &[0, 0, 0])),
        ("acetic acid", molecule(&["C", "C", "O", "O"], &[(0, 1, s), (1, 2, d), (1, 3, s)], &[3, 0, 0, 1])),
        ("dimethyl ether", molecule(&["C", "O", "C"], &[(0, 1, s), (1, 2, s)], &[3, 0, 3])),
        ("propene", molecule(&["C", "C", "C"], &[(0, 1, d), (1, 2, s)], &[2, 1, 3])),
        ("acetone", molecule(&["C", "C", "O", "C"], &[(0, 1, s), (1, 2, d), (1, 3, s)], &[3, 0, 0, 3])),
        ("chloromethane", molecule(&["C", "Cl"], &[(0, 1, s)], &[3, 0])),
        ("bromomethane", molecule(&["C", "Br"], &[(0, 1, s)], &[3, 0])),
        ("iodomethane", molecule(&["C", "I"], &[(0, 1, s)], &[3, 0])),
        ("silane", molecule(&["Si"], &[], &[4])),
        ("borane", molecule(&["B"], &[], &[3])),
        ("phosphine", molecule(&["P"], &[], &[3])),
        (
            "phosphorus pentachloride",
            molecule(
                &["P", "Cl", "Cl", "Cl", "Cl", "Cl"],
                &[(0, 1, s), (0, 2, s), (0, 3, s), (0, 4, s), (0, 5, s)],
                &[0; 6],
            ),
        ),
        (
            "sulfur tetrafluoride",
            molecule(&["S", "F", "F", "F", "F"], &[(0, 1, s), (0, 2, s), (0, 3, s), (0, 4, s)], &[0; 5]),
        ),
    ];
    let unstable = [
        ("pentavalent carbon", molecule(&["C"], &[], &[5])),
        ("trivalent oxygen", molecule(&["O"], &[], &[3])),
        ("methyl radical", molecule(&["C"], &[], &[3])),
        ("hydroxyl radical", molecule(&["O"], &[], &[1])),
        ("tetravalent nitrogen", molecule(&["N"], &[], &[4])),
        ("phosphorus tetrahydride", molecule(&["P"], &[], &[4])),
        ("vinyl radical", molecule(&["C", "C"], &[(0, 1, d)], &[2, 1])),
        ("divalent fluorine", molecule(&["F", "C"], &[(0, 1, s)], &[1, 3])),
    ];
    let tag = |list: &[(&str, LabeledGraph)], ok: bool| -> Vec<TaggedMolecule> {
        list.iter().map(|(n, g)| TaggedMolecule { name: n.to_string(), graph: g.clone(), stable: ok }).collect()
    };
    let mut out = tag(&stable, true);
    out.extend(tag(&unstable, false));
    out
}

/// Random stable molecule over C, N and O: a tree of `heavy` atoms with an
/// optional ring closure and some double bonds, filled up with hydrogens.
pub fn random_molecule<R: Rng + ?Sized>(heavy: usize, rng: &mut R) -> LabeledGraph {
    const ELEMENTS: [(&str, usize); 3] = [("C", 4), ("N", 3), ("O", 2)];
    loop {
        let atoms: Vec<usize> = (0..heavy)
            .map(|_| match rng.gen_range(0..20) {
                0..=13 => 0,
                14..=16 => 1,
                _ => 2,
            })
            .collect();
        let mut free: Vec<usize> = atoms.iter().map(|&a| ELEMENTS[a].1).collect();
        let mut bonds: Vec<(usize, usize, usize)> = Vec::new();
        let mut ok = true;
        for v in 1..heavy {
            let open: Vec<usize> = (0..v).filter(|&u| free[u] > 0).collect();
            let Some(&u) = open.choose(rng) else {
                ok = false;
                break;
            };
            bonds.push((u, v, 1));
            free[u] -= 1;
            free[v] -= 1;
        }
        if !ok {
            continue;
        }
        if heavy >= 5 && rng.gen_bool(0.3) {
            let open: Vec<usize> = (0..heavy).filter(|&v| free[v] > 0).collect();
            let pairs: Vec<(usize, usize)> = open
                .iter()
                .flat_map(|&a| open.iter().map(move |&b| (a, b)))
                .filter(|&(a, b)| a < b && !bonds.iter().any(|&(x, y, _)| (x, y) == (a, b) || (x, y) == (b, a)))
                .collect();
            if let Some(&(a, b)) = pairs.choose(rng) {
                bonds.push((a, b, 1));
                free[a] -= 1;
                free[b] -= 1;
            }
        }
        for bond in &mut bonds {
            if free[bond.0] > 0 && free[bond.1] > 0 && rng.gen_bool(0.2) {
                bond.2 = 2;
                free[bond.0] -= 1;
                free[bond.1] -= 1;
            }
        }
        let names: Vec<&str> = atoms.iter().map(|&a| ELEMENTS[a].0).collect();
        let bonds: Vec<(usize, usize, &str)> = bonds.iter().map(|&(a, b, o)| (a, b, BOND_LABELS[o - 1])).collect();
        return molecule(&names, &bonds, &free);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Perturbation {
    /// Drop one hydrogen.
    RemoveHydrogen,
    /// Bond one more hydrogen to a heavy atom.
    AddHydrogen,
    /// Bond an existing hydrogen to a second heavy atom.
    BridgeHydrogen,
    /// Raise a single heavy-heavy bond to double.
    UpgradeBond,
}

impl Perturbation {
    pub const ALL: [Perturbation; 4] = [
        Perturbation::RemoveHydrogen,
        Perturbation::AddHydrogen,
        Perturbation::BridgeHydrogen,
        Perturbation::UpgradeBond,
    ];
}

/// Applies `kind`, or `None` when the molecule has no site for it.
pub fn perturb_molecule<R: Rng + ?Sized>(g: &LabeledGraph, kind: Perturbation, rng: &mut R) -> Option<LabeledGraph> {
    let h = g.vocab().node_id("H").expect("molecule vocabulary");
    let hydrogens: Vec<usize> = (0..g.n()).filter(|&v| g.node_label(v) == h).collect();
    let heavy: Vec<usize> = (0..g.n()).filter(|&v| g.node_label(v) != h).collect();
    let single = g.vocab().edge_id("single").expect("molecule vocabulary");
    let double = g.vocab().edge_id("double").expect("molecule vocabulary");
    let rebuild = |edges: Vec<(usize, usize, u32)>| {
        LabeledGraph::new(g.vocab().clone(), g.node_labels().to_vec(), edges).expect("same nodes, simple edges")
    };
    let mut edges: Vec<(usize, usize, u32)> = g.edges().iter().map(|e| (e.u, e.v, e.label)).collect();
    match kind {
        Perturbation::RemoveHydrogen => Some(remove_atom(g, *hydrogens.choose(rng)?)),
        Perturbation::AddHydrogen => Some(add_hydrogen(g, *heavy.choose(rng)?)),
        Perturbation::BridgeHydrogen => {
            let sites: Vec<(usize, usize)> = hydrogens
                .iter()
                .flat_map(|&x| heavy.iter().map(move |&y| (x, y)))
                .filter(|&(x, y)| !g.has_edge(x, y))
                .collect();
            let &(x, y) = sites.choose(rng)?;
            edges.push((x, y, single));
            Some(rebuild(edges))
        }
        Perturbation::UpgradeBond => {
            let sites: Vec<usize> = (0..edges.len())
                .filter(|&i| edges[i].2 == single && g.node_label(edges[i].0) != h && g.node_label(edges[i].1) != h)
                .collect();
            let &i = sites.choose(rng)?;
            edges[i].2 = double;
            Some(rebuild(edges))
        }
    }
}

/// Stable random molecules with `heavy_min..=heavy_max` heavy atoms;
/// molecule `i` uses stream `(seed, i, 0)`.
pub fn random_molecules(n: usize, heavy_min: usize, heavy_max: usize, seed: u64) -> Vec<LabeledGraph> {
    par::map_range(n, |i| {
        let mut rng = stream(seed, i as u64, 0);
        let heavy = rng.gen_range(heavy_min..=heavy_max);
        random_molecule(heavy, &mut rng)
    })
}

/// Even positions are stable molecules; odd positions are variants of other
/// stable molecules broken by a perturbation drawn from `kinds`.
pub fn stability_pool(
    n: usize,
    heavy_min: usize,
    heavy_max: usize,
    kinds: &[Perturbation],
    seed: u64,
) -> Vec<TaggedMolecule> {
    let base = random_molecules(n, heavy_min, heavy_max, seed);
    par::map(&base, |i, g| {
        if i % 2 == 0 {
            return TaggedMolecule { name: format!("stable-{i}"), graph: g.clone(), stable: true };
        }
        let mut rng = stream(seed, i as u64, 1);
        let mut order = kinds.to_vec();
        order.shuffle(&mut rng);
        let (kind, broken) =
            order.iter().find_map(|&k| perturb_molecule(g, k, &mut rng).map(|b| (k, b))).unwrap_or_else(|| {
                let k = Perturbation::AddHydrogen;
                (k, perturb_molecule(g, k, &mut rng).expect("every molecule has a heavy atom"))
            });
        TaggedMolecule { name: format!("variant-{i}-{kind:?}"), graph: broken, stable: false }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_planar, testing::complete};

    #[test]
    fn er_full_probability_is_complete() {
        let mut rng = stream(0, 0, 0);
        let g = erdos_renyi(&Vocab::new(["X"], ["e"]), 6, 1.0, true, &mut rng).unwrap();
        assert_eq!(g, complete(6));
    }

    #[test]
    fn er_rejection_budget() {
        let mut rng = stream(0, 0, 0);
        let err = erdos_renyi(&Vocab::new(["X"], ["e"]), 6, 0.0, true, &mut rng).unwrap_err();
        assert!(matches!(err, DatasetError::RejectionBudget { .. }));
    }

    #[test]
    fn delaunay_is_planar_and_connected() {
        let mut rng = stream(1, 0, 0);
        let v = Vocab::new(["X"], ["e"]);
        let four = delaunay_planar(&v, 4, &mut rng);
        assert!(is_planar(&four) && four.is_connected());
        assert!(four.m() == 5 || four.m() == 6);
        let mut spec = DatasetSpec::new(DatasetKind::DelaunayPlanar, 300, 3);
        spec.min_nodes = 4;
        for g in generate(&spec).unwrap() {
            assert!(is_planar(&g) && g.is_connected());
            assert!(g.m() <= 3 * g.n() - 6);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        for kind in [DatasetKind::ErdosRenyi, DatasetKind::DelaunayPlanar] {
            let spec = DatasetSpec::new(kind, 20, 9);
            assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        }
    }

    #[test]
    fn split_examples() {
        let items: Vec<usize> = (0..10).collect();
        let (a, b) = split(&items, 0.8, 4).unwrap();
        assert_eq!((a.len(), b.len()), (8, 2));
        assert_eq!(split(&items, 0.8, 4).unwrap(), (a.clone(), b.clone()));
        let mut all: Vec<usize> = a.into_iter().chain(b).collect();
        all.sort_unstable();
        assert_eq!(all, items);
        assert!(split(&items, 1.0, 0).is_err());
        assert!(matches!(split(&items[..1], 0.5, 0), Err(DatasetError::EmptySplit { .. })));
    }

    #[test]
    fn random_molecules_are_stable_and_variants_are_not() {
        use crate::metrics::{stability, ValencyTable};
        let t = ValencyTable::default();
        for g in random_molecules(300, 1, 9, 2) {
            assert!(g.is_connected());
            assert!(stability(&g, &t).unwrap().mol_stable);
        }
        let pool = stability_pool(200, 2, 8, &Perturbation::ALL, 3);
        for m in &pool {
            assert_eq!(stability(&m.graph, &t).unwrap().mol_stable, m.stable, "{}", m.name);
        }
        assert_eq!(pool.iter().filter(|m| m.stable).count(), 100);
    }

    #[test]
    fn molecule_list_shape() {
        let mols = toy_molecules();
        assert!(mols.iter().filter(|m| m.stable).count() >= 10);
        assert!(mols.iter().filter(|m| !m.stable).count() >= 4);
        let ethanol = &mols.iter().find(|m| m.name == "ethanol").unwrap().graph;
        assert_eq!((ethanol.n(), ethanol.m()), (9, 8));
        let fewer = remove_atom(ethanol, 8);
        assert_eq!((fewer.n(), fewer.m()), (8, 7));
        let more = add_hydrogen(ethanol, 0);
        assert_eq!(more.degrees()[0], 5);
    }
}

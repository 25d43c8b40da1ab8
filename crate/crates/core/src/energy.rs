//! Color energy graphs of an edge-colored `K_{n,n}`.
//!
//! The `r`-th energy graph joins an `r`-tuple `(a_1..a_r)` of A-vertices to
//! an `r`-tuple `(b_1..b_r)` of B-vertices when all edges `a_k b_k` share a
//! color. Tuples are stored as base-`n` codes with the first coordinate most
//! significant, so numeric order on codes is lexicographic order on tuples.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coloring::{max_monochromatic_star, BaseSubgraph, ColorId, Coloring, Side};
use crate::error::{Error, Result};
use crate::graph::SimpleGraph;

/// Largest number of tuples per side.
pub const MAX_TUPLES: u64 = 1_000_000;
/// Largest number of energy edges materialized.
pub const MAX_EDGES: u64 = 20_000_000;
pub const DEFAULT_PARTITION_RETRIES: usize = 32;

pub fn encode(coords: &[usize], n: usize) -> u32 {
    coords.iter().fold(0u32, |acc, &c| acc * n as u32 + c as u32)
}

pub fn decode(code: u32, n: usize, r: usize) -> Vec<usize> {
    let mut out = vec![0; r];
    let mut x = code as usize;
    for k in (0..r).rev() {
        out[k] = x % n;
        x /= n;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EnergyEdge {
    pub left: u32,
    pub right: u32,
    pub color: ColorId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    Raw,
    Partitioned,
    RarePruned,
    ConflictPruned,
}

/// `a_part[v]` is the index `k` of the part `A_k` holding vertex `a_v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partitions {
    pub a_part: Vec<usize>,
    pub b_part: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyGraph {
    pub n: usize,
    pub r: usize,
    pub edges: Vec<EnergyEdge>,
    pub stage: Stage,
    pub partitions: Option<Partitions>,
    /// Edge count of each color in the base coloring.
    pub color_multiplicity: Vec<usize>,
    /// Largest monochromatic star of the base coloring.
    pub max_star: usize,
    pub flags: Vec<String>,
}

/// A vertex of an energy graph.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TupleVertex {
    pub side: Side,
    pub coords: Vec<usize>,
}

impl TupleVertex {
    pub fn a(coords: Vec<usize>) -> Self {
        TupleVertex {
            side: Side::A,
            coords,
        }
    }

    pub fn b(coords: Vec<usize>) -> Self {
        TupleVertex {
            side: Side::B,
            coords,
        }
    }
}

impl EnergyGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn tuple(&self, code: u32) -> Vec<usize> {
        decode(code, self.n, self.r)
    }

    pub fn edge_set(&self) -> HashSet<(u32, u32)> {
        self.edges.iter().map(|e| (e.left, e.right)).collect()
    }

    /// Colors carried by at least one edge.
    pub fn colors(&self) -> BTreeSet<ColorId> {
        self.edges.iter().map(|e| e.color).collect()
    }

    /// Edge list with decoded tuples, for export.
    pub fn to_json(&self) -> serde_json::Value {
        let edges: Vec<serde_json::Value> = self
            .edges
            .iter()
            .map(|e| {
                serde_json::json!({
                    "left": self.tuple(e.left),
                    "right": self.tuple(e.right),
                    "color": e.color,
                })
            })
            .collect();
        serde_json::json!({
            "n": self.n,
            "r": self.r,
            "stage": self.stage,
            "partitions": self.partitions,
            "edges": edges,
        })
    }
}

/// The full `r`-th energy graph, `sum_i m_i^r` edges ordered by color and
/// then by the tuple of base edges.
pub fn build_energy(coloring: &Coloring, r: usize) -> Result<EnergyGraph> {
    if r < 2 {
        return Err(Error::input(format!("r must be at least 2, got {r}")));
    }
    let n = coloring.n();
    let tuples = (n as u64).checked_pow(r as u32).unwrap_or(u64::MAX);
    if tuples > MAX_TUPLES {
        return Err(Error::Resource(format!(
            "n^r = {n}^{r} tuples exceeds {MAX_TUPLES}"
        )));
    }
    let index = coloring.class_index();
    let total: u64 = index
        .multiplicities
        .iter()
        .map(|&m| (m as u64).saturating_pow(r as u32))
        .fold(0u64, u64::saturating_add);
    if total > MAX_EDGES {
        return Err(Error::Resource(format!(
            "{total} energy edges exceed {MAX_EDGES}"
        )));
    }
    let per_color: Vec<Vec<EnergyEdge>> = index
        .classes
        .par_iter()
        .enumerate()
        .map(|(color, class)| {
            let m = class.len();
            let count = m.pow(r as u32);
            let mut out = Vec::with_capacity(count);
            let mut digits = vec![0usize; r];
            for _ in 0..count {
                let (mut left, mut right) = (0u32, 0u32);
                for &d in &digits {
                    let (i, j) = class[d];
                    left = left * n as u32 + i as u32;
                    right = right * n as u32 + j as u32;
                }
                out.push(EnergyEdge {
                    left,
                    right,
                    color: color as ColorId,
                });
                for k in (0..r).rev() {
                    digits[k] += 1;
                    if digits[k] < m {
                        break;
                    }
                    digits[k] = 0;
                }
            }
            out
        })
        .collect();
    Ok(EnergyGraph {
        n,
        r,
        edges: per_color.concat(),
        stage: Stage::Raw,
        partitions: None,
        color_multiplicity: index.multiplicities,
        max_star: max_monochromatic_star(coloring).size,
        flags: Vec::new(),
    })
}

/// `(n^{2r} / |E|)^{1/(r-1)}`, a lower bound on the palette size of any
/// coloring whose `r`-th energy graph has `edge_count` edges.
pub fn energy_lower_bound_colors(edge_count: u64, n: usize, r: usize) -> Result<f64> {
    if r < 2 {
        return Err(Error::input(format!("r must be at least 2, got {r}")));
    }
    let floor = (n as u64).pow(2);
    if edge_count < floor {
        return Err(Error::input(format!(
            "edge count {edge_count} is below n^2 = {floor}"
        )));
    }
    let ratio = (n as f64).powi(2 * r as i32) / edge_count as f64;
    Ok(ratio.powf(1.0 / (r as f64 - 1.0)))
}

fn require_stage(e: &EnergyGraph, want: Stage) -> Result<()> {
    if e.stage != want {
        return Err(Error::precondition(format!(
            "expected stage {want:?}, found {:?}",
            e.stage
        )));
    }
    Ok(())
}

fn balanced_parts(n: usize, r: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut part = vec![0; n];
    let (base, extra) = (n / r, n % r);
    let mut pos = 0;
    for k in 0..r {
        let size = base + usize::from(k < extra);
        for &v in &order[pos..pos + size] {
            part[v] = k;
        }
        pos += size;
    }
    part
}

fn respects(code: u32, parts: &[usize], n: usize, r: usize) -> bool {
    decode(code, n, r)
        .iter()
        .enumerate()
        .all(|(k, &v)| parts[v] == k)
}

/// Keeps the edges whose `k`-th coordinates lie in `A_k` and `B_k` for
/// random balanced partitions; retries until at least
/// `|E| / (2 r^{2r})` edges survive, otherwise keeps the best attempt and
/// flags it.
pub fn prune_partition(energy: &EnergyGraph, seed: u64, retries: usize) -> Result<EnergyGraph> {
    require_stage(energy, Stage::Raw)?;
    let (n, r) = (energy.n, energy.r);
    let target = energy.edges.len() as f64 / (2.0 * (r as f64).powi(2 * r as i32));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Partitions, Vec<EnergyEdge>)> = None;
    let mut reached = false;
    for _ in 0..retries.max(1) {
        let parts = Partitions {
            a_part: balanced_parts(n, r, &mut rng),
            b_part: balanced_parts(n, r, &mut rng),
        };
        let kept: Vec<EnergyEdge> = energy
            .edges
            .iter()
            .copied()
            .filter(|e| {
                respects(e.left, &parts.a_part, n, r) && respects(e.right, &parts.b_part, n, r)
            })
            .collect();
        let better = best.as_ref().is_none_or(|b| kept.len() > b.1.len());
        let hit = kept.len() as f64 >= target;
        if better {
            best = Some((parts, kept));
        }
        if hit {
            reached = true;
            break;
        }
    }
    let (parts, kept) = best.unwrap();
    let mut out = EnergyGraph {
        edges: kept,
        stage: Stage::Partitioned,
        partitions: Some(parts),
        ..energy.clone()
    };
    if !reached {
        out.flags.push(format!(
            "BelowTarget: kept {} edges, target {target:.3}",
            out.edges.len()
        ));
    }
    Ok(out)
}

/// `ceil(log2 n)`, at least 1.
pub fn default_rare_threshold(n: usize) -> usize {
    (usize::BITS - (n.max(1) - 1).leading_zeros()).max(1) as usize
}

/// Drops edges whose color has fewer than `threshold` edges in the base coloring.
pub fn prune_rare_colors(energy: &EnergyGraph, threshold: usize) -> Result<EnergyGraph> {
    require_stage(energy, Stage::Partitioned)?;
    if threshold == 0 {
        return Err(Error::input("threshold must be at least 1"));
    }
    let edges = energy
        .edges
        .iter()
        .copied()
        .filter(|e| energy.color_multiplicity[e.color as usize] >= threshold)
        .collect();
    Ok(EnergyGraph {
        edges,
        stage: Stage::RarePruned,
        ..energy.clone()
    })
}

/// For each vertex of one side in increasing tuple order, and each
/// coordinate `k = 1..r` in turn, keeps only the least edge among those whose
/// neighbor has a given `k`-th coordinate.
fn thin_side(edges: Vec<EnergyEdge>, n: usize, r: usize, by_left: bool) -> Vec<EnergyEdge> {
    let mut groups: BTreeMap<u32, Vec<EnergyEdge>> = BTreeMap::new();
    for e in edges {
        let key = if by_left { e.left } else { e.right };
        groups.entry(key).or_default().push(e);
    }
    let mut out = Vec::new();
    for (_, mut group) in groups {
        group.sort_unstable_by_key(|e| if by_left { e.right } else { e.left });
        for k in 0..r {
            let mut seen = HashSet::new();
            group.retain(|e| {
                let other = if by_left { e.right } else { e.left };
                seen.insert(decode(other, n, r)[k])
            });
        }
        out.extend(group);
    }
    out.sort_unstable_by_key(|e| (e.left, e.right));
    out
}

/// Leaves a graph in which any two vertices with a common neighbor differ
/// in every coordinate. Needs every monochromatic star to have fewer than
/// `ell_star` edges.
pub fn prune_coordinate_conflicts(energy: &EnergyGraph, ell_star: usize) -> Result<EnergyGraph> {
    require_stage(energy, Stage::RarePruned)?;
    if energy.max_star >= ell_star {
        return Err(Error::precondition(format!(
            "monochromatic star of size {} is not below {ell_star}",
            energy.max_star
        )));
    }
    let (n, r) = (energy.n, energy.r);
    let input = energy.edges.len();
    let edges = thin_side(energy.edges.clone(), n, r, true);
    let edges = thin_side(edges, n, r, false);
    let mut out = EnergyGraph {
        edges,
        stage: Stage::ConflictPruned,
        ..energy.clone()
    };
    let factor = ((ell_star.max(2) - 1) as f64).powi((2 * r * (r - 1)) as i32);
    if (out.edges.len() as f64) < input as f64 / factor {
        out.flags.push(format!(
            "RetentionBelowBound: kept {} of {input}, bound factor {factor}",
            out.edges.len()
        ));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneConfig {
    pub seed: u64,
    pub retries: usize,
    /// Defaults to `ceil(log2 n)`.
    pub threshold: Option<usize>,
    /// Defaults to one more than the largest monochromatic star.
    pub ell_star: Option<usize>,
}

impl Default for PruneConfig {
    fn default() -> Self {
        PruneConfig {
            seed: 0,
            retries: DEFAULT_PARTITION_RETRIES,
            threshold: None,
            ell_star: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PruneReport {
    pub raw_edges: usize,
    pub partitioned_edges: usize,
    pub rare_pruned_edges: usize,
    pub final_edges: usize,
    pub threshold: usize,
    pub ell_star: usize,
    /// `final_edges / raw_edges`.
    pub retained_fraction: f64,
}

/// Runs the three pruning stages.
pub fn pruned_energy(
    coloring: &Coloring,
    r: usize,
    config: PruneConfig,
) -> Result<(EnergyGraph, PruneReport)> {
    let raw = build_energy(coloring, r)?;
    let threshold = config
        .threshold
        .unwrap_or_else(|| default_rare_threshold(coloring.n()));
    let ell_star = config.ell_star.unwrap_or(raw.max_star + 1);
    let part = prune_partition(&raw, config.seed, config.retries)?;
    let rare = prune_rare_colors(&part, threshold)?;
    let done = prune_coordinate_conflicts(&rare, ell_star)?;
    let report = PruneReport {
        raw_edges: raw.edges.len(),
        partitioned_edges: part.edges.len(),
        rare_pruned_edges: rare.edges.len(),
        final_edges: done.edges.len(),
        threshold,
        ell_star,
        retained_fraction: if raw.edges.is_empty() {
            0.0
        } else {
            done.edges.len() as f64 / raw.edges.len() as f64
        },
    };
    Ok((done, report))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PruneViolation {
    NotEnergyEdge(EnergyEdge),
    MissingPartition,
    UnbalancedPart { side: Side, part: usize, size: usize },
    OutsidePart { side: Side, tuple: Vec<usize> },
    RareColor { color: ColorId, multiplicity: usize },
    SharedCoordinate { side: Side, x: Vec<usize>, y: Vec<usize>, via: Vec<usize> },
}

/// Exhaustive check of the partition, rare-color and coordinate-disjointness
/// properties against the base coloring.
pub fn validate_pruned(
    coloring: &Coloring,
    energy: &EnergyGraph,
    threshold: usize,
) -> Vec<PruneViolation> {
    let (n, r) = (energy.n, energy.r);
    let mut out = Vec::new();
    for e in &energy.edges {
        let (a, b) = (energy.tuple(e.left), energy.tuple(e.right));
        if (0..r).any(|k| coloring.color(a[k], b[k]) != e.color) {
            out.push(PruneViolation::NotEnergyEdge(*e));
        }
    }
    match &energy.partitions {
        None => out.push(PruneViolation::MissingPartition),
        Some(p) => {
            for (side, parts) in [(Side::A, &p.a_part), (Side::B, &p.b_part)] {
                for k in 0..r {
                    let size = parts.iter().filter(|&&x| x == k).count();
                    if size != n / r && size != n.div_ceil(r) {
                        out.push(PruneViolation::UnbalancedPart { side, part: k, size });
                    }
                }
            }
            let mut seen = BTreeSet::new();
            for e in &energy.edges {
                for (side, code, parts) in
                    [(Side::A, e.left, &p.a_part), (Side::B, e.right, &p.b_part)]
                {
                    if !respects(code, parts, n, r) && seen.insert((side, code)) {
                        out.push(PruneViolation::OutsidePart {
                            side,
                            tuple: decode(code, n, r),
                        });
                    }
                }
            }
        }
    }
    let index = coloring.class_index();
    for color in energy.colors() {
        let m = index.multiplicities[color as usize];
        if m < threshold {
            out.push(PruneViolation::RareColor {
                color,
                multiplicity: m,
            });
        }
    }
    for (side, by_left) in [(Side::B, true), (Side::A, false)] {
        let mut nbrs: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for e in &energy.edges {
            let (key, other) = if by_left {
                (e.left, e.right)
            } else {
                (e.right, e.left)
            };
            nbrs.entry(key).or_default().push(other);
        }
        for (via, list) in nbrs {
            let tuples: Vec<Vec<usize>> = list.iter().map(|&c| decode(c, n, r)).collect();
            for i in 0..tuples.len() {
                for j in i + 1..tuples.len() {
                    if (0..r).any(|k| tuples[i][k] == tuples[j][k]) {
                        out.push(PruneViolation::SharedCoordinate {
                            side,
                            x: tuples[i].clone(),
                            y: tuples[j].clone(),
                            via: decode(via, n, r),
                        });
                    }
                }
            }
        }
    }
    out
}

/// An energy graph as a plain graph: left tuples first, then right tuples,
/// each in increasing order.
#[derive(Clone, Debug)]
pub struct EnergySimpleGraph {
    pub graph: SimpleGraph,
    pub vertices: Vec<TupleVertex>,
    codes: Vec<(Side, u32)>,
}

impl EnergySimpleGraph {
    /// Energy edge `(left, right)` for an edge of the plain graph.
    pub fn energy_edge(&self, u: usize, v: usize) -> (TupleVertex, TupleVertex) {
        let (x, y) = (self.vertices[u].clone(), self.vertices[v].clone());
        if x.side == Side::A {
            (x, y)
        } else {
            (y, x)
        }
    }

    /// Energy edges along a closed walk of plain-graph vertices.
    pub fn cycle_edges(&self, cycle: &[usize]) -> Vec<(TupleVertex, TupleVertex)> {
        (0..cycle.len())
            .map(|k| self.energy_edge(cycle[k], cycle[(k + 1) % cycle.len()]))
            .collect()
    }

    /// Energy edges along a path of plain-graph vertices.
    pub fn path_edges(&self, path: &[usize]) -> Vec<(TupleVertex, TupleVertex)> {
        path.windows(2).map(|w| self.energy_edge(w[0], w[1])).collect()
    }

    pub fn code(&self, v: usize) -> (Side, u32) {
        self.codes[v]
    }
}

pub fn to_simple_graph(energy: &EnergyGraph) -> EnergySimpleGraph {
    let lefts: BTreeSet<u32> = energy.edges.iter().map(|e| e.left).collect();
    let rights: BTreeSet<u32> = energy.edges.iter().map(|e| e.right).collect();
    let mut codes: Vec<(Side, u32)> = lefts.iter().map(|&c| (Side::A, c)).collect();
    codes.extend(rights.iter().map(|&c| (Side::B, c)));
    let index: HashMap<(Side, u32), usize> =
        codes.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let edges: Vec<(usize, usize)> = energy
        .edges
        .iter()
        .map(|e| (index[&(Side::A, e.left)], index[&(Side::B, e.right)]))
        .collect();
    let graph = SimpleGraph::from_edges(codes.len(), &edges).expect("indices in range");
    let vertices = codes
        .iter()
        .map(|&(side, c)| TupleVertex {
            side,
            coords: energy.tuple(c),
        })
        .collect();
    EnergySimpleGraph {
        graph,
        vertices,
        codes,
    }
}

fn energy_pair(
    energy: &EnergyGraph,
    edges: &HashSet<(u32, u32)>,
    x: &TupleVertex,
    y: &TupleVertex,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let (a, b) = match (x.side, y.side) {
        (Side::A, Side::B) => (x, y),
        (Side::B, Side::A) => (y, x),
        _ => return Err(Error::input("energy edges join an A-tuple to a B-tuple")),
    };
    let ok_len = a.coords.len() == energy.r && b.coords.len() == energy.r;
    let ok_range = a.coords.iter().chain(&b.coords).all(|&c| c < energy.n);
    if !ok_len || !ok_range {
        return Err(Error::input(format!("malformed tuples {a:?}, {b:?}")));
    }
    let key = (encode(&a.coords, energy.n), encode(&b.coords, energy.n));
    if !edges.contains(&key) {
        return Err(Error::input(format!(
            "{:?} - {:?} is not an edge of the energy graph",
            a.coords, b.coords
        )));
    }
    Ok((a.coords.clone(), b.coords.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorrespondingStructure {
    pub subgraph: BaseSubgraph,
    pub repetitions: usize,
}

/// Projects energy edges through every coordinate map into the base graph.
pub fn corresponding_structure(
    coloring: &Coloring,
    energy: &EnergyGraph,
    witness: &[(TupleVertex, TupleVertex)],
) -> Result<CorrespondingStructure> {
    let edges = energy.edge_set();
    let mut sub = BaseSubgraph::new();
    let mut lefts = BTreeSet::new();
    let mut rights = BTreeSet::new();
    for (x, y) in witness {
        let (a, b) = energy_pair(energy, &edges, x, y)?;
        for k in 0..energy.r {
            sub.add_edge(a[k], b[k]);
        }
        lefts.insert(a);
        rights.insert(b);
    }
    let r = energy.r;
    assert!(sub.edges.len() <= r * witness.len());
    assert!(sub.a_vertices.len() <= r * lefts.len());
    assert!(sub.b_vertices.len() <= r * rights.len());
    let repetitions = sub.repetitions(coloring);
    Ok(CorrespondingStructure {
        subgraph: sub,
        repetitions,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoordClass {
    /// The projected vertex is new.
    New,
    /// The vertex is present but the projected edge is new.
    Seen,
    /// The projected edge is already present.
    Duplicate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LedgerStep {
    /// Side of the tuple `v_i` added by this step.
    pub new_side: Side,
    pub classes: Vec<CoordClass>,
    pub n: usize,
    pub s: usize,
    pub d: usize,
    /// Change in color repetitions from `H_{i-1}` to `H_i`.
    pub gain: i64,
    /// Lower bound `n_i + s_i - [d_i = 0]` on `gain`; needs the coordinates
    /// of `v_i` to be pairwise distinct.
    pub gain_bound: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReservoirLedger {
    pub steps: Vec<LedgerStep>,
    /// 1-based step indices whose new tuple lies in A (resp. B).
    pub i_a: Vec<usize>,
    pub i_b: Vec<usize>,
    pub m_a: usize,
    pub m_b: usize,
    pub n_a: usize,
    pub s_a: usize,
    pub d_a: usize,
    pub n_b: usize,
    pub s_b: usize,
    pub d_b: usize,
    pub final_graph: BaseSubgraph,
}

fn side_vertex(side: Side, v: usize) -> crate::coloring::Vertex {
    match side {
        Side::A => crate::coloring::Vertex::A(v),
        Side::B => crate::coloring::Vertex::B(v),
    }
}

/// Replays an ordering `(u_i, v_i)` of energy edges on top of `h`, where each
/// `u_i` must project into the graph built so far, and classifies every
/// coordinate of every `v_i`.
pub fn classify_ordering(
    h: &BaseSubgraph,
    coloring: &Coloring,
    energy: &EnergyGraph,
    ordering: &[(TupleVertex, TupleVertex)],
) -> Result<ReservoirLedger> {
    let edges = energy.edge_set();
    let r = energy.r;
    let mut cur = h.clone();
    let mut ledger = ReservoirLedger {
        steps: Vec::with_capacity(ordering.len()),
        i_a: Vec::new(),
        i_b: Vec::new(),
        m_a: 0,
        m_b: 0,
        n_a: 0,
        s_a: 0,
        d_a: 0,
        n_b: 0,
        s_b: 0,
        d_b: 0,
        final_graph: BaseSubgraph::new(),
    };
    for (idx, (u, v)) in ordering.iter().enumerate() {
        let (a, b) = energy_pair(energy, &edges, u, v)?;
        if let Some(&k) = u
            .coords
            .iter()
            .find(|&&x| !cur.contains_vertex(side_vertex(u.side, x)))
        {
            return Err(Error::precondition(format!(
                "ordering is not compatible at step {}: vertex {k} of {:?} is missing",
                idx + 1,
                u.coords
            )));
        }
        let before = cur.repetitions(coloring) as i64;
        let mut classes = Vec::with_capacity(r);
        for k in 0..r {
            let vk = side_vertex(v.side, v.coords[k]);
            let class = if !cur.contains_vertex(vk) {
                CoordClass::New
            } else if !cur.edges.contains(&(a[k], b[k])) {
                CoordClass::Seen
            } else {
                CoordClass::Duplicate
            };
            classes.push(class);
        }
        for k in 0..r {
            cur.add_edge(a[k], b[k]);
        }
        let count = |c: CoordClass| classes.iter().filter(|&&x| x == c).count();
        let (n_i, s_i, d_i) = (
            count(CoordClass::New),
            count(CoordClass::Seen),
            count(CoordClass::Duplicate),
        );
        let gain = cur.repetitions(coloring) as i64 - before;
        let gain_bound = (n_i + s_i) as i64 - i64::from(d_i == 0);
        match v.side {
            Side::A => {
                ledger.i_a.push(idx + 1);
                ledger.n_a += n_i;
                ledger.s_a += s_i;
                ledger.d_a += d_i;
            }
            Side::B => {
                ledger.i_b.push(idx + 1);
                ledger.n_b += n_i;
                ledger.s_b += s_i;
                ledger.d_b += d_i;
            }
        }
        ledger.steps.push(LedgerStep {
            new_side: v.side,
            classes,
            n: n_i,
            s: s_i,
            d: d_i,
            gain,
            gain_bound,
        });
    }
    ledger.m_a = ledger.i_a.len();
    ledger.m_b = ledger.i_b.len();
    ledger.final_graph = cur;
    Ok(ledger)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reservoir {
    /// Tuples over A, each adjacent to `source_b`.
    pub r_a: Vec<Vec<usize>>,
    /// Tuples over B, each adjacent to `source_a`.
    pub r_b: Vec<Vec<usize>>,
    pub source_a: Vec<usize>,
    pub source_b: Vec<usize>,
}

/// Checks the reservoir conditions relative to `f`: sources project into
/// `f`, sources are adjacent to the opposite reservoir, and the reservoir
/// coordinates avoid `f` and are pairwise distinct (also within a tuple).
pub fn validate_reservoir(
    energy: &EnergyGraph,
    f: &BaseSubgraph,
    reservoir: &Reservoir,
) -> Result<()> {
    let edges = energy.edge_set();
    let bad = |msg: String| Err(Error::precondition(msg));
    if reservoir.source_a.iter().any(|x| !f.a_vertices.contains(x))
        || reservoir.source_b.iter().any(|x| !f.b_vertices.contains(x))
    {
        return bad("source coordinates must lie in the base subgraph".into());
    }
    let sa = TupleVertex::a(reservoir.source_a.clone());
    let sb = TupleVertex::b(reservoir.source_b.clone());
    for y in &reservoir.r_a {
        if energy_pair(energy, &edges, &TupleVertex::a(y.clone()), &sb).is_err() {
            return bad(format!("{y:?} is not adjacent to the B source"));
        }
    }
    for x in &reservoir.r_b {
        if energy_pair(energy, &edges, &sa, &TupleVertex::b(x.clone())).is_err() {
            return bad(format!("{x:?} is not adjacent to the A source"));
        }
    }
    let mut used_a = BTreeSet::new();
    for &v in reservoir.r_a.iter().flatten() {
        if f.a_vertices.contains(&v) || !used_a.insert(v) {
            return bad(format!("A-coordinate {v} is reused or lies in the base subgraph"));
        }
    }
    let mut used_b = BTreeSet::new();
    for &v in reservoir.r_b.iter().flatten() {
        if f.b_vertices.contains(&v) || !used_b.insert(v) {
            return bad(format!("B-coordinate {v} is reused or lies in the base subgraph"));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extension {
    pub f_star: BaseSubgraph,
    /// Repetitions of `f_star` minus those of `f`.
    pub gain: i64,
    /// `floor(D1 (r-1) / r) + floor(D2 (r-1) / r)`.
    pub claimed_gain: i64,
}

/// Adds `d1` new A-vertices from the A-reservoir (joined to the B source)
/// and `d2` new B-vertices from the B-reservoir (joined to the A source):
/// whole tuples first, then a prefix of the coordinates of one more tuple.
pub fn extend_with_reservoir(
    coloring: &Coloring,
    energy: &EnergyGraph,
    f: &BaseSubgraph,
    reservoir: &Reservoir,
    d1: usize,
    d2: usize,
) -> Result<Extension> {
    let r = energy.r;
    if d1 > r * reservoir.r_a.len() || d2 > r * reservoir.r_b.len() {
        return Err(Error::input(format!(
            "D1 = {d1}, D2 = {d2} exceed reservoir capacity ({}, {})",
            r * reservoir.r_a.len(),
            r * reservoir.r_b.len()
        )));
    }
    validate_reservoir(energy, f, reservoir)?;
    let mut g = f.clone();
    let (w1, z1) = (d1 / r, d1 % r);
    for (l, y) in reservoir.r_a.iter().enumerate().take(w1 + usize::from(z1 > 0)) {
        let upto = if l < w1 { r } else { z1 };
        for k in 0..upto {
            g.add_edge(y[k], reservoir.source_b[k]);
        }
    }
    let (w2, z2) = (d2 / r, d2 % r);
    for (l, x) in reservoir.r_b.iter().enumerate().take(w2 + usize::from(z2 > 0)) {
        let upto = if l < w2 { r } else { z2 };
        for k in 0..upto {
            g.add_edge(reservoir.source_a[k], x[k]);
        }
    }
    let gain = g.repetitions(coloring) as i64 - f.repetitions(coloring) as i64;
    let claimed_gain = ((d1 * (r - 1)) / r + (d2 * (r - 1)) / r) as i64;
    Ok(Extension {
        f_star: g,
        gain,
        claimed_gain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{monochromatic, near_rainbow_pairs, rainbow};

    #[test]
    fn codes_are_lexicographic() {
        assert_eq!(encode(&[1, 2], 3), 5);
        assert_eq!(decode(5, 3, 2), vec![1, 2]);
        assert!(encode(&[0, 2], 3) < encode(&[1, 0], 3));
    }

    #[test]
    fn energy_edge_counts() {
        assert_eq!(build_energy(&rainbow(3).unwrap(), 2).unwrap().edge_count(), 9);
        assert_eq!(build_energy(&monochromatic(2).unwrap(), 2).unwrap().edge_count(), 16);
        let two = Coloring::from_rows(&[vec![0, 0], vec![1, 1]]).unwrap();
        assert_eq!(build_energy(&two, 2).unwrap().edge_count(), 8);
        assert!(build_energy(&rainbow(3).unwrap(), 1).is_err());
        assert!(build_energy(&rainbow(40).unwrap(), 4).is_err());
    }

    #[test]
    fn lower_bound_is_tight_at_extremes() {
        assert!((energy_lower_bound_colors(9, 3, 2).unwrap() - 9.0).abs() < 1e-9);
        assert!((energy_lower_bound_colors(16, 2, 2).unwrap() - 1.0).abs() < 1e-9);
        assert!(energy_lower_bound_colors(3, 3, 2).is_err());
    }

    #[test]
    fn partition_counts() {
        let raw = build_energy(&monochromatic(4).unwrap(), 2).unwrap();
        let p = prune_partition(&raw, 7, 32).unwrap();
        assert_eq!(p.edge_count(), 16);
        assert!(p.flags.is_empty());
        let raw = build_energy(&rainbow(4).unwrap(), 2).unwrap();
        let p = prune_partition(&raw, 7, 32).unwrap();
        assert_eq!(p.edge_count(), 0);
        assert_eq!(p.flags.len(), 1);
        assert!(prune_partition(&p, 1, 1).is_err());
    }

    #[test]
    fn rare_threshold_default() {
        assert_eq!(default_rare_threshold(1), 1);
        assert_eq!(default_rare_threshold(2), 1);
        assert_eq!(default_rare_threshold(8), 3);
        assert_eq!(default_rare_threshold(9), 4);
    }

    #[test]
    fn pipeline_on_pairs() {
        let c = near_rainbow_pairs(8, 3, 3).unwrap().coloring;
        let config = PruneConfig {
            threshold: Some(2),
            ..PruneConfig::default()
        };
        let (g, report) = pruned_energy(&c, 2, config).unwrap();
        assert!(validate_pruned(&c, &g, 2).is_empty());
        assert!(report.final_edges <= report.rare_pruned_edges);
        let mono = monochromatic(2).unwrap();
        let raw = build_energy(&mono, 2).unwrap();
        let rare = prune_rare_colors(&prune_partition(&raw, 0, 4).unwrap(), 1).unwrap();
        assert!(prune_coordinate_conflicts(&rare, 2).is_err());
    }

    #[test]
    fn ledger_single_edge() {
        let c = monochromatic(4).unwrap();
        let e = build_energy(&c, 2).unwrap();
        let mut h = BaseSubgraph::new();
        h.a_vertices.extend([0, 1]);
        let ord = vec![(TupleVertex::a(vec![0, 1]), TupleVertex::b(vec![2, 3]))];
        let l = classify_ordering(&h, &c, &e, &ord).unwrap();
        assert_eq!((l.steps[0].n, l.steps[0].gain), (2, 1));
        let l2 = classify_ordering(&l.final_graph, &c, &e, &ord).unwrap();
        assert_eq!((l2.steps[0].d, l2.steps[0].gain), (2, 0));
        let bad = vec![(TupleVertex::a(vec![2, 3]), TupleVertex::b(vec![0, 1]))];
        assert!(classify_ordering(&h, &c, &e, &bad).is_err());
    }
}

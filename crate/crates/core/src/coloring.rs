//! Edge-colorings of `K_{n,n}` and the color-counting primitives built on them.
//!
//! Vertices of the two parts are `a_0..a_{n-1}` and `b_0..b_{n-1}`; entry
//! `(i, j)` of the matrix is the color of `a_i b_j`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, DetectBudget, DetectOutcome, SimpleGraph};

pub type ColorId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Vertex {
    A(usize),
    B(usize),
}

/// The requirement "every copy of `K_{s,t}` sees at least `q` colors".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PatternSpec {
    pub s: usize,
    pub t: usize,
    pub q: usize,
}

impl PatternSpec {
    pub fn new(s: usize, t: usize, q: usize) -> Result<Self> {
        if s < 1 || s > t {
            return Err(Error::input(format!("need 1 <= s <= t, got s={s}, t={t}")));
        }
        if q < 2 || q > s * t {
            return Err(Error::input(format!(
                "need 2 <= q <= st = {}, got q={q}",
                s * t
            )));
        }
        Ok(PatternSpec { s, t, q })
    }

    pub fn edges(&self) -> usize {
        self.s * self.t
    }
}

/// A copy of `K_{s,t}` given by its vertex sets in the two parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subcopy {
    pub a_side: Vec<usize>,
    pub b_side: Vec<usize>,
    /// `true` when the `s`-side of the pattern lies in part A.
    pub s_in_a: bool,
}

impl Subcopy {
    pub fn new(mut a_side: Vec<usize>, mut b_side: Vec<usize>, s_in_a: bool) -> Self {
        a_side.sort_unstable();
        a_side.dedup();
        b_side.sort_unstable();
        b_side.dedup();
        Subcopy {
            a_side,
            b_side,
            s_in_a,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.a_side.len() * self.b_side.len()
    }

    fn check(&self, n: usize) -> Result<()> {
        for side in [&self.a_side, &self.b_side] {
            if side.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::input("copy vertex lists must be sorted and duplicate-free"));
            }
            if let Some(&v) = side.iter().find(|&&v| v >= n) {
                return Err(Error::input(format!("copy vertex {v} outside 0..{n}")));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ColoringRepr {
    n: usize,
    matrix: Vec<Vec<ColorId>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ColoringRepr", into = "ColoringRepr")]
pub struct Coloring {
    n: usize,
    matrix: Vec<ColorId>,
    palette_size: usize,
}

impl TryFrom<ColoringRepr> for Coloring {
    type Error = Error;

    fn try_from(repr: ColoringRepr) -> Result<Self> {
        if repr.matrix.len() != repr.n {
            return Err(Error::input(format!(
                "matrix has {} rows, expected {}",
                repr.matrix.len(),
                repr.n
            )));
        }
        Coloring::from_rows(&repr.matrix)
    }
}

impl From<Coloring> for ColoringRepr {
    fn from(c: Coloring) -> Self {
        ColoringRepr {
            n: c.n,
            matrix: c.rows(),
        }
    }
}

impl Coloring {
    /// Wraps a row-major matrix whose colors already form the dense range `0..k`.
    pub fn new(n: usize, matrix: Vec<ColorId>) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("n must be positive"));
        }
        if matrix.len() != n * n {
            return Err(Error::input(format!(
                "matrix has {} entries, expected {}",
                matrix.len(),
                n * n
            )));
        }
        let max = *matrix.iter().max().unwrap() as usize;
        let mut seen = vec![false; max + 1];
        for &c in &matrix {
            seen[c as usize] = true;
        }
        if let Some(gap) = seen.iter().position(|&x| !x) {
            return Err(Error::input(format!(
                "palette is not dense: color {gap} unused but {max} present"
            )));
        }
        Ok(Coloring {
            n,
            matrix,
            palette_size: max + 1,
        })
    }

    /// Relabels arbitrary color ids to `0..k` preserving their order.
    pub fn compacted(n: usize, matrix: Vec<u64>) -> Result<Self> {
        let ranks: BTreeMap<u64, ColorId> = matrix
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .enumerate()
            .map(|(i, c)| (c, i as ColorId))
            .collect();
        Coloring::new(n, matrix.iter().map(|c| ranks[c]).collect())
    }

    pub fn from_rows(rows: &[Vec<ColorId>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::input(format!("row {bad} does not have length {n}")));
        }
        Coloring::new(n, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn palette_size(&self) -> usize {
        self.palette_size
    }

    #[inline]
    pub fn color(&self, i: usize, j: usize) -> ColorId {
        self.matrix[i * self.n + j]
    }

    pub fn matrix(&self) -> &[ColorId] {
        &self.matrix
    }

    pub fn rows(&self) -> Vec<Vec<ColorId>> {
        self.matrix.chunks(self.n).map(<[_]>::to_vec).collect()
    }

    /// Relabels colors by first occurrence in row-major order.
    pub fn canonical(&self) -> Coloring {
        let mut map = vec![ColorId::MAX; self.palette_size];
        let mut next = 0;
        let matrix = self
            .matrix
            .iter()
            .map(|&c| {
                if map[c as usize] == ColorId::MAX {
                    map[c as usize] = next;
                    next += 1;
                }
                map[c as usize]
            })
            .collect();
        Coloring {
            n: self.n,
            matrix,
            palette_size: self.palette_size,
        }
    }

    pub fn class_index(&self) -> ColorClassIndex {
        let mut classes = vec![Vec::new(); self.palette_size];
        for i in 0..self.n {
            for j in 0..self.n {
                classes[self.color(i, j) as usize].push((i, j));
            }
        }
        let multiplicities = classes.iter().map(Vec::len).collect();
        ColorClassIndex {
            classes,
            multiplicities,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("coloring serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColorClassIndex {
    pub classes: Vec<Vec<(usize, usize)>>,
    pub multiplicities: Vec<usize>,
}

/// A subgraph of the host `K_{n,n}` with explicit vertex and edge sets.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseSubgraph {
    pub a_vertices: BTreeSet<usize>,
    pub b_vertices: BTreeSet<usize>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl BaseSubgraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        self.a_vertices.insert(i);
        self.b_vertices.insert(j);
        self.edges.insert((i, j));
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        match v {
            Vertex::A(i) => self.a_vertices.contains(&i),
            Vertex::B(j) => self.b_vertices.contains(&j),
        }
    }

    pub fn distinct_colors(&self, coloring: &Coloring) -> usize {
        self.edges
            .iter()
            .map(|&(i, j)| coloring.color(i, j))
            .collect::<BTreeSet<_>>()
            .len()
    }

    pub fn repetitions(&self, coloring: &Coloring) -> usize {
        self.edges.len() - self.distinct_colors(coloring)
    }
}

/// `|E(F)| - |C(F)|` for the complete bipartite subgraph `F` spanned by `copy`.
pub fn color_repetitions(coloring: &Coloring, copy: &Subcopy) -> Result<usize> {
    copy.check(coloring.n())?;
    let mut colors = BTreeSet::new();
    for &i in &copy.a_side {
        for &j in &copy.b_side {
            colors.insert(coloring.color(i, j));
        }
    }
    Ok(copy.edge_count() - colors.len())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StarWitness {
    pub size: usize,
    pub center: Vertex,
    /// Leaf indices in the opposite part.
    pub leaves: Vec<usize>,
    pub color: ColorId,
}

/// Largest monochromatic star; ties go to the first center (A before B, by
/// index) and then the smallest color.
pub fn max_monochromatic_star(coloring: &Coloring) -> StarWitness {
    let n = coloring.n();
    let mut best: Option<StarWitness> = None;
    let mut counts = vec![0usize; coloring.palette_size()];
    for side in [Side::A, Side::B] {
        for v in 0..n {
            counts.iter_mut().for_each(|c| *c = 0);
            let color_at = |u: usize| match side {
                Side::A => coloring.color(v, u),
                Side::B => coloring.color(u, v),
            };
            for u in 0..n {
                counts[color_at(u) as usize] += 1;
            }
            let (color, &size) = counts
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(&x.0)))
                .unwrap();
            if best.as_ref().is_none_or(|b| size > b.size) {
                let color = color as ColorId;
                best = Some(StarWitness {
                    size,
                    center: match side {
                        Side::A => Vertex::A(v),
                        Side::B => Vertex::B(v),
                    },
                    leaves: (0..n).filter(|&u| color_at(u) == color).collect(),
                    color,
                });
            }
        }
    }
    best.unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pattern {
    Star(usize),
    Matching(usize),
    /// An edge `uv` with `k1` further leaves at one end and `k2` at the other.
    DoubleStar(usize, usize),
    /// `K_{a,b}` in either orientation.
    Biclique(usize, usize),
    /// Cycle with the given (even) number of edges.
    EvenCycle(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternWitness {
    pub color: ColorId,
    pub edges: Vec<(usize, usize)>,
}

/// Searches the color classes in increasing color order for a monochromatic
/// copy of `pattern`.
pub fn mono_pattern_scan(coloring: &Coloring, pattern: Pattern) -> Result<Option<PatternWitness>> {
    let positive = match pattern {
        Pattern::Star(k) | Pattern::Matching(k) => k >= 1,
        Pattern::DoubleStar(_, _) => true,
        Pattern::Biclique(a, b) => a >= 1 && b >= 1,
        Pattern::EvenCycle(len) => len >= 4 && len % 2 == 0,
    };
    if !positive {
        return Err(Error::input(format!("invalid pattern parameters {pattern:?}")));
    }
    let index = coloring.class_index();
    for (color, class) in index.classes.iter().enumerate() {
        let color = color as ColorId;
        let found = match pattern {
            Pattern::Star(k) => class_star(coloring.n(), class, k),
            Pattern::Matching(k) => {
                let m = class_matching(coloring.n(), class);
                (m.len() >= k).then(|| m[..k].to_vec())
            }
            Pattern::DoubleStar(k1, k2) => class_double_star(coloring.n(), class, k1, k2),
            Pattern::Biclique(a, b) => class_biclique(coloring, color, a, b)
                .or_else(|| class_biclique(coloring, color, b, a)),
            Pattern::EvenCycle(len) => {
                let n = coloring.n();
                let edges: Vec<(usize, usize)> = class.iter().map(|&(i, j)| (i, n + j)).collect();
                let g = SimpleGraph::from_edges(2 * n, &edges)?;
                match graph::find_even_cycle(&g, len, DetectBudget::default())? {
                    DetectOutcome::Found(cycle) => Some(
                        (0..len)
                            .map(|k| {
                                let (u, v) = (cycle[k], cycle[(k + 1) % len]);
                                if u < n {
                                    (u, v - n)
                                } else {
                                    (v, u - n)
                                }
                            })
                            .collect(),
                    ),
                    DetectOutcome::Absent => None,
                    DetectOutcome::Unknown => {
                        return Err(Error::Budget(format!(
                            "cycle search in color class {color} ran out of nodes"
                        )))
                    }
                }
            }
        };
        if let Some(edges) = found {
            return Ok(Some(PatternWitness { color, edges }));
        }
    }
    Ok(None)
}

fn class_star(n: usize, class: &[(usize, usize)], k: usize) -> Option<Vec<(usize, usize)>> {
    for v in 0..n {
        let at_a: Vec<_> = class.iter().copied().filter(|e| e.0 == v).collect();
        if at_a.len() >= k {
            return Some(at_a[..k].to_vec());
        }
    }
    for v in 0..n {
        let at_b: Vec<_> = class.iter().copied().filter(|e| e.1 == v).collect();
        if at_b.len() >= k {
            return Some(at_b[..k].to_vec());
        }
    }
    None
}

fn class_matching(n: usize, class: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in class {
        adj[i].push(j);
    }
    graph::max_bipartite_matching(n, &adj)
}

fn class_double_star(
    n: usize,
    class: &[(usize, usize)],
    k1: usize,
    k2: usize,
) -> Option<Vec<(usize, usize)>> {
    let mut deg_a = vec![0usize; n];
    let mut deg_b = vec![0usize; n];
    for &(i, j) in class {
        deg_a[i] += 1;
        deg_b[j] += 1;
    }
    for &(i, j) in class {
        let (ea, eb) = (deg_a[i] - 1, deg_b[j] - 1);
        let (need_a, need_b) = if ea >= k1 && eb >= k2 {
            (k1, k2)
        } else if ea >= k2 && eb >= k1 {
            (k2, k1)
        } else {
            continue;
        };
        let mut edges = vec![(i, j)];
        edges.extend(class.iter().copied().filter(|e| e.0 == i && e.1 != j).take(need_a));
        edges.extend(class.iter().copied().filter(|e| e.1 == j && e.0 != i).take(need_b));
        return Some(edges);
    }
    None
}

/// `a` rows and `b` columns all joined in `color`.
fn class_biclique(
    coloring: &Coloring,
    color: ColorId,
    a: usize,
    b: usize,
) -> Option<Vec<(usize, usize)>> {
    let n = coloring.n();
    let rows: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| coloring.color(i, j) == color).collect())
        .collect();
    let eligible: Vec<usize> = (0..n).filter(|&i| rows[i].len() >= b).collect();
    for chosen in crate::subsets::Combinations::new(eligible.len(), a) {
        let mut common: Vec<usize> = rows[eligible[chosen[0]]].clone();
        for &c in &chosen[1..] {
            common.retain(|j| rows[eligible[c]].contains(j));
        }
        if common.len() >= b {
            let mut edges = Vec::with_capacity(a * b);
            for &c in &chosen {
                for &j in &common[..b] {
                    edges.push((eligible[c], j));
                }
            }
            return Some(edges);
        }
    }
    None
}

/// Minimum vertex cover of a color class, computed as a maximum matching.
pub fn color_class_cover_number(coloring: &Coloring, color: ColorId) -> Result<usize> {
    if color as usize >= coloring.palette_size() {
        return Err(Error::input(format!(
            "color {color} outside palette of size {}",
            coloring.palette_size()
        )));
    }
    let class: Vec<(usize, usize)> = (0..coloring.n())
        .flat_map(|i| (0..coloring.n()).map(move |j| (i, j)))
        .filter(|&(i, j)| coloring.color(i, j) == color)
        .collect();
    Ok(class_matching(coloring.n(), &class).len())
}

/// Bipartite graph joining each vertex of `side` to the colors it touches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColorIncidenceGraph {
    pub side: Side,
    pub palette_size: usize,
    /// Sorted colors per vertex.
    pub adjacency: Vec<Vec<ColorId>>,
}

impl ColorIncidenceGraph {
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }
}

pub fn color_incidence_graph(coloring: &Coloring, side: Side) -> ColorIncidenceGraph {
    let n = coloring.n();
    let adjacency = (0..n)
        .map(|v| {
            let set: BTreeSet<ColorId> = (0..n)
                .map(|u| match side {
                    Side::A => coloring.color(v, u),
                    Side::B => coloring.color(u, v),
                })
                .collect();
            set.into_iter().collect()
        })
        .collect();
    ColorIncidenceGraph {
        side,
        palette_size: coloring.palette_size(),
        adjacency,
    }
}

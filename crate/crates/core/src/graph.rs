//! Small simple-graph toolkit: bipartite matching and budgeted detectors
//! for even cycles, theta graphs and 1-subdivisions of cliques.
//!
//! Detectors scan vertices and neighbors in increasing order and return the
//! first witness they meet, so witnesses are reproducible.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};

/// Undirected simple graph on `0..n` with sorted adjacency lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        SimpleGraph {
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds a graph from an edge list; loops are rejected, parallel edges merged.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = SimpleGraph::new(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::input(format!("edge ({u},{v}) outside 0..{n}")));
            }
            if u == v {
                return Err(Error::input(format!("loop at vertex {u}")));
            }
            g.adj[u].push(v);
            g.adj[v].push(u);
        }
        for list in &mut g.adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Returns a proper 2-coloring of the vertices if one exists.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let n = self.vertex_count();
        let mut side: Vec<Option<bool>> = vec![None; n];
        let mut queue = VecDeque::new();
        for start in 0..n {
            if side[start].is_some() {
                continue;
            }
            side[start] = Some(false);
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                let su = side[u].unwrap();
                for &w in &self.adj[u] {
                    match side[w] {
                        None => {
                            side[w] = Some(!su);
                            queue.push_back(w);
                        }
                        Some(sw) if sw == su => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(Option::unwrap).collect())
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition().is_some()
    }

    fn require_bipartite(&self) -> Result<()> {
        if self.is_bipartite() {
            Ok(())
        } else {
            Err(Error::input("detectors require a bipartite graph"))
        }
    }
}

/// Maximum matching in a bipartite graph given as left-to-right adjacency
/// (augmenting paths, left vertices in increasing order).
pub fn max_bipartite_matching(right_count: usize, adj: &[Vec<usize>]) -> Vec<(usize, usize)> {
    fn augment(
        u: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        match_right: &mut [Option<usize>],
    ) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if match_right[v].is_none() || augment(match_right[v].unwrap(), adj, seen, match_right)
            {
                match_right[v] = Some(u);
                return true;
            }
        }
        false
    }

    let mut match_right: Vec<Option<usize>> = vec![None; right_count];
    for u in 0..adj.len() {
        let mut seen = vec![false; right_count];
        augment(u, adj, &mut seen, &mut match_right);
    }
    let mut out: Vec<(usize, usize)> = match_right
        .iter()
        .enumerate()
        .filter_map(|(v, m)| m.map(|u| (u, v)))
        .collect();
    out.sort_unstable();
    out
}

#[derive(Clone, Copy, Debug)]
pub struct DetectBudget {
    pub node_limit: u64,
}

impl Default for DetectBudget {
    fn default() -> Self {
        DetectBudget {
            node_limit: 10_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DetectOutcome<T> {
    Found(T),
    Absent,
    /// The node budget ran out before the search finished.
    Unknown,
}

impl<T> DetectOutcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            DetectOutcome::Found(w) => Some(w),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, DetectOutcome::Found(_))
    }
}

struct Meter {
    used: u64,
    limit: u64,
}

impl Meter {
    fn new(budget: DetectBudget) -> Self {
        Meter {
            used: 0,
            limit: budget.node_limit,
        }
    }

    fn tick(&mut self) -> bool {
        self.used += 1;
        self.used <= self.limit
    }
}

enum Step<T> {
    Hit(T),
    Miss,
    OutOfBudget,
}

/// Finds a cycle with exactly `length` vertices; `length` must be even and ≥ 4.
/// The witness lists the cycle's vertices in traversal order starting from its
/// smallest vertex.
pub fn find_even_cycle(
    g: &SimpleGraph,
    length: usize,
    budget: DetectBudget,
) -> Result<DetectOutcome<Vec<usize>>> {
    if length < 4 || length % 2 != 0 {
        return Err(Error::input(format!(
            "cycle length must be even and at least 4, got {length}"
        )));
    }
    g.require_bipartite()?;
    let mut meter = Meter::new(budget);
    let n = g.vertex_count();
    let mut on_path = vec![false; n];
    for start in 0..n {
        let mut path = vec![start];
        on_path[start] = true;
        let step = extend_cycle(g, start, length, &mut path, &mut on_path, &mut meter);
        on_path[start] = false;
        match step {
            Step::Hit(c) => return Ok(DetectOutcome::Found(c)),
            Step::OutOfBudget => return Ok(DetectOutcome::Unknown),
            Step::Miss => {}
        }
    }
    Ok(DetectOutcome::Absent)
}

fn extend_cycle(
    g: &SimpleGraph,
    start: usize,
    length: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    meter: &mut Meter,
) -> Step<Vec<usize>> {
    if !meter.tick() {
        return Step::OutOfBudget;
    }
    let last = *path.last().unwrap();
    if path.len() == length {
        return if g.has_edge(last, start) {
            Step::Hit(path.clone())
        } else {
            Step::Miss
        };
    }
    for &w in g.neighbors(last) {
        if w <= start || on_path[w] {
            continue;
        }
        // Fix orientation: the second vertex is smaller than the last one.
        if path.len() == length - 1 && w < path[1] {
            continue;
        }
        path.push(w);
        on_path[w] = true;
        let step = extend_cycle(g, start, length, path, on_path, meter);
        on_path[w] = false;
        path.pop();
        match step {
            Step::Miss => {}
            other => return other,
        }
    }
    Step::Miss
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaWitness {
    pub ends: (usize, usize),
    /// Each path runs from `ends.0` to `ends.1` inclusive.
    pub paths: Vec<Vec<usize>>,
}

/// Finds two vertices joined by `paths` internally disjoint paths of length
/// `length`.
pub fn find_theta(
    g: &SimpleGraph,
    length: usize,
    paths: usize,
    budget: DetectBudget,
) -> Result<DetectOutcome<ThetaWitness>> {
    if length < 2 || paths < 2 {
        return Err(Error::input(format!(
            "theta parameters must be at least 2, got ({length},{paths})"
        )));
    }
    g.require_bipartite()?;
    let mut meter = Meter::new(budget);
    let n = g.vertex_count();
    let parity = g.bipartition().unwrap();
    for u in 0..n {
        if g.degree(u) < paths {
            continue;
        }
        for v in u + 1..n {
            if g.degree(v) < paths {
                continue;
            }
            // Path length parity is fixed by the bipartition.
            if (parity[u] != parity[v]) != (length % 2 == 1) {
                continue;
            }
            let mut found = Vec::new();
            let mut path = vec![u];
            let mut on_path = vec![false; n];
            on_path[u] = true;
            if !collect_paths(g, v, length, &mut path, &mut on_path, &mut found, &mut meter) {
                return Ok(DetectOutcome::Unknown);
            }
            if found.len() < paths {
                continue;
            }
            let mut chosen = Vec::new();
            let mut used = vec![false; n];
            match pick_disjoint(&found, 0, paths, &mut chosen, &mut used, &mut meter) {
                Step::Hit(()) => {
                    return Ok(DetectOutcome::Found(ThetaWitness {
                        ends: (u, v),
                        paths: chosen.iter().map(|&i| found[i].clone()).collect(),
                    }))
                }
                Step::OutOfBudget => return Ok(DetectOutcome::Unknown),
                Step::Miss => {}
            }
        }
    }
    Ok(DetectOutcome::Absent)
}

/// Collects every simple path of exactly `length` edges from `path[0]` to
/// `target` whose interior avoids both ends. Returns `false` on budget exhaustion.
fn collect_paths(
    g: &SimpleGraph,
    target: usize,
    length: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    out: &mut Vec<Vec<usize>>,
    meter: &mut Meter,
) -> bool {
    if !meter.tick() {
        return false;
    }
    let last = *path.last().unwrap();
    if path.len() == length {
        if g.has_edge(last, target) {
            let mut p = path.clone();
            p.push(target);
            out.push(p);
        }
        return true;
    }
    for &w in g.neighbors(last) {
        if w == target || on_path[w] {
            continue;
        }
        path.push(w);
        on_path[w] = true;
        let ok = collect_paths(g, target, length, path, on_path, out, meter);
        on_path[w] = false;
        path.pop();
        if !ok {
            return false;
        }
    }
    true
}

fn pick_disjoint(
    candidates: &[Vec<usize>],
    from: usize,
    need: usize,
    chosen: &mut Vec<usize>,
    used: &mut [bool],
    meter: &mut Meter,
) -> Step<()> {
    if chosen.len() == need {
        return Step::Hit(());
    }
    if candidates.len() - from < need - chosen.len() {
        return Step::Miss;
    }
    for i in from..candidates.len() {
        if !meter.tick() {
            return Step::OutOfBudget;
        }
        let interior = &candidates[i][1..candidates[i].len() - 1];
        if interior.iter().any(|&x| used[x]) {
            continue;
        }
        for &x in interior {
            used[x] = true;
        }
        chosen.push(i);
        match pick_disjoint(candidates, i + 1, need, chosen, used, meter) {
            Step::Miss => {}
            other => return other,
        }
        chosen.pop();
        for &x in interior {
            used[x] = false;
        }
    }
    Step::Miss
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubdivisionWitness {
    /// The `t` branch vertices, increasing.
    pub branch: Vec<usize>,
    /// `((i, j), w)`: branch vertices `branch[i]` and `branch[j]` are joined through `w`.
    pub subdividers: Vec<((usize, usize), usize)>,
}

/// Finds a copy of the 1-subdivision of `K_t` (every clique edge replaced by
/// a path of length 2).
pub fn find_subdivision(
    g: &SimpleGraph,
    t: usize,
    budget: DetectBudget,
) -> Result<DetectOutcome<SubdivisionWitness>> {
    if t < 3 {
        return Err(Error::input(format!("subdivision order must be at least 3, got {t}")));
    }
    g.require_bipartite()?;
    let mut meter = Meter::new(budget);
    let candidates: Vec<usize> = (0..g.vertex_count())
        .filter(|&v| g.degree(v) >= t - 1)
        .collect();
    let mut branch = Vec::new();
    match grow_branch(g, t, &candidates, 0, &mut branch, &mut meter) {
        Step::Hit(w) => Ok(DetectOutcome::Found(w)),
        Step::Miss => Ok(DetectOutcome::Absent),
        Step::OutOfBudget => Ok(DetectOutcome::Unknown),
    }
}

fn common_neighbors(g: &SimpleGraph, u: usize, v: usize) -> Vec<usize> {
    let (a, b) = (g.neighbors(u), g.neighbors(v));
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn grow_branch(
    g: &SimpleGraph,
    t: usize,
    candidates: &[usize],
    from: usize,
    branch: &mut Vec<usize>,
    meter: &mut Meter,
) -> Step<SubdivisionWitness> {
    if !meter.tick() {
        return Step::OutOfBudget;
    }
    if branch.len() == t {
        return match assign_subdividers(g, branch) {
            Some(w) => Step::Hit(w),
            None => Step::Miss,
        };
    }
    for idx in from..candidates.len() {
        if candidates.len() - idx < t - branch.len() {
            break;
        }
        let v = candidates[idx];
        if branch
            .iter()
            .any(|&u| common_neighbors(g, u, v).iter().all(|w| branch.contains(w) || *w == v))
        {
            continue;
        }
        branch.push(v);
        match grow_branch(g, t, candidates, idx + 1, branch, meter) {
            Step::Miss => {}
            other => return other,
        }
        branch.pop();
    }
    Step::Miss
}

fn assign_subdividers(g: &SimpleGraph, branch: &[usize]) -> Option<SubdivisionWitness> {
    let mut pairs = Vec::new();
    for i in 0..branch.len() {
        for j in i + 1..branch.len() {
            pairs.push((i, j));
        }
    }
    let adj: Vec<Vec<usize>> = pairs
        .iter()
        .map(|&(i, j)| {
            common_neighbors(g, branch[i], branch[j])
                .into_iter()
                .filter(|w| !branch.contains(w))
                .collect()
        })
        .collect();
    let matching = max_bipartite_matching(g.vertex_count(), &adj);
    if matching.len() < pairs.len() {
        return None;
    }
    Some(SubdivisionWitness {
        branch: branch.to_vec(),
        subdividers: matching.into_iter().map(|(p, w)| (pairs[p], w)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete_bipartite(a: usize, b: usize) -> SimpleGraph {
        let mut edges = Vec::new();
        for i in 0..a {
            for j in 0..b {
                edges.push((i, a + j));
            }
        }
        SimpleGraph::from_edges(a + b, &edges).unwrap()
    }

    /// Two ends joined by `paths` paths of `length` edges each.
    fn theta_fixture(length: usize, paths: usize) -> SimpleGraph {
        let n = 2 + paths * (length - 1);
        let mut edges = Vec::new();
        let mut next = 2;
        for _ in 0..paths {
            let mut prev = 0;
            for _ in 0..length - 1 {
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
            edges.push((prev, 1));
        }
        SimpleGraph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn c4_in_k22() {
        let g = complete_bipartite(2, 2);
        let cycle = find_even_cycle(&g, 4, DetectBudget::default()).unwrap().found().unwrap();
        assert_eq!(cycle, vec![0, 2, 1, 3]);
    }

    #[test]
    fn tree_has_no_cycle_or_theta() {
        // Path 0-1-2-3-4 plus a pendant 2-5.
        let g = SimpleGraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 5)]).unwrap();
        for len in [4, 6] {
            assert_eq!(
                find_even_cycle(&g, len, DetectBudget::default()).unwrap(),
                DetectOutcome::Absent
            );
        }
        for (a, b) in [(2, 2), (3, 2), (3, 3)] {
            assert_eq!(
                find_theta(&g, a, b, DetectBudget::default()).unwrap(),
                DetectOutcome::Absent
            );
        }
    }

    #[test]
    fn theta_3_3_fixture_is_found_exactly() {
        let g = theta_fixture(3, 3);
        let w = find_theta(&g, 3, 3, DetectBudget::default()).unwrap().found().unwrap();
        assert_eq!(w.ends, (0, 1));
        assert_eq!(
            w.paths,
            vec![vec![0, 2, 3, 1], vec![0, 4, 5, 1], vec![0, 6, 7, 1]]
        );
        // Only three paths exist, so four cannot be found.
        assert_eq!(
            find_theta(&g, 3, 4, DetectBudget::default()).unwrap(),
            DetectOutcome::Absent
        );
    }

    #[test]
    fn theta_2_b_is_common_neighbourhood() {
        let g = complete_bipartite(2, 3);
        let w = find_theta(&g, 2, 3, DetectBudget::default()).unwrap().found().unwrap();
        assert_eq!(w.ends, (0, 1));
        assert_eq!(w.paths.len(), 3);
    }

    #[test]
    fn subdivided_k3_is_c6() {
        let g = theta_fixture(3, 2); // a 6-cycle
        assert!(find_even_cycle(&g, 6, DetectBudget::default()).unwrap().is_found());
        let w = find_subdivision(&g, 3, DetectBudget::default()).unwrap().found().unwrap();
        assert_eq!(w.branch.len(), 3);
        for &((i, j), mid) in &w.subdividers {
            assert!(g.has_edge(w.branch[i], mid) && g.has_edge(w.branch[j], mid));
        }
        assert_eq!(
            find_subdivision(&g, 4, DetectBudget::default()).unwrap(),
            DetectOutcome::Absent
        );
    }

    #[test]
    fn non_bipartite_input_is_rejected() {
        let g = SimpleGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(find_even_cycle(&g, 4, DetectBudget::default()).is_err());
    }

    #[test]
    fn tiny_budget_reports_unknown() {
        let g = complete_bipartite(4, 4);
        assert_eq!(
            find_even_cycle(&g, 8, DetectBudget { node_limit: 3 }).unwrap(),
            DetectOutcome::Unknown
        );
    }

    #[test]
    fn matching_of_perfect_matching() {
        let adj = vec![vec![0], vec![1], vec![2]];
        assert_eq!(max_bipartite_matching(3, &adj).len(), 3);
        let star = vec![vec![0, 1, 2, 3]];
        assert_eq!(max_bipartite_matching(4, &star).len(), 1);
    }
}

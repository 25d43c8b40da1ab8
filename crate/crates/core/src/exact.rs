//! Exhaustive search for the least palette size admitting a coloring of
//! `K_{n,n}` in which every copy of `K_{s,t}` sees at least `q` colors.
//!
//! Edges are assigned in row-major order. A color may be introduced only as
//! one more than the largest color used so far, the first row is kept
//! nondecreasing (columns can always be sorted by it), and for `n <= 4`
//! failed states at row boundaries are remembered up to row permutations,
//! column permutations and color relabeling.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::coloring::{ColorId, Coloring, PatternSpec};
use crate::error::{Error, Result};
use crate::subsets::Combinations;

/// Copy counts above this are refused.
pub const MAX_COPIES: usize = 2_000_000;

/// Largest `n` for which the failed-state memo is used.
pub const MEMO_MAX_N: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchMode {
    /// Decide a single palette size.
    Decide(usize),
    Minimize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub node_limit: u64,
    pub time_limit: Duration,
    pub mode: SearchMode,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            node_limit: 100_000_000,
            time_limit: Duration::from_secs(300),
            mode: SearchMode::Minimize,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub memo_hits: u64,
    pub feasible_calls: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Feasibility {
    Yes(Coloring),
    No,
    Unknown,
}

/// Copies of `K_{s,t}` (both orientations) as lists of row-major edge ids.
fn copy_edges(n: usize, s: usize, t: usize) -> Result<Vec<Vec<usize>>> {
    if n < t {
        return Ok(Vec::new());
    }
    let mut shapes = vec![(s, t)];
    if s != t {
        shapes.push((t, s));
    }
    let mut copies = Vec::new();
    for (sa, sb) in shapes {
        for rows in Combinations::new(n, sa) {
            for cols in Combinations::new(n, sb) {
                let mut edges = Vec::with_capacity(sa * sb);
                for &i in &rows {
                    for &j in &cols {
                        edges.push(i * n + j);
                    }
                }
                copies.push(edges);
                if copies.len() > MAX_COPIES {
                    return Err(Error::Resource(format!(
                        "more than {MAX_COPIES} copies of K_{{{s},{t}}} in K_{{{n},{n}}}"
                    )));
                }
            }
        }
    }
    Ok(copies)
}

struct Search<'a> {
    n: usize,
    c: usize,
    q: usize,
    copy_size: usize,
    /// Copies through each edge.
    through: Vec<Vec<u32>>,
    /// `counts[copy * c + color]`
    counts: Vec<u16>,
    distinct: Vec<u16>,
    assigned: Vec<u16>,
    colors: Vec<ColorId>,
    memo: HashSet<Vec<u8>>,
    stats: &'a mut SearchStats,
    node_limit: u64,
    deadline: Instant,
    aborted: bool,
}

impl Search<'_> {
    fn out_of_budget(&mut self) -> bool {
        if self.aborted {
            return true;
        }
        self.stats.nodes += 1;
        if self.stats.nodes > self.node_limit
            || (self.stats.nodes % 4096 == 0 && Instant::now() >= self.deadline)
        {
            self.aborted = true;
        }
        self.aborted
    }

    /// Places `color` on edge `e`; returns false (with the placement undone)
    /// if some copy can no longer reach `q` colors.
    fn place(&mut self, e: usize, color: ColorId) -> bool {
        let c = self.c;
        let mut ok = true;
        let mut done = 0;
        for k in 0..self.through[e].len() {
            let copy = self.through[e][k] as usize;
            let slot = copy * c + color as usize;
            if self.counts[slot] == 0 {
                self.distinct[copy] += 1;
            }
            self.counts[slot] += 1;
            self.assigned[copy] += 1;
            done += 1;
            let reachable = (self.distinct[copy] as usize
                + self.copy_size
                - self.assigned[copy] as usize)
                .min(c);
            if reachable < self.q {
                ok = false;
                break;
            }
        }
        if !ok {
            self.unplace_prefix(e, color, done);
        }
        ok
    }

    fn unplace_prefix(&mut self, e: usize, color: ColorId, upto: usize) {
        let c = self.c;
        for k in 0..upto {
            let copy = self.through[e][k] as usize;
            let slot = copy * c + color as usize;
            self.counts[slot] -= 1;
            if self.counts[slot] == 0 {
                self.distinct[copy] -= 1;
            }
            self.assigned[copy] -= 1;
        }
    }

    fn dfs(&mut self, e: usize, max_used: usize) -> bool {
        let n = self.n;
        if e == n * n {
            return true;
        }
        let memo_key = if n <= MEMO_MAX_N && e > 0 && e % n == 0 && e < n * n {
            let key = canonical_rows(&self.colors[..e], n);
            if self.memo.contains(&key) {
                self.stats.memo_hits += 1;
                return false;
            }
            Some(key)
        } else {
            None
        };
        let (row, col) = (e / n, e % n);
        let low = if row == 0 && col > 0 {
            self.colors[e - 1] as usize
        } else {
            0
        };
        let high = (max_used + 1).min(self.c - 1);
        for color in low..=high {
            if self.out_of_budget() {
                return false;
            }
            let color = color as ColorId;
            if !self.place(e, color) {
                continue;
            }
            self.colors[e] = color;
            let next_max = max_used.max(color as usize + 1);
            if self.dfs(e + 1, next_max) {
                return true;
            }
            let len = self.through[e].len();
            self.unplace_prefix(e, color, len);
            if self.aborted {
                return false;
            }
        }
        if let Some(key) = memo_key {
            self.memo.insert(key);
        }
        false
    }
}

/// Lexicographically least relabeled form of the full rows in `cells`
/// over all row and column permutations.
fn canonical_rows(cells: &[ColorId], n: usize) -> Vec<u8> {
    let k = cells.len() / n;
    let row_perms = permutations(k);
    let col_perms = permutations(n);
    let mut best: Option<Vec<u8>> = None;
    let mut buf = Vec::with_capacity(cells.len());
    let mut map = vec![u8::MAX; cells.iter().max().map_or(0, |&m| m as usize + 1)];
    for rp in &row_perms {
        for cp in &col_perms {
            buf.clear();
            map.iter_mut().for_each(|m| *m = u8::MAX);
            let mut next = 0u8;
            for &r in rp {
                for &cc in cp {
                    let col = cells[r * n + cc] as usize;
                    if map[col] == u8::MAX {
                        map[col] = next;
                        next += 1;
                    }
                    buf.push(map[col]);
                }
            }
            if best.as_ref().is_none_or(|b| buf < *b) {
                best = Some(buf.clone());
            }
        }
    }
    best.unwrap_or_default()
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Is there a coloring with at most `c` colors meeting `spec`?
pub fn feasible(
    n: usize,
    spec: PatternSpec,
    c: usize,
    budget: &SearchBudget,
    stats: &mut SearchStats,
) -> Result<Feasibility> {
    if n == 0 {
        return Err(Error::input("n must be positive"));
    }
    if c == 0 || c > n * n {
        return Err(Error::input(format!("c = {c} outside 1..={}", n * n)));
    }
    stats.feasible_calls += 1;
    let copies = copy_edges(n, spec.s, spec.t)?;
    if copies.is_empty() {
        return Ok(Feasibility::Yes(Coloring::new(n, vec![0; n * n])?));
    }
    if c < spec.q {
        return Ok(Feasibility::No);
    }
    let mut through = vec![Vec::new(); n * n];
    for (k, edges) in copies.iter().enumerate() {
        for &e in edges {
            through[e].push(k as u32);
        }
    }
    let m = copies.len();
    let node_limit = budget.node_limit.saturating_add(stats.nodes);
    let mut search = Search {
        n,
        c,
        q: spec.q,
        copy_size: spec.s * spec.t,
        through,
        counts: vec![0; m * c],
        distinct: vec![0; m],
        assigned: vec![0; m],
        colors: vec![0; n * n],
        memo: HashSet::new(),
        stats,
        node_limit,
        deadline: Instant::now() + budget.time_limit,
        aborted: false,
    };
    if search.dfs(0, 0) {
        let colors = search.colors.clone();
        return Ok(Feasibility::Yes(Coloring::new(n, colors)?));
    }
    Ok(if search.aborted {
        Feasibility::Unknown
    } else {
        Feasibility::No
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExactStatus {
    Exact,
    /// A lower bound above the trivial one was proved; no better coloring found.
    LowerBoundOnly,
    /// A coloring beating `n^2` was found; the trivial lower bound stands.
    UpperBoundOnly,
    Bracket,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactResult {
    pub status: ExactStatus,
    pub value: Option<usize>,
    pub lo: usize,
    pub hi: usize,
    pub witness: Option<Coloring>,
    /// `n < t`, so no copy exists and one color suffices.
    pub vacuous: bool,
    pub stats: SearchStats,
}

/// Trivial lower bound: `q` once a copy exists, else 1.
pub fn trivial_lower_bound(n: usize, spec: PatternSpec) -> usize {
    if n >= spec.t {
        spec.q
    } else {
        1
    }
}

/// Starting point of the scan, taken from known closed forms where they
/// apply. Only used to order the feasibility calls.
fn seed_value(n: usize, spec: PatternSpec) -> Option<usize> {
    let PatternSpec { s, t, q } = spec;
    if q == s * t {
        return Some(n * n);
    }
    if s == 1 && t >= 2 {
        if 2 * q >= t + 2 {
            return Some((n + q).saturating_sub(t));
        }
        return Some((n * (q - 1)).div_ceil(t - 1));
    }
    None
}

pub fn exact_r(n: usize, spec: PatternSpec, budget: &SearchBudget) -> Result<ExactResult> {
    if n == 0 {
        return Err(Error::input("n must be positive"));
    }
    let mut stats = SearchStats::default();
    if n < spec.t {
        return Ok(ExactResult {
            status: ExactStatus::Exact,
            value: Some(1),
            lo: 1,
            hi: 1,
            witness: Some(Coloring::new(n, vec![0; n * n])?),
            vacuous: true,
            stats,
        });
    }
    let trivial = trivial_lower_bound(n, spec);
    let top = n * n;
    let start = seed_value(n, spec).unwrap_or(trivial).clamp(trivial, top);
    let mut lo = trivial;
    let mut hi = top;
    let mut witness: Option<Coloring> = None;
    let mut proved_lo = false;

    match feasible(n, spec, start, budget, &mut stats)? {
        Feasibility::Yes(w) => {
            hi = start;
            witness = Some(w);
            let mut c = start;
            while c > lo {
                match feasible(n, spec, c - 1, budget, &mut stats)? {
                    Feasibility::Yes(w) => {
                        hi = c - 1;
                        witness = Some(w);
                        c -= 1;
                    }
                    Feasibility::No => {
                        lo = c;
                        proved_lo = true;
                        break;
                    }
                    Feasibility::Unknown => break,
                }
            }
        }
        other => {
            if other == Feasibility::No {
                lo = start + 1;
                proved_lo = true;
            }
            let mut c = start + 1;
            while c <= top {
                match feasible(n, spec, c, budget, &mut stats)? {
                    Feasibility::Yes(w) => {
                        hi = c;
                        witness = Some(w);
                        break;
                    }
                    Feasibility::No => {
                        lo = c + 1;
                        proved_lo = true;
                    }
                    Feasibility::Unknown => break,
                }
                c += 1;
            }
        }
    }
    if witness.is_none() {
        // Rainbow always works once n >= t.
        witness = Some(Coloring::new(n, (0..top as ColorId).collect())?);
    }
    let status = if lo == hi {
        ExactStatus::Exact
    } else if proved_lo && hi == top {
        ExactStatus::LowerBoundOnly
    } else if !proved_lo && hi < top {
        ExactStatus::UpperBoundOnly
    } else {
        ExactStatus::Bracket
    };
    Ok(ExactResult {
        status,
        value: (lo == hi).then_some(lo),
        lo,
        hi,
        witness,
        vacuous: false,
        stats,
    })
}

//! Brute-force oracles shared by the integration tests. None of these use
//! the pruning, bitsets or symmetry breaking of the library code they check.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rbl_core::coloring::BaseSubgraph;
use rbl_core::energy::{build_energy, EnergyGraph, Reservoir};
use rbl_core::{ColorId, Coloring};

pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == k {
            out.push((0..n).filter(|&i| mask >> i & 1 == 1).collect());
        }
    }
    out
}

/// Fewest distinct colors on a copy of `K_{s,t}`, both orientations.
pub fn naive_min_colors(c: &Coloring, s: usize, t: usize) -> Option<usize> {
    let n = c.n();
    if n < t {
        return None;
    }
    let mut best = usize::MAX;
    let mut shapes = vec![(s, t)];
    if s != t {
        shapes.push((t, s));
    }
    for (x, y) in shapes {
        for rows in subsets(n, x) {
            for cols in subsets(n, y) {
                let mut seen = HashSet::new();
                for &i in &rows {
                    for &j in &cols {
                        seen.insert(c.color(i, j));
                    }
                }
                best = best.min(seen.len());
            }
        }
    }
    Some(best)
}

pub fn naive_valid(c: &Coloring, s: usize, t: usize, q: usize) -> bool {
    naive_min_colors(c, s, t).is_none_or(|m| m >= q)
}

pub fn random_coloring(n: usize, palette: usize, seed: u64) -> Coloring {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<u64> = (0..n * n).map(|_| rng.gen_range(0..palette as u64)).collect();
    Coloring::compacted(n, raw).unwrap()
}

/// Every coloring of `K_{n,n}` with at most `k` colors, one per relabeling
/// class (restricted growth strings in row-major order).
pub fn colorings_up_to_relabel(n: usize, k: usize) -> Vec<Coloring> {
    fn rec(pos: usize, len: usize, k: usize, cur: &mut Vec<ColorId>, max: i64, out: &mut Vec<Vec<ColorId>>) {
        if pos == len {
            out.push(cur.clone());
            return;
        }
        for c in 0..=((max + 1).min(k as i64 - 1)) {
            cur.push(c as ColorId);
            rec(pos + 1, len, k, cur, max.max(c), out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    rec(0, n * n, k, &mut Vec::new(), -1, &mut raw);
    raw.into_iter().map(|m| Coloring::new(n, m).unwrap()).collect()
}

/// Is there any assignment of colors `0..c` (no symmetry breaking) making
/// every copy see at least `q` colors?
pub fn brute_feasible(n: usize, s: usize, t: usize, q: usize, c: usize) -> bool {
    let cells = n * n;
    let total = (c as u64).pow(cells as u32);
    for code in 0..total {
        let mut x = code;
        let raw: Vec<u64> = (0..cells)
            .map(|_| {
                let v = x % c as u64;
                x /= c as u64;
                v
            })
            .collect();
        let col = Coloring::compacted(n, raw).unwrap();
        if naive_valid(&col, s, t, q) {
            return true;
        }
    }
    false
}

/// `sum_i m_i^r` from a direct recount of the color multiplicities.
pub fn power_sum(c: &Coloring, r: u32) -> u64 {
    let mut counts = std::collections::HashMap::new();
    for &x in c.matrix() {
        *counts.entry(x).or_insert(0u64) += 1;
    }
    counts.values().map(|m| m.pow(r)).sum()
}

/// Number of `r`-tuple pairs whose `r` coordinate edges share one color,
/// by scanning every pair of tuples.
pub fn energy_count_by_scan(c: &Coloring, r: usize) -> u64 {
    let n = c.n();
    let tuples = n.pow(r as u32);
    let decode = |mut code: usize| {
        let mut v = vec![0; r];
        for k in (0..r).rev() {
            v[k] = code % n;
            code /= n;
        }
        v
    };
    let mut count = 0;
    for x in 0..tuples {
        let a = decode(x);
        for y in 0..tuples {
            let b = decode(y);
            let col = c.color(a[0], b[0]);
            if (1..r).all(|k| c.color(a[k], b[k]) == col) {
                count += 1;
            }
        }
    }
    count
}

/// Brute-force minimum vertex cover of an edge list on `n + n` vertices.
pub fn brute_cover(n: usize, edges: &[(usize, usize)]) -> usize {
    let verts: Vec<(bool, usize)> = edges
        .iter()
        .flat_map(|&(i, j)| [(true, i), (false, j)])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let _ = n;
    let mut best = verts.len();
    for mask in 0u32..(1 << verts.len()) {
        let chosen: BTreeSet<(bool, usize)> = verts
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        if edges
            .iter()
            .all(|&(i, j)| chosen.contains(&(true, i)) || chosen.contains(&(false, j)))
        {
            best = best.min(chosen.len());
        }
    }
    best
}

pub struct ReservoirFixture {
    pub coloring: Coloring,
    pub energy: EnergyGraph,
    pub f: BaseSubgraph,
    pub reservoir: Reservoir,
    pub d1: usize,
    pub d2: usize,
}

/// A coloring with a planted reservoir: every reservoir tuple is joined to
/// the opposite source tuple by `r` edges of one fresh color. The rest is
/// random. `F` lives on the first `r + 2` vertices of each side.
pub fn reservoir_fixture(seed: u64, r: usize) -> ReservoirFixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let wa = rng.gen_range(1..=3usize);
    let wb = rng.gen_range(1..=3usize);
    let n = r + 2 + 3 * r;
    let palette = (n * n / 2) as u64;
    let mut raw: Vec<u64> = (0..n * n).map(|_| rng.gen_range(0..palette)).collect();
    let source_a: Vec<usize> = (0..r).collect();
    let source_b: Vec<usize> = (0..r).collect();
    let mut fresh = palette;
    let mut r_a = Vec::new();
    for l in 0..wa {
        let y: Vec<usize> = (0..r).map(|k| r + 2 + l * r + k).collect();
        for k in 0..r {
            raw[y[k] * n + source_b[k]] = fresh;
        }
        fresh += 1;
        r_a.push(y);
    }
    let mut r_b = Vec::new();
    for l in 0..wb {
        let x: Vec<usize> = (0..r).map(|k| r + 2 + l * r + k).collect();
        for k in 0..r {
            raw[source_a[k] * n + x[k]] = fresh;
        }
        fresh += 1;
        r_b.push(x);
    }
    let coloring = Coloring::compacted(n, raw).unwrap();
    let mut f = BaseSubgraph::new();
    for k in 0..r {
        f.add_edge(source_a[k], source_b[k]);
    }
    for _ in 0..rng.gen_range(0..4) {
        f.add_edge(rng.gen_range(0..r + 2), rng.gen_range(0..r + 2));
    }
    let energy = build_energy(&coloring, r).unwrap();
    let d1 = rng.gen_range(0..=r * wa);
    let d2 = rng.gen_range(0..=r * wb);
    ReservoirFixture {
        coloring,
        energy,
        f,
        reservoir: Reservoir {
            r_a,
            r_b,
            source_a,
            source_b,
        },
        d1,
        d2,
    }
}

/// Largest number of pairs of a pairing coloring that fit together inside
/// some `s x t` or `t x s` vertex box, by trying every subset of pairs.
pub fn pair_subset_max(c: &Coloring, s: usize, t: usize) -> usize {
    let idx = c.class_index();
    let pairs: Vec<&Vec<(usize, usize)>> = idx.classes.iter().filter(|cl| cl.len() == 2).collect();
    assert!(pairs.len() <= 20);
    let mut best = 0;
    for mask in 0u32..(1 << pairs.len()) {
        let mut rows = BTreeSet::new();
        let mut cols = BTreeSet::new();
        for (k, p) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                for &(i, j) in p.iter() {
                    rows.insert(i);
                    cols.insert(j);
                }
            }
        }
        let fits = |x: usize, y: usize| rows.len() <= x && cols.len() <= y && x <= c.n() && y <= c.n();
        if fits(s, t) || fits(t, s) {
            best = best.max(mask.count_ones() as usize);
        }
    }
    best
}

/// Largest edge count of a `C_4`-free subgraph of `K_{m,m}`, over all
/// `2^{m^2}` edge subsets.
pub fn max_c4_free_edges(m: usize) -> usize {
    let cells = m * m;
    let mut best = 0;
    for mask in 0u64..(1u64 << cells) {
        let ones = mask.count_ones() as usize;
        if ones <= best {
            continue;
        }
        let has = |i: usize, j: usize| mask >> (i * m + j) & 1 == 1;
        let mut free = true;
        'outer: for pair in subsets(m, 2) {
            let common = (0..m).filter(|&j| has(pair[0], j) && has(pair[1], j)).count();
            if common >= 2 {
                free = false;
                break 'outer;
            }
        }
        if free {
            best = ones;
        }
    }
    best
}

//! Explicit colorings, each tagged with the `(s, t, q)` requirement and
//! palette size it is claimed to achieve.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coloring::{ColorId, Coloring, PatternSpec};
use crate::error::{Error, Result};
use crate::hypergraph::{self, mask_vertices};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub s: usize,
    pub t: usize,
    pub q: usize,
    pub palette: usize,
}

impl Claim {
    pub fn spec(&self) -> PatternSpec {
        PatternSpec {
            s: self.s,
            t: self.t,
            q: self.q,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionResult {
    pub coloring: Coloring,
    pub claim: Claim,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn provenance(name: &str, params: &[(&str, String)], seed: Option<u64>) -> Provenance {
    Provenance {
        name: name.to_string(),
        params: params
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect(),
        seed,
    }
}

fn result(
    coloring: Coloring,
    s: usize,
    t: usize,
    q: usize,
    provenance: Provenance,
) -> ConstructionResult {
    let palette = coloring.palette_size();
    ConstructionResult {
        coloring,
        claim: Claim { s, t, q, palette },
        provenance,
        warnings: Vec::new(),
    }
}

fn part_of(sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .enumerate()
        .flat_map(|(p, &size)| std::iter::repeat_n(p, size))
        .collect()
}

/// Partitions both sides into consecutive blocks and colors the edges
/// between the `i`-th and `j`-th blocks (1-based) with `(i + j - 1) mod k`.
pub fn block_cyclic(n: usize, sizes_a: &[usize], sizes_b: &[usize]) -> Result<Coloring> {
    if sizes_a.len() != sizes_b.len() || sizes_a.is_empty() {
        return Err(Error::input("part lists must be nonempty and of equal length"));
    }
    if sizes_a.iter().chain(sizes_b).any(|&x| x == 0) {
        return Err(Error::input("part sizes must be positive"));
    }
    if sizes_a.iter().sum::<usize>() != n || sizes_b.iter().sum::<usize>() != n {
        return Err(Error::input(format!("part sizes must sum to n = {n}")));
    }
    let k = sizes_a.len();
    let (pa, pb) = (part_of(sizes_a), part_of(sizes_b));
    let mut matrix = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            matrix.push(((pa[i] + pb[j] + 1) % k) as ColorId);
        }
    }
    Coloring::new(n, matrix)
}

fn check_low_q(t: usize, q: usize) -> Result<()> {
    if q < 2 || 2 * q > t + 1 {
        return Err(Error::input(format!("need 2 <= q <= (t+1)/2, got t={t}, q={q}")));
    }
    Ok(())
}

/// Blocks of size `floor((t-1)/(q-1))`, last one possibly smaller.
pub fn star_upper_i(n: usize, t: usize, q: usize) -> Result<ConstructionResult> {
    check_low_q(t, q)?;
    if n == 0 {
        return Err(Error::input("n must be positive"));
    }
    let ell = (t - 1) / (q - 1);
    let k = n.div_ceil(ell);
    let mut sizes = vec![ell; k];
    sizes[k - 1] = n - (k - 1) * ell;
    let coloring = block_cyclic(n, &sizes, &sizes)?;
    let prov = provenance(
        "star_upper_i",
        &[("n", n.to_string()), ("t", t.to_string()), ("q", q.to_string())],
        None,
    );
    Ok(result(coloring, 1, t, q, prov))
}

/// `t - q` blocks of size 2 followed by singletons; palette `n - t + q`.
pub fn star_upper_ii(n: usize, t: usize, q: usize) -> Result<ConstructionResult> {
    if 2 * q < t + 2 || q > t {
        return Err(Error::input(format!("need (t+2)/2 <= q <= t, got t={t}, q={q}")));
    }
    let pairs = t - q;
    if n < 2 * pairs || n == 0 {
        return Err(Error::input(format!("n = {n} is smaller than 2(t-q) = {}", 2 * pairs)));
    }
    let mut sizes = vec![2; pairs];
    sizes.extend(std::iter::repeat_n(1, n - 2 * pairs));
    let coloring = block_cyclic(n, &sizes, &sizes)?;
    let prov = provenance(
        "star_upper_ii",
        &[("n", n.to_string()), ("t", t.to_string()), ("q", q.to_string())],
        None,
    );
    Ok(result(coloring, 1, t, q, prov))
}

/// Uneven blocks: `m` of size `ceil((t-1)/(q-1))`, then blocks of size
/// `floor((t-1)/(q-1))`, where `m = (t-1) mod (q-1)`. Needs `n >= t`.
/// Any `q - 1` blocks cover at most `t - 1` vertices, so the construction is
/// valid for every `2 <= q <= t`.
pub fn star_upper_refined(n: usize, t: usize, q: usize) -> Result<ConstructionResult> {
    if q < 2 || q > t {
        return Err(Error::input(format!("need 2 <= q <= t, got t={t}, q={q}")));
    }
    if (t - 1) % (q - 1) == 0 {
        return Err(Error::input(format!("q-1 = {} divides t-1 = {}", q - 1, t - 1)));
    }
    if n < t {
        return Err(Error::input(format!("need n >= t, got n={n}, t={t}")));
    }
    let ell = (t - 1) / (q - 1);
    let m = (t - 1) % (q - 1);
    let k = (n - t + 1).div_ceil(ell) + q - 1;
    let mut sizes = vec![ell + 1; m];
    sizes.extend(std::iter::repeat_n(ell, k - 1 - m));
    sizes.push(n - (k - 1) * ell - m);
    let coloring = block_cyclic(n, &sizes, &sizes)?;
    let prov = provenance(
        "star_upper_refined",
        &[("n", n.to_string()), ("t", t.to_string()), ("q", q.to_string())],
        None,
    );
    Ok(result(coloring, 1, t, q, prov))
}

/// Rainbow coloring except that listed edge pairs share a color.
fn pairing(n: usize, pairs: &[((usize, usize), (usize, usize))]) -> Result<Coloring> {
    let mut raw: Vec<u64> = (0..(n * n) as u64).collect();
    for &((i1, j1), (i2, j2)) in pairs {
        raw[i2 * n + j2] = raw[i1 * n + j1];
    }
    Coloring::compacted(n, raw)
}

fn check_st(s: usize, t: usize) -> Result<()> {
    if s < 2 || t < s {
        return Err(Error::input(format!("need 2 <= s <= t, got s={s}, t={t}")));
    }
    Ok(())
}

/// `c(a_{2i} b_{2i}) = c(a_{2i+1} b_{2i+1})`, everything else distinct.
pub fn near_rainbow_pairs(n: usize, s: usize, t: usize) -> Result<ConstructionResult> {
    check_st(s, t)?;
    if n < 2 {
        return Err(Error::input("n must be at least 2"));
    }
    let pairs: Vec<_> = (0..n / 2)
        .map(|i| ((2 * i, 2 * i), (2 * i + 1, 2 * i + 1)))
        .collect();
    let coloring = pairing(n, &pairs)?;
    let prov = provenance(
        "near_rainbow_pairs",
        &[("n", n.to_string()), ("s", s.to_string()), ("t", t.to_string())],
        None,
    );
    Ok(result(coloring, s, t, s * t - s / 2, prov))
}

/// The diagonal pairs plus `c(a_0 b_{n-1}) = c(a_{n-1} b_0)` for odd `n`.
/// The extra pair lets an `s`-set meet `ceil(s/2)` pairs, so the claim is
/// `st - ceil(s/2)`.
pub fn near_rainbow_pairs_odd(n: usize, s: usize, t: usize) -> Result<ConstructionResult> {
    check_st(s, t)?;
    if n < 3 || n % 2 == 0 {
        return Err(Error::input(format!("n must be odd and at least 3, got {n}")));
    }
    let mut pairs: Vec<_> = (0..n / 2)
        .map(|i| ((2 * i, 2 * i), (2 * i + 1, 2 * i + 1)))
        .collect();
    pairs.push(((0, n - 1), (n - 1, 0)));
    let coloring = pairing(n, &pairs)?;
    let prov = provenance(
        "near_rainbow_pairs_odd",
        &[("n", n.to_string()), ("s", s.to_string()), ("t", t.to_string())],
        None,
    );
    Ok(result(coloring, s, t, s * t - s.div_ceil(2), prov))
}

/// Four color pairs inside every complete block of 7 consecutive indices;
/// trailing vertices stay rainbow.
pub fn k89_block(n: usize) -> Result<ConstructionResult> {
    if n < 7 {
        return Err(Error::input(format!("n must be at least 7, got {n}")));
    }
    let mut pairs = Vec::new();
    for b in 0..n / 7 {
        let o = 7 * b;
        pairs.push(((o, o), (o + 1, o + 2)));
        pairs.push(((o, o + 1), (o + 2, o + 3)));
        pairs.push(((o + 3, o + 4), (o + 5, o + 5)));
        pairs.push(((o + 4, o + 4), (o + 6, o + 6)));
    }
    let coloring = pairing(n, &pairs)?;
    let prov = provenance("k89_block", &[("n", n.to_string())], None);
    Ok(result(coloring, 8, 9, 68, prov))
}

pub const DEFAULT_DENSITY: f64 = 0.05;

/// Pairing coloring from a random sparse linear 4-uniform hypergraph on the
/// `2n` vertices: each hyperedge `{a1 < a2, b1 < b2}` split 2+2 across the
/// partition gives `c(a1 b1) = c(a2 b2)`. `ell` defaults to
/// `floor((s+t-1)/3)` and the claim is `st - ell`.
pub fn hypergraph_coloring(
    n: usize,
    s: usize,
    t: usize,
    ell: Option<usize>,
    density: f64,
    seed: u64,
) -> Result<ConstructionResult> {
    if s < 1 || t < s || s + t < 8 {
        return Err(Error::input(format!("need 1 <= s <= t and s+t >= 8, got s={s}, t={t}")));
    }
    let ell = ell.unwrap_or((s + t - 1) / 3);
    if ell + 2 > s * t {
        return Err(Error::input(format!("ell = {ell} leaves fewer than 2 colors per copy")));
    }
    let out = hypergraph::pipeline(n, s + t, ell, density, seed)?;
    if let Some(bad) = out.sparse.verify_sparsity(s + t, ell)? {
        return Err(Error::precondition(format!(
            "sparsified hypergraph still has a dense subset {bad:?}"
        )));
    }
    let a_index: Vec<Option<usize>> = {
        let mut next = 0;
        (0..2 * n)
            .map(|v| {
                (out.part_a >> v & 1 == 1).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let b_index: Vec<Option<usize>> = {
        let mut next = 0;
        (0..2 * n)
            .map(|v| {
                (out.part_a >> v & 1 == 0).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let pairs: Vec<_> = out
        .split
        .iter()
        .map(|&e| {
            let vs = mask_vertices(e);
            let a: Vec<usize> = vs.iter().filter_map(|&v| a_index[v]).collect();
            let b: Vec<usize> = vs.iter().filter_map(|&v| b_index[v]).collect();
            ((a[0], b[0]), (a[1], b[1]))
        })
        .collect();
    let coloring = pairing(n, &pairs)?;
    let prov = provenance(
        "hypergraph_coloring",
        &[
            ("n", n.to_string()),
            ("s", s.to_string()),
            ("t", t.to_string()),
            ("ell", ell.to_string()),
            ("density", density.to_string()),
            ("sampled", out.sampled.to_string()),
            ("sparse", out.sparse.edges.len().to_string()),
            ("linear", out.linear.edges.len().to_string()),
            ("split", out.split.len().to_string()),
        ],
        Some(seed),
    );
    let mut res = result(coloring, s, t, s * t - ell, prov);
    if out.split.is_empty() {
        res.warnings
            .push("no hyperedges survived; the coloring is rainbow".to_string());
    }
    if out.below_target {
        res.warnings.push(format!(
            "best partition splits {} of {} hyperedges, below a quarter",
            out.split.len(),
            out.linear.edges.len()
        ));
    }
    Ok(res)
}

pub fn rainbow(n: usize) -> Result<Coloring> {
    if n == 0 {
        return Err(Error::input("n must be positive"));
    }
    Coloring::new(n, (0..(n * n) as ColorId).collect())
}

pub fn monochromatic(n: usize) -> Result<Coloring> {
    if n == 0 {
        return Err(Error::input("n must be positive"));
    }
    Coloring::new(n, vec![0; n * n])
}

//! Randomized sparse 4-uniform hypergraphs and the pipeline that turns one
//! into a pairing coloring of `K_{n,n}`.
//!
//! Hyperedges are stored as `u128` vertex masks, so at most 128 vertices.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::subsets::{binomial, Combinations};

pub const MAX_PARTITION_ATTEMPTS: usize = 64;

/// Limit on the number of vertex subsets the exhaustive sparsity scan visits.
pub const SPARSITY_SCAN_LIMIT: u64 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hypergraph4 {
    pub vertex_count: usize,
    pub edges: Vec<u128>,
}

fn mask_of(vertices: &[usize]) -> u128 {
    vertices.iter().fold(0u128, |m, &v| m | (1u128 << v))
}

pub fn mask_vertices(mask: u128) -> Vec<usize> {
    (0..128).filter(|&v| mask >> v & 1 == 1).collect()
}

impl Hypergraph4 {
    pub fn new(vertex_count: usize, edges: Vec<u128>) -> Result<Self> {
        if vertex_count > 128 {
            return Err(Error::input("at most 128 vertices are supported"));
        }
        for &e in &edges {
            if e.count_ones() != 4 || (vertex_count < 128 && e >> vertex_count != 0) {
                return Err(Error::input(format!("bad hyperedge {:?}", mask_vertices(e))));
            }
        }
        Ok(Hypergraph4 {
            vertex_count,
            edges,
        })
    }

    /// Includes each 4-subset independently with probability `density`.
    pub fn random(vertex_count: usize, density: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::input(format!("density {density} outside [0, 1]")));
        }
        if vertex_count > 128 {
            return Err(Error::input("at most 128 vertices are supported"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges = Combinations::new(vertex_count, 4)
            .filter(|_| rng.gen_bool(density))
            .map(|s| mask_of(&s))
            .collect();
        Ok(Hypergraph4 {
            vertex_count,
            edges,
        })
    }

    pub fn is_linear(&self) -> bool {
        self.edges.iter().enumerate().all(|(i, &e)| {
            self.edges[i + 1..]
                .iter()
                .all(|&f| (e & f).count_ones() <= 1)
        })
    }

    /// Hyperedges with exactly two vertices in `in_a`.
    pub fn split_edges(&self, in_a: u128) -> Vec<u128> {
        self.edges
            .iter()
            .copied()
            .filter(|&e| (e & in_a).count_ones() == 2)
            .collect()
    }

    /// Finds `limit + 1` hyperedges whose union has at most `span` vertices,
    /// returned as edge indices in increasing order.
    pub fn find_dense_cluster(&self, span: usize, limit: usize) -> Option<Vec<usize>> {
        fn grow(
            edges: &[u128],
            from: usize,
            union: u128,
            need: usize,
            span: u32,
            chosen: &mut Vec<usize>,
        ) -> bool {
            if chosen.len() == need {
                return true;
            }
            for i in from..edges.len() {
                let u = union | edges[i];
                if u.count_ones() > span {
                    continue;
                }
                chosen.push(i);
                if grow(edges, i + 1, u, need, span, chosen) {
                    return true;
                }
                chosen.pop();
            }
            false
        }
        if span > self.vertex_count {
            return None;
        }
        let mut chosen = Vec::new();
        grow(&self.edges, 0, 0, limit + 1, span as u32, &mut chosen).then_some(chosen)
    }

    /// Deletes hyperedges until every `span`-subset of vertices contains at
    /// most `limit` of them; each round drops the last edge of the first
    /// offending cluster.
    pub fn make_sparse(&mut self, span: usize, limit: usize) -> usize {
        let mut removed = 0;
        while let Some(cluster) = self.find_dense_cluster(span, limit) {
            self.edges.remove(*cluster.last().unwrap());
            removed += 1;
        }
        removed
    }

    /// Exhaustive check that every `span`-subset contains at most `limit`
    /// hyperedges. Returns the first offending subset.
    pub fn verify_sparsity(&self, span: usize, limit: usize) -> Result<Option<Vec<usize>>> {
        if span > self.vertex_count {
            return Ok(None);
        }
        let subsets = binomial(self.vertex_count as u64, span as u64);
        if subsets > SPARSITY_SCAN_LIMIT {
            return Err(Error::Budget(format!(
                "sparsity scan needs {subsets} subsets, limit {SPARSITY_SCAN_LIMIT}"
            )));
        }
        for s in Combinations::new(self.vertex_count, span) {
            let m = mask_of(&s);
            if self.edges.iter().filter(|&&e| e & m == e).count() > limit {
                return Ok(Some(s));
            }
        }
        Ok(None)
    }

    /// Greedy maximal linear sub-hypergraph in edge order.
    pub fn linear_subgraph(&self) -> Hypergraph4 {
        let mut kept: Vec<u128> = Vec::new();
        for &e in &self.edges {
            if kept.iter().all(|&f| (e & f).count_ones() <= 1) {
                kept.push(e);
            }
        }
        Hypergraph4 {
            vertex_count: self.vertex_count,
            edges: kept,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineOutput {
    pub sampled: usize,
    pub sparse: Hypergraph4,
    pub linear: Hypergraph4,
    /// Mask of the vertices placed in part A.
    pub part_a: u128,
    pub split: Vec<u128>,
    pub partition_attempts: usize,
    /// The 2+2 split count stayed below a quarter of the linear hypergraph.
    pub below_target: bool,
}

/// Random balanced partition of `0..2n`, retried until at least a quarter of
/// the hyperedges split 2+2 (best attempt kept otherwise).
pub fn balanced_partition(h: &Hypergraph4, rng: &mut ChaCha8Rng) -> (u128, usize, bool) {
    let n = h.vertex_count / 2;
    let mut order: Vec<usize> = (0..h.vertex_count).collect();
    let mut best = (0u128, 0usize);
    for attempt in 1..=MAX_PARTITION_ATTEMPTS {
        order.shuffle(rng);
        let mask = mask_of(&order[..n]);
        let count = h.split_edges(mask).len();
        if attempt == 1 || count > best.1 {
            best = (mask, count);
        }
        if 4 * count >= h.edges.len() {
            return (mask, attempt, false);
        }
    }
    (best.0, MAX_PARTITION_ATTEMPTS, true)
}

/// Sample, sparsify, extract a linear part and split it across a balanced
/// partition of the `2n` vertices.
pub fn pipeline(
    n: usize,
    span: usize,
    limit: usize,
    density: f64,
    seed: u64,
) -> Result<PipelineOutput> {
    if n == 0 || 2 * n > 128 {
        return Err(Error::input(format!("n must be in 1..=64, got {n}")));
    }
    let mut sparse = Hypergraph4::random(2 * n, density, seed)?;
    let sampled = sparse.edges.len();
    sparse.make_sparse(span, limit);
    let linear = sparse.linear_subgraph();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let (part_a, partition_attempts, below_target) = balanced_partition(&linear, &mut rng);
    let split = linear.split_edges(part_a);
    Ok(PipelineOutput {
        sampled,
        sparse,
        linear,
        part_a,
        split,
        partition_attempts,
        below_target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparsify_then_scan_agrees() {
        for seed in 0..5 {
            let mut h = Hypergraph4::random(12, 0.1, seed).unwrap();
            h.make_sparse(8, 2);
            assert_eq!(h.verify_sparsity(8, 2).unwrap(), None);
            assert!(h.linear_subgraph().is_linear());
        }
    }

    #[test]
    fn dense_cluster_detected() {
        // Three hyperedges inside {0..5}.
        let edges = vec![
            mask_of(&[0, 1, 2, 3]),
            mask_of(&[0, 1, 4, 5]),
            mask_of(&[2, 3, 4, 5]),
        ];
        let h = Hypergraph4::new(8, edges).unwrap();
        assert_eq!(h.find_dense_cluster(6, 2), Some(vec![0, 1, 2]));
        assert_eq!(h.verify_sparsity(6, 2).unwrap(), Some(vec![0, 1, 2, 3, 4, 5]));
        assert!(!h.is_linear());
        assert_eq!(h.linear_subgraph().edges.len(), 1);
    }

    #[test]
    fn pipeline_is_seed_stable() {
        let a = pipeline(6, 8, 2, 0.05, 11).unwrap();
        let b = pipeline(6, 8, 2, 0.05, 11).unwrap();
        assert_eq!(a.split, b.split);
        assert_eq!(a.part_a.count_ones(), 6);
    }
}

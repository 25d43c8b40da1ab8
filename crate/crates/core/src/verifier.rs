//! Checks whether every copy of `K_{s,t}` in a coloring sees at least `q`
//! colors.
//!
//! Copies are enumerated with the `s`-side in part A and, when `s != t`,
//! also with the `s`-side in part B. The outer loop over `s`-subsets runs in
//! parallel; the inner loop walks `t`-subsets depth first with color bitsets
//! and stops extending a partial copy once its color count can no longer
//! improve the current minimum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coloring::{Coloring, PatternSpec, Subcopy};
use crate::error::{Error, Result};
use crate::subsets::Combinations;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum VerifyOutcome {
    Valid,
    Violation { copy: Subcopy, observed: usize },
    /// `n < t`: there is no copy to check.
    VacuouslyValid,
}

impl VerifyOutcome {
    pub fn is_valid(&self) -> bool {
        matches!(self, VerifyOutcome::Valid)
    }
}

/// Smallest copy found and its color count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinColors {
    pub count: usize,
    pub witness: Subcopy,
}

pub fn verify(coloring: &Coloring, spec: PatternSpec) -> VerifyOutcome {
    verify_with_jobs(coloring, spec, None).expect("default thread pool")
}

/// As [`verify`], on a dedicated pool of `jobs` threads when given.
pub fn verify_with_jobs(
    coloring: &Coloring,
    spec: PatternSpec,
    jobs: Option<usize>,
) -> Result<VerifyOutcome> {
    if coloring.n() < spec.t {
        return Ok(VerifyOutcome::VacuouslyValid);
    }
    let found = in_pool(jobs, || scan(coloring, spec.s, spec.t, spec.q))?;
    Ok(match found {
        Some(m) => VerifyOutcome::Violation {
            copy: m.witness,
            observed: m.count,
        },
        None => VerifyOutcome::Valid,
    })
}

/// Minimum number of colors over all copies of `K_{s,t}`.
pub fn min_colors_over_copies(coloring: &Coloring, s: usize, t: usize) -> Result<MinColors> {
    if s == 0 || s > t {
        return Err(Error::input(format!("need 1 <= s <= t, got s={s}, t={t}")));
    }
    if t > coloring.n() {
        return Err(Error::input(format!("t = {t} exceeds n = {}", coloring.n())));
    }
    Ok(scan(coloring, s, t, s * t + 1).expect("at least one copy exists"))
}

fn in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| Error::Resource(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

type Key = (bool, Vec<usize>, Vec<usize>);

fn key_of(m: &MinColors) -> Key {
    (!m.witness.s_in_a, m.witness.a_side.clone(), m.witness.b_side.clone())
}

/// Minimum color count over copies, restricted to copies with fewer than
/// `cap` colors. Ties go to the lexicographically first copy.
fn scan(coloring: &Coloring, s: usize, t: usize, cap: usize) -> Option<MinColors> {
    let n = coloring.n();
    let words = coloring.palette_size().div_ceil(64);
    let mut orientations = vec![true];
    if s != t {
        orientations.push(false);
    }
    let mut best: Option<MinColors> = None;
    for s_in_a in orientations {
        // rows carry the s-side
        let color = |row: usize, col: usize| {
            if s_in_a {
                coloring.color(row, col)
            } else {
                coloring.color(col, row)
            }
        };
        let outers: Vec<Vec<usize>> = Combinations::new(n, s).collect();
        let found = outers
            .par_iter()
            .filter_map(|rows| {
                let mut col_masks = vec![0u64; n * words];
                for col in 0..n {
                    for &r in rows {
                        let c = color(r, col) as usize;
                        col_masks[col * words + c / 64] |= 1u64 << (c % 64);
                    }
                }
                let mut inner = InnerScan {
                    n,
                    t,
                    words,
                    col_masks: &col_masks,
                    stack: vec![0u64; (t + 1) * words],
                    chosen: Vec::with_capacity(t),
                    bound: cap,
                    best: None,
                };
                inner.dfs(0, 0);
                inner.best.map(|(count, cols)| {
                    let (a_side, b_side) = if s_in_a {
                        (rows.clone(), cols)
                    } else {
                        (cols, rows.clone())
                    };
                    MinColors {
                        count,
                        witness: Subcopy {
                            a_side,
                            b_side,
                            s_in_a,
                        },
                    }
                })
            })
            .min_by(|x, y| x.count.cmp(&y.count).then_with(|| key_of(x).cmp(&key_of(y))));
        best = match (best, found) {
            (None, f) => f,
            (b, None) => b,
            (Some(b), Some(f)) => Some(if (f.count, key_of(&f)) < (b.count, key_of(&b)) {
                f
            } else {
                b
            }),
        };
    }
    best
}

struct InnerScan<'a> {
    n: usize,
    t: usize,
    words: usize,
    col_masks: &'a [u64],
    /// `stack[d]` is the color union of the first `d` chosen columns.
    stack: Vec<u64>,
    chosen: Vec<usize>,
    /// Only copies with strictly fewer colors are of interest.
    bound: usize,
    best: Option<(usize, Vec<usize>)>,
}

impl InnerScan<'_> {
    fn dfs(&mut self, from: usize, count: usize) {
        let depth = self.chosen.len();
        if depth == self.t {
            self.best = Some((count, self.chosen.clone()));
            self.bound = count;
            return;
        }
        let w = self.words;
        for col in from..=self.n - (self.t - depth) {
            let mut c = 0usize;
            for k in 0..w {
                let u = self.stack[depth * w + k] | self.col_masks[col * w + k];
                self.stack[(depth + 1) * w + k] = u;
                c += u.count_ones() as usize;
            }
            if c >= self.bound {
                continue;
            }
            self.chosen.push(col);
            self.dfs(col + 1, c);
            self.chosen.pop();
            if self.bound <= 1 {
                return;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingScan {
    /// Largest number of same-colored edge pairs inside one copy.
    pub max_repetitions: usize,
    pub witness: Subcopy,
}

/// Maximum number of color pairs fully inside a copy of `K_{s,t}`, for
/// colorings whose classes all have at most two edges. Returns `None` when
/// `n < t`.
pub fn pairing_max_repetitions(
    coloring: &Coloring,
    s: usize,
    t: usize,
) -> Result<Option<PairingScan>> {
    if s == 0 || s > t {
        return Err(Error::input(format!("need 1 <= s <= t, got s={s}, t={t}")));
    }
    let index = coloring.class_index();
    if let Some(c) = index.multiplicities.iter().position(|&m| m > 2) {
        return Err(Error::precondition(format!(
            "not a pairing coloring: color {c} has {} edges",
            index.multiplicities[c]
        )));
    }
    let n = coloring.n();
    if n < t {
        return Ok(None);
    }
    let pairs: Vec<[(usize, usize); 2]> = index
        .classes
        .iter()
        .filter(|c| c.len() == 2)
        .map(|c| [c[0], c[1]])
        .collect();
    let mut orientations = vec![(s, t, true)];
    if s != t {
        orientations.push((t, s, false));
    }
    let mut best: Option<PairingScan> = None;
    for (cap_a, cap_b, s_in_a) in orientations {
        let mut search = PairSearch {
            pairs: &pairs,
            cap_a,
            cap_b,
            a_count: vec![0; n],
            b_count: vec![0; n],
            used_a: 0,
            used_b: 0,
            chosen: Vec::new(),
            best: Vec::new(),
            best_len: 0,
            started: false,
        };
        search.dfs(0);
        let mut a_side: Vec<usize> = Vec::new();
        let mut b_side: Vec<usize> = Vec::new();
        for &p in &search.best {
            for &(i, j) in &pairs[p] {
                a_side.push(i);
                b_side.push(j);
            }
        }
        let witness = padded(a_side, b_side, cap_a, cap_b, n, s_in_a);
        let cand = PairingScan {
            max_repetitions: search.best_len,
            witness,
        };
        if best
            .as_ref()
            .is_none_or(|b| cand.max_repetitions > b.max_repetitions)
        {
            best = Some(cand);
        }
    }
    Ok(best)
}

fn padded(
    a: Vec<usize>,
    b: Vec<usize>,
    cap_a: usize,
    cap_b: usize,
    n: usize,
    s_in_a: bool,
) -> Subcopy {
    let fill = |mut v: Vec<usize>, cap: usize| {
        v.sort_unstable();
        v.dedup();
        let mut x = 0;
        while v.len() < cap {
            if !v.contains(&x) {
                v.push(x);
            }
            x += 1;
        }
        debug_assert!(x <= n);
        v.sort_unstable();
        v
    };
    Subcopy {
        a_side: fill(a, cap_a),
        b_side: fill(b, cap_b),
        s_in_a,
    }
}

struct PairSearch<'a> {
    pairs: &'a [[(usize, usize); 2]],
    cap_a: usize,
    cap_b: usize,
    a_count: Vec<u32>,
    b_count: Vec<u32>,
    used_a: usize,
    used_b: usize,
    chosen: Vec<usize>,
    best: Vec<usize>,
    best_len: usize,
    started: bool,
}

impl PairSearch<'_> {
    fn dfs(&mut self, from: usize) {
        if !self.started || self.chosen.len() > self.best_len {
            self.started = true;
            self.best_len = self.chosen.len();
            self.best = self.chosen.clone();
        }
        for p in from..self.pairs.len() {
            if self.chosen.len() + (self.pairs.len() - p) <= self.best_len {
                return;
            }
            let pair = self.pairs[p];
            for &(i, j) in &pair {
                if self.a_count[i] == 0 {
                    self.used_a += 1;
                }
                self.a_count[i] += 1;
                if self.b_count[j] == 0 {
                    self.used_b += 1;
                }
                self.b_count[j] += 1;
            }
            if self.used_a <= self.cap_a && self.used_b <= self.cap_b {
                self.chosen.push(p);
                self.dfs(p + 1);
                self.chosen.pop();
            }
            for &(i, j) in &pair {
                self.a_count[i] -= 1;
                if self.a_count[i] == 0 {
                    self.used_a -= 1;
                }
                self.b_count[j] -= 1;
                if self.b_count[j] == 0 {
                    self.used_b -= 1;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{monochromatic, near_rainbow_pairs, rainbow};

    fn spec(s: usize, t: usize, q: usize) -> PatternSpec {
        PatternSpec::new(s, t, q).unwrap()
    }

    #[test]
    fn basic_verdicts() {
        let mono = monochromatic(3).unwrap();
        match verify(&mono, spec(2, 2, 2)) {
            VerifyOutcome::Violation { copy, observed } => {
                assert_eq!(observed, 1);
                assert_eq!((copy.a_side, copy.b_side), (vec![0, 1], vec![0, 1]));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(verify(&rainbow(3).unwrap(), spec(2, 2, 4)), VerifyOutcome::Valid);
        assert_eq!(
            verify(&rainbow(2).unwrap(), spec(2, 3, 6)),
            VerifyOutcome::VacuouslyValid
        );
    }

    #[test]
    fn min_colors() {
        assert_eq!(min_colors_over_copies(&monochromatic(4).unwrap(), 2, 2).unwrap().count, 1);
        assert_eq!(min_colors_over_copies(&rainbow(3).unwrap(), 2, 3).unwrap().count, 6);
        assert!(min_colors_over_copies(&rainbow(3).unwrap(), 2, 4).is_err());
    }

    #[test]
    fn orientation_matters_for_unbalanced_copies() {
        // Row 0 is monochromatic, columns are rainbow: a K_{1,3} centered in A
        // has 1 color, one centered in B has 3.
        let c = Coloring::compacted(3, vec![0, 0, 0, 1, 2, 3, 4, 5, 6]).unwrap();
        let m = min_colors_over_copies(&c, 1, 3).unwrap();
        assert_eq!(m.count, 1);
        assert!(m.witness.s_in_a);
        let t = Coloring::compacted(3, vec![0, 1, 4, 0, 2, 5, 0, 3, 6]).unwrap();
        let m = min_colors_over_copies(&t, 1, 3).unwrap();
        assert_eq!(m.count, 1);
        assert!(!m.witness.s_in_a);
        assert_eq!(m.witness.b_side, vec![0]);
    }

    #[test]
    fn pairing_scan() {
        let r = pairing_max_repetitions(&rainbow(4).unwrap(), 2, 2).unwrap().unwrap();
        assert_eq!(r.max_repetitions, 0);
        let p = near_rainbow_pairs(4, 2, 2).unwrap().coloring;
        let r = pairing_max_repetitions(&p, 2, 2).unwrap().unwrap();
        assert_eq!(r.max_repetitions, 1);
        assert_eq!(r.witness.a_side, vec![0, 1]);
        assert!(pairing_max_repetitions(&monochromatic(3).unwrap(), 2, 2).is_err());
        assert!(pairing_max_repetitions(&p, 2, 5).unwrap().is_none());
    }

    #[test]
    fn jobs_do_not_change_witness() {
        let c = near_rainbow_pairs(6, 3, 3).unwrap().coloring;
        let a = verify_with_jobs(&c, spec(3, 3, 9), Some(1)).unwrap();
        let b = verify_with_jobs(&c, spec(3, 3, 9), Some(4)).unwrap();
        assert_eq!(a, b);
    }
}

//! Closed-form bounds, the Corrádi-type set-family lemmas, the Zarankiewicz
//! estimate, the star bounds, and a classifier placing `q` among the known
//! thresholds for `r(K_{n,n}, K_{s,t}, q)`.
//!
//! Formula arithmetic is exact (big rationals / big integers); conversion to
//! `f64` happens only when a real root is unavoidable.

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coloring::PatternSpec;
use crate::error::{Error, Result};
use crate::subsets::Combinations;

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::INFINITY)
}

/// Exponent `(s+t-2)/(st-q+1)` of the general polynomial upper bound.
pub fn general_upper_exponent(s: usize, t: usize, q: usize) -> Result<BigRational> {
    if s == 0 || t == 0 {
        return Err(Error::input("s and t must be positive"));
    }
    if q < 2 || q > s * t {
        return Err(Error::input(format!("need 2 <= q <= {}, got {q}", s * t)));
    }
    Ok(ratio((s + t - 2) as u64, (s * t - q + 1) as u64))
}

/// `a^2 m / (a + (m-1) l)`: lower bound on the union of `m` sets of size at
/// least `a` with pairwise intersections at most `l`.
pub fn corradi_bound(a: u64, m: u64, ell: u64) -> BigRational {
    let den = a + m.saturating_sub(1) * ell;
    if den == 0 {
        return BigRational::zero();
    }
    ratio(a * a * m, den)
}

/// The quantity whose `(r-1)`-th root is the generalized bound, kept exact.
pub fn gen_corradi_ratio(a: u64, m: u64, ell: u64, r: u64) -> Result<BigRational> {
    if r < 2 {
        return Err(Error::input(format!("need r >= 2, got {r}")));
    }
    if r > m {
        return Err(Error::input(format!("need r <= m, got r={r}, m={m}")));
    }
    let a_big = BigInt::from(a);
    let m_big = BigInt::from(m);
    // (m-1)!/(m-r)! as a product.
    let falling: BigInt = (1..r).map(|i| BigInt::from(m - i)).product();
    let m_pow: BigInt = Pow::pow(&m_big, (r - 1) as u32);
    let num: BigInt = Pow::pow(&a_big, r as u32) * &m_pow;
    let den: BigInt = &a_big * (&m_pow - &falling) + &falling * BigInt::from(ell);
    if den.is_zero() {
        return Ok(BigRational::zero());
    }
    Ok(BigRational::new(num, den))
}

/// Generalized Corrádi bound for `r`-wise intersections at most `l`.
pub fn gen_corradi_bound(a: u64, m: u64, ell: u64, r: u64) -> Result<f64> {
    let q = gen_corradi_ratio(a, m, ell, r)?;
    let x = to_f64(&q);
    Ok(if r == 2 { x } else { x.powf(1.0 / (r - 1) as f64) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetFamilyInstance {
    pub universe: usize,
    pub sets: Vec<BTreeSet<usize>>,
    /// Declared minimum set size.
    pub a: usize,
    /// Declared cap on `r`-wise intersections.
    pub ell: usize,
    pub r: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorradiCheck {
    pub hypotheses_ok: bool,
    pub bound: f64,
    pub union_size: usize,
    /// `union >= bound`, compared exactly; `true` when the hypotheses fail.
    pub satisfied: bool,
    /// Double-counting identity for `t = 1..=3`; `None` when the sets are
    /// smaller than `a`.
    pub identity_ok: Option<bool>,
}

fn hypotheses_hold(inst: &SetFamilyInstance) -> bool {
    let m = inst.sets.len();
    if inst.r < 2 || inst.r > m || inst.sets.iter().any(|x| x.len() < inst.a) {
        return false;
    }
    Combinations::new(m, inst.r).all(|idx| {
        let first = &inst.sets[idx[0]];
        first
            .iter()
            .filter(|v| idx[1..].iter().all(|&j| inst.sets[j].contains(v)))
            .count()
            <= inst.ell
    })
}

/// Checks `sum_{x in Y'} d(x)^t` against the sum over all ordered
/// `t`-tuples of indices of `|Y_j1 ∩ ... ∩ Y_jt ∩ Y'|`.
fn degree_identity(ys: &[BTreeSet<usize>], y_prime: &BTreeSet<usize>, t: u32) -> bool {
    let m = ys.len();
    let lhs: u64 = y_prime
        .iter()
        .map(|x| (ys.iter().filter(|y| y.contains(x)).count() as u64).pow(t))
        .sum();
    let mut rhs = 0u64;
    let total = m.pow(t);
    for code in 0..total {
        let mut idx = Vec::with_capacity(t as usize);
        let mut c = code;
        for _ in 0..t {
            idx.push(c % m);
            c /= m;
        }
        rhs += y_prime
            .iter()
            .filter(|x| idx.iter().all(|&j| ys[j].contains(x)))
            .count() as u64;
    }
    lhs == rhs
}

pub fn check_corradi_instance(inst: &SetFamilyInstance) -> CorradiCheck {
    let m = inst.sets.len();
    let union: BTreeSet<usize> = inst.sets.iter().flatten().copied().collect();
    let union_size = union.len();
    let hypotheses_ok = hypotheses_hold(inst);
    let (a, ell, r) = (inst.a as u64, inst.ell as u64, inst.r as u64);
    let exact = if inst.r >= 2 && inst.r <= m {
        gen_corradi_ratio(a, m as u64, ell, r).ok()
    } else {
        None
    };
    let bound = match (&exact, inst.r) {
        (Some(q), 2) => to_f64(q),
        (Some(q), _) => to_f64(q).powf(1.0 / (r - 1) as f64),
        (None, _) => 0.0,
    };
    let satisfied = match (&exact, hypotheses_ok) {
        (Some(q), true) => {
            let lhs: BigInt = Pow::pow(&BigInt::from(union_size), (r - 1) as u32);
            BigRational::from_integer(lhs) >= *q
        }
        _ => true,
    };
    let identity_ok = if m > 0 && inst.sets.iter().all(|x| x.len() >= inst.a) {
        let ys: Vec<BTreeSet<usize>> = inst
            .sets
            .iter()
            .map(|x| x.iter().take(inst.a).copied().collect())
            .collect();
        let y: BTreeSet<usize> = ys.iter().flatten().copied().collect();
        let half: BTreeSet<usize> = y.iter().copied().step_by(2).collect();
        Some((1..=3u32.min(m as u32)).all(|t| {
            degree_identity(&ys, &y, t) && degree_identity(&ys, &half, t)
        }))
    } else {
        None
    };
    CorradiCheck {
        hypotheses_ok,
        bound,
        union_size,
        satisfied,
        identity_ok,
    }
}

/// Seeded random family with `a` and `l` set to the tightest values the
/// sets satisfy, so the hypotheses always hold. `m` ranges over `r..=7`.
pub fn random_instance(seed: u64, r: usize) -> Result<SetFamilyInstance> {
    if !(2..=7).contains(&r) {
        return Err(Error::input(format!("need 2 <= r <= 7, got {r}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(r..=7);
    let universe = rng.gen_range(4..=14);
    let density = rng.gen_range(0.2..0.8);
    let sets: Vec<BTreeSet<usize>> = (0..m)
        .map(|_| {
            let mut x: BTreeSet<usize> = (0..universe).filter(|_| rng.gen_bool(density)).collect();
            if x.is_empty() {
                x.insert(rng.gen_range(0..universe));
            }
            x
        })
        .collect();
    let a = sets.iter().map(BTreeSet::len).min().unwrap_or(0);
    let ell = Combinations::new(m, r)
        .map(|idx| {
            sets[idx[0]]
                .iter()
                .filter(|v| idx[1..].iter().all(|&j| sets[j].contains(v)))
                .count()
        })
        .max()
        .unwrap_or(0);
    Ok(SetFamilyInstance {
        universe,
        sets,
        a,
        ell,
        r,
    })
}

/// Kővári–Sós–Turán style estimate
/// `(b-1)^{1/a} (m-a+1) n^{1-1/a} + (a-1) n` for `z(m, n; a, b)`.
pub fn zarankiewicz_upper(m: u64, n: u64, a: u64, b: u64) -> f64 {
    let (mf, nf, af, bf) = (m as f64, n as f64, a as f64, b as f64);
    (bf - 1.0).powf(1.0 / af) * (mf - af + 1.0) * nf.powf(1.0 - 1.0 / af) + (af - 1.0) * nf
}

/// `⌈n(q-1)/(t-1)⌉`, the lower bound for stars with `2 <= q <= (t+1)/2`.
pub fn star_lower_bound(n: u64, t: u64, q: u64) -> Result<u64> {
    if q < 2 || 2 * q > t + 1 {
        return Err(Error::input(format!(
            "need 2 <= q <= (t+1)/2, got t={t}, q={q}"
        )));
    }
    Ok((n * (q - 1)).div_ceil(t - 1))
}

fn binom_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Smallest `r` with
/// `n C(r-1, q-2) <= C(r-q+2, q-1)(q-1)l + (C(r, q-1) - C(r-q+2, q-1))(t-1)`,
/// `l = ⌊(t-1)/(q-1)⌋`: the refined lower bound for `K_{1,t}`.
pub fn refined_r(n: u64, t: u64, q: u64) -> Result<u64> {
    if t < 2 || q < 2 || q > t {
        return Err(Error::input(format!("need 2 <= q <= t, got t={t}, q={q}")));
    }
    let ell = BigUint::from((t - 1) / (q - 1));
    let nb = BigUint::from(n);
    let q1 = BigUint::from(q - 1);
    let t1 = BigUint::from(t - 1);
    let mut r = (q - 1).max(1);
    loop {
        let lhs = &nb * binom_big(r - 1, q - 2);
        let inner = binom_big(r + 2 - q, q - 1);
        let rhs = &inner * &q1 * &ell + (binom_big(r, q - 1) - &inner) * &t1;
        if lhs <= rhs {
            return Ok(r);
        }
        r += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
    Exact,
    Threshold,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub name: String,
    pub kind: BoundKind,
    /// Growth exponent in `n`, constants suppressed. `None` when unknown.
    pub exponent: Option<f64>,
    /// Human-readable form, e.g. `n^2 - 1`.
    pub formula: String,
    pub source: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    /// Every edge gets its own color.
    ExactSquare,
    /// `n^2 - O(1)`.
    NearSquare,
    Quadratic,
    /// Inside the window where the quadratic threshold is known to lie.
    QuadraticWindow,
    /// Above the linear threshold, not known to be quadratic.
    Superlinear,
    Linear,
    Sublinear,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub s: usize,
    pub t: usize,
    pub q: usize,
    pub region: Region,
    pub linear_threshold: usize,
    /// `[st - ⌊(s+t)/2⌋ + 2, st - ⌊(s+t)/2⌋ + 4]`.
    pub quadratic_window: (usize, usize),
    pub bounds: Vec<BoundEntry>,
}

impl BoundReport {
    pub fn best_lower_exponent(&self) -> f64 {
        self.bounds
            .iter()
            .filter(|b| matches!(b.kind, BoundKind::Lower | BoundKind::Exact | BoundKind::Threshold))
            .filter_map(|b| b.exponent)
            .fold(0.0, f64::max)
    }

    pub fn best_upper_exponent(&self) -> f64 {
        self.bounds
            .iter()
            .filter(|b| matches!(b.kind, BoundKind::Upper | BoundKind::Exact | BoundKind::Threshold))
            .filter_map(|b| b.exponent)
            .fold(2.0, f64::min)
    }
}

fn entry(name: &str, kind: BoundKind, exponent: Option<f64>, formula: String, source: &str) -> BoundEntry {
    BoundEntry {
        name: name.to_string(),
        kind,
        exponent: exponent.map(|e| e.clamp(0.0, 2.0)),
        formula,
        source: source.to_string(),
    }
}

/// Places `q` relative to the known thresholds for `K_{s,t}` and lists
/// every bound that applies (upper bounds propagate downward in `q`,
/// lower bounds upward).
pub fn threshold_classify(s: usize, t: usize, q: usize) -> Result<BoundReport> {
    let spec = PatternSpec::new(s, t, q)?;
    let (s, t, q) = (spec.s, spec.t, spec.q);
    use BoundKind::*;
    let st = s * t;
    let half = (s + t) / 2;
    let lin = (st + 3).saturating_sub(s + t).max(2);
    let window = (st + 2 - half, st + 4 - half);
    let mut b = Vec::new();

    b.push(entry("trivial", Upper, Some(2.0), "n^2".into(), "all edges distinct"));

    if s == 1 {
        if 2 * q <= t + 1 {
            let l = (t - 1) / (q - 1);
            b.push(entry(
                "star-lower",
                Lower,
                Some(1.0),
                format!("ceil(n({})/{})", q - 1, t - 1),
                "star bound, small q",
            ));
            b.push(entry(
                "star-upper",
                Upper,
                Some(1.0),
                format!("ceil(n/{l})"),
                "block-cyclic star construction",
            ));
        } else {
            b.push(entry(
                "star-exact",
                Exact,
                Some(1.0),
                format!("n - {}", t - q),
                "star bound, large q",
            ));
        }
        return Ok(BoundReport {
            s,
            t,
            q,
            region: Region::Linear,
            linear_threshold: lin,
            quadratic_window: window,
            bounds: b,
        });
    }

    let g = general_upper_exponent(s, t, q)?;
    b.push(entry(
        "general-upper",
        Upper,
        Some(to_f64(&g)),
        format!("n^({g})"),
        "general polynomial upper bound",
    ));

    // Linear threshold and the bound just below it.
    if q == lin {
        b.push(entry("linear-threshold", Threshold, Some(1.0), "Theta(n)".into(), "linear threshold"));
    } else if q > lin {
        b.push(entry("linear-lower", Lower, Some(1.0), "Omega(n)".into(), "linear threshold, monotone in q"));
    }
    if q < lin {
        let e = 1.0 - 1.0 / (s + t - 1) as f64;
        b.push(entry(
            "sublinear-upper",
            Upper,
            Some(e),
            format!("O(n^(1 - 1/{}))", s + t - 1),
            "below the linear threshold",
        ));
    }

    // Quadratic lower bounds.
    let mut quad: Vec<(usize, &str)> = vec![(st - s + 2, "quadratic for q >= st - s + 2")];
    if s <= 3 {
        quad.push((st - t / 2 + 1, "quadratic for s <= 3, q >= st - t/2 + 1"));
    }
    if s >= 4 && (s % 2 == 0 || t % 2 == 0) {
        quad.push((st + 3 - half, "quadratic for s >= 4 with s or t even"));
    }
    if s >= 5 && s % 2 == 1 && t % 2 == 1 {
        quad.push((st + 4 - half, "quadratic for s >= 5, s and t odd"));
    }
    if t == s + 1 || s == 2 || (s == 3 && t % 2 == 0) {
        quad.push((st + 2 - half, "quadratic threshold at window start"));
    }
    if let Some(&(_, src)) = quad.iter().filter(|(thr, _)| q >= *thr).min_by_key(|(thr, _)| *thr) {
        b.push(entry("quadratic-lower", Lower, Some(2.0), "Theta(n^2)".into(), src));
    }
    if s >= 3 && q >= st + 2 - half {
        b.push(entry("three-halves-lower", Lower, Some(1.5), "Omega(n^(3/2))".into(), "window start, s >= 3"));
    }
    if s >= 3 && t >= s + 2 && (s, t) != (3, 5) && (s, t) != (3, 7) && q + half > st {
        b.push(entry(
            "four-thirds-lower",
            Lower,
            Some(4.0 / 3.0),
            "Omega(n^(4/3))".into(),
            "one below the window, t >= s + 2",
        ));
    }

    // Near-square values, valid for large n.
    if q == st {
        b.push(entry("all-distinct", Exact, Some(2.0), "n^2".into(), "every pair of edges lies in a copy"));
    } else if st - q < s / 2 {
        b.push(entry(
            "near-square-exact",
            Exact,
            Some(2.0),
            format!("n^2 - {}", st - q),
            "near-square, large n",
        ));
    } else if st - q == s / 2 {
        b.push(entry(
            "near-square-upper",
            Upper,
            Some(2.0),
            "n^2 - floor(n/2)".into(),
            "pairing construction",
        ));
    }
    if q + (2 * s - 1) / 3 > st {
        b.push(entry(
            "near-square-linear-loss",
            Lower,
            Some(2.0),
            format!("n^2 - {}(n-1)", 2 * ((s.saturating_sub(2)) / 3)),
            "large n",
        ));
    }
    if s >= 3 && t + 2 >= 2 * s && q >= st - s + 2 {
        b.push(entry(
            "near-square-degree",
            Lower,
            Some(2.0),
            format!("n^2 - {}n + 1", s - 2),
            "large n, t >= 2(s-1)",
        ));
    }
    if s + t >= 8 && q <= st - (s + t - 1) / 3 {
        b.push(entry(
            "hypergraph-upper",
            Upper,
            Some(2.0),
            format!("n^2 - Theta(n^(1 + 3/{}))", s + t - 3),
            "random hypergraph construction",
        ));
    }

    // Lower bounds from forbidden bicliques.
    let mut best_ab: Option<(usize, usize, usize)> = None;
    for a in 2..=s {
        for bb in 2..=t {
            if a * bb >= s + t && a * bb <= st && st - a * bb + 2 <= q {
                let m = a.min(bb);
                if best_ab.is_none_or(|(_, _, cur)| m < cur) {
                    best_ab = Some((a, bb, m));
                }
            }
        }
    }
    if let Some((a, bb, m)) = best_ab {
        b.push(entry(
            "biclique-lower",
            Lower,
            Some(1.0 / m as f64),
            format!("Omega(n^(1/{m}))"),
            &format!("forbidden monochromatic K_{{{a},{bb}}}"),
        ));
    }
    for a in (2..=s).rev() {
        let k = a * (s + t - a).saturating_sub(2);
        if s + t - a >= 2 && k >= s + t - 1 && k < st && st - k + 1 <= q {
            b.push(entry(
                "induction-lower",
                Lower,
                Some(1.0 / a as f64),
                format!("Omega(n^(1/{a}))"),
                "induction on the smaller side",
            ));
            break;
        }
    }

    // Balanced rows.
    if s == t {
        let p = s;
        if q + 2 * p >= p * p + 2 {
            b.push(entry(
                "balanced-sublinear-lower",
                Lower,
                Some(1.0 - 1.0 / p as f64),
                format!("Omega(n^(1 - 1/{p}))"),
                "energy method, q >= p^2 - 2p + 2",
            ));
        }
        if q + p > p * p && q + p < p * p + 2 {
            let e = 2.0 - 2.0 / (p / 2) as f64;
            b.push(entry(
                "balanced-cycle-lower",
                Lower,
                Some(e.max(0.0)),
                format!("Omega(n^(2 - 2/{}))", p / 2),
                "forbidden even cycles",
            ));
        }
        if q + (2 * p - 1) / 3 == p * p {
            b.push(entry(
                "balanced-gap-upper",
                Upper,
                None,
                "n^2 - c n^(1+eps), eps unspecified".into(),
                "balanced table row, exponent unknown",
            ));
        }
        if q >= 2 {
            b.push(entry(
                "balanced-ramsey-lower",
                Lower,
                Some(1.0 / p as f64),
                format!("Omega(n^(1/{p}))"),
                "multicolor bipartite Ramsey",
            ));
        }
    }

    let report_tmp = BoundReport {
        s,
        t,
        q,
        region: Region::Sublinear,
        linear_threshold: lin,
        quadratic_window: window,
        bounds: b,
    };
    let region = if q == st {
        Region::ExactSquare
    } else if st - q < s / 2 {
        Region::NearSquare
    } else if report_tmp.best_lower_exponent() >= 2.0 {
        Region::Quadratic
    } else if q >= window.0 && q <= window.1 {
        Region::QuadraticWindow
    } else if q > lin {
        Region::Superlinear
    } else if q == lin {
        Region::Linear
    } else {
        Region::Sublinear
    };
    Ok(BoundReport { region, ..report_tmp })
}

/// A closed-form prediction that holds for every `n >= t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub name: String,
    pub lo: u64,
    pub hi: u64,
}

/// Exact or bracketing values of `r(K_{n,n}, K_{s,t}, q)` that are valid at
/// every `n`, for cross-checking computed values. Empty when `n < t`.
pub fn formula_predictions(n: usize, s: usize, t: usize, q: usize) -> Result<Vec<Prediction>> {
    let spec = PatternSpec::new(s, t, q)?;
    let (n64, t64, q64) = (n as u64, t as u64, q as u64);
    let mut out = Vec::new();
    if n < spec.t {
        return Ok(out);
    }
    if s == 1 {
        if 2 * q >= t + 2 {
            let v = n64 - t64 + q64;
            out.push(Prediction { name: "n - t + q".into(), lo: v, hi: v });
        } else {
            let lo = star_lower_bound(n64, t64, q64)?;
            let hi = n64.div_ceil((t64 - 1) / (q64 - 1));
            out.push(Prediction { name: "star bracket".into(), lo, hi });
        }
    } else if q == s * t {
        let v = n64 * n64;
        out.push(Prediction { name: "n^2".into(), lo: v, hi: v });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParityCase {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct A1Violation {
    pub s: u64,
    pub t: u64,
    pub case: ParityCase,
    /// Both sides doubled to stay integral.
    pub lhs2: u64,
    pub rhs2: u64,
}

/// Checks, for `3 <= s <= s_max`, `3s-2 <= t <= t_max`, `(s,t) != (3,7)`,
/// that with `X = ⌊(s+t)/2⌋ - s + 1` either `X` is even and
/// `3X/2 + s <= t`, or `X` is odd and `3(X+1)/2 + s - 1 <= t`.
pub fn lemma_a1_check(s_max: u64, t_max: u64) -> Result<Vec<A1Violation>> {
    if s_max > 10_000 || t_max > 10_000 {
        return Err(Error::input("s_max and t_max are limited to 10^4"));
    }
    let per_s: Vec<Vec<A1Violation>> = (3..=s_max)
        .into_par_iter()
        .map(|s| {
            let mut v = Vec::new();
            for t in (3 * s - 2)..=t_max {
                if (s, t) == (3, 7) {
                    continue;
                }
                let x = (s + t) / 2 + 1 - s;
                let (case, lhs2) = if x % 2 == 0 {
                    (ParityCase::Even, 3 * x + 2 * s)
                } else {
                    (ParityCase::Odd, 3 * (x + 1) + 2 * (s - 1))
                };
                if lhs2 > 2 * t {
                    v.push(A1Violation { s, t, case, lhs2, rhs2: 2 * t });
                }
            }
            v
        })
        .collect();
    Ok(per_s.into_iter().flatten().collect())
}

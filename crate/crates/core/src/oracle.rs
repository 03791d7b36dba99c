//! Brute-force ground truth for small codes.
//!
//! Weight enumerators come from Gray-code stepping over all messages, or,
//! when the dual is smaller, from the dual code and the MacWilliams
//! identity. Orbits are enumerated over the whole lower-triangular affine
//! group. Decreasing sets are generated exhaustively or sampled through
//! random linear extensions.

use std::collections::{BTreeMap, HashSet};

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::monomial::{is_decreasing, IndexSet, Monomial, MonomialSpace};
use crate::weight::lambda_size;

/// Largest `m` for exhaustive down-set generation.
pub const EXHAUSTIVE_MAX_M: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EnumerationBudget {
    /// Largest dimension enumerated directly, and largest dual dimension.
    pub max_k: usize,
    /// Largest `m` for orbit enumeration.
    pub max_lta_m: u32,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_k: 24,
            max_lta_m: 4,
        }
    }
}

impl EnumerationBudget {
    pub fn validate(&self) -> Result<()> {
        if self.max_k == 0 || self.max_k > 32 {
            return Err(Error::Domain(format!(
                "codeword budget {} not in 1..=32",
                self.max_k
            )));
        }
        if self.max_lta_m == 0 || self.max_lta_m > 5 {
            return Err(Error::Domain(format!(
                "orbit budget m = {} not in 1..=5",
                self.max_lta_m
            )));
        }
        Ok(())
    }
}

/// A binary vector packed into 64-bit words.
type Packed = Vec<u64>;

fn pack(bits: &[u8]) -> Packed {
    let mut out = vec![0u64; bits.len().div_ceil(64)];
    for (j, &b) in bits.iter().enumerate() {
        if b == 1 {
            out[j / 64] |= 1 << (j % 64);
        }
    }
    out
}

fn weight(v: &[u64]) -> usize {
    v.iter().map(|w| w.count_ones() as usize).sum()
}

fn xor_into(acc: &mut [u64], row: &[u64]) {
    for (a, r) in acc.iter_mut().zip(row) {
        *a ^= r;
    }
}

fn generator_rows(set: &IndexSet, space: MonomialSpace) -> Result<Vec<Packed>> {
    if set.n() != space.n() {
        return Err(Error::Length {
            expected: space.n(),
            got: set.n(),
        });
    }
    set.indices()
        .iter()
        .map(|&i| Ok(pack(&space.evaluate(space.monomial_of(i)?)?)))
        .collect()
}

/// Weight distribution of the span of `rows` by Gray-code stepping.
fn gray_enumerate(rows: &[Packed], words: usize) -> BTreeMap<usize, u64> {
    let mut dist = BTreeMap::new();
    let mut acc = vec![0u64; words];
    *dist.entry(0).or_insert(0) += 1;
    for step in 1u64..(1u64 << rows.len()) {
        xor_into(&mut acc, &rows[step.trailing_zeros() as usize]);
        *dist.entry(weight(&acc)).or_insert(0) += 1;
    }
    dist
}

/// Basis of the null space of `rows` (vectors `y` with `row·y = 0`).
fn null_space(rows: &[Packed], n: usize) -> Vec<Packed> {
    let words = n.div_ceil(64);
    let bit = |v: &Packed, j: usize| (v[j / 64] >> (j % 64)) & 1 == 1;
    let mut reduced: Vec<Packed> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..reduced.len()).find(|&r| bit(&reduced[r], col)) else {
            continue;
        };
        reduced.swap(rank, p);
        let pivot_row = reduced[rank].clone();
        for (r, row) in reduced.iter_mut().enumerate() {
            if r != rank && bit(row, col) {
                xor_into(row, &pivot_row);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut y = vec![0u64; words];
            y[f / 64] |= 1 << (f % 64);
            for (r, &pc) in pivots.iter().enumerate() {
                if bit(&reduced[r], f) {
                    y[pc / 64] |= 1 << (pc % 64);
                }
            }
            y
        })
        .collect()
}

fn binomial(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i128, |acc, t| acc * (n - t) as i128 / (t + 1) as i128)
}

/// Krawtchouk polynomial `K_w(j; n)`.
fn krawtchouk(w: usize, j: usize, n: usize) -> i128 {
    (0..=w)
        .map(|s| {
            let term = binomial(j, s) * binomial(n - j, w - s);
            if s % 2 == 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}

fn macwilliams(
    dual: &BTreeMap<usize, u64>,
    n: usize,
    dual_size: u64,
) -> Result<BTreeMap<usize, u64>> {
    let mut out = BTreeMap::new();
    for w in 0..=n {
        let s: i128 = dual
            .iter()
            .map(|(&j, &b)| i128::from(b) * krawtchouk(w, j, n))
            .sum();
        if s % i128::from(dual_size) != 0 || s < 0 {
            return Err(Error::Invariant(format!(
                "MacWilliams transform not integral at weight {w}"
            )));
        }
        let a = (s / i128::from(dual_size)) as u64;
        if a > 0 {
            out.insert(w, a);
        }
    }
    Ok(out)
}

/// Exact weight enumerator `w → A_w` of the code spanned by `set`.
pub fn enumerate_weights(
    set: &IndexSet,
    space: MonomialSpace,
    budget: &EnumerationBudget,
) -> Result<BTreeMap<usize, u64>> {
    budget.validate()?;
    let rows = generator_rows(set, space)?;
    let n = space.n();
    let k = rows.len();
    if k <= budget.max_k {
        return Ok(gray_enumerate(&rows, n.div_ceil(64)));
    }
    if n - k <= budget.max_k && n <= 64 {
        let dual = null_space(&rows, n);
        let dual_dist = gray_enumerate(&dual, n.div_ceil(64));
        return macwilliams(&dual_dist, n, 1u64 << dual.len());
    }
    Err(Error::Budget(format!(
        "K = {k} and N − K = {} both exceed {}",
        n - k,
        budget.max_k
    )))
}

/// Minimum nonzero weight and its multiplicity.
pub fn min_weight(dist: &BTreeMap<usize, u64>) -> Option<(usize, u64)> {
    dist.iter().find(|(&w, _)| w > 0).map(|(&w, &a)| (w, a))
}

/// Minimum weight over the successive-cancellation coset of `i`: message
/// bit `i` is one, earlier bits are zero, later bits of `set` are free.
pub fn oracle_bitwise_wmin(
    set: &IndexSet,
    space: MonomialSpace,
    i: usize,
    budget: &EnumerationBudget,
) -> Result<usize> {
    budget.validate()?;
    if !set.contains(i) {
        return Err(Error::Domain(format!(
            "index {i} is not in the information set"
        )));
    }
    let later: Vec<usize> = set.indices().iter().copied().filter(|&j| j > i).collect();
    if later.len() > budget.max_k {
        return Err(Error::Budget(format!(
            "coset enumeration over {} rows",
            later.len()
        )));
    }
    let rows = later
        .iter()
        .map(|&j| Ok(pack(&space.evaluate(space.monomial_of(j)?)?)))
        .collect::<Result<Vec<Packed>>>()?;
    let mut acc = pack(&space.evaluate(space.monomial_of(i)?)?);
    let mut best = weight(&acc);
    for step in 1u64..(1u64 << rows.len()) {
        xor_into(&mut acc, &rows[step.trailing_zeros() as usize]);
        best = best.min(weight(&acc));
    }
    Ok(best)
}

/// Number of distinct evaluations of `f` under
/// `x_i ← x_i + Σ_{j<i} b_ij·x_j + ε_i`.
pub fn oracle_orbit(f: Monomial, space: MonomialSpace, budget: &EnumerationBudget) -> Result<u64> {
    budget.validate()?;
    let m = space.m();
    if m > budget.max_lta_m {
        return Err(Error::Budget(format!(
            "orbit enumeration at m = {m} exceeds {}",
            budget.max_lta_m
        )));
    }
    if f.mask() >> m != 0 {
        return Err(Error::Domain(format!(
            "monomial {f} uses variables outside m = {m}"
        )));
    }
    let n = space.n();
    let strict = (m * (m - 1) / 2) as u64;
    let mut seen: HashSet<Packed> = HashSet::new();
    for eps in 0u32..(1 << m) {
        for b in 0u64..(1u64 << strict) {
            // Bit `t(t−1)/2 + s` of `b` is the coefficient of x_s in row t.
            let mut bits = vec![0u8; n];
            for (j, out) in bits.iter_mut().enumerate() {
                let z = j as u32;
                let mut value = 1u8;
                for t in f.vars() {
                    let mut y = ((z >> t) & 1) ^ ((eps >> t) & 1);
                    for s in 0..t {
                        if (b >> (t * (t - 1) / 2 + s)) & 1 == 1 {
                            y ^= (z >> s) & 1;
                        }
                    }
                    value &= 1 ^ y as u8;
                }
                *out = value;
            }
            seen.insert(pack(&bits));
        }
    }
    Ok(seen.len() as u64)
}

/// Every decreasing set at `m ≤ 4`, the empty set included.
pub fn all_decreasing_sets(space: MonomialSpace) -> Result<Vec<IndexSet>> {
    if space.m() > EXHAUSTIVE_MAX_M {
        return Err(Error::Budget(format!(
            "exhaustive down-sets need m ≤ {EXHAUSTIVE_MAX_M}"
        )));
    }
    let n = space.n();
    let covers: Vec<Vec<usize>> = (0..n).map(|i| space.lower_covers(i)).collect();
    // Larger indices come first in any linear extension of ⪯.
    fn recurse(
        pos: usize,
        n: usize,
        covers: &[Vec<usize>],
        mask: &mut Vec<bool>,
        out: &mut Vec<IndexSet>,
    ) {
        if pos == n {
            out.push(IndexSet::from_mask(mask.clone()));
            return;
        }
        let i = n - 1 - pos;
        recurse(pos + 1, n, covers, mask, out);
        if covers[i].iter().all(|&g| mask[g]) {
            mask[i] = true;
            recurse(pos + 1, n, covers, mask, out);
            mask[i] = false;
        }
    }
    let mut out = Vec::new();
    recurse(0, n, &covers, &mut vec![false; n], &mut out);
    Ok(out)
}

/// A random nonempty decreasing set: a prefix of a random linear extension
/// with a uniformly drawn length.
pub fn sample_decreasing_set<R: Rng + ?Sized>(space: MonomialSpace, rng: &mut R) -> IndexSet {
    let n = space.n();
    let k = rng.random_range(1..=n);
    let mut missing: Vec<usize> = (0..n).map(|i| space.lower_covers(i).len()).collect();
    let mut frontier = vec![n - 1];
    let mut mask = vec![false; n];
    for _ in 0..k {
        let pick = frontier.swap_remove(rng.random_range(0..frontier.len()));
        mask[pick] = true;
        for u in space.upper_covers(pick) {
            missing[u] -= 1;
            if missing[u] == 0 {
                frontier.push(u);
            }
        }
    }
    IndexSet::from_mask(mask)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleFailure {
    pub check: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub sets_checked: usize,
    pub bitwise_checked: usize,
    pub orbits_checked: usize,
    pub failures: Vec<OracleFailure>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// What the oracle suite covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleSuite {
    pub budget: EnumerationBudget,
    /// Exhaustive sets for `1 ≤ m ≤ exhaustive_m`.
    pub exhaustive_m: u32,
    /// Random decreasing sets at `m = sampled_m`.
    pub sampled_m: u32,
    pub samples: usize,
    pub seed: u64,
}

impl Default for OracleSuite {
    fn default() -> Self {
        OracleSuite {
            budget: EnumerationBudget::default(),
            exhaustive_m: 4,
            sampled_m: 5,
            samples: 200,
            seed: 0,
        }
    }
}

fn describe(set: &IndexSet) -> String {
    format!("{:?}", set.indices())
}

fn check_set(
    set: &IndexSet,
    space: MonomialSpace,
    budget: &EnumerationBudget,
    lambda: &dyn Fn(Monomial) -> Result<u32>,
    bitwise: bool,
    report: &mut OracleReport,
) -> Result<()> {
    if set.is_empty() {
        return Ok(());
    }
    if !is_decreasing(set, space).is_decreasing() {
        report.failures.push(OracleFailure {
            check: "generator".into(),
            detail: format!("set {} is not decreasing", describe(set)),
        });
        return Ok(());
    }
    let r = set
        .indices()
        .iter()
        .map(|&i| space.degree_of(i))
        .max()
        .expect("nonempty");
    let wmin = 1usize << (space.m() - r);
    let mut awmin: u128 = 0;
    let mut terms = Vec::new();
    for &i in set.indices() {
        let f = space.monomial_of(i)?;
        if r == 0 {
            awmin = 1;
        } else if f.degree() == r {
            let e = r + lambda(f)?;
            awmin += 1u128 << e;
            terms.push((f, e));
        }
    }
    let dist = enumerate_weights(set, space, budget)?;
    let (ow, oa) = min_weight(&dist).expect("nonempty code has a nonzero codeword");
    report.sets_checked += 1;
    if ow != wmin {
        report.failures.push(OracleFailure {
            check: "wmin".into(),
            detail: format!(
                "m={} set {}: formula {wmin}, enumeration {ow}",
                space.m(),
                describe(set)
            ),
        });
    }
    if u128::from(oa) != awmin {
        let named: Vec<String> = terms.iter().map(|(f, e)| format!("{f}: 2^{e}")).collect();
        report.failures.push(OracleFailure {
            check: "awmin".into(),
            detail: format!(
                "m={} set {}: formula {awmin} [{}], enumeration {oa}",
                space.m(),
                describe(set),
                named.join(", ")
            ),
        });
    }
    if bitwise {
        for &i in set.indices() {
            let closed = space.row_weight(i);
            let brute = oracle_bitwise_wmin(set, space, i, budget)?;
            report.bitwise_checked += 1;
            if closed != brute {
                report.failures.push(OracleFailure {
                    check: "bitwise_wmin".into(),
                    detail: format!(
                        "m={} set {} index {i}: formula {closed}, enumeration {brute}",
                        space.m(),
                        describe(set)
                    ),
                });
            }
        }
    }
    Ok(())
}

/// Runs the closed-form vs brute-force comparisons with the given `|λ|`.
/// Sampled sets are drawn from a ChaCha8 stream seeded by `suite.seed`.
pub fn run_oracle_checks_with(
    suite: &OracleSuite,
    lambda: &dyn Fn(Monomial) -> Result<u32>,
) -> Result<OracleReport> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(suite.seed);
    suite.budget.validate()?;
    if suite.exhaustive_m > EXHAUSTIVE_MAX_M {
        return Err(Error::Budget(format!(
            "exhaustive checks need m ≤ {EXHAUSTIVE_MAX_M}"
        )));
    }
    let mut report = OracleReport::default();
    for m in 1..=suite.exhaustive_m {
        let space = MonomialSpace::new(m)?;
        for set in all_decreasing_sets(space)? {
            check_set(&set, space, &suite.budget, lambda, true, &mut report)?;
        }
        if m <= suite.budget.max_lta_m {
            for mask in 1u32..(1 << m) {
                let f = Monomial::from_mask(mask);
                let orbit = oracle_orbit(f, space, &suite.budget)?;
                let formula = 1u64 << (f.degree() + lambda(f)?);
                report.orbits_checked += 1;
                if orbit != formula {
                    report.failures.push(OracleFailure {
                        check: "orbit".into(),
                        detail: format!("m={m} monomial {f}: orbit {orbit}, formula {formula}"),
                    });
                }
            }
        }
    }
    if suite.samples > 0 {
        let space = MonomialSpace::new(suite.sampled_m)?;
        for _ in 0..suite.samples {
            let set = sample_decreasing_set(space, &mut rng);
            check_set(&set, space, &suite.budget, lambda, false, &mut report)?;
        }
    }
    Ok(report)
}

/// The oracle suite with the library's `|λ|`.
pub fn run_oracle_checks(suite: &OracleSuite) -> Result<OracleReport> {
    run_oracle_checks_with(suite, &lambda_size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monomial::reed_muller_set;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mono(vars: &[u32]) -> Monomial {
        Monomial::from_vars(vars).unwrap()
    }

    #[test]
    fn rm13_enumerator() {
        let s3 = MonomialSpace::new(3).unwrap();
        let dist =
            enumerate_weights(&reed_muller_set(s3, 1), s3, &EnumerationBudget::default()).unwrap();
        assert_eq!(dist, BTreeMap::from([(0, 1), (4, 14), (8, 1)]));
        let rep = IndexSet::new(8, [7]).unwrap();
        let dist = enumerate_weights(&rep, s3, &EnumerationBudget::default()).unwrap();
        assert_eq!(dist, BTreeMap::from([(0, 1), (8, 1)]));
    }

    #[test]
    fn dual_route_agrees_with_direct() {
        let s4 = MonomialSpace::new(4).unwrap();
        let small = EnumerationBudget {
            max_k: 6,
            max_lta_m: 4,
        };
        for set in all_decreasing_sets(s4)
            .unwrap()
            .into_iter()
            .filter(|s| s.len() >= 10)
        {
            let direct = enumerate_weights(&set, s4, &EnumerationBudget::default()).unwrap();
            let dual = enumerate_weights(&set, s4, &small).unwrap();
            assert_eq!(direct, dual);
            assert_eq!(direct.values().sum::<u64>(), 1 << set.len());
        }
    }

    #[test]
    fn budget_exceeded() {
        let s6 = MonomialSpace::new(6).unwrap();
        let tight = EnumerationBudget {
            max_k: 8,
            max_lta_m: 4,
        };
        assert!(matches!(
            enumerate_weights(&reed_muller_set(s6, 2), s6, &tight),
            Err(Error::Budget(_))
        ));
        assert!(oracle_orbit(mono(&[0]), MonomialSpace::new(5).unwrap(), &tight).is_err());
    }

    #[test]
    fn bitwise_examples() {
        let s3 = MonomialSpace::new(3).unwrap();
        let rm = reed_muller_set(s3, 1);
        let b = EnumerationBudget::default();
        assert_eq!(oracle_bitwise_wmin(&rm, s3, 7, &b).unwrap(), 8);
        let x2 = s3.index_of(mono(&[2])).unwrap();
        assert_eq!(oracle_bitwise_wmin(&rm, s3, x2, &b).unwrap(), 4);
        assert!(oracle_bitwise_wmin(&rm, s3, 0, &b).is_err());
    }

    #[test]
    fn orbit_examples() {
        let b = EnumerationBudget::default();
        let s4 = MonomialSpace::new(4).unwrap();
        assert_eq!(oracle_orbit(mono(&[0, 1]), s4, &b).unwrap(), 4);
        assert_eq!(oracle_orbit(mono(&[1, 3]), s4, &b).unwrap(), 32);
        assert_eq!(
            oracle_orbit(mono(&[2]), MonomialSpace::new(3).unwrap(), &b).unwrap(),
            8
        );
    }

    #[test]
    fn down_set_counts() {
        let s1 = MonomialSpace::new(1).unwrap();
        let sets = all_decreasing_sets(s1).unwrap();
        assert_eq!(sets.len(), 3);
        assert!(sets.contains(&IndexSet::empty(2)));
        assert!(sets.contains(&IndexSet::new(2, [1]).unwrap()));
        assert!(sets.contains(&IndexSet::full(2)));
        for m in 2..=3 {
            let space = MonomialSpace::new(m).unwrap();
            let n = space.n();
            let brute = (0u32..(1 << n))
                .filter(|&bits| {
                    let set = IndexSet::new(n, (0..n).filter(|&i| bits >> i & 1 == 1)).unwrap();
                    is_decreasing(&set, space).is_decreasing()
                })
                .count();
            let sets = all_decreasing_sets(space).unwrap();
            assert_eq!(sets.len(), brute);
            assert!(sets.iter().all(|s| is_decreasing(s, space).is_decreasing()));
        }
        assert!(all_decreasing_sets(MonomialSpace::new(5).unwrap()).is_err());
    }

    #[test]
    fn samples_are_decreasing() {
        let space = MonomialSpace::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let s = sample_decreasing_set(space, &mut rng);
            assert!(!s.is_empty());
            assert!(is_decreasing(&s, space).is_decreasing());
        }
    }

    #[test]
    fn small_suite_passes_and_detects_corruption() {
        let suite = OracleSuite {
            exhaustive_m: 3,
            samples: 10,
            ..Default::default()
        };
        let report = run_oracle_checks(&suite).unwrap();
        assert!(report.passed(), "{:?}", report.failures);
        assert!(report.orbits_checked > 0 && report.sets_checked > 0);
        let corrupt =
            |f: Monomial| lambda_size(f).map(|l| if f.mask() == 0b110 { l + 1 } else { l });
        let bad = run_oracle_checks_with(&suite, &corrupt).unwrap();
        assert!(!bad.passed());
        assert!(bad
            .failures
            .iter()
            .any(|f| f.check == "orbit" && f.detail.contains("x1·x2")));
    }

    #[test]
    fn degenerate_space() {
        let suite = OracleSuite {
            exhaustive_m: 1,
            samples: 0,
            ..Default::default()
        };
        let report = run_oracle_checks(&suite).unwrap();
        assert!(report.passed());
        assert_eq!(report.sets_checked, 2);
    }
}

//! Index/monomial bijection and the decreasing-monomial partial order.
//!
//! Row `i` of `G_N = G_2^{⊗m}` is the evaluation of the monomial whose
//! variable set is the complement of the one-bits of `i`:
//!
//! ```text
//! index_of(f) = Σ_{t ∉ vars(f)} 2^t
//! ev(f)[j]    = Π_{t ∈ vars(f)} (1 ⊕ j_t)
//! ```
//!
//! With this convention `ev(monomial_of(i))` is literally row `i` of the
//! generator matrix and the row weight is `2^{popcount(i)} = 2^{m - deg}`.
//!
//! Monomials are `m`-bit masks; all set machinery works on plain indices.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Largest supported number of variables.
pub const MAX_VARS: u32 = 30;

/// The space of monomials in `m` variables, blocklength `N = 2^m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MonomialSpace {
    m: u32,
}

/// A squarefree monomial, stored as a bitmask of its variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    mask: u32,
}

impl Monomial {
    pub const CONSTANT: Monomial = Monomial { mask: 0 };

    pub fn from_mask(mask: u32) -> Self {
        Monomial { mask }
    }

    /// Builds `x_{v_1} ··· x_{v_s}`; repeated variables collapse (`x^2 = x`).
    pub fn from_vars(vars: &[u32]) -> Result<Self> {
        let mut mask = 0u32;
        for &v in vars {
            if v >= MAX_VARS {
                return Err(Error::Domain(format!(
                    "variable index {v} exceeds {MAX_VARS}"
                )));
            }
            mask |= 1 << v;
        }
        Ok(Monomial { mask })
    }

    pub fn mask(self) -> u32 {
        self.mask
    }

    pub fn degree(self) -> u32 {
        self.mask.count_ones()
    }

    pub fn contains(self, var: u32) -> bool {
        var < 32 && self.mask & (1 << var) != 0
    }

    /// Variable indices in ascending order.
    pub fn vars(self) -> impl Iterator<Item = u32> {
        let mask = self.mask;
        (0..32u32).filter(move |t| mask & (1 << t) != 0)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mask == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for v in self.vars() {
            if !first {
                write!(f, "·")?;
            }
            write!(f, "x{v}")?;
            first = false;
        }
        Ok(())
    }
}

impl MonomialSpace {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 || m > MAX_VARS {
            return Err(Error::Domain(format!(
                "m must lie in 1..={MAX_VARS}, got {m}"
            )));
        }
        Ok(MonomialSpace { m })
    }

    /// Space for blocklength `n`, which must be a power of two `≥ 2`.
    pub fn for_length(n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Domain(format!(
                "blocklength {n} is not a power of two ≥ 2"
            )));
        }
        Self::new(n.trailing_zeros())
    }

    pub fn m(self) -> u32 {
        self.m
    }

    pub fn n(self) -> usize {
        1usize << self.m
    }

    fn full_mask(self) -> u32 {
        if self.m == 32 {
            u32::MAX
        } else {
            (1u32 << self.m) - 1
        }
    }

    pub fn index_of(self, f: Monomial) -> Result<usize> {
        if f.mask & !self.full_mask() != 0 {
            return Err(Error::Domain(format!(
                "monomial {f} uses a variable ≥ m = {}",
                self.m
            )));
        }
        Ok((!f.mask & self.full_mask()) as usize)
    }

    pub fn monomial_of(self, i: usize) -> Result<Monomial> {
        self.check_index(i)?;
        Ok(self.monomial_unchecked(i))
    }

    pub(crate) fn monomial_unchecked(self, i: usize) -> Monomial {
        Monomial {
            mask: !(i as u32) & self.full_mask(),
        }
    }

    pub fn check_index(self, i: usize) -> Result<()> {
        if i >= self.n() {
            return Err(Error::Domain(format!(
                "index {i} out of range for N = {}",
                self.n()
            )));
        }
        Ok(())
    }

    /// Degree of the monomial at index `i`, i.e. `m − popcount(i)`.
    pub fn degree_of(self, i: usize) -> u32 {
        self.m - (i as u32).count_ones()
    }

    /// Hamming weight of row `i` of `G_N`.
    pub fn row_weight(self, i: usize) -> usize {
        1usize << (i as u32).count_ones()
    }

    /// Evaluation vector of `f` over all points, in generator-row order.
    pub fn evaluate(self, f: Monomial) -> Result<Vec<u8>> {
        self.index_of(f)?;
        Ok((0..self.n())
            .map(|j| u8::from(f.mask & j as u32 == 0))
            .collect())
    }

    /// Indices covered by `i` from below: drop one variable, or move one
    /// variable down by one to a free slot.
    pub fn lower_covers(self, i: usize) -> Vec<usize> {
        let f = self.monomial_unchecked(i).mask;
        let mut out = Vec::new();
        for v in 0..self.m {
            if f & (1 << v) == 0 {
                continue;
            }
            out.push(self.mask_to_index(f & !(1 << v)));
            if v > 0 && f & (1 << (v - 1)) == 0 {
                out.push(self.mask_to_index((f & !(1 << v)) | (1 << (v - 1))));
            }
        }
        out
    }

    /// Indices that cover `i` from above: add one variable, or move one
    /// variable up by one to a free slot.
    pub fn upper_covers(self, i: usize) -> Vec<usize> {
        let f = self.monomial_unchecked(i).mask;
        let mut out = Vec::new();
        for v in 0..self.m {
            if f & (1 << v) == 0 {
                out.push(self.mask_to_index(f | (1 << v)));
            } else if v + 1 < self.m && f & (1 << (v + 1)) == 0 {
                out.push(self.mask_to_index((f & !(1 << v)) | (1 << (v + 1))));
            }
        }
        out
    }

    fn mask_to_index(self, mask: u32) -> usize {
        (!mask & self.full_mask()) as usize
    }
}

/// `f ⪯ g` in the decreasing-monomial order.
///
/// Each variable of `f`, in ascending order, is matched to the smallest
/// unused variable of `g` that is at least as large.
pub fn precedes(f: Monomial, g: Monomial) -> bool {
    if f.degree() > g.degree() {
        return false;
    }
    let mut available = g.mask;
    for v in f.vars() {
        let candidates = available & !((1u32 << v) - 1);
        if candidates == 0 {
            return false;
        }
        available &= !(1 << candidates.trailing_zeros());
    }
    true
}

/// A set of indices `{0..N−1}` kept sorted, with a membership mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSet {
    n: usize,
    members: Vec<usize>,
    mask: Vec<bool>,
}

impl IndexSet {
    pub fn new(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut mask = vec![false; n];
        for i in indices {
            if i >= n {
                return Err(Error::Domain(format!("index {i} out of range for N = {n}")));
            }
            mask[i] = true;
        }
        Ok(Self::from_mask(mask))
    }

    pub fn empty(n: usize) -> Self {
        Self::from_mask(vec![false; n])
    }

    pub fn full(n: usize) -> Self {
        Self::from_mask(vec![true; n])
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        let members = mask
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect();
        IndexSet {
            n: mask.len(),
            members,
            mask,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.n && self.mask[i]
    }

    /// Members in ascending order.
    pub fn indices(&self) -> &[usize] {
        &self.members
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn insert(&mut self, i: usize) {
        if !self.mask[i] {
            self.mask[i] = true;
            let pos = self.members.partition_point(|&x| x < i);
            self.members.insert(pos, i);
        }
    }

    pub fn symmetric_difference(&self, other: &IndexSet) -> Vec<usize> {
        (0..self.n.max(other.n))
            .filter(|&i| self.contains(i) != other.contains(i))
            .collect()
    }
}

/// Result of a decreasing-set check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecreasingCheck {
    /// Pairs `(g, f)` with `f` in the set, `g` covered by `f`, and `g` absent.
    pub violations: Vec<(usize, usize)>,
    /// Every index below some member that is absent from the set.
    pub missing: BTreeSet<usize>,
}

impl DecreasingCheck {
    pub fn is_decreasing(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks closure under `⪯`. Closure under covering relations is
/// equivalent to closure under the full order.
pub fn is_decreasing(set: &IndexSet, space: MonomialSpace) -> DecreasingCheck {
    let violations: Vec<(usize, usize)> = set
        .indices()
        .iter()
        .flat_map(|&f| {
            space
                .lower_covers(f)
                .into_iter()
                .filter(|&g| !set.contains(g))
                .map(move |g| (g, f))
        })
        .collect();
    let missing = if violations.is_empty() {
        BTreeSet::new()
    } else {
        decreasing_closure(set, space)
            .indices()
            .iter()
            .copied()
            .filter(|&i| !set.contains(i))
            .collect()
    };
    DecreasingCheck {
        violations,
        missing,
    }
}

/// Smallest decreasing superset of `set`.
pub fn decreasing_closure(set: &IndexSet, space: MonomialSpace) -> IndexSet {
    let mut mask = vec![false; space.n()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &i in set.indices() {
        if !mask[i] {
            mask[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        for g in space.lower_covers(i) {
            if !mask[g] {
                mask[g] = true;
                queue.push_back(g);
            }
        }
    }
    IndexSet::from_mask(mask)
}

/// Indices outside the decreasing set `set` with degree at most
/// `cap_degree` whose strict down-set already lies in `set`.
pub fn admissible_frontier(set: &IndexSet, space: MonomialSpace, cap_degree: u32) -> Vec<usize> {
    (0..space.n())
        .filter(|&i| !set.contains(i) && space.degree_of(i) <= cap_degree)
        .filter(|&i| space.lower_covers(i).iter().all(|&g| set.contains(g)))
        .collect()
}

/// All indices of degree at most `r`: the Reed–Muller set `RM(r, m)`.
pub fn reed_muller_set(space: MonomialSpace, r: u32) -> IndexSet {
    IndexSet::from_mask((0..space.n()).map(|i| space.degree_of(i) <= r).collect())
}

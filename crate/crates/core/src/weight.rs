//! Minimum distance, minimum-weight multiplicity and the bounds built on
//! them, for decreasing monomial codes.
//!
//! For a decreasing set with maximum degree `r` the minimum distance is
//! `2^{m−r}` and the minimum-weight codewords are exactly the orbits of the
//! degree-`r` monomials under the lower-triangular affine group, each of
//! size `2^{r+|λ_f|}`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::monomial::{is_decreasing, IndexSet, Monomial, MonomialSpace};
use crate::reliability::{channel_bhattacharyya, ChannelModel, ReliabilityProfile};

/// `|λ_f| = Σ_{v ∈ vars(f)} #{j < v : j ∉ vars(f)}`.
pub fn lambda_size(f: Monomial) -> Result<u32> {
    if f.degree() == 0 {
        return Err(Error::Domain(
            "the constant monomial has no orbit parameterization".into(),
        ));
    }
    Ok(f.vars()
        .map(|v| v - (f.mask() & ((1u32 << v) - 1)).count_ones())
        .sum())
}

/// `C_K(f) = 2^{r+|λ_f|}` when `deg f = r`, otherwise 0.
pub fn min_weight_contribution(f: Monomial, r: u32) -> BigUint {
    match contribution_exponent(f, r) {
        Some(e) => BigUint::from(1u8) << e,
        None => BigUint::zero(),
    }
}

/// Exponent `r + |λ_f|` of a nonzero contribution.
pub fn contribution_exponent(f: Monomial, r: u32) -> Option<u32> {
    if f.degree() != r || r == 0 {
        return None;
    }
    lambda_size(f).ok().map(|l| r + l)
}

/// Degree of the highest-degree member of a nonempty set.
pub fn max_degree(set: &IndexSet, space: MonomialSpace) -> Result<u32> {
    set.indices()
        .iter()
        .map(|&i| space.degree_of(i))
        .max()
        .ok_or_else(|| Error::Domain("empty information set".into()))
}

fn require_decreasing(set: &IndexSet, space: MonomialSpace) -> Result<()> {
    if set.n() != space.n() {
        return Err(Error::Length {
            expected: space.n(),
            got: set.n(),
        });
    }
    let check = is_decreasing(set, space);
    if check.is_decreasing() {
        Ok(())
    } else {
        Err(Error::NotDecreasing {
            violations: check.violations.len(),
            first: check.violations.first().copied(),
        })
    }
}

/// `w_min = 2^{m−r}` of a nonempty decreasing set.
pub fn wmin_of(set: &IndexSet, space: MonomialSpace) -> Result<usize> {
    require_decreasing(set, space)?;
    Ok(1usize << (space.m() - max_degree(set, space)?))
}

/// Minimum-weight multiplicity together with its per-index split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multiplicity {
    pub r: u32,
    pub total: BigUint,
    /// `C_K(i)` for every member of degree `r`.
    pub per_index: BTreeMap<usize, BigUint>,
}

/// `A_wmin = Σ_{deg f = r} 2^{r+|λ_f|}` of a decreasing set.
pub fn awmin_of(set: &IndexSet, space: MonomialSpace) -> Result<Multiplicity> {
    require_decreasing(set, space)?;
    orbit_multiplicity(set, space)
}

/// The orbit-sum formula evaluated without checking that `set` is
/// decreasing. For other sets the value is a formula output only, not a
/// codeword count.
pub fn orbit_multiplicity(set: &IndexSet, space: MonomialSpace) -> Result<Multiplicity> {
    let r = max_degree(set, space)?;
    let mut per_index = BTreeMap::new();
    let mut total = BigUint::zero();
    if r == 0 {
        // The repetition code: one codeword of weight N.
        total = BigUint::from(1u8);
        return Ok(Multiplicity {
            r,
            total,
            per_index,
        });
    }
    for &i in set.indices() {
        let c = min_weight_contribution(space.monomial_of(i)?, r);
        if !c.is_zero() {
            total += &c;
            per_index.insert(i, c);
        }
    }
    Ok(Multiplicity {
        r,
        total,
        per_index,
    })
}

/// Minimum weight of a codeword whose message bit `i` is one:
/// `2^{m−deg f_i}`.
pub fn bitwise_wmin(i: usize, set: &IndexSet, space: MonomialSpace) -> Result<usize> {
    if !set.contains(i) {
        return Err(Error::Domain(format!(
            "index {i} is not in the information set"
        )));
    }
    require_decreasing(set, space)?;
    Ok(space.row_weight(i))
}

/// `A·Z^w` evaluated in the log domain.
pub fn union_term(a: &BigUint, w: usize, z: f64) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    let ln_a = a.to_f64().map(f64::ln).unwrap_or(f64::INFINITY);
    (ln_a + w as f64 * z.ln()).exp()
}

/// `UB_wmin = A_wmin · Z(W)^{w_min}`.
pub fn ub_min_weight(set: &IndexSet, space: MonomialSpace, model: &ChannelModel) -> Result<f64> {
    let wmin = wmin_of(set, space)?;
    let a = awmin_of(set, space)?;
    Ok(union_term(&a.total, wmin, channel_bhattacharyya(model)))
}

/// `Σ_{i∈I} Z_i` (or `P_i^SC`) over the information set.
pub fn sc_sum_bound(set: &IndexSet, profile: &ReliabilityProfile) -> Result<f64> {
    if set.n() != profile.len() {
        return Err(Error::Length {
            expected: profile.len(),
            got: set.n(),
        });
    }
    Ok(set.indices().iter().map(|&i| profile.values()[i]).sum())
}

/// For each degree `d ≤ r` present in the set, `Z^{2^{m−d}} / Z^{2^{m−r}}`.
pub fn ml_negligibility_ratio(
    set: &IndexSet,
    space: MonomialSpace,
    model: &ChannelModel,
) -> Result<BTreeMap<u32, f64>> {
    require_decreasing(set, space)?;
    let r = max_degree(set, space)?;
    let ln_z = channel_bhattacharyya(model).ln();
    let wmin = (1u64 << (space.m() - r)) as f64;
    let mut out = BTreeMap::new();
    for &i in set.indices() {
        let d = space.degree_of(i);
        out.entry(d).or_insert_with(|| {
            let w = (1u64 << (space.m() - d)) as f64;
            if w == wmin {
                1.0
            } else {
                ((w - wmin) * ln_z).exp()
            }
        });
    }
    Ok(out)
}

/// The four headline figures of an information set.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightReport {
    pub r: u32,
    pub wmin: usize,
    pub awmin: BigUint,
    pub per_index_contrib: BTreeMap<usize, BigUint>,
    pub ub_wmin: f64,
    pub sc_sum: f64,
    /// Whether the set is decreasing. When false, `wmin` and `awmin` are
    /// formula values and not proven distance properties.
    pub decreasing: bool,
}

impl WeightReport {
    /// Report for a decreasing set; other sets are refused.
    pub fn new(set: &IndexSet, space: MonomialSpace, profile: &ReliabilityProfile) -> Result<Self> {
        require_decreasing(set, space)?;
        Self::formula(set, space, profile)
    }

    /// Report by formula, for any nonempty set.
    pub fn formula(
        set: &IndexSet,
        space: MonomialSpace,
        profile: &ReliabilityProfile,
    ) -> Result<Self> {
        let mult = orbit_multiplicity(set, space)?;
        let wmin = 1usize << (space.m() - mult.r);
        let z = channel_bhattacharyya(profile.channel());
        Ok(WeightReport {
            r: mult.r,
            wmin,
            ub_wmin: union_term(&mult.total, wmin, z),
            awmin: mult.total,
            per_index_contrib: mult.per_index,
            sc_sum: sc_sum_bound(set, profile)?,
            decreasing: is_decreasing(set, space).is_decreasing(),
        })
    }
}

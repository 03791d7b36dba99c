//! Information-set construction: reliability designs, the mixed
//! reliability/weight design, Reed–Muller targets and design-SNR sweeps.
//!
//! The mixed design minimizes `F_K(I) = Σ_{i∈I} J_K(i)` with
//!
//! ```text
//! J_K(i) = Z_i + α·D_K(i),   D_K(i) = C_K(i)·Z(W)^{2^{m−r}}
//! ```
//!
//! where `C_K(i)` is the minimum-weight orbit size of `f_i` when it has the
//! top degree `r`, and zero otherwise. The arg-min is approximated by greedy
//! growth along the admissible frontier, so every mixed set is decreasing.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monomial::{is_decreasing, IndexSet, MonomialSpace};
use crate::reliability::{
    bec_bhattacharyya, channel_bhattacharyya, ga_awgn, profile_for, ChannelModel, GaVariant,
    ReliabilityProfile, TieBreak,
};
use crate::weight::{contribution_exponent, max_degree, orbit_multiplicity, union_term};

pub const DEFAULT_ALPHA: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Reliability,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DegreeCap {
    /// Try `r_rel` and `r_rel − 1` and keep the smaller `F_K`.
    #[default]
    Auto,
    Explicit(u32),
}

/// Everything needed to reproduce a design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub m: u32,
    pub k: usize,
    pub channel: ChannelModel,
    pub alpha: f64,
    pub degree_cap: DegreeCap,
    pub strategy: Strategy,
    #[serde(default)]
    pub ga_variant: GaVariant,
    #[serde(default)]
    pub tie_break: TieBreak,
}

impl DesignSpec {
    pub fn new(m: u32, k: usize, channel: ChannelModel, strategy: Strategy) -> Result<Self> {
        let spec = DesignSpec {
            m,
            k,
            channel,
            alpha: DEFAULT_ALPHA,
            degree_cap: DegreeCap::Auto,
            strategy,
            ga_variant: GaVariant::default(),
            tie_break: TieBreak::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// BPSK-AWGN design at `ebn0_db` with rate `K/N`.
    pub fn awgn(m: u32, k: usize, ebn0_db: f64, strategy: Strategy) -> Result<Self> {
        let n = MonomialSpace::new(m)?.n();
        Self::new(
            m,
            k,
            ChannelModel::bi_awgn(ebn0_db, k as f64 / n as f64)?,
            strategy,
        )
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_degree_cap(mut self, cap: DegreeCap) -> Self {
        self.degree_cap = cap;
        self
    }

    pub fn with_ga_variant(mut self, variant: GaVariant) -> Self {
        self.ga_variant = variant;
        self
    }

    pub fn with_tie_break(mut self, tie: TieBreak) -> Self {
        self.tie_break = tie;
        self
    }

    pub fn space(&self) -> Result<MonomialSpace> {
        MonomialSpace::new(self.m)
    }

    pub fn validate(&self) -> Result<()> {
        let space = self.space()?;
        self.channel.validate()?;
        if self.k == 0 || self.k > space.n() {
            return Err(Error::Domain(format!(
                "K = {} not in 1..={}",
                self.k,
                space.n()
            )));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::Domain(format!(
                "alpha = {} must be finite and nonnegative",
                self.alpha
            )));
        }
        if let DegreeCap::Explicit(r) = self.degree_cap {
            if r > self.m || rm_dimension(self.m, r) < self.k as u128 {
                return Err(Error::Infeasible(format!(
                    "no decreasing set of size {} has maximum degree ≤ {r} at m = {}",
                    self.k, self.m
                )));
            }
        }
        Ok(())
    }

    /// Reliability profile of the design channel.
    pub fn profile(&self) -> Result<ReliabilityProfile> {
        profile_for(self.m, &self.channel, self.ga_variant)
    }
}

/// Per-index cost terms. `j_k = z + alpha·d_k` holds exactly on the stored
/// values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexCost {
    pub index: usize,
    pub z: f64,
    pub c_k: f64,
    pub d_k: f64,
    pub j_k: f64,
}

/// A constructed information set with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct InformationSet {
    pub spec: DesignSpec,
    pub set: IndexSet,
    /// Degree `r` the costs were evaluated with.
    pub r: u32,
    pub costs: Vec<IndexCost>,
    /// `F_K = Σ J_K(i)`.
    pub f_k: f64,
    pub decreasing: bool,
}

impl InformationSet {
    pub fn indices(&self) -> &[usize] {
        self.set.indices()
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn space(&self) -> MonomialSpace {
        MonomialSpace::new(self.spec.m).expect("validated spec")
    }

    /// `Σ_{i∈I} Z_i` (or `P_i^SC`).
    pub fn sc_sum(&self) -> f64 {
        self.costs.iter().map(|c| c.z).sum()
    }

    /// Rebuilds a stored design: costs are recomputed on the design channel
    /// with `r` equal to the largest degree in `set`.
    pub fn restore(spec: &DesignSpec, set: IndexSet) -> Result<Self> {
        spec.validate()?;
        let space = spec.space()?;
        if set.n() != space.n() {
            return Err(Error::Length {
                expected: space.n(),
                got: set.n(),
            });
        }
        if set.len() != spec.k {
            return Err(Error::Length {
                expected: spec.k,
                got: set.len(),
            });
        }
        let profile = spec.profile()?;
        let r = max_degree(&set, space)?;
        Self::from_set(spec, set, &profile, r)
    }

    fn from_set(
        spec: &DesignSpec,
        set: IndexSet,
        profile: &ReliabilityProfile,
        r: u32,
    ) -> Result<Self> {
        let space = spec.space()?;
        let zw = channel_bhattacharyya(&spec.channel);
        let costs: Vec<IndexCost> = set
            .indices()
            .iter()
            .map(|&i| index_cost(i, profile, space, r, spec.alpha, zw))
            .collect();
        let f_k = costs.iter().map(|c| c.j_k).sum();
        let decreasing = is_decreasing(&set, space).is_decreasing();
        Ok(InformationSet {
            spec: spec.clone(),
            set,
            r,
            costs,
            f_k,
            decreasing,
        })
    }
}

fn index_cost(
    i: usize,
    profile: &ReliabilityProfile,
    space: MonomialSpace,
    r: u32,
    alpha: f64,
    zw: f64,
) -> IndexCost {
    let f = space.monomial_of(i).expect("index in range");
    let c_k = contribution_exponent(f, r).map_or(0.0, |e| 2f64.powi(e as i32));
    let d_k = c_k * zw.powf((1u64 << (space.m() - r)) as f64);
    let z = profile.values()[i];
    IndexCost {
        index: i,
        z,
        c_k,
        d_k,
        j_k: z + alpha * d_k,
    }
}

/// `J_K(i) = Z_i + α·C_K(i)·Z(W)^{2^{m−r}}`.
pub fn mixed_cost(i: usize, profile: &ReliabilityProfile, r: u32, alpha: f64) -> Result<f64> {
    let space = MonomialSpace::for_length(profile.len())?;
    space.check_index(i)?;
    if r > space.m() {
        return Err(Error::Domain(format!(
            "degree {r} exceeds m = {}",
            space.m()
        )));
    }
    let zw = channel_bhattacharyya(profile.channel());
    Ok(index_cost(i, profile, space, r, alpha, zw).j_k)
}

/// `dim RM(r, m) = Σ_{t≤r} C(m, t)`.
pub fn rm_dimension(m: u32, r: u32) -> u128 {
    let mut sum = 0u128;
    let mut binom = 1u128;
    for t in 0..=r.min(m) {
        sum += binom;
        binom = binom * u128::from(m - t) / u128::from(t + 1);
    }
    sum
}

/// Smallest `r*` with `Σ_{t≤r*} C(m,t) ≥ K`.
pub fn rm_rstar(m: u32, k: usize) -> Result<u32> {
    let space = MonomialSpace::new(m)?;
    if k == 0 || k > space.n() {
        return Err(Error::Domain(format!("K = {k} not in 1..={}", space.n())));
    }
    Ok((0..=m)
        .find(|&r| rm_dimension(m, r) >= k as u128)
        .expect("r = m always suffices"))
}

/// The `K` most reliable indices of the design channel.
pub fn construct_reliability(spec: &DesignSpec) -> Result<InformationSet> {
    spec.validate()?;
    let profile = spec.profile()?;
    reliability_from_profile(spec, &profile)
}

fn reliability_from_profile(
    spec: &DesignSpec,
    profile: &ReliabilityProfile,
) -> Result<InformationSet> {
    let space = spec.space()?;
    let set = profile.top_k(spec.k, spec.tie_break)?;
    let r = max_degree(&set, space)?;
    InformationSet::from_set(spec, set, profile, r)
}

#[derive(Debug, PartialEq)]
struct Candidate {
    j: f64,
    index: usize,
    larger_first: bool,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    // The heap pops the greatest element, so "greater" means preferred.
    fn cmp(&self, other: &Self) -> Ordering {
        other.j.total_cmp(&self.j).then_with(|| {
            if self.larger_first {
                self.index.cmp(&other.index)
            } else {
                other.index.cmp(&self.index)
            }
        })
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Greedy frontier growth for a fixed top degree `r`.
fn greedy_mixed(spec: &DesignSpec, profile: &ReliabilityProfile, r: u32) -> Result<InformationSet> {
    let space = spec.space()?;
    let n = space.n();
    let zw = channel_bhattacharyya(&spec.channel);
    let larger_first = spec.tie_break == TieBreak::LargerIndex;
    let mut missing: Vec<u32> = (0..n).map(|i| space.lower_covers(i).len() as u32).collect();
    let mut heap = BinaryHeap::new();
    let push = |heap: &mut BinaryHeap<Candidate>, i: usize| {
        let j = index_cost(i, profile, space, r, spec.alpha, zw).j_k;
        heap.push(Candidate {
            j,
            index: i,
            larger_first,
        });
    };
    push(&mut heap, n - 1);
    let mut mask = vec![false; n];
    for step in 0..spec.k {
        let Some(Candidate { index, .. }) = heap.pop() else {
            return Err(Error::Invariant(format!(
                "admissible frontier empty after {step} of {} steps at degree cap {r}",
                spec.k
            )));
        };
        mask[index] = true;
        for u in space.upper_covers(index) {
            missing[u] -= 1;
            if missing[u] == 0 && space.degree_of(u) <= r {
                push(&mut heap, u);
            }
        }
    }
    InformationSet::from_set(spec, IndexSet::from_mask(mask), profile, r)
}

/// Mixed design: greedy minimization of `F_K` under a degree cap.
pub fn construct_mixed(spec: &DesignSpec) -> Result<InformationSet> {
    spec.validate()?;
    let profile = spec.profile()?;
    construct_mixed_with_profile(spec, &profile)
}

/// As [`construct_mixed`] with a precomputed profile of the design channel.
pub fn construct_mixed_with_profile(
    spec: &DesignSpec,
    profile: &ReliabilityProfile,
) -> Result<InformationSet> {
    spec.validate()?;
    if profile.len() != spec.space()?.n() {
        return Err(Error::Length {
            expected: spec.space()?.n(),
            got: profile.len(),
        });
    }
    let candidates: Vec<u32> = match spec.degree_cap {
        DegreeCap::Explicit(r) => vec![r],
        DegreeCap::Auto => {
            let r_rel = reliability_from_profile(spec, profile)?.r;
            let mut c = vec![r_rel];
            if r_rel > 0 && rm_dimension(spec.m, r_rel - 1) >= spec.k as u128 {
                c.push(r_rel - 1);
            }
            c
        }
    };
    let mut best: Option<InformationSet> = None;
    for r in candidates {
        let design = greedy_mixed(spec, profile, r)?;
        if best.as_ref().is_none_or(|b| design.f_k < b.f_k) {
            best = Some(design);
        }
    }
    let design = best.expect("at least one candidate cap");
    if !design.decreasing || design.len() != spec.k {
        return Err(Error::Invariant(
            "mixed design is not a decreasing set of size K".into(),
        ));
    }
    Ok(design)
}

/// Reliability or mixed, as the spec says.
pub fn construct(spec: &DesignSpec) -> Result<InformationSet> {
    match spec.strategy {
        Strategy::Reliability => construct_reliability(spec),
        Strategy::Mixed => construct_mixed(spec),
    }
}

/// Channel family swept by [`staircase_sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepFamily {
    /// `ε = e^{−ρ}`.
    Bec,
    /// `ρ` is Eb/N0 in dB; the rate is `K/N`.
    BiAwgn { variant: GaVariant },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StaircasePoint {
    pub rho: f64,
    pub set: IndexSet,
    /// Smallest selected row weight.
    pub wmin: usize,
    /// Row weight `d` → number of selected rows with that weight.
    pub histogram: BTreeMap<usize, usize>,
    pub jump: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Staircase {
    pub points: Vec<StaircasePoint>,
    pub r_star: u32,
    pub plateau_wmin: usize,
}

impl Staircase {
    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| w[1].wmin >= w[0].wmin)
    }

    pub fn final_wmin(&self) -> usize {
        self.points.last().map_or(0, |p| p.wmin)
    }
}

/// Reliability designs over an ascending grid of design parameters.
pub fn staircase_sweep(m: u32, k: usize, family: SweepFamily, grid: &[f64]) -> Result<Staircase> {
    let space = MonomialSpace::new(m)?;
    let r_star = rm_rstar(m, k)?;
    if grid.is_empty() {
        return Err(Error::Domain("empty design-parameter grid".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) || grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain(
            "grid must be finite and strictly ascending".into(),
        ));
    }
    let rate = k as f64 / space.n() as f64;
    let sets: Vec<IndexSet> = grid
        .par_iter()
        .map(|&rho| {
            let profile = match family {
                SweepFamily::Bec => bec_bhattacharyya(m, (-rho).exp())?,
                SweepFamily::BiAwgn { variant } => ga_awgn(m, rho, rate, variant)?,
            };
            profile.top_k(k, TieBreak::LargerIndex)
        })
        .collect::<Result<_>>()?;
    let mut points: Vec<StaircasePoint> = Vec::with_capacity(grid.len());
    for (&rho, set) in grid.iter().zip(sets) {
        let mut histogram = BTreeMap::new();
        for &i in set.indices() {
            *histogram.entry(space.row_weight(i)).or_insert(0) += 1;
        }
        let wmin = *histogram.keys().next().expect("K ≥ 1");
        let jump = points.last().is_some_and(|p| p.wmin != wmin);
        points.push(StaircasePoint {
            rho,
            set,
            wmin,
            histogram,
            jump,
        });
    }
    Ok(Staircase {
        points,
        r_star,
        plateau_wmin: 1 << (m - r_star),
    })
}

/// Differences between two designs of the same `(N, K)`, `b − a`.
#[derive(Debug, Clone, PartialEq)]
pub struct SetComparison {
    pub symmetric_difference: Vec<usize>,
    pub sum_a: f64,
    pub sum_b: f64,
    pub delta_sum: f64,
    pub wmin_a: usize,
    pub wmin_b: usize,
    pub awmin_a: BigUint,
    pub awmin_b: BigUint,
    pub delta_awmin: BigInt,
    pub ub_a: f64,
    pub ub_b: f64,
    pub delta_ub: f64,
    /// Whether both sets are decreasing, so that the weight figures are
    /// proven rather than formula values.
    pub both_decreasing: bool,
}

/// Compares two designs, evaluating bounds on `model`.
pub fn compare_sets(
    a: &InformationSet,
    b: &InformationSet,
    model: &ChannelModel,
) -> Result<SetComparison> {
    if a.spec.m != b.spec.m || a.len() != b.len() {
        return Err(Error::Mismatch(format!(
            "(m, K) = ({}, {}) vs ({}, {})",
            a.spec.m,
            a.len(),
            b.spec.m,
            b.len()
        )));
    }
    let space = a.space();
    let ma = orbit_multiplicity(&a.set, space)?;
    let mb = orbit_multiplicity(&b.set, space)?;
    let z = channel_bhattacharyya(model);
    let wmin_a = 1usize << (space.m() - ma.r);
    let wmin_b = 1usize << (space.m() - mb.r);
    let ub_a = union_term(&ma.total, wmin_a, z);
    let ub_b = union_term(&mb.total, wmin_b, z);
    let (sum_a, sum_b) = (a.sc_sum(), b.sc_sum());
    Ok(SetComparison {
        symmetric_difference: a.set.symmetric_difference(&b.set),
        sum_a,
        sum_b,
        delta_sum: sum_b - sum_a,
        wmin_a,
        wmin_b,
        delta_awmin: BigInt::from(mb.total.clone()) - BigInt::from(ma.total.clone()),
        awmin_a: ma.total,
        awmin_b: mb.total,
        ub_a,
        ub_b,
        delta_ub: ub_b - ub_a,
        both_decreasing: a.decreasing && b.decreasing,
    })
}

//! Bit-channel reliability profiles.
//!
//! Two constructions are provided: the exact Bhattacharyya recursion on the
//! BEC and the Gaussian approximation (GA) of density evolution for
//! BPSK-AWGN. Both process the bits of an index from most to least
//! significant; a set bit selects the "plus" (better) transform.
//!
//! Rankings use a dedicated sort key (`ln Z_i` for the BEC, `−μ_i` for GA)
//! so that values which underflow to zero in the linear domain still order
//! correctly.

use libm::erfc;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monomial::{IndexSet, MonomialSpace};

/// A binary-input memoryless symmetric channel used for design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelModel {
    Bec {
        epsilon: f64,
    },
    /// BPSK over AWGN at the given Eb/N0, with the code rate entering `σ²`.
    BiAwgn {
        ebn0_db: f64,
        rate: f64,
    },
}

impl ChannelModel {
    pub fn bec(epsilon: f64) -> Result<Self> {
        let model = ChannelModel::Bec { epsilon };
        model.validate()?;
        Ok(model)
    }

    pub fn bi_awgn(ebn0_db: f64, rate: f64) -> Result<Self> {
        let model = ChannelModel::BiAwgn { ebn0_db, rate };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelModel::Bec { epsilon } => {
                if !(0.0..=1.0).contains(&epsilon) {
                    return Err(Error::Domain(format!(
                        "erasure probability {epsilon} not in [0,1]"
                    )));
                }
            }
            ChannelModel::BiAwgn { ebn0_db, rate } => {
                if !(rate > 0.0 && rate <= 1.0) {
                    return Err(Error::Domain(format!("rate {rate} not in (0,1]")));
                }
                if !ebn0_db.is_finite() {
                    return Err(Error::Domain(format!("Eb/N0 {ebn0_db} dB is not finite")));
                }
            }
        }
        Ok(())
    }

    /// `σ² = 1 / (2·R·10^{ρ/10})` for BiAWGN; `None` for the BEC.
    pub fn noise_variance(&self) -> Option<f64> {
        match *self {
            ChannelModel::Bec { .. } => None,
            ChannelModel::BiAwgn { ebn0_db, rate } => {
                Some(1.0 / (2.0 * rate * db_to_linear(ebn0_db)))
            }
        }
    }

    /// Bhattacharyya parameter `Z(W)` of the physical channel.
    pub fn bhattacharyya(&self) -> f64 {
        channel_bhattacharyya(self)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `Z(W)`: `ε` on the BEC, `exp(−R·10^{ρ/10})` on BPSK-AWGN.
pub fn channel_bhattacharyya(model: &ChannelModel) -> f64 {
    match *model {
        ChannelModel::Bec { epsilon } => epsilon,
        ChannelModel::BiAwgn { ebn0_db, rate } => (-rate * db_to_linear(ebn0_db)).exp(),
    }
}

/// Gaussian tail `Q(x) = erfc(x/√2)/2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairwiseMode {
    /// `Z(W)^w`.
    Bhattacharyya,
    /// Exact BPSK-AWGN pairwise error `Q(√(2·w·R·Eb/N0))`.
    QFunction,
}

/// Pairwise error probability against a weight-`w` competitor.
pub fn pairwise_error(w: usize, model: &ChannelModel, mode: PairwiseMode) -> Result<f64> {
    if w == 0 {
        return Err(Error::Domain("pairwise error needs weight ≥ 1".into()));
    }
    match (mode, *model) {
        (PairwiseMode::Bhattacharyya, _) => Ok(channel_bhattacharyya(model).powi(w as i32)),
        (PairwiseMode::QFunction, ChannelModel::BiAwgn { ebn0_db, rate }) => Ok(q_function(
            (2.0 * w as f64 * rate * db_to_linear(ebn0_db)).sqrt(),
        )),
        (PairwiseMode::QFunction, ChannelModel::Bec { .. }) => Err(Error::Unsupported(
            "Q-function pairwise error on the BEC".into(),
        )),
    }
}

/// Which approximation of `φ(x) = 1 − E[tanh(L/2)]` drives the GA
/// check-node update `μ⁻ = φ⁻¹(1 − (1 − φ(μ))²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GaVariant {
    /// `φ(x) = exp(−0.4527·x^0.86 + 0.0218)` on the whole axis, inverted in
    /// closed form.
    #[default]
    Exponential,
    /// As [`GaVariant::Exponential`], with check-node outputs clipped at
    /// `cap`. Mimics GA code whose `φ⁻¹` is searched on a bounded interval;
    /// the clipping breaks the degradation order at large `N`.
    Saturating { cap: f64 },
    /// Two-segment approximation: the exponential fit below `x = 10` and
    /// `√(π/x)·e^{−x/4}·(1 − 10/(7x))` above, inverted by bisection.
    TwoSegment,
}

const PHI_A: f64 = 0.4527;
const PHI_B: f64 = 0.86;
const PHI_C: f64 = 0.0218;

impl GaVariant {
    /// The capping value of the reference design-table profile.
    pub const TABLE_CAP: f64 = 100.0;

    /// `ln φ(x)`. The exponential fit exceeds 1 slightly near zero; it is
    /// used as is, and [`GaVariant::check_node`] clips the result instead.
    pub fn ln_phi(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        match self {
            GaVariant::Exponential | GaVariant::Saturating { .. } => -PHI_A * x.powf(PHI_B) + PHI_C,
            GaVariant::TwoSegment => {
                if x < 10.0 {
                    -PHI_A * x.powf(PHI_B) + PHI_C
                } else {
                    0.5 * (std::f64::consts::PI / x).ln() - x / 4.0 + (1.0 - 10.0 / (7.0 * x)).ln()
                }
            }
        }
    }

    /// Inverse of [`GaVariant::ln_phi`] (before any capping).
    pub fn phi_inv_ln(&self, ln_y: f64) -> f64 {
        match self {
            GaVariant::Exponential | GaVariant::Saturating { .. } => {
                ((PHI_C - ln_y) / PHI_A).max(0.0).powf(1.0 / PHI_B)
            }
            GaVariant::TwoSegment => {
                if ln_y >= PHI_C {
                    return 0.0;
                }
                let mut lo = 0.0f64;
                let mut hi = 1.0f64;
                while self.ln_phi(hi) > ln_y {
                    hi *= 2.0;
                    if !hi.is_finite() {
                        return f64::INFINITY;
                    }
                }
                while hi - lo > 1e-12 * hi.max(1e-300) {
                    let mid = 0.5 * (lo + hi);
                    if self.ln_phi(mid) > ln_y {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// Mean LLR after a check-node combination of two copies of `mu`.
    pub fn check_node(&self, mu: f64) -> f64 {
        let lp = self.ln_phi(mu);
        // ln(1 − (1 − φ)²) = ln φ + ln(2 − φ), stable for tiny φ.
        let ln_y = lp + (2.0 - lp.exp()).ln();
        // A check node never improves its input; the fit alone would for
        // μ below about 0.03.
        let out = self.phi_inv_ln(ln_y).min(mu);
        match self {
            GaVariant::Saturating { cap } => out.min(*cap),
            _ => out,
        }
    }
}

/// Tie-breaking between exactly equal reliabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Larger index first: larger row weight, and consistent with `⪯`.
    #[default]
    LargerIndex,
    SmallerIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Bhattacharyya,
    ScErrorProb,
    MeanLlr,
}

/// Per-index channel quality plus the channel it was computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityProfile {
    kind: MetricKind,
    values: Vec<f64>,
    mean_llr: Option<Vec<f64>>,
    sort_key: Vec<f64>,
    channel: ChannelModel,
}

impl ReliabilityProfile {
    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    /// `Z_i` (BEC) or `P_i^SC` (GA).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean_llr(&self) -> Option<&[f64]> {
        self.mean_llr.as_deref()
    }

    pub fn channel(&self) -> &ChannelModel {
        &self.channel
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Profile of mean LLRs; ordering is unchanged.
    pub fn as_mean_llr(&self) -> Option<ReliabilityProfile> {
        let mu = self.mean_llr.clone()?;
        Some(ReliabilityProfile {
            kind: MetricKind::MeanLlr,
            values: mu,
            mean_llr: self.mean_llr.clone(),
            sort_key: self.sort_key.clone(),
            channel: self.channel,
        })
    }

    /// Compares two indices; `Less` means `a` is more reliable.
    pub fn compare(&self, a: usize, b: usize, tie: TieBreak) -> std::cmp::Ordering {
        self.sort_key[a]
            .total_cmp(&self.sort_key[b])
            .then_with(|| match tie {
                TieBreak::LargerIndex => b.cmp(&a),
                TieBreak::SmallerIndex => a.cmp(&b),
            })
    }

    /// All indices, most reliable first.
    pub fn ranking(&self, tie: TieBreak) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        order.sort_by(|&a, &b| self.compare(a, b, tie));
        order
    }

    /// The `k` most reliable indices.
    pub fn top_k(&self, k: usize, tie: TieBreak) -> Result<IndexSet> {
        if k > self.len() {
            return Err(Error::Domain(format!("K = {k} exceeds N = {}", self.len())));
        }
        let order = self.ranking(tie);
        IndexSet::new(self.len(), order[..k].iter().copied())
    }
}

/// Exact Bhattacharyya parameters of the synthetic channels of a BEC.
pub fn bec_bhattacharyya(m: u32, epsilon: f64) -> Result<ReliabilityProfile> {
    let space = MonomialSpace::new(m)?;
    let channel = ChannelModel::bec(epsilon)?;
    let mut z = vec![epsilon];
    let mut ln_z = vec![epsilon.ln()];
    for _ in 0..space.m() {
        let mut next = Vec::with_capacity(2 * z.len());
        let mut next_ln = Vec::with_capacity(2 * z.len());
        for (&v, &lv) in z.iter().zip(&ln_z) {
            next.push(2.0 * v - v * v);
            next_ln.push(lv + (2.0 - v).ln());
            next.push(v * v);
            next_ln.push(2.0 * lv);
        }
        z = next;
        ln_z = next_ln;
    }
    Ok(ReliabilityProfile {
        kind: MetricKind::Bhattacharyya,
        values: z,
        mean_llr: None,
        sort_key: ln_z,
        channel,
    })
}

/// Gaussian-approximation profile for BPSK-AWGN at a design Eb/N0.
///
/// Values are `P_i^SC = Q(√(μ_i/2))`; the mean LLRs are kept alongside.
pub fn ga_awgn(m: u32, ebn0_db: f64, rate: f64, variant: GaVariant) -> Result<ReliabilityProfile> {
    let space = MonomialSpace::new(m)?;
    let channel = ChannelModel::bi_awgn(ebn0_db, rate)?;
    let mut mu = vec![4.0 * rate * db_to_linear(ebn0_db)];
    for _ in 0..space.m() {
        let mut next = Vec::with_capacity(2 * mu.len());
        for &x in &mu {
            next.push(variant.check_node(x));
            next.push(2.0 * x);
        }
        mu = next;
    }
    if let Some(index) = mu.iter().position(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::Numeric {
            index,
            detail: format!("mean LLR {} is not a finite nonnegative value", mu[index]),
        });
    }
    let values = mu.iter().map(|&x| q_function((x / 2.0).sqrt())).collect();
    let sort_key = mu.iter().map(|&x| -x).collect();
    Ok(ReliabilityProfile {
        kind: MetricKind::ScErrorProb,
        values,
        mean_llr: Some(mu),
        sort_key,
        channel,
    })
}

/// Profile for `model`: exact recursion on the BEC, GA on BPSK-AWGN.
pub fn profile_for(m: u32, model: &ChannelModel, variant: GaVariant) -> Result<ReliabilityProfile> {
    match *model {
        ChannelModel::Bec { epsilon } => bec_bhattacharyya(m, epsilon),
        ChannelModel::BiAwgn { ebn0_db, rate } => ga_awgn(m, ebn0_db, rate, variant),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs())
    }

    #[test]
    fn bec_one_step() {
        let p = bec_bhattacharyya(1, 0.5).unwrap();
        assert_eq!(p.values(), &[0.75, 0.25]);
    }

    #[test]
    fn bec_two_steps_msb_first() {
        // Index 1 = minus then plus: 0.75² ; index 2 = plus then minus.
        let p = bec_bhattacharyya(2, 0.5).unwrap();
        assert_eq!(p.values(), &[0.9375, 0.5625, 0.4375, 0.0625]);
    }

    #[test]
    fn bec_extremes() {
        for m in 1..=6 {
            assert!(bec_bhattacharyya(m, 0.0)
                .unwrap()
                .values()
                .iter()
                .all(|&z| z == 0.0));
            assert!(bec_bhattacharyya(m, 1.0)
                .unwrap()
                .values()
                .iter()
                .all(|&z| z == 1.0));
            let p = bec_bhattacharyya(m, 0.3).unwrap();
            let last = *p.values().last().unwrap();
            assert!(close(last, 0.3f64.powi(1 << m), 1e-12));
        }
        assert!(bec_bhattacharyya(3, 1.5).is_err());
    }

    #[test]
    fn bec_conserves_sum() {
        for m in 1..=12 {
            for &eps in &[0.1, 0.3, 0.5, 0.77] {
                let sum: f64 = bec_bhattacharyya(m, eps).unwrap().values().iter().sum();
                assert!(
                    close(sum, (1usize << m) as f64 * eps, 1e-9),
                    "m={m} eps={eps}"
                );
            }
        }
    }

    #[test]
    fn degradation_order() {
        for &z in &[1e-9, 0.01, 0.3, 0.9, 1.0] {
            assert!(z * z <= z && z <= 2.0 * z - z * z);
        }
        for variant in [GaVariant::Exponential, GaVariant::TwoSegment] {
            for &mu in &[1e-3, 0.5, 2.0, 9.9, 10.1, 50.0, 1e3, 1e5] {
                let minus = variant.check_node(mu);
                assert!(
                    minus <= mu && mu <= 2.0 * mu,
                    "{variant:?} mu={mu} minus={minus}"
                );
            }
        }
    }

    #[test]
    fn ga_root_mean() {
        let p = ga_awgn(7, 4.0, 0.5, GaVariant::Exponential).unwrap();
        let mu = p.mean_llr().unwrap();
        let root = 4.0 * 0.5 * 10f64.powf(0.4);
        assert!(close(root, 5.0238, 1e-4));
        // The all-plus path doubles the root mean m times.
        assert!(close(mu[127], root * 128.0, 1e-12));
        let best = p.ranking(TieBreak::LargerIndex)[0];
        assert_eq!(best, 127);
        let min_p = p.values().iter().cloned().fold(f64::INFINITY, f64::min);
        assert_eq!(p.values()[127], min_p);
    }

    #[test]
    fn phi_round_trip() {
        let mut x = 1e-3;
        while x <= 100.0 {
            let v = GaVariant::Exponential;
            assert!(
                (v.phi_inv_ln(v.ln_phi(x)) - x).abs() <= 1e-6 * x.max(1.0),
                "x={x}"
            );
            // The two-segment fit has a small jump at x = 10, so its inverse is
            // only single-valued away from the seam.
            if !(9.5..10.5).contains(&x) {
                let t = GaVariant::TwoSegment;
                assert!(
                    (t.phi_inv_ln(t.ln_phi(x)) - x).abs() <= 1e-6 * x.max(1.0),
                    "x={x}"
                );
            }
            x *= 1.07;
        }
    }

    #[test]
    fn saturating_caps_check_nodes_only() {
        let v = GaVariant::Saturating { cap: 100.0 };
        assert_eq!(v.check_node(1e4), 100.0);
        assert!(v.check_node(5.0) < 100.0);
        let p = ga_awgn(12, 5.0, 0.5, v).unwrap();
        let mu = p.mean_llr().unwrap();
        assert!(mu[(1 << 12) - 1] > 100.0);
    }

    #[test]
    fn channel_parameters() {
        assert_eq!(channel_bhattacharyya(&ChannelModel::bec(0.3).unwrap()), 0.3);
        let z4 = ChannelModel::bi_awgn(4.0, 0.5).unwrap().bhattacharyya();
        assert!(close(z4, (-1.2559f64).exp(), 1e-4));
        assert!(close(z4, 0.2848, 1e-3));
        let z5 = ChannelModel::bi_awgn(5.0, 0.5).unwrap().bhattacharyya();
        assert!(close(z5, 0.2058, 1e-3));
        assert!(close(18528.0 * z5.powi(16), 1.9e-7, 0.05));
        assert!(ChannelModel::bi_awgn(4.0, 0.0).is_err());
    }

    #[test]
    fn pairwise_examples() {
        let bec = ChannelModel::bec(0.2).unwrap();
        assert!(pairwise_error(0, &bec, PairwiseMode::Bhattacharyya).is_err());
        assert_eq!(
            pairwise_error(1, &bec, PairwiseMode::Bhattacharyya).unwrap(),
            0.2
        );
        assert!(pairwise_error(3, &bec, PairwiseMode::QFunction).is_err());
        let awgn = ChannelModel::bi_awgn(4.0, 0.5).unwrap();
        let p8 = pairwise_error(8, &awgn, PairwiseMode::Bhattacharyya).unwrap();
        assert!(close(p8, 4.3e-5, 0.02));
        for mode in [PairwiseMode::Bhattacharyya, PairwiseMode::QFunction] {
            for w in 1..40 {
                let a = pairwise_error(w, &awgn, mode).unwrap();
                let b = pairwise_error(w + 1, &awgn, mode).unwrap();
                assert!(b <= a);
            }
        }
    }

    #[test]
    fn q_function_values() {
        assert!(close(q_function(0.0), 0.5, 1e-15));
        assert!(close(q_function(1.0), 0.158_655_253_931_457_05, 1e-12));
        assert!(close(q_function(5.0), 2.866_515_718_791_939e-7, 1e-9));
    }

    #[test]
    fn exact_bec_ties_follow_tie_break() {
        let p = bec_bhattacharyya(2, 0.0).unwrap();
        assert_eq!(p.ranking(TieBreak::LargerIndex), vec![3, 2, 1, 0]);
        assert_eq!(p.ranking(TieBreak::SmallerIndex), vec![0, 1, 2, 3]);
        let top = bec_bhattacharyya(2, 0.5)
            .unwrap()
            .top_k(1, TieBreak::LargerIndex)
            .unwrap();
        assert_eq!(top.indices(), &[3]);
    }
}

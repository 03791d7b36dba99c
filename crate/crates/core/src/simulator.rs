//! Seeded BPSK-AWGN Monte-Carlo block-error simulation.
//!
//! Every block draws its message and noise from its own ChaCha stream,
//! selected by the SNR-point index and the block index under the master
//! seed. Blocks are decoded in parallel chunks and then scanned in block
//! order, and the scan stops at exactly the block that reaches the error
//! target. Results therefore do not depend on the worker count.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{Arithmetic, CodeConfig, DecoderOutcome, EventClass, ScDecoder, SclDecoder};
use crate::error::{Error, Result};
use crate::reliability::db_to_linear;

/// LLR magnitude used by the noiseless mode.
pub const NOISELESS_LLR: f64 = 300.0;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

const CHUNK: u64 = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecoderKind {
    Sc,
    Scl { list: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub ebn0_db: Vec<f64>,
    pub max_blocks: u64,
    pub target_errors: u64,
    pub seed: u64,
    /// Worker threads; 0 uses the global pool.
    pub workers: usize,
    pub arithmetic: Arithmetic,
    /// Replace the channel by `±NOISELESS_LLR`.
    pub noiseless: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            ebn0_db: Vec::new(),
            max_blocks: 10_000_000,
            target_errors: 100,
            seed: 0,
            workers: 0,
            arithmetic: Arithmetic::MinSum,
            noiseless: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ebn0_db.is_empty() {
            return Err(Error::Domain("empty Eb/N0 grid".into()));
        }
        if self.ebn0_db.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("Eb/N0 values must be finite".into()));
        }
        if self.target_errors == 0 || self.max_blocks == 0 {
            return Err(Error::Domain(
                "target errors and max blocks must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPoint {
    pub ebn0_db: f64,
    pub blocks: u64,
    pub block_errors: u64,
    pub bit_errors: u64,
    pub prune: u64,
    pub ml_like: u64,
    pub bler: f64,
    pub bler_lo: f64,
    pub bler_hi: f64,
    /// ML-like blocks whose selected codeword correlates worse with the
    /// channel output than the transmitted one.
    pub ml_like_metric_violations: u64,
    /// Index of the first wrong decision → number of blocks.
    pub first_errors: BTreeMap<usize, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub points: Vec<SimPoint>,
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    let lo = if k == 0 {
        0.0
    } else {
        (center - half).max(0.0)
    };
    let hi = if k >= n {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

/// `σ² = 1 / (2·R·10^{x/10})`.
pub fn noise_sigma(ebn0_db: f64, rate: f64) -> f64 {
    (1.0 / (2.0 * rate * db_to_linear(ebn0_db))).sqrt()
}

/// The random stream of one block.
pub fn block_rng(seed: u64, point: usize, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point as u64) << 40) | block);
    rng
}

/// BPSK `s = 1 − 2b`, `y = s + n` with `n ~ N(0, σ²)`, LLR `2y/σ²`.
pub fn awgn_transmit_with<R: Rng + ?Sized>(
    codeword: &[u8],
    sigma: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!(
            "noise deviation {sigma} must be positive"
        )));
    }
    let scale = 2.0 / (sigma * sigma);
    Ok(codeword
        .iter()
        .map(|&b| {
            let n: f64 = rng.sample(StandardNormal);
            scale * ((1.0 - 2.0 * f64::from(b & 1)) + sigma * n)
        })
        .collect())
}

/// [`awgn_transmit_with`] on a stream derived from `block_seed`.
pub fn awgn_transmit(codeword: &[u8], sigma: f64, block_seed: u64) -> Result<Vec<f64>> {
    awgn_transmit_with(codeword, sigma, &mut ChaCha8Rng::seed_from_u64(block_seed))
}

/// `Σ_j (1 − 2c_j)·L_j`.
pub fn correlation(codeword: &[u8], llr: &[f64]) -> f64 {
    codeword
        .iter()
        .zip(llr)
        .map(|(&c, &l)| if c == 0 { l } else { -l })
        .sum()
}

enum Decoder {
    Sc(ScDecoder),
    Scl(SclDecoder),
}

impl Decoder {
    fn new(config: &CodeConfig, kind: DecoderKind, arith: Arithmetic) -> Result<Self> {
        Ok(match kind {
            DecoderKind::Sc => Decoder::Sc(ScDecoder::new(config.clone(), arith)),
            DecoderKind::Scl { list } => {
                Decoder::Scl(SclDecoder::new(config.clone(), list, arith)?)
            }
        })
    }

    fn decode(&mut self, llr: &[f64], genie: &[u8]) -> Result<DecoderOutcome> {
        match self {
            Decoder::Sc(d) => d.decode(llr, Some(genie)),
            Decoder::Scl(d) => d.decode(llr, Some(genie)),
        }
    }
}

struct BlockStat {
    error: bool,
    bit_errors: u64,
    class: EventClass,
    first_error: Option<usize>,
    ml_violation: bool,
}

fn simulate_block(
    config: &CodeConfig,
    decoder: &mut Decoder,
    sim: &SimConfig,
    point: usize,
    block: u64,
    sigma: f64,
) -> Result<BlockStat> {
    let mut rng = block_rng(sim.seed, point, block);
    let message: Vec<u8> = (0..config.message_len())
        .map(|_| rng.random_range(0..2u8))
        .collect();
    let codeword = config.encode(&message)?;
    let llr = if sim.noiseless {
        codeword
            .iter()
            .map(|&b| {
                if b == 0 {
                    NOISELESS_LLR
                } else {
                    -NOISELESS_LLR
                }
            })
            .collect()
    } else {
        awgn_transmit_with(&codeword, sigma, &mut rng)?
    };
    let out = decoder.decode(&llr, &message)?;
    let bit_errors = out
        .message
        .iter()
        .zip(&message)
        .filter(|(a, b)| a != b)
        .count() as u64;
    let ml_violation = out.class == EventClass::MlLike && {
        let tol = 1e-9 * llr.iter().map(|x| x.abs()).sum::<f64>();
        correlation(&out.codeword, &llr) < correlation(&codeword, &llr) - tol
    };
    Ok(BlockStat {
        error: out.is_error(),
        bit_errors,
        class: out.class,
        first_error: out.first_error,
        ml_violation,
    })
}

fn run_point(
    config: &CodeConfig,
    kind: DecoderKind,
    sim: &SimConfig,
    point: usize,
    rate: f64,
) -> Result<SimPoint> {
    let ebn0_db = sim.ebn0_db[point];
    let sigma = noise_sigma(ebn0_db, rate);
    let mut p = SimPoint {
        ebn0_db,
        blocks: 0,
        block_errors: 0,
        bit_errors: 0,
        prune: 0,
        ml_like: 0,
        bler: 0.0,
        bler_lo: 0.0,
        bler_hi: 1.0,
        ml_like_metric_violations: 0,
        first_errors: BTreeMap::new(),
    };
    let mut start = 0u64;
    'outer: while start < sim.max_blocks {
        let end = (start + CHUNK).min(sim.max_blocks);
        let stats: Vec<BlockStat> = (start..end)
            .into_par_iter()
            .map_init(
                || Decoder::new(config, kind, sim.arithmetic),
                |decoder, block| match decoder {
                    Ok(d) => simulate_block(config, d, sim, point, block, sigma),
                    Err(e) => Err(Error::Invariant(e.to_string())),
                },
            )
            .collect::<Result<_>>()?;
        for s in stats {
            p.blocks += 1;
            p.bit_errors += s.bit_errors;
            if s.error {
                p.block_errors += 1;
                match s.class {
                    EventClass::Prune => p.prune += 1,
                    EventClass::MlLike => p.ml_like += 1,
                    _ => {}
                }
                if let Some(i) = s.first_error {
                    *p.first_errors.entry(i).or_insert(0) += 1;
                }
                p.ml_like_metric_violations += u64::from(s.ml_violation);
                if p.block_errors >= sim.target_errors {
                    break 'outer;
                }
            }
        }
        start = end;
    }
    p.bler = p.block_errors as f64 / p.blocks as f64;
    (p.bler_lo, p.bler_hi) = wilson_interval(p.block_errors, p.blocks, Z95);
    Ok(p)
}

/// Runs every SNR point of `sim` on `config` with the given decoder.
pub fn run_bler(config: &CodeConfig, kind: DecoderKind, sim: &SimConfig) -> Result<SimResult> {
    sim.validate()?;
    if let DecoderKind::Scl { list: 0 } = kind {
        return Err(Error::Mismatch("SCL list size must be at least 1".into()));
    }
    let rate = config.message_len() as f64 / config.n() as f64;
    let run = || -> Result<SimResult> {
        let points = (0..sim.ebn0_db.len())
            .map(|point| run_point(config, kind, sim, point, rate))
            .collect::<Result<_>>()?;
        Ok(SimResult { points })
    };
    if sim.workers == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(sim.workers)
            .build()
            .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?
            .install(run)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{construct_reliability, DesignSpec, Strategy};

    fn config() -> CodeConfig {
        let set =
            construct_reliability(&DesignSpec::awgn(6, 32, 3.0, Strategy::Reliability).unwrap())
                .unwrap()
                .set;
        CodeConfig::plain(set).unwrap()
    }

    #[test]
    fn wilson_properties() {
        let (lo, hi) = wilson_interval(10, 100, Z95);
        assert!(lo < 0.1 && 0.1 < hi);
        let (lo2, hi2) = wilson_interval(100, 1000, Z95);
        assert!(hi2 - lo2 < hi - lo);
        let ratio = (hi - lo) / (hi2 - lo2);
        assert!((ratio - 10f64.sqrt()).abs() < 0.3);
        assert_eq!(wilson_interval(0, 50, Z95).0, 0.0);
        assert_eq!(wilson_interval(50, 50, Z95).1, 1.0);
    }

    #[test]
    fn transmit_is_deterministic_and_centered() {
        let cw = vec![0u8; 20_000];
        let a = awgn_transmit(&cw, 0.8, 42).unwrap();
        assert_eq!(a, awgn_transmit(&cw, 0.8, 42).unwrap());
        let mean = a.iter().sum::<f64>() / a.len() as f64;
        assert!((mean - 2.0 / 0.64).abs() < 0.05);
        let tiny = awgn_transmit(&[0, 1, 1, 0], 1e-6, 3).unwrap();
        assert_eq!(
            tiny.iter().map(|&x| u8::from(x < 0.0)).collect::<Vec<_>>(),
            vec![0, 1, 1, 0]
        );
        assert!(awgn_transmit(&cw, 0.0, 1).is_err());
    }

    #[test]
    fn noiseless_mode_has_no_errors() {
        let sim = SimConfig {
            ebn0_db: vec![0.0],
            max_blocks: 100,
            noiseless: true,
            ..Default::default()
        };
        let r = run_bler(&config(), DecoderKind::Scl { list: 4 }, &sim).unwrap();
        assert_eq!(r.points[0].blocks, 100);
        assert_eq!(r.points[0].bler, 0.0);
    }

    #[test]
    fn partition_and_worker_independence() {
        let sim = SimConfig {
            ebn0_db: vec![1.0, 2.0],
            max_blocks: 3000,
            target_errors: 40,
            seed: 9,
            ..Default::default()
        };
        let one = run_bler(
            &config(),
            DecoderKind::Scl { list: 4 },
            &SimConfig {
                workers: 1,
                ..sim.clone()
            },
        )
        .unwrap();
        let three = run_bler(
            &config(),
            DecoderKind::Scl { list: 4 },
            &SimConfig { workers: 3, ..sim },
        )
        .unwrap();
        assert_eq!(one, three);
        for p in &one.points {
            assert_eq!(p.prune + p.ml_like, p.block_errors);
            assert_eq!(p.first_errors.values().sum::<u64>(), p.block_errors);
            assert!(p.bler_lo <= p.bler && p.bler <= p.bler_hi);
        }
        assert_eq!(one.points[0].block_errors, 40);
    }

    #[test]
    fn rejects_bad_configs() {
        let sim = SimConfig::default();
        assert!(run_bler(&config(), DecoderKind::Sc, &sim).is_err());
        let sim = SimConfig {
            ebn0_db: vec![1.0],
            ..Default::default()
        };
        assert!(run_bler(&config(), DecoderKind::Scl { list: 0 }, &sim).is_err());
    }
}

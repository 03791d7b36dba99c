//! Encoding and decoding: the polar transform, optional CRC or PAC
//! precoding, and SC / SCL decoders with genie-aided error classification.

mod crc;
mod kernel;
mod sc;
mod scl;
mod transform;

pub use crc::{crc_check, crc_compute, CrcSpec};
pub use kernel::Arithmetic;
pub use sc::{sc_decode, ScDecoder};
pub use scl::{scl_decode, SclDecoder};
pub use transform::{polar_transform, polar_transform_in_place};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monomial::IndexSet;

/// Impulse response of the PAC convolution used by default.
pub const PAC_DEFAULT: [u8; 7] = [1, 0, 1, 1, 0, 1, 1];

/// What happens to the message before it reaches the polar transform.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Pretransform {
    #[default]
    None,
    /// Append a CRC; its bits occupy the last information positions.
    Crc(CrcSpec),
    /// Rate-profile onto `v`, then `u_i = Σ_t p_t·v_{i−t}` over all positions.
    Pac { p: Vec<u8> },
}

impl Pretransform {
    pub fn pac_default() -> Self {
        Pretransform::Pac {
            p: PAC_DEFAULT.to_vec(),
        }
    }
}

/// An information set plus a pretransform. Frozen values are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeConfig {
    info: IndexSet,
    pretransform: Pretransform,
}

impl CodeConfig {
    pub fn new(info: IndexSet, pretransform: Pretransform) -> Result<Self> {
        let n = info.n();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::Domain(format!(
                "blocklength {n} is not a power of two ≥ 2"
            )));
        }
        if info.is_empty() {
            return Err(Error::Domain("empty information set".into()));
        }
        match &pretransform {
            Pretransform::None => {}
            Pretransform::Crc(crc) => {
                CrcSpec::new(crc.poly, crc.len)?;
                if crc.len as usize >= info.len() {
                    return Err(Error::Domain(format!(
                        "CRC length {} leaves no payload in K = {}",
                        crc.len,
                        info.len()
                    )));
                }
            }
            Pretransform::Pac { p } => {
                if p.first() != Some(&1) || p.iter().any(|&b| b > 1) || p.len() > 64 {
                    return Err(Error::Domain(
                        "PAC impulse response must be binary, start with 1, and have at most 64 taps".into(),
                    ));
                }
            }
        }
        Ok(CodeConfig { info, pretransform })
    }

    pub fn plain(info: IndexSet) -> Result<Self> {
        Self::new(info, Pretransform::None)
    }

    pub fn n(&self) -> usize {
        self.info.n()
    }

    pub fn m(&self) -> u32 {
        self.n().trailing_zeros()
    }

    /// Number of information positions.
    pub fn k(&self) -> usize {
        self.info.len()
    }

    /// Payload length: `K` minus the CRC length.
    pub fn message_len(&self) -> usize {
        match &self.pretransform {
            Pretransform::Crc(crc) => self.k() - crc.len as usize,
            _ => self.k(),
        }
    }

    pub fn info(&self) -> &IndexSet {
        &self.info
    }

    pub fn pretransform(&self) -> &Pretransform {
        &self.pretransform
    }

    pub fn is_info(&self, i: usize) -> bool {
        self.info.contains(i)
    }

    /// Taps `p_1, p_2, …` of the PAC convolution, empty otherwise.
    pub(crate) fn pac_taps(&self) -> &[u8] {
        match &self.pretransform {
            Pretransform::Pac { p } => &p[1..],
            _ => &[],
        }
    }

    /// Convolution feedback `Σ_{t≥1} p_t·v_{i−t}` at position `i`.
    pub(crate) fn pac_feedback(&self, v: &[u8], i: usize) -> u8 {
        self.pac_taps()
            .iter()
            .enumerate()
            .filter(|&(t, &p)| p == 1 && t < i)
            .fold(0, |acc, (t, _)| acc ^ v[i - 1 - t])
    }

    /// The `K` bits placed on the information positions.
    pub fn data_bits(&self, message: &[u8]) -> Result<Vec<u8>> {
        if message.len() != self.message_len() {
            return Err(Error::Length {
                expected: self.message_len(),
                got: message.len(),
            });
        }
        let mut data = message.iter().map(|b| b & 1).collect::<Vec<u8>>();
        if let Pretransform::Crc(crc) = &self.pretransform {
            data.extend(crc.compute(&data));
        }
        Ok(data)
    }

    /// Rate-profiled vector `v`: data on information positions, zeros elsewhere.
    pub fn message_to_v(&self, message: &[u8]) -> Result<Vec<u8>> {
        let data = self.data_bits(message)?;
        let mut v = vec![0u8; self.n()];
        for (&i, &b) in self.info.indices().iter().zip(&data) {
            v[i] = b;
        }
        Ok(v)
    }

    /// Transform input `u`.
    pub fn message_to_u(&self, message: &[u8]) -> Result<Vec<u8>> {
        let v = self.message_to_v(message)?;
        if self.pac_taps().is_empty() {
            return Ok(v);
        }
        Ok((0..self.n())
            .map(|i| v[i] ^ self.pac_feedback(&v, i))
            .collect())
    }

    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>> {
        polar_transform(&self.message_to_u(message)?)
    }

    /// Payload carried by a rate-profiled vector `v`.
    pub fn message_from_v(&self, v: &[u8]) -> Vec<u8> {
        self.info.indices()[..self.message_len()]
            .iter()
            .map(|&i| v[i])
            .collect()
    }

    /// Whether the data bits in `v` pass the CRC; true without a CRC.
    pub fn crc_ok(&self, v: &[u8]) -> bool {
        match &self.pretransform {
            Pretransform::Crc(crc) => {
                let data: Vec<u8> = self.info.indices().iter().map(|&i| v[i]).collect();
                crc.check(&data)
            }
            _ => true,
        }
    }
}

/// Classification of a decoded block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventClass {
    Correct,
    /// The true path left the list (for SC: any error).
    Prune,
    /// The true path survived to the end but was not selected.
    MlLike,
    /// Without a genie: a detected failure (no path passed the CRC).
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderOutcome {
    pub message: Vec<u8>,
    pub u: Vec<u8>,
    pub codeword: Vec<u8>,
    /// With a genie, one of correct / prune / ml_like. Without one, correct
    /// unless a failure was detected.
    pub class: EventClass,
    /// First index whose decision differs from the true `u` (genie only).
    pub first_error: Option<usize>,
    /// Bit index after which the true path was no longer in the list.
    pub prune_depth: Option<usize>,
    /// Final metrics of all surviving paths, in list order.
    pub path_metrics: Vec<f64>,
    pub selected_metric: f64,
    /// Metric of the true path, if it survived to the end.
    pub true_metric: Option<f64>,
}

impl DecoderOutcome {
    pub fn is_error(&self) -> bool {
        self.class != EventClass::Correct
    }
}

fn check_llr(llr: &[f64], config: &CodeConfig) -> Result<()> {
    if llr.len() != config.n() {
        return Err(Error::Length {
            expected: config.n(),
            got: llr.len(),
        });
    }
    if let Some(j) = llr.iter().position(|x| x.is_nan()) {
        return Err(Error::Numeric {
            index: j,
            detail: "NaN channel LLR".into(),
        });
    }
    Ok(())
}

fn genie_u(config: &CodeConfig, genie: Option<&[u8]>) -> Result<Option<Vec<u8>>> {
    genie.map(|msg| config.message_to_u(msg)).transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{construct_mixed, construct_reliability, DesignSpec, Strategy};
    use crate::weight::wmin_of;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn design(m: u32, k: usize) -> IndexSet {
        construct_reliability(&DesignSpec::awgn(m, k, 3.0, Strategy::Reliability).unwrap())
            .unwrap()
            .set
    }

    fn configs(set: &IndexSet) -> Vec<CodeConfig> {
        vec![
            CodeConfig::plain(set.clone()).unwrap(),
            CodeConfig::new(set.clone(), Pretransform::Crc(CrcSpec::CRC12)).unwrap(),
            CodeConfig::new(set.clone(), Pretransform::pac_default()).unwrap(),
        ]
    }

    #[test]
    fn zero_message_encodes_to_zero() {
        for c in configs(&design(6, 32)) {
            let msg = vec![0u8; c.message_len()];
            assert!(c.encode(&msg).unwrap().iter().all(|&b| b == 0));
        }
    }

    #[test]
    fn config_validation() {
        let set = design(4, 8);
        assert!(CodeConfig::new(set.clone(), Pretransform::Crc(CrcSpec::CRC12)).is_err());
        assert!(CodeConfig::new(set.clone(), Pretransform::Pac { p: vec![0, 1] }).is_err());
        assert!(CodeConfig::plain(IndexSet::empty(8)).is_err());
        let c = CodeConfig::plain(set).unwrap();
        assert!(matches!(c.encode(&[0; 3]), Err(Error::Length { .. })));
    }

    #[test]
    fn pac_impulse_response() {
        let set = design(6, 32);
        let c = CodeConfig::new(set.clone(), Pretransform::pac_default()).unwrap();
        let mut msg = vec![0u8; 32];
        msg[0] = 1;
        let u = c.message_to_u(&msg).unwrap();
        let i0 = set.indices()[0];
        assert!(u[..i0].iter().all(|&b| b == 0));
        assert_eq!(&u[i0..i0 + 7], &PAC_DEFAULT);
        assert!(u[i0 + 7..].iter().all(|&b| b == 0));
    }

    #[test]
    fn codeword_weight_at_least_wmin() {
        let spec = DesignSpec::awgn(7, 64, 4.0, Strategy::Mixed).unwrap();
        let space = spec.space().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for set in [
            construct_reliability(&spec).unwrap().set,
            construct_mixed(&spec).unwrap().set,
        ] {
            let wmin = wmin_of(&set, space).unwrap();
            let c = CodeConfig::plain(set).unwrap();
            for _ in 0..10_000 {
                let msg: Vec<u8> = (0..64).map(|_| rng.random_range(0..2)).collect();
                if msg.iter().all(|&b| b == 0) {
                    continue;
                }
                let w = c.encode(&msg).unwrap().iter().filter(|&&b| b == 1).count();
                assert!(w >= wmin);
            }
        }
    }

    #[test]
    fn crc_occupies_last_positions() {
        let set = design(6, 32);
        let c = CodeConfig::new(set.clone(), Pretransform::Crc(CrcSpec::CRC12)).unwrap();
        let msg: Vec<u8> = (0..20).map(|i| (i % 3 == 0) as u8).collect();
        let v = c.message_to_v(&msg).unwrap();
        let tail: Vec<u8> = set.indices()[20..].iter().map(|&i| v[i]).collect();
        assert_eq!(tail, CrcSpec::CRC12.compute(&msg));
        assert!(c.crc_ok(&v));
        assert_eq!(c.message_from_v(&v), msg);
    }
}

//! Successive-cancellation decoding in natural bit order.

use super::kernel::{combine, f_layer, g_layer, hard, Arithmetic};
use super::{check_llr, genie_u, polar_transform, CodeConfig, DecoderOutcome, EventClass};
use crate::error::Result;

/// SC decoder with reusable scratch buffers.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    config: CodeConfig,
    arith: Arithmetic,
    /// `alpha[λ]` holds the `2^λ` LLRs of the current node at level `λ`.
    alpha: Vec<Vec<f64>>,
    /// `left[λ]` holds the partial sums of the last completed left child
    /// at level `λ`.
    left: Vec<Vec<u8>>,
    cur: Vec<u8>,
    next: Vec<u8>,
}

impl ScDecoder {
    pub fn new(config: CodeConfig, arith: Arithmetic) -> Self {
        let m = config.m() as usize;
        let n = config.n();
        ScDecoder {
            alpha: (0..=m).map(|l| vec![0.0; 1 << l]).collect(),
            left: (0..m).map(|l| vec![0; 1 << l]).collect(),
            cur: vec![0; n],
            next: vec![0; n],
            config,
            arith,
        }
    }

    pub fn config(&self) -> &CodeConfig {
        &self.config
    }

    /// Decodes one block. With `genie` (the true message) the outcome
    /// records the first erroneous index; every SC error counts as a prune.
    pub fn decode(&mut self, llr: &[f64], genie: Option<&[u8]>) -> Result<DecoderOutcome> {
        check_llr(llr, &self.config)?;
        let truth = genie_u(&self.config, genie)?;
        let m = self.config.m() as usize;
        let n = self.config.n();
        self.alpha[m].copy_from_slice(llr);
        let mut u = vec![0u8; n];
        let mut v = vec![0u8; n];
        let mut metric = 0.0;
        let mut first_error = None;
        for i in 0..n {
            let start = if i == 0 {
                m - 1
            } else {
                i.trailing_zeros() as usize
            };
            for l in (0..=start).rev() {
                let (lo, hi) = self.alpha.split_at_mut(l + 1);
                if l == start && i != 0 {
                    g_layer(&mut lo[l], &hi[0], &self.left[l]);
                } else {
                    f_layer(&mut lo[l], &hi[0], self.arith);
                }
            }
            let a = self.alpha[0][0];
            let feedback = self.config.pac_feedback(&v, i);
            if self.config.is_info(i) {
                u[i] = hard(a);
                v[i] = u[i] ^ feedback;
            } else {
                u[i] = feedback;
            }
            metric += self.arith.penalty(a, u[i]);
            if first_error.is_none() && truth.as_ref().is_some_and(|t| t[i] != u[i]) {
                first_error = Some(i);
            }
            self.propagate(i, u[i]);
        }
        let class = match (&truth, first_error) {
            (None, _) => {
                if self.config.crc_ok(&v) {
                    EventClass::Correct
                } else {
                    EventClass::Error
                }
            }
            (Some(_), None) => EventClass::Correct,
            (Some(_), Some(_)) => EventClass::Prune,
        };
        Ok(DecoderOutcome {
            message: self.config.message_from_v(&v),
            codeword: polar_transform(&u)?,
            u,
            class,
            first_error,
            prune_depth: first_error,
            path_metrics: vec![metric],
            selected_metric: metric,
            true_metric: (truth.is_some() && first_error.is_none()).then_some(metric),
        })
    }

    fn propagate(&mut self, i: usize, bit: u8) {
        let m = self.config.m() as usize;
        self.cur[0] = bit;
        let mut l = 0;
        while l < m {
            let h = 1 << l;
            if (i >> l) & 1 == 0 {
                self.left[l].copy_from_slice(&self.cur[..h]);
                return;
            }
            combine(&mut self.next[..2 * h], &self.left[l], &self.cur[..h]);
            std::mem::swap(&mut self.cur, &mut self.next);
            l += 1;
        }
    }
}

/// One-shot SC decoding with min-sum updates.
pub fn sc_decode(llr: &[f64], config: &CodeConfig, genie: Option<&[u8]>) -> Result<DecoderOutcome> {
    ScDecoder::new(config.clone(), Arithmetic::MinSum).decode(llr, genie)
}

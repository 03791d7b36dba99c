//! Successive-cancellation list decoding.
//!
//! Paths share per-level buffers through reference counts. Every write to
//! a level overwrites the whole buffer, so a shared buffer is replaced by a
//! fresh one instead of copied.

use super::kernel::{combine, f_layer, g_layer, Arithmetic};
use super::{check_llr, genie_u, polar_transform, CodeConfig, DecoderOutcome, EventClass};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
struct Pool<T> {
    bufs: Vec<Vec<T>>,
    refs: Vec<u32>,
    free: Vec<usize>,
}

impl<T: Clone + Default> Pool<T> {
    fn new(slots: usize, len: usize) -> Self {
        Pool {
            bufs: vec![vec![T::default(); len]; slots],
            refs: vec![0; slots],
            free: (0..slots).rev().collect(),
        }
    }

    fn reset(&mut self) {
        self.refs.iter_mut().for_each(|r| *r = 0);
        self.free = (0..self.bufs.len()).rev().collect();
    }

    fn acquire(&mut self) -> usize {
        let slot = self.free.pop().expect("pool sized for the list");
        self.refs[slot] = 1;
        slot
    }

    fn retain(&mut self, slot: usize) {
        self.refs[slot] += 1;
    }

    fn release(&mut self, slot: usize) {
        self.refs[slot] -= 1;
        if self.refs[slot] == 0 {
            self.free.push(slot);
        }
    }

    /// Gives `slot` exclusive ownership of a buffer whose contents are
    /// about to be overwritten.
    fn make_unique(&mut self, slot: &mut usize) {
        if self.refs[*slot] > 1 {
            self.refs[*slot] -= 1;
            *slot = self.acquire();
        }
    }
}

#[derive(Debug, Clone)]
struct Path {
    alpha: Vec<usize>,
    left: Vec<usize>,
    u: Vec<u8>,
    v: Vec<u8>,
    metric: f64,
    on_truth: bool,
}

/// SCL decoder with list size `L` and reusable scratch.
#[derive(Debug, Clone)]
pub struct SclDecoder {
    config: CodeConfig,
    list: usize,
    arith: Arithmetic,
    alpha: Vec<Pool<f64>>,
    left: Vec<Pool<u8>>,
    channel: Vec<f64>,
    cur: Vec<u8>,
    next: Vec<u8>,
}

struct Fork {
    metric: f64,
    parent: usize,
    bit: u8,
}

impl SclDecoder {
    pub fn new(config: CodeConfig, list: usize, arith: Arithmetic) -> Result<Self> {
        if list == 0 {
            return Err(Error::Domain("list size must be at least 1".into()));
        }
        let m = config.m() as usize;
        let n = config.n();
        Ok(SclDecoder {
            alpha: (0..m).map(|l| Pool::new(list, 1 << l)).collect(),
            left: (0..m).map(|l| Pool::new(list, 1 << l)).collect(),
            channel: vec![0.0; n],
            cur: vec![0; n],
            next: vec![0; n],
            config,
            list,
            arith,
        })
    }

    pub fn config(&self) -> &CodeConfig {
        &self.config
    }

    pub fn list_size(&self) -> usize {
        self.list
    }

    /// Decodes one block; `genie` is the true message.
    pub fn decode(&mut self, llr: &[f64], genie: Option<&[u8]>) -> Result<DecoderOutcome> {
        check_llr(llr, &self.config)?;
        let truth = genie_u(&self.config, genie)?;
        let m = self.config.m() as usize;
        let n = self.config.n();
        self.channel.copy_from_slice(llr);
        self.alpha.iter_mut().for_each(Pool::reset);
        self.left.iter_mut().for_each(Pool::reset);
        let mut paths = vec![Path {
            alpha: self.alpha.iter_mut().map(Pool::acquire).collect(),
            left: self.left.iter_mut().map(Pool::acquire).collect(),
            u: vec![0; n],
            v: vec![0; n],
            metric: 0.0,
            on_truth: truth.is_some(),
        }];
        let mut prune_depth = None;
        let mut forks: Vec<Fork> = Vec::with_capacity(2 * self.list);
        for i in 0..n {
            for path in paths.iter_mut() {
                self.descend(path, i, m);
            }
            if self.config.is_info(i) {
                forks.clear();
                for (p, path) in paths.iter().enumerate() {
                    let a = self.alpha[0].bufs[path.alpha[0]][0];
                    let feedback = self.config.pac_feedback(&path.v, i);
                    for bit in 0..2u8 {
                        let u = bit ^ feedback;
                        forks.push(Fork {
                            metric: path.metric + self.arith.penalty(a, u),
                            parent: p,
                            bit,
                        });
                    }
                }
                if forks.len() > self.list {
                    forks.sort_by(|x, y| {
                        x.metric
                            .total_cmp(&y.metric)
                            .then(x.parent.cmp(&y.parent))
                            .then(x.bit.cmp(&y.bit))
                    });
                    forks.truncate(self.list);
                    forks.sort_by(|x, y| x.parent.cmp(&y.parent).then(x.bit.cmp(&y.bit)));
                }
                paths = self.branch(paths, &forks, i, truth.as_deref());
            } else {
                for path in paths.iter_mut() {
                    let a = self.alpha[0].bufs[path.alpha[0]][0];
                    let u = self.config.pac_feedback(&path.v, i);
                    path.u[i] = u;
                    path.metric += self.arith.penalty(a, u);
                    if let Some(t) = &truth {
                        path.on_truth &= t[i] == u;
                    }
                }
            }
            if truth.is_some() && prune_depth.is_none() && !paths.iter().any(|p| p.on_truth) {
                prune_depth = Some(i);
            }
            for p in 0..paths.len() {
                self.propagate(&mut paths, p, i, m);
            }
        }
        self.finish(paths, truth.as_deref(), prune_depth)
    }

    fn descend(&mut self, path: &mut Path, i: usize, m: usize) {
        let start = if i == 0 {
            m - 1
        } else {
            i.trailing_zeros() as usize
        };
        for l in (0..=start).rev() {
            self.alpha[l].make_unique(&mut path.alpha[l]);
            let (lo, hi) = self.alpha.split_at_mut(l + 1);
            let parent: &[f64] = if l + 1 == m {
                &self.channel
            } else {
                &hi[0].bufs[path.alpha[l + 1]]
            };
            let out = &mut lo[l].bufs[path.alpha[l]];
            if l == start && i != 0 {
                g_layer(out, parent, &self.left[l].bufs[path.left[l]]);
            } else {
                f_layer(out, parent, self.arith);
            }
        }
    }

    fn branch(
        &mut self,
        paths: Vec<Path>,
        forks: &[Fork],
        i: usize,
        truth: Option<&[u8]>,
    ) -> Vec<Path> {
        let mut children = vec![0usize; paths.len()];
        for f in forks {
            children[f.parent] += 1;
        }
        let mut slots: Vec<Option<Path>> = paths.into_iter().map(Some).collect();
        for (p, slot) in slots.iter_mut().enumerate() {
            if children[p] == 0 {
                let dead = slot.take().expect("path present");
                self.release(&dead);
            }
        }
        let mut out = Vec::with_capacity(forks.len());
        for f in forks {
            let mut path = if children[f.parent] == 2 {
                children[f.parent] = 1;
                let parent = slots[f.parent].as_ref().expect("path present");
                self.share(parent);
                parent.clone()
            } else {
                slots[f.parent].take().expect("path present")
            };
            let feedback = self.config.pac_feedback(&path.v, i);
            path.v[i] = f.bit;
            path.u[i] = f.bit ^ feedback;
            path.metric = f.metric;
            if let Some(t) = truth {
                path.on_truth &= t[i] == path.u[i];
            }
            out.push(path);
        }
        out
    }

    fn share(&mut self, path: &Path) {
        for (pool, &s) in self.alpha.iter_mut().zip(&path.alpha) {
            pool.retain(s);
        }
        for (pool, &s) in self.left.iter_mut().zip(&path.left) {
            pool.retain(s);
        }
    }

    fn release(&mut self, path: &Path) {
        for (pool, &s) in self.alpha.iter_mut().zip(&path.alpha) {
            pool.release(s);
        }
        for (pool, &s) in self.left.iter_mut().zip(&path.left) {
            pool.release(s);
        }
    }

    fn propagate(&mut self, paths: &mut [Path], p: usize, i: usize, m: usize) {
        let path = &mut paths[p];
        self.cur[0] = path.u[i];
        for l in 0..m {
            let h = 1 << l;
            if (i >> l) & 1 == 0 {
                self.left[l].make_unique(&mut path.left[l]);
                self.left[l].bufs[path.left[l]].copy_from_slice(&self.cur[..h]);
                return;
            }
            combine(
                &mut self.next[..2 * h],
                &self.left[l].bufs[path.left[l]],
                &self.cur[..h],
            );
            std::mem::swap(&mut self.cur, &mut self.next);
        }
    }

    fn finish(
        &mut self,
        paths: Vec<Path>,
        truth: Option<&[u8]>,
        prune_depth: Option<usize>,
    ) -> Result<DecoderOutcome> {
        let best = |pred: &dyn Fn(&Path) -> bool| {
            paths
                .iter()
                .enumerate()
                .filter(|(_, p)| pred(p))
                .min_by(|(a, x), (b, y)| x.metric.total_cmp(&y.metric).then(a.cmp(b)))
                .map(|(i, _)| i)
        };
        let passing = best(&|p: &Path| self.config.crc_ok(&p.v));
        let chosen = passing
            .or_else(|| best(&|_| true))
            .expect("list is never empty");
        let selected = &paths[chosen];
        let true_metric = paths.iter().find(|p| p.on_truth).map(|p| p.metric);
        let class = match truth {
            None => {
                if passing.is_some() {
                    EventClass::Correct
                } else {
                    EventClass::Error
                }
            }
            Some(t) if selected.u == t => EventClass::Correct,
            Some(_) if true_metric.is_some() => EventClass::MlLike,
            Some(_) => EventClass::Prune,
        };
        let first_error = match truth {
            Some(t) if class != EventClass::Correct => {
                selected.u.iter().zip(t).position(|(a, b)| a != b)
            }
            _ => None,
        };
        Ok(DecoderOutcome {
            message: self.config.message_from_v(&selected.v),
            codeword: polar_transform(&selected.u)?,
            u: selected.u.clone(),
            class,
            first_error,
            prune_depth: if class == EventClass::Prune {
                prune_depth
            } else {
                None
            },
            path_metrics: paths.iter().map(|p| p.metric).collect(),
            selected_metric: selected.metric,
            true_metric,
        })
    }
}

/// One-shot SCL decoding with min-sum updates.
pub fn scl_decode(
    llr: &[f64],
    config: &CodeConfig,
    list: usize,
    genie: Option<&[u8]>,
) -> Result<DecoderOutcome> {
    SclDecoder::new(config.clone(), list, Arithmetic::MinSum)?.decode(llr, genie)
}

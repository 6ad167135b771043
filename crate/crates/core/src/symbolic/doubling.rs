use super::system::System;
use super::word::{Word, WordSet};
use crate::error::{Error, Result};
use crate::rng::{par_chunks, Streams};
use crate::sl2::{ScaledMat, Sl2};
use rand::distr::Distribution;

/// Doubling word sets V = V_1 u ... u V_n.
#[derive(Clone, Debug)]
pub struct DoublingSets {
    pub set: WordSet,
    /// |V_k| for k = 1..n.
    pub counts: Vec<usize>,
    /// M = ceil(2 l log2 R), R = max ||g_i||^2.
    pub m: u64,
    /// Every word of V lies in Psi(j, l; k') for some 1 <= k' <= n M.
    pub covered: bool,
    pub max_witness: u64,
}

pub fn doubling_constant(sys: &System, l: usize) -> u64 {
    (2.0 * l as f64 * sys.max_norm_sqr().log2()).ceil().max(1.0) as u64
}

struct State {
    word: Word,
    g: Sl2,
    p: f64,
    max_prefix: f64,
}

/// V_k = { v in Lambda^(j + l k) : ||g_v||^2 > 2 ||g_(u0...ui)||^2 for all 0 <= i < k }.
pub fn doubling_word_sets(sys: &System, j: usize, l: usize, n: usize, cap: usize) -> Result<DoublingSets> {
    if l == 0 || n == 0 {
        return Err(Error::InvalidParameter("l and n must be positive".into()));
    }
    let a = sys.len() as f64;
    let total: f64 = (1..=n).map(|k| a.powi((j + l * k) as i32)).sum();
    if total > cap as f64 {
        return Err(Error::CapExceeded { cap });
    }
    let m = doubling_constant(sys, l);
    let mut layer: Vec<State> = vec![State { word: vec![], g: Sl2::identity(), p: 1.0, max_prefix: 1.0 }];
    for _ in 0..j {
        layer = grow(sys, &layer, 1);
    }
    for s in layer.iter_mut() {
        s.max_prefix = s.g.op_norm().powi(2);
    }
    let mut out = WordSet::default();
    let mut counts = Vec::with_capacity(n);
    let mut covered = true;
    let mut max_witness = 0;
    for _k in 1..=n {
        let mut next = grow(sys, &layer, l);
        let mut c = 0;
        for s in next.iter_mut() {
            let nsq = s.g.op_norm().powi(2);
            if nsq > 2.0 * s.max_prefix {
                c += 1;
                let chi_v = nsq.log2();
                let witness = (s.max_prefix.log2().ceil() as u64).max(1);
                if !((witness as f64) < chi_v) || witness > n as u64 * m {
                    covered = false;
                }
                max_witness = max_witness.max(witness);
                out.words.push(s.word.clone());
                out.weights.push(s.p);
            }
            s.max_prefix = s.max_prefix.max(nsq);
        }
        counts.push(c);
        layer = next;
    }
    Ok(DoublingSets { set: out, counts, m, covered, max_witness })
}

fn grow(sys: &System, layer: &[State], len: usize) -> Vec<State> {
    let mut cur: Vec<State> = layer
        .iter()
        .map(|s| State { word: s.word.clone(), g: s.g, p: s.p, max_prefix: s.max_prefix })
        .collect();
    for _ in 0..len {
        let mut next = Vec::with_capacity(cur.len() * sys.len());
        for s in &cur {
            for i in 0..sys.len() {
                let mut w = s.word.clone();
                w.push(i as u8);
                next.push(State {
                    word: w,
                    g: s.g.mul(sys.generator(i)),
                    p: s.p * sys.probs()[i],
                    max_prefix: s.max_prefix,
                });
            }
        }
        cur = next;
    }
    cur
}

/// Membership test for V without enumeration.
pub fn is_doubling_word(sys: &System, j: usize, l: usize, w: &[u8]) -> bool {
    if w.len() < j + l || (w.len() - j) % l != 0 {
        return false;
    }
    let mut p = ScaledMat::identity();
    for &i in &w[..j] {
        p.mul_right(sys.generator(i as usize));
    }
    let mut max_prefix = p.chi();
    let k = (w.len() - j) / l;
    for (i, blk) in w[j..].chunks(l).enumerate() {
        for &x in blk {
            p.mul_right(sys.generator(x as usize));
        }
        let c = p.chi();
        if i + 1 == k {
            return c > 1.0 + max_prefix;
        }
        max_prefix = max_prefix.max(c);
    }
    false
}

/// Monte Carlo estimate of the average over 1 <= k <= n of P(U_(j+lk) in V).
pub fn doubling_mass(sys: &System, j: usize, l: usize, n: usize, samples: usize, streams: &Streams) -> f64 {
    let dist = rand::distr::weighted::WeightedIndex::new(sys.probs()).expect("valid probabilities");
    let streams = streams.derive("doubling-mass");
    let hits: Vec<u32> = par_chunks(samples, |k, _, len| {
        let mut rng = streams.rng(k as u64);
        (0..len)
            .map(|_| {
                let mut p = ScaledMat::identity();
                for _ in 0..j {
                    p.mul_right(sys.generator(dist.sample(&mut rng)));
                }
                let mut max_prefix = p.chi();
                let mut h = 0;
                for _ in 0..n {
                    for _ in 0..l {
                        p.mul_right(sys.generator(dist.sample(&mut rng)));
                    }
                    let c = p.chi();
                    if c > 1.0 + max_prefix {
                        h += 1;
                    }
                    max_prefix = max_prefix.max(c);
                }
                h
            })
            .collect()
    });
    let total: u64 = hits.iter().map(|&h| h as u64).sum();
    total as f64 / (samples as f64 * n as f64)
}

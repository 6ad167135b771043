use super::groups::{merge_exact, merge_float, TAU_EQ};
use crate::error::{Error, Result};
use crate::sl2::{ExactSl2, Sl2, DEFAULT_EXACT_BITS_CAP};
use crate::symbolic::System;

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyRow {
    pub n: usize,
    /// H(mu^{*n}) in bits.
    pub h: f64,
    pub h_over_n: f64,
    /// Number of distinct products.
    pub support: usize,
}

#[derive(Clone, Debug)]
pub struct EntropyTable {
    pub rows: Vec<EntropyRow>,
    /// min_n H_n / n over the computed rows (an upper bound for h_RW).
    pub h_rw_estimate: f64,
    /// All |Lambda|^n products of length n_max are distinct.
    pub free: bool,
    pub exact: bool,
    /// Float mode: pairs within [TAU_EQ, 10 TAU_EQ].
    pub ambiguous: usize,
    /// Float mode: smallest separation among products kept distinct.
    pub min_separation: f64,
}

pub(crate) fn shannon_bits(weights: impl Iterator<Item = f64>) -> f64 {
    // Neumaier summation keeps sums of many equal terms exact to rounding.
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for w in weights {
        if w > 0.0 {
            let t = -w * w.log2();
            let u = s + t;
            if s.abs() >= t.abs() {
                c += (s - u) + t;
            } else {
                c += (t - u) + s;
            }
            s = u;
        }
    }
    s + c
}

/// H(mu^{*n}) for n = 1..n_max by grouping equal products.
pub fn random_walk_entropy(sys: &System, n_max: usize, cap: usize) -> Result<EntropyTable> {
    let mut rows = Vec::with_capacity(n_max);
    let k = sys.len();
    let probs = sys.probs();
    let mut ambiguous = 0;
    let mut min_sep = f64::INFINITY;
    let mut free = true;
    if let Some(gens) = sys.exact_generators() {
        let mut dist: Vec<(ExactSl2, f64)> = vec![(ExactSl2::identity(), 1.0)];
        for n in 1..=n_max {
            if dist.len() * k > cap {
                return Err(Error::CapExceeded { cap });
            }
            let mut next = Vec::with_capacity(dist.len() * k);
            for (g, w) in &dist {
                for (i, h) in gens.iter().enumerate() {
                    next.push((g.mul_capped(h, DEFAULT_EXACT_BITS_CAP)?, w * probs[i]));
                }
            }
            dist = merge_exact(next);
            let h = shannon_bits(dist.iter().map(|x| x.1));
            free = dist.len() as f64 == (k as f64).powi(n as i32);
            rows.push(EntropyRow { n, h, h_over_n: h / n as f64, support: dist.len() });
        }
    } else {
        let mut dist: Vec<(Sl2, f64)> = vec![(Sl2::identity(), 1.0)];
        for n in 1..=n_max {
            if dist.len() * k > cap {
                return Err(Error::CapExceeded { cap });
            }
            let mut next = Vec::with_capacity(dist.len() * k);
            for (g, w) in &dist {
                for (i, h) in sys.generators().iter().enumerate() {
                    next.push((g.mul(h), w * probs[i]));
                }
            }
            let m = merge_float(next);
            ambiguous += m.ambiguous;
            min_sep = min_sep.min(m.min_separation);
            dist = m.items;
            let h = shannon_bits(dist.iter().map(|x| x.1));
            free = dist.len() as f64 == (k as f64).powi(n as i32);
            rows.push(EntropyRow { n, h, h_over_n: h / n as f64, support: dist.len() });
        }
    }
    let h_rw_estimate = rows.iter().map(|r| r.h_over_n).fold(f64::INFINITY, f64::min);
    Ok(EntropyTable {
        rows,
        h_rw_estimate,
        free,
        exact: sys.is_exact(),
        ambiguous,
        min_separation: if sys.is_exact() { f64::NAN } else { min_sep.max(TAU_EQ) },
    })
}

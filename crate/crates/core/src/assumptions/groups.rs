//! Grouping of equal products, exactly or up to the float equality tolerance.

use crate::sl2::{chart_g, ExactSl2, Sl2};
use indexmap::IndexMap;

/// Float equality radius for products: chart distance of g^-1 h.
pub const TAU_EQ: f64 = 1e-8;

pub(crate) fn chart_distance(g: &Sl2, h: &Sl2) -> f64 {
    let c = chart_g(&g.inverse().mul(h));
    c.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Weighted products merged by exact equality, in first-insertion order.
pub(crate) fn merge_exact(items: Vec<(ExactSl2, f64)>) -> Vec<(ExactSl2, f64)> {
    let mut m: IndexMap<ExactSl2, f64> = IndexMap::with_capacity(items.len());
    for (g, w) in items {
        *m.entry(g).or_insert(0.0) += w;
    }
    m.into_iter().collect()
}

#[derive(Clone, Debug, Default)]
pub(crate) struct FloatMerge {
    pub items: Vec<(Sl2, f64)>,
    /// Pairs at chart distance in [TAU_EQ, 10 TAU_EQ].
    pub ambiguous: usize,
    /// Smallest chart distance seen between products kept distinct.
    pub min_separation: f64,
}

/// Merges products within TAU_EQ using a sweep over Re a.
pub(crate) fn merge_float(mut items: Vec<(Sl2, f64)>) -> FloatMerge {
    let n = items.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| items[i].0.a().re.total_cmp(&items[j].0.a().re).then(i.cmp(&j)));
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut ambiguous = 0;
    let mut min_sep = f64::INFINITY;
    for s in 0..n {
        let gi = items[idx[s]].0;
        let window = 20.0 * TAU_EQ * gi.frobenius_sqr().sqrt();
        for &j in &idx[s + 1..] {
            let gj = items[j].0;
            if gj.a().re - gi.a().re > window {
                break;
            }
            if gi.max_abs_diff(&gj) > window {
                continue;
            }
            let d = chart_distance(&gi, &gj);
            if d < TAU_EQ {
                let (ri, rj) = (find(&mut parent, idx[s]), find(&mut parent, j));
                if ri != rj {
                    let (lo, hi) = (ri.min(rj), ri.max(rj));
                    parent[hi] = lo;
                }
            } else {
                if d <= 10.0 * TAU_EQ {
                    ambiguous += 1;
                }
                min_sep = min_sep.min(d);
            }
        }
    }
    let mut weight = vec![0.0; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        weight[r] += items[i].1;
    }
    let mut out = Vec::new();
    for i in 0..n {
        if parent[i] == i {
            out.push((items[i].0, weight[i]));
        }
    }
    items.clear();
    FloatMerge { items: out, ambiguous, min_separation: min_sep }
}

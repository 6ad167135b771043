use super::groups::{chart_distance, merge_exact, TAU_EQ};
use crate::error::{Error, Result};
use crate::sl2::{log_norm, ExactSl2, Sl2, DEFAULT_EXACT_BITS_CAP};
use crate::symbolic::System;

#[derive(Clone, Debug, PartialEq)]
pub struct SeparationRow {
    pub n: usize,
    /// min d_G(g_u1, g_u2) over distinct products of length n; `None` when no
    /// pair admits a principal logarithm.
    pub s_n: Option<f64>,
    /// Pairs of words with equal products (exact, or within TAU_EQ in float mode).
    pub collisions: usize,
    /// Pairs whose quotient has an eigenvalue on the negative axis.
    pub branch_skipped: usize,
    /// Float mode: pairs at chart distance in [TAU_EQ, 10 TAU_EQ].
    pub ambiguous: usize,
}

#[derive(Clone, Debug)]
pub struct SeparationTable {
    pub rows: Vec<SeparationRow>,
    /// exp of the least-squares slope of ln s_n against n.
    pub fitted_c: Option<f64>,
    pub exact: bool,
}

/// Minimal separation of distinct length-n products, n = 1..n_max.
/// The table reports only; no Diophantine verdict is drawn from it.
pub fn diophantine_probe(sys: &System, n_max: usize, cap: usize) -> Result<SeparationTable> {
    let k = sys.len();
    let mut rows = Vec::new();
    let mut exact_level: Vec<ExactSl2> = vec![ExactSl2::identity()];
    let mut float_level: Vec<Sl2> = vec![Sl2::identity()];
    for n in 1..=n_max {
        if float_level.len().max(exact_level.len()) * k > cap {
            return Err(Error::CapExceeded { cap });
        }
        let (reps, collisions) = if let Some(gens) = sys.exact_generators() {
            let mut next = Vec::with_capacity(exact_level.len() * k);
            for g in &exact_level {
                for h in gens {
                    next.push(g.mul_capped(h, DEFAULT_EXACT_BITS_CAP)?);
                }
            }
            let merged = merge_exact(next.iter().cloned().map(|g| (g, 1.0)).collect());
            let collisions: usize = merged.iter().map(|(_, c)| (*c as usize) * (*c as usize - 1) / 2).sum();
            exact_level = next;
            (merged.iter().map(|(g, _)| g.to_float()).collect::<Vec<_>>(), collisions)
        } else {
            let mut next = Vec::with_capacity(float_level.len() * k);
            for g in &float_level {
                for h in sys.generators() {
                    next.push(g.mul(h));
                }
            }
            float_level = next;
            (float_level.clone(), 0)
        };
        let mut best = f64::INFINITY;
        let mut row = SeparationRow { n, s_n: None, collisions, branch_skipped: 0, ambiguous: 0 };
        for i in 0..reps.len() {
            let gi_inv = reps[i].inverse();
            for j in i + 1..reps.len() {
                if !sys.is_exact() {
                    let d = chart_distance(&reps[i], &reps[j]);
                    if d < TAU_EQ {
                        row.collisions += 1;
                        continue;
                    }
                    if d <= 10.0 * TAU_EQ {
                        row.ambiguous += 1;
                    }
                }
                match log_norm(&gi_inv.mul(&reps[j])) {
                    Ok(d) => best = best.min(d),
                    Err(_) => row.branch_skipped += 1,
                }
            }
        }
        if best.is_finite() {
            row.s_n = Some(best);
        }
        rows.push(row);
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.s_n.filter(|s| *s > 0.0).map(|s| (r.n as f64, s.ln())))
        .collect();
    let fitted_c = if pts.len() >= 2 {
        let (slope, _) = least_squares(&pts);
        Some(slope.exp())
    } else {
        None
    };
    Ok(SeparationTable { rows, fitted_c, exact: sys.is_exact() })
}

pub(crate) fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

use super::empirical::{EmpiricalMeasure, PointCloud};
use super::entropy::cell_table;
use super::stats::{mean_stderr, slope_fit, EstimateWithCI};
use crate::error::{Error, Result};
use crate::rng::Streams;
use crate::sl2::dist_cp1;
use rand::seq::index::sample;
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq)]
pub enum DimScheme {
    /// Least-squares slope of H(m, D_n) against n for n in [n0, n1].
    EntropySlope { n0: u32, n1: u32 },
    /// Regression of log2 m(B(z, r)) on log2 r over sampled centers.
    LocalDimension { radii_log2: Vec<i32>, centers: usize },
}

impl DimScheme {
    pub fn entropy_slope(n0: u32, n1: u32) -> Self {
        DimScheme::EntropySlope { n0, n1 }
    }

    /// Radii 2^-4 ... 2^-12 with 1000 centers.
    pub fn local_default() -> Self {
        DimScheme::LocalDimension { radii_log2: (4..=12).map(|k| -k).collect(), centers: 1000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimRow {
    /// Level n, or log2 r for the local scheme.
    pub x: f64,
    /// H(m, D_n), or the mean of log2 m(B(z, r)).
    pub y: f64,
    pub used: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimEstimate {
    pub estimate: EstimateWithCI,
    pub rows: Vec<DimRow>,
    pub warnings: Vec<String>,
}

pub fn dim_estimate(m: &EmpiricalMeasure, scheme: &DimScheme, streams: &Streams) -> Result<DimEstimate> {
    match scheme {
        DimScheme::EntropySlope { n0, n1 } => dim_entropy_slope(m, *n0, *n1),
        DimScheme::LocalDimension { radii_log2, centers } => dim_local(m, radii_log2, *centers, streams),
    }
}

/// Entropy-slope estimate. Levels with more occupied cells than N/10 are dropped.
pub fn dim_entropy_slope(m: &EmpiricalMeasure, n0: u32, n1: u32) -> Result<DimEstimate> {
    if n0 > n1 {
        return Err(Error::EmptyWindow);
    }
    let mut rows = vec![];
    let mut warnings = vec![];
    let mut pts = vec![];
    for n in n0..=n1 {
        let t = cell_table(m, n)?;
        let used = t.occupied() * 10 <= t.samples;
        let h = t.entropy();
        if used {
            pts.push((n as f64, h));
        } else {
            warnings.push(format!("level {n} dropped: {} occupied cells for {} samples", t.occupied(), t.samples));
        }
        rows.push(DimRow { x: n as f64, y: h, used });
    }
    if pts.len() < 2 {
        return Err(Error::EmptyWindow);
    }
    let dims = if m.space() == super::empirical::Space::Rp1 { 1.0 } else { 2.0 };
    if (m.len() as f64) < 2f64.powf(dims * n1 as f64) {
        warnings.push(format!("{} samples is below the recommended 2^({dims} n1)", m.len()));
    }
    let (slope, _, se) = slope_fit(&pts);
    Ok(DimEstimate {
        estimate: EstimateWithCI { value: slope, stderr: se, trials: m.len(), method: "entropy-slope".into() },
        rows,
        warnings,
    })
}

fn local_distances(m: &EmpiricalMeasure) -> Result<Box<dyn Fn(usize, usize) -> f64 + Sync + '_>> {
    match m.cloud() {
        PointCloud::Cp1(v) => Ok(Box::new(move |i, j| dist_cp1(&v[i], &v[j]))),
        PointCloud::CInf(v) => Ok(Box::new(move |i, j| match (v[i].as_finite(), v[j].as_finite()) {
            (Some(a), Some(b)) => (a - b).norm(),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        })),
        _ => Err(Error::WrongSpace { expected: "cp1 or c_inf" }),
    }
}

/// Local-dimension estimate; the center set is split into 10 batches whose
/// slopes give the standard error.
pub fn dim_local(m: &EmpiricalMeasure, radii_log2: &[i32], centers: usize, streams: &Streams) -> Result<DimEstimate> {
    let n = m.len();
    if n < 2 || radii_log2.len() < 2 || centers == 0 {
        return Err(Error::EmptyWindow);
    }
    let dist = local_distances(m)?;
    let mut radii: Vec<i32> = radii_log2.to_vec();
    radii.sort_unstable();
    radii.dedup();
    let mut rng = streams.derive("local-dimension").rng(0);
    let mut idx = sample(&mut rng, n, centers.min(n)).into_vec();
    idx.sort_unstable();
    let rs: Vec<f64> = radii.iter().map(|&k| 2f64.powi(k)).collect();
    // masses[c][k] = m(B(z_c, r_k)) without z_c itself.
    let masses: Vec<Vec<f64>> = idx
        .par_iter()
        .map(|&c| {
            let mut acc = vec![0.0; rs.len()];
            for j in 0..n {
                if j == c {
                    continue;
                }
                let d = dist(c, j);
                for (a, &r) in acc.iter_mut().zip(rs.iter()) {
                    if d < r {
                        *a += m.weight(j);
                    }
                }
            }
            acc
        })
        .collect();
    let typical = 1.0 / n as f64;
    let mut rows = vec![];
    let mut used_k = vec![];
    let mut warnings = vec![];
    for (k, &r) in radii.iter().enumerate() {
        let mean_count = masses.iter().map(|v| v[k]).sum::<f64>() / masses.len() as f64 / typical;
        let logs: Vec<f64> = masses.iter().filter(|v| v[k] > 0.0).map(|v| v[k].log2()).collect();
        let used = mean_count >= 10.0 && !logs.is_empty();
        if !used {
            warnings.push(format!("radius 2^{r} dropped: mean count {mean_count:.1}"));
        } else {
            used_k.push(k);
        }
        let y = if logs.is_empty() { f64::NAN } else { mean_stderr(&logs).0 };
        rows.push(DimRow { x: r as f64, y, used });
    }
    if used_k.len() < 2 {
        return Err(Error::EmptyWindow);
    }
    let fit = |set: &[&Vec<f64>]| -> f64 {
        let pts: Vec<(f64, f64)> = used_k
            .iter()
            .filter_map(|&k| {
                let logs: Vec<f64> = set.iter().filter(|v| v[k] > 0.0).map(|v| v[k].log2()).collect();
                (!logs.is_empty()).then(|| (radii[k] as f64, mean_stderr(&logs).0))
            })
            .collect();
        slope_fit(&pts).0
    };
    let all: Vec<&Vec<f64>> = masses.iter().collect();
    let value = fit(&all);
    let batches = 10.min(masses.len());
    let slopes: Vec<f64> = (0..batches)
        .map(|b| {
            let part: Vec<&Vec<f64>> = masses.iter().skip(b).step_by(batches).collect();
            fit(&part)
        })
        .collect();
    let stderr = if batches > 1 { mean_stderr(&slopes).1 } else { 0.0 };
    Ok(DimEstimate {
        estimate: EstimateWithCI { value, stderr, trials: idx.len(), method: "local-dimension".into() },
        rows,
        warnings,
    })
}

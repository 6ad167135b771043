use super::boundary::{sample_boundary_detailed, BoundaryOptions, BoundarySample};
use super::dyadic::{check_level, key_cp1};
use super::empirical::Space;
use super::stats::{jackknife_stderr, EstimateWithCI};
use crate::error::{Error, Result};
use crate::rng::Streams;
use crate::symbolic::System;

/// Number of jackknife groups.
pub const DELTA_GROUPS: usize = 10;
/// Bins whose sample-weighted median count falls below this are undersampled.
pub const DELTA_MIN_MEDIAN_BIN: f64 = 20.0;

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaRow {
    pub q: u32,
    pub estimate: EstimateWithCI,
    /// Median over samples of the count of the sample's bin.
    pub median_bin: f64,
    pub occupied: usize,
    pub undersampled: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaReport {
    pub rows: Vec<DeltaRow>,
    pub samples: usize,
    /// H(p) in bits.
    pub entropy_p: f64,
}

impl DeltaReport {
    /// The finest level whose bins are well sampled.
    pub fn finest_well_sampled(&self) -> Option<&DeltaRow> {
        self.rows.iter().filter(|r| !r.undersampled).max_by_key(|r| r.q)
    }

    pub fn warnings(&self) -> Vec<String> {
        self.rows
            .iter()
            .filter(|r| r.undersampled)
            .map(|r| format!("q = {}: median bin count {:.1} below {DELTA_MIN_MEDIAN_BIN}", r.q, r.median_bin))
            .collect()
    }
}

fn nlogn(n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        let x = n as f64;
        x * x.log2()
    }
}

/// H(first letter | level-q cell of L) from paired samples.
pub fn delta_from_samples(samples: &[BoundarySample], letters: usize, q: u32) -> Result<DeltaRow> {
    check_level(Space::Cp1, q)?;
    let n = samples.len();
    if n == 0 {
        return Err(Error::EmptyMeasure);
    }
    let mut tuples: Vec<(u128, u8, u8)> = samples
        .iter()
        .enumerate()
        .map(|(i, s)| (key_cp1(&s.point, q), s.first_letter, (i % DELTA_GROUPS) as u8))
        .collect();
    tuples.sort_unstable();
    let g = DELTA_GROUPS;
    let mut total = 0.0;
    let mut leave = vec![0.0; g];
    let mut group_sizes = vec![0u64; g];
    let mut bins: Vec<u64> = vec![];
    let mut start = 0;
    while start < tuples.len() {
        let key = tuples[start].0;
        let mut end = start;
        let mut by_letter = vec![0u64; letters];
        let mut by_group = vec![0u64; g];
        let mut by_both = vec![0u64; letters * g];
        while end < tuples.len() && tuples[end].0 == key {
            let (_, a, grp) = tuples[end];
            by_letter[a as usize] += 1;
            by_group[grp as usize] += 1;
            by_both[a as usize * g + grp as usize] += 1;
            end += 1;
        }
        let nc = (end - start) as u64;
        bins.push(nc);
        total += nlogn(nc) - by_letter.iter().map(|&c| nlogn(c)).sum::<f64>();
        for k in 0..g {
            group_sizes[k] += by_group[k];
            leave[k] += nlogn(nc - by_group[k])
                - (0..letters).map(|a| nlogn(by_letter[a] - by_both[a * g + k])).sum::<f64>();
        }
        start = end;
    }
    let value = (total / n as f64).max(0.0);
    let leave_out: Vec<f64> = (0..g)
        .filter(|&k| (n as u64) > group_sizes[k])
        .map(|k| (leave[k] / (n as u64 - group_sizes[k]) as f64).max(0.0))
        .collect();
    let mut sorted = bins.clone();
    sorted.sort_unstable();
    let half = n as u64 / 2;
    let mut acc = 0u64;
    let mut median = 0u64;
    for &b in &sorted {
        acc += b;
        if acc > half {
            median = b;
            break;
        }
    }
    Ok(DeltaRow {
        q,
        estimate: EstimateWithCI {
            value,
            stderr: jackknife_stderr(&leave_out),
            trials: n,
            method: format!("binned-conditional-entropy q={q}"),
        },
        median_bin: median as f64,
        occupied: bins.len(),
        undersampled: (median as f64) < DELTA_MIN_MEDIAN_BIN,
    })
}

/// Delta estimates for a ladder of bin levels from one sample of N pairs.
pub fn delta_ladder(
    sys: &System,
    qs: &[u32],
    n: usize,
    opts: &BoundaryOptions,
    streams: &Streams,
) -> Result<DeltaReport> {
    let samples = sample_boundary_detailed(sys, opts, n, &streams.derive("delta"))?;
    let rows = qs.iter().map(|&q| delta_from_samples(&samples, sys.len(), q)).collect::<Result<Vec<_>>>()?;
    Ok(DeltaReport { rows, samples: n, entropy_p: sys.entropy_bits() })
}

pub fn delta_estimate(sys: &System, q: u32, n: usize, opts: &BoundaryOptions, streams: &Streams) -> Result<DeltaRow> {
    Ok(delta_ladder(sys, &[q], n, opts, streams)?.rows.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::Sl2;

    fn sanov_twice() -> System {
        let a = Sl2::real(1.0, 2.0, 0.0, 1.0).unwrap();
        let b = Sl2::real(1.0, 0.0, 2.0, 1.0).unwrap();
        System::uniform("pair", vec![a, b, a, b]).unwrap()
    }

    #[test]
    fn degenerate_probability_gives_zero() {
        let s = System::uniform("one", vec![Sl2::real(2.0, 1.0, 1.0, 1.0).unwrap()]).unwrap();
        let r = delta_estimate(&s, 8, 2000, &BoundaryOptions::default(), &Streams::new(1)).unwrap();
        assert_eq!(r.estimate.value, 0.0);
    }

    #[test]
    fn duplicated_letters_carry_one_bit() {
        // Letters 0 and 2 (and 1 and 3) are the same matrix, so the boundary
        // point only sees which matrix was used: Delta = H(p) - 1 = 1.
        let r = delta_estimate(&sanov_twice(), 6, 20_000, &BoundaryOptions::default(), &Streams::new(2)).unwrap();
        assert!((r.estimate.value - 1.0).abs() < 0.02, "{}", r.estimate);
        assert!(!r.undersampled);
    }

    #[test]
    fn equal_generators_give_full_entropy() {
        let g = Sl2::real(2.0, 1.0, 1.0, 1.0).unwrap();
        let s = System::uniform("same", vec![g, g]).unwrap();
        let r = delta_estimate(&s, 10, 4000, &BoundaryOptions::default(), &Streams::new(3)).unwrap();
        assert!((r.estimate.value - 1.0).abs() < 1e-3, "{}", r.estimate);
    }
}

use super::common::{boundary_opts, dim_hat, AtomicTheta};
use super::report::ExperimentReport;
use crate::error::{Error, Result};
use crate::measure::{entropy, sample_boundary, EmpiricalMeasure, PointCloud};
use crate::rng::{par_chunks, Streams};
use crate::symbolic::System;
use crate::verdict::Verdict;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

#[derive(Clone, Debug, PartialEq)]
pub struct IncreaseParams {
    /// Partition level n on cp1.
    pub n: u32,
    pub samples: usize,
    /// Boundary truncation; 2^-2q must be far below the cell size 2^-n.
    pub target_bits: f64,
    /// Atoms of theta must lie in B(1, r).
    pub r: f64,
    pub window: (u32, u32),
}

impl Default for IncreaseParams {
    fn default() -> Self {
        IncreaseParams { n: 14, samples: 1_000_000, target_bits: 20.0, r: 0.2, window: (3, 9) }
    }
}

/// Pushes every point through one theta-sampled Moebius map.
pub fn push_theta(theta: &AtomicTheta, m: &EmpiricalMeasure, streams: &Streams) -> Result<EmpiricalMeasure> {
    let gs = theta.elements()?;
    let pts = m.cp1_points()?;
    let pick = WeightedIndex::new(&theta.weights).map_err(|_| Error::EmptyMeasure)?;
    let s = streams.derive("theta");
    let out = par_chunks(pts.len(), |k, start, len| {
        let mut rng = s.rng(k as u64);
        pts[start..start + len].iter().map(|p| gs[pick.sample(&mut rng)].act(p)).collect()
    });
    m.map_cloud(PointCloud::Cp1(out))
}

pub fn exp_entropy_increase(
    sys: &System,
    theta: &AtomicTheta,
    p: &IncreaseParams,
    streams: &Streams,
) -> Result<ExperimentReport> {
    let radius = theta.radius()?;
    if radius >= p.r {
        return Err(Error::InvalidParameter(format!("theta atom at distance {radius} outside B(1, {})", p.r)));
    }
    let mut r = ExperimentReport::new(
        "entropy-increase",
        &sys.fingerprint(),
        streams.seed(),
        &["measure", "level", "entropy", "normalized", "occupied", "undersampled"],
    );
    r.param("n", p.n).param("samples", p.samples).param("target_bits", p.target_bits).param("r", p.r);
    r.param("atoms", theta.atoms.len()).param("window_min", p.window.0).param("window_max", p.window.1);
    let theta_h = entropy(&theta.measure()?, p.n.min(crate::measure::G_CHART_MAX_LEVEL), None)?;
    r.set("theta_radius", radius).set("theta_chart_entropy", theta_h.normalized);
    let nu = sample_boundary(sys, &boundary_opts(p.target_bits), p.samples, &streams.derive("nu"))?;
    let pushed = push_theta(theta, &nu, streams)?;
    let h_nu = entropy(&nu, p.n, None)?;
    let h_push = entropy(&pushed, p.n, None)?;
    for (name, h) in [("nu", &h_nu), ("theta.nu", &h_push)] {
        r.row(vec![name.into(), p.n.into(), h.entropy.into(), h.normalized.into(), h.occupied.into(), h.undersampled.into()]);
    }
    let slope = dim_hat(&nu, p.window)?.estimate.value;
    // dim-hat at level n is the normalized entropy of nu-hat at the same level.
    let dim_n = h_nu.normalized;
    let delta = h_push.normalized - dim_n;
    r.set("dim_level_n", dim_n).set("dim_slope", slope);
    r.set("normalized_entropy_pushed", h_push.normalized).set("delta", delta);
    r.set("delta_vs_slope", h_push.normalized - slope);
    r.set("undersampled", h_nu.undersampled || h_push.undersampled);
    r.verdict = if slope >= 2.0 - 0.05 {
        r.note("dimension estimate within 0.05 of 2: the statement is vacuous");
        Verdict::Inconclusive
    } else if h_nu.undersampled || h_push.undersampled {
        r.note(format!("level {} has more than N/10 occupied cells", p.n));
        Verdict::Inconclusive
    } else {
        Verdict::from_bool(delta > 0.0)
    };
    Ok(r)
}

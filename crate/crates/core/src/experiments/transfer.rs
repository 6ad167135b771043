use super::common::{boundary_opts, AtomicTheta};
use super::report::ExperimentReport;
use crate::error::{Error, Result};
use crate::measure::{components, entropy, sample_boundary, EmpiricalMeasure, PointCloud, G_CHART_MAX_LEVEL};
use crate::rng::{try_par_chunks, Streams};
use crate::sl2::{ExtendedComplex, Sl2};
use crate::symbolic::System;
use crate::verdict::Verdict;

#[derive(Clone, Debug, PartialEq)]
pub struct TransferParams {
    /// Scale gap: component at level i is measured at level i + k.
    pub k: u32,
    /// Component levels 1..=n on the G chart.
    pub n: u32,
    /// Number of points z drawn from xi.
    pub z_samples: usize,
    pub target_bits: f64,
    /// Grid step for the threshold eps.
    pub eps_step: f64,
}

impl Default for TransferParams {
    fn default() -> Self {
        TransferParams { k: 6, n: 6, z_samples: 200, target_bits: 40.0, eps_step: 0.01 }
    }
}

/// Per-(z, level, component) normalized orbit entropies with their weights.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferTable {
    /// (level, normalized entropy, weight); weights sum to one.
    pub values: Vec<(u32, f64, f64)>,
}

impl TransferTable {
    /// Double average of the indicator {(1/k) H > eps}.
    pub fn mass_above(&self, eps: f64) -> f64 {
        self.values.iter().filter(|v| v.1 > eps).map(|v| v.2).sum()
    }

    /// Largest grid eps with mass_above(eps) > eps; 0 when none.
    pub fn eps0(&self, step: f64) -> f64 {
        let steps = (1.0 / step).floor() as usize;
        (1..=steps).map(|j| j as f64 * step).filter(|&e| self.mass_above(e) > e).fold(0.0, f64::max)
    }
}

/// Orbit entropies (1/k) H(theta_{g,i}.z, D_{i+k}) for each z in `xi`.
pub fn action_entropy_table(theta: &AtomicTheta, xi: &[ExtendedComplex], k: u32, n: u32) -> Result<TransferTable> {
    if k == 0 || n == 0 || n > G_CHART_MAX_LEVEL {
        return Err(Error::InvalidParameter(format!("need k > 0 and 1 <= n <= {G_CHART_MAX_LEVEL}")));
    }
    if xi.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let th = theta.measure()?;
    // Components at every level: (level, mass, elements, weights within the component).
    let mut comps: Vec<(u32, f64, Vec<Sl2>, Vec<f64>)> = vec![];
    for i in 1..=n {
        for c in components(&th, i)? {
            let PointCloud::GChart(atoms) = c.measure.cloud() else { unreachable!() };
            let gs = atoms.iter().map(crate::sl2::chart_g_inv).collect::<Result<Vec<_>>>()?;
            comps.push((i, c.mass, gs, c.measure.weights()));
        }
    }
    let scale = 1.0 / (n as f64 * xi.len() as f64);
    let values = try_par_chunks(xi.len(), |_, start, len| {
        let mut out = vec![];
        for z in &xi[start..start + len] {
            for (i, mass, gs, w) in &comps {
                let orbit = PointCloud::CInf(gs.iter().map(|g| g.mobius_apply(*z)).collect());
                let m = EmpiricalMeasure::weighted(orbit, w.clone())?;
                let h = if m.infinity_mass() >= 1.0 { 0.0 } else { entropy(&m, i + k, None)?.entropy };
                out.push((*i, h / k as f64, mass * scale));
            }
        }
        Ok::<_, Error>(out)
    })?;
    Ok(TransferTable { values })
}

/// Transfer of G-entropy to orbit entropy, with xi the stationary measure in the C chart.
pub fn exp_action_entropy_transfer(
    sys: &System,
    theta: &AtomicTheta,
    p: &TransferParams,
    streams: &Streams,
) -> Result<ExperimentReport> {
    let nu = sample_boundary(sys, &boundary_opts(p.target_bits), p.z_samples, &streams.derive("xi"))?;
    let xi = nu.to_c_inf()?;
    action_entropy_transfer_on(&sys.fingerprint(), theta, xi.c_inf_points()?, p, streams.seed())
}

/// The experiment for an explicit xi given by equally weighted points.
pub fn action_entropy_transfer_on(
    fingerprint: &str,
    theta: &AtomicTheta,
    xi: &[ExtendedComplex],
    p: &TransferParams,
    seed: u64,
) -> Result<ExperimentReport> {
    if !(p.eps_step > 0.0 && p.eps_step <= 1.0) {
        return Err(Error::InvalidParameter("eps_step must lie in (0, 1]".into()));
    }
    let mut r = ExperimentReport::new("action-entropy-transfer", fingerprint, seed, &["level", "mean_normalized_entropy", "mass_above_eps0"]);
    r.param("k", p.k).param("n", p.n).param("z_samples", xi.len()).param("eps_step", p.eps_step);
    r.param("atoms", theta.atoms.len());
    let chart_h = entropy(&theta.measure()?, p.n, None)?.normalized;
    r.set("theta_chart_entropy", chart_h);
    let table = action_entropy_table(theta, xi, p.k, p.n)?;
    let eps0 = table.eps0(p.eps_step);
    for i in 1..=p.n {
        let (mut wsum, mut hsum, mut above) = (0.0, 0.0, 0.0);
        for v in table.values.iter().filter(|v| v.0 == i) {
            wsum += v.2;
            hsum += v.1 * v.2;
            if v.1 > eps0 {
                above += v.2;
            }
        }
        r.row(vec![i.into(), (hsum / wsum).into(), (above / wsum).into()]);
    }
    r.set("eps0", eps0).set("mass_above_eps0", table.mass_above(eps0));
    r.set("xi_infinity_points", xi.iter().filter(|z| z.is_infinite()).count());
    r.verdict = if chart_h == 0.0 {
        r.note("theta has zero chart entropy at level n: the statement does not apply");
        Verdict::Inconclusive
    } else {
        Verdict::from_bool(eps0 > 0.0)
    };
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::preset;
    use crate::sl2::C64;

    fn disk_points(count: usize, r0: f64, r1: f64) -> Vec<ExtendedComplex> {
        (0..count)
            .map(|j| {
                let t = (j as f64 + 0.5) / count as f64;
                let rad = r0 + (r1 - r0) * t;
                let a = 2.399963 * j as f64;
                ExtendedComplex::Finite(C64::from_polar(rad, a))
            })
            .collect()
    }

    fn params() -> TransferParams {
        TransferParams { k: 5, n: 4, ..Default::default() }
    }

    #[test]
    fn single_atom_is_a_control() {
        let r = action_entropy_transfer_on("x", &AtomicTheta::identity(), &disk_points(50, 0.1, 1.0), &params(), 0).unwrap();
        assert_eq!(r.get_f64("eps0").unwrap(), 0.0);
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn translation_arc_transfers_entropy() {
        let count = 1 << 9;
        let gs: Vec<Sl2> = (0..count).map(|j| Sl2::real(1.0, j as f64 / count as f64, 0.0, 1.0).unwrap()).collect();
        let theta = AtomicTheta::from_elements(&gs).unwrap();
        let r = action_entropy_transfer_on("x", &theta, &disk_points(50, 0.1, 1.0), &params(), 0).unwrap();
        // Translation orbits of a level-i component fill 2^k cells at level i + k.
        assert!(r.get_f64("eps0").unwrap() > 0.9, "{:?}", r.get("eps0"));
        assert_eq!(r.verdict, Verdict::Consistent);
    }

    #[test]
    fn stabilizer_of_zero_is_rescued_by_other_points() {
        let count = 1 << 9;
        let gs: Vec<Sl2> = (0..count).map(|j| Sl2::real(1.0, 0.0, j as f64 / count as f64, 1.0).unwrap()).collect();
        let theta = AtomicTheta::from_elements(&gs).unwrap();
        let near: Vec<ExtendedComplex> = disk_points(90, 0.0, 1e-9);
        let t = action_entropy_table(&theta, &near, 5, 4).unwrap();
        assert_eq!(t.eps0(0.01), 0.0);
        let mut xi = near;
        xi.extend(disk_points(10, 0.7, 1.0));
        let r = action_entropy_transfer_on("x", &theta, &xi, &params(), 0).unwrap();
        let e = r.get_f64("eps0").unwrap();
        assert!(e > 0.05 && e < 0.1, "{e}");
    }

    #[test]
    fn stationary_xi_runs() {
        let theta = AtomicTheta::four_directions(0.15).unwrap();
        let p = TransferParams { z_samples: 20, ..params() };
        let r = exp_action_entropy_transfer(&preset("twist").unwrap(), &theta, &p, &Streams::new(1)).unwrap();
        assert_eq!(r.rows.len(), 4);
    }
}

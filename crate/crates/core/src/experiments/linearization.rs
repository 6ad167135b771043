use super::common::AtomicTheta;
use super::report::ExperimentReport;
use crate::error::{Error, Result};
use crate::measure::{entropy, EmpiricalMeasure, PointCloud, C_INF_MAX_LEVEL};
use crate::rng::Streams;
use crate::sl2::{chart_g, dist_g_proxy, ExtendedComplex, Sl2, C64};
use crate::verdict::Verdict;
use rand::Rng;

#[derive(Clone, Debug, PartialEq)]
pub struct LinearizationParams {
    pub k: u32,
    /// Support radius; must be a power of two.
    pub delta: f64,
    /// Pass threshold on the normalized gap.
    pub eps: f64,
}

impl Default for LinearizationParams {
    fn default() -> Self {
        LinearizationParams { k: 8, delta: 2f64.powi(-10), eps: 0.1 }
    }
}

/// theta: `atoms` elements with chart coordinates in a cube of half-side delta/8 around g;
/// xi: a side x side grid on the square of side delta centred at z.
pub fn linearization_fixture(
    g: &Sl2,
    z: C64,
    delta: f64,
    atoms: usize,
    side: usize,
    streams: &Streams,
) -> Result<(AtomicTheta, Vec<C64>)> {
    if atoms == 0 || side == 0 {
        return Err(Error::EmptyMeasure);
    }
    let c = chart_g(g);
    let mut rng = streams.derive("linearization").rng(0);
    let pts: Vec<[f64; 6]> = (0..atoms)
        .map(|_| std::array::from_fn(|j| c[j] + delta / 8.0 * rng.random_range(-1.0..1.0)))
        .collect();
    let theta = AtomicTheta::uniform(pts)?;
    let step = delta / side as f64;
    let xi = (0..side * side)
        .map(|j| {
            let (a, b) = ((j % side) as f64 + 0.5, (j / side) as f64 + 0.5);
            z + C64::new(a * step - delta / 2.0, b * step - delta / 2.0)
        })
        .collect();
    Ok((theta, xi))
}

/// Compares H(theta.xi) with H of the linearized action h.z + phi_g'(z)(w - z),
/// both at level k + log2(1/delta).
pub fn exp_linearization_check(
    g: &Sl2,
    z: C64,
    theta: &AtomicTheta,
    xi: &[C64],
    p: &LinearizationParams,
    seed: u64,
) -> Result<ExperimentReport> {
    let scale = -p.delta.log2();
    if !(p.delta > 0.0 && p.delta < 1.0 && scale.fract() == 0.0) {
        return Err(Error::InvalidParameter("delta must be a power of two below 1".into()));
    }
    let level = p.k + scale as u32;
    if p.k == 0 || level > C_INF_MAX_LEVEL {
        return Err(Error::InvalidParameter(format!("need 0 < k and k + log2(1/delta) <= {C_INF_MAX_LEVEL}")));
    }
    if xi.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let hs = theta.elements()?;
    for h in &hs {
        let d = dist_g_proxy(g, h)?;
        if d > p.delta {
            return Err(Error::InvalidParameter(format!("theta atom at distance {d} from g exceeds delta")));
        }
    }
    if let Some(w) = xi.iter().find(|w| (**w - z).norm() > p.delta) {
        return Err(Error::InvalidParameter(format!("xi point {w} farther than delta from z")));
    }
    let deriv = g.mobius_derivative(z)?;
    let mut exact = Vec::with_capacity(hs.len() * xi.len());
    let mut linear = Vec::with_capacity(hs.len() * xi.len());
    let mut weights = Vec::with_capacity(hs.len() * xi.len());
    for (h, &wh) in hs.iter().zip(&theta.weights) {
        let hz = match h.mobius_apply(ExtendedComplex::Finite(z)) {
            ExtendedComplex::Finite(v) => v,
            ExtendedComplex::Infinity => return Err(Error::Pole),
        };
        for &w in xi {
            exact.push(h.mobius_apply(ExtendedComplex::Finite(w)));
            linear.push(ExtendedComplex::Finite(hz + deriv * (w - z)));
            weights.push(wh);
        }
    }
    let he = entropy(&EmpiricalMeasure::weighted(PointCloud::CInf(exact), weights.clone())?, level, None)?;
    let hl = entropy(&EmpiricalMeasure::weighted(PointCloud::CInf(linear), weights)?, level, None)?;
    let gap = (he.entropy - hl.entropy).abs() / p.k as f64;
    let mut r = ExperimentReport::new("linearization", "fixture", seed, &["measure", "level", "entropy", "occupied"]);
    r.param("k", p.k).param("delta", p.delta).param("eps", p.eps).param("atoms", hs.len()).param("xi_points", xi.len());
    r.row(vec!["theta.xi".into(), level.into(), he.entropy.into(), he.occupied.into()]);
    r.row(vec!["linearized".into(), level.into(), hl.entropy.into(), hl.occupied.into()]);
    r.set("gap", gap);
    r.verdict = Verdict::from_bool(gap < p.eps);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(delta: f64) -> ExperimentReport {
        let g = Sl2::identity();
        let z = C64::new(0.3, 0.2);
        let (theta, xi) = linearization_fixture(&g, z, delta, 16, 128, &Streams::new(3)).unwrap();
        exp_linearization_check(&g, z, &theta, &xi, &LinearizationParams { delta, ..Default::default() }, 3).unwrap()
    }

    #[test]
    fn atoms_give_zero_entropy() {
        let g = Sl2::identity();
        let z = C64::new(0.3, 0.2);
        let p = LinearizationParams::default();
        let r = exp_linearization_check(&g, z, &AtomicTheta::identity(), &[z], &p, 0).unwrap();
        assert_eq!(r.get_f64("gap").unwrap(), 0.0);
    }

    #[test]
    fn fine_scale_gap_is_small_and_coarse_gap_grows() {
        let fine = run(2f64.powi(-10));
        let coarse = run(2f64.powi(-4));
        let (gf, gc) = (fine.get_f64("gap").unwrap(), coarse.get_f64("gap").unwrap());
        assert!(gf < 0.1, "{gf}");
        assert_eq!(fine.verdict, Verdict::Consistent);
        assert!(gc > gf, "{gc} {gf}");
    }

    #[test]
    fn support_outside_delta_is_rejected() {
        let g = Sl2::identity();
        let z = C64::new(0.3, 0.2);
        let p = LinearizationParams::default();
        assert!(exp_linearization_check(&g, z, &AtomicTheta::identity(), &[z + C64::new(0.01, 0.0)], &p, 0).is_err());
    }
}

use super::empirical::{EmpiricalMeasure, PointCloud};
use crate::error::{Error, Result};
use crate::sl2::{dist_cp1, ExtendedComplex, ProjPoint, C64};
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryMassProbe {
    /// Share of the finite mass within delta 2^-n of the level-n grid lines.
    pub fraction: f64,
    pub infinity_mass: f64,
}

/// Mass of the delta 2^-n neighbourhood of the boundaries of level-n cells.
pub fn boundary_mass_probe(m: &EmpiricalMeasure, delta: f64, n: u32) -> Result<BoundaryMassProbe> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidParameter("delta must lie in (0, 1/2)".into()));
    }
    let pts = m.c_inf_points()?;
    let scale = 2f64.powi(n as i32);
    let near = |x: f64| {
        let f = x * scale - (x * scale).floor();
        f < delta || f > 1.0 - delta
    };
    let (mut hit, mut fin, mut inf) = (0.0, 0.0, 0.0);
    for (i, z) in pts.iter().enumerate() {
        let w = m.weight(i);
        match z {
            ExtendedComplex::Infinity => inf += w,
            ExtendedComplex::Finite(z) => {
                fin += w;
                if near(z.re) || near(z.im) {
                    hit += w;
                }
            }
        }
    }
    Ok(BoundaryMassProbe { fraction: if fin > 0.0 { hit / fin } else { 0.0 }, infinity_mass: inf })
}

/// Fibonacci net of `k` points on CP^1, via the Riemann sphere.
pub fn fibonacci_net(k: usize) -> Vec<ProjPoint> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..k)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / k as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * i as f64;
            // Inverse stereographic projection: (x + iy) / (1 - z) as [x + iy : 1 - z].
            ProjPoint::new(C64::new(r * t.cos(), r * t.sin()), C64::new(1.0 - z, 0.0)).unwrap_or_else(ProjPoint::e1)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmallBallProbe {
    pub eta: f64,
    pub max_mass: f64,
    pub center: ProjPoint,
}

/// Largest mass of a ball of radius eta centered at a net point.
pub fn small_ball_probe(m: &EmpiricalMeasure, eta: f64, net: usize) -> Result<SmallBallProbe> {
    let pts = match m.cloud() {
        PointCloud::Cp1(v) => v,
        _ => return Err(Error::WrongSpace { expected: "cp1" }),
    };
    let centers = fibonacci_net(net.max(1));
    let masses: Vec<f64> = centers
        .par_iter()
        .map(|c| pts.iter().enumerate().filter(|(_, p)| dist_cp1(c, p) < eta).map(|(i, _)| m.weight(i)).sum())
        .collect();
    let (k, &max_mass) = masses
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |a, b| if *b.1 > *a.1 { b } else { a });
    Ok(SmallBallProbe { eta, max_mass, center: centers[k] })
}

/// The first eta in a halving ladder from 1/2 whose small-ball mass is below `bound`.
pub fn small_ball_radius(m: &EmpiricalMeasure, bound: f64, net: usize, steps: usize) -> Result<Option<SmallBallProbe>> {
    let mut eta = 0.5;
    for _ in 0..steps {
        let p = small_ball_probe(m, eta, net)?;
        if p.max_mass < bound {
            return Ok(Some(p));
        }
        eta *= 0.5;
    }
    Ok(None)
}

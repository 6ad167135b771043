use super::common::{boundary_opts, dim_hat};
use super::report::ExperimentReport;
use crate::error::{Error, Result};
use crate::measure::{component_entropies, sample_boundary, EmpiricalMeasure};
use crate::rng::Streams;
use crate::symbolic::System;
use crate::verdict::Verdict;

#[derive(Clone, Debug, PartialEq)]
pub struct UniformDimParams {
    /// Scale gap m of the component entropies.
    pub m: u32,
    /// Component levels i0..=i1.
    pub levels: (u32, u32),
    pub samples: usize,
    pub eps: f64,
    /// Entropy-slope window for the dimension estimate.
    pub window: (u32, u32),
    pub target_bits: f64,
}

impl Default for UniformDimParams {
    fn default() -> Self {
        UniformDimParams { m: 8, levels: (1, 2), samples: 1_000_000, eps: 0.25, window: (3, 9), target_bits: 40.0 }
    }
}

pub fn exp_uniform_entropy_dim(sys: &System, p: &UniformDimParams, streams: &Streams) -> Result<ExperimentReport> {
    let nu = sample_boundary(sys, &boundary_opts(p.target_bits), p.samples, &streams.derive("nu"))?;
    let dim = dim_hat(&nu, p.window)?;
    let mut r = uniform_entropy_dim_on(&nu, &sys.fingerprint(), dim.estimate.value, p, streams.seed())?;
    r.set("dim_stderr", dim.estimate.stderr);
    for w in dim.warnings {
        r.note(w);
    }
    Ok(r)
}

/// Fraction of levels-and-components whose normalized entropy is within eps of `dim`.
pub fn uniform_entropy_dim_on(
    m: &EmpiricalMeasure,
    system: &str,
    dim: f64,
    p: &UniformDimParams,
    seed: u64,
) -> Result<ExperimentReport> {
    if p.m == 0 || p.levels.0 > p.levels.1 {
        return Err(Error::InvalidParameter("need m > 0 and a nonempty level range".into()));
    }
    let mut r = ExperimentReport::new(
        "uniform-entropy-dim",
        system,
        seed,
        &["level", "mass", "samples", "normalized_entropy", "within", "undersampled"],
    );
    r.param("m", p.m).param("level_min", p.levels.0).param("level_max", p.levels.1);
    r.param("samples", m.len()).param("eps", p.eps).param("window_min", p.window.0).param("window_max", p.window.1);
    let mut within = 0.0;
    let mut under = 0.0;
    let levels = p.levels.1 - p.levels.0 + 1;
    for i in p.levels.0..=p.levels.1 {
        for c in component_entropies(m, i, p.m)? {
            let h = c.entropy / p.m as f64;
            let ok = (h - dim).abs() < p.eps;
            if ok {
                within += c.mass;
            }
            if c.undersampled() {
                under += c.mass;
            }
            r.row(vec![i.into(), c.mass.into(), c.samples.into(), h.into(), ok.into(), c.undersampled().into()]);
        }
    }
    let fraction = within / levels as f64;
    let under = under / levels as f64;
    r.set("dim", dim).set("fraction", fraction).set("undersampled_mass", under);
    r.verdict = if under > p.eps {
        r.note(format!("undersampled components carry {under:.3} of the mass, more than eps"));
        Verdict::Inconclusive
    } else {
        Verdict::from_bool(fraction > 1.0 - p.eps)
    };
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::PointCloud;
    use crate::sl2::ExtendedComplex;

    fn lattice(bits: u32) -> EmpiricalMeasure {
        let k = 1usize << bits;
        let h = 0.5 / k as f64;
        let mut pts = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                pts.push(ExtendedComplex::finite(i as f64 / k as f64 + h, j as f64 / k as f64 + h));
            }
        }
        EmpiricalMeasure::uniform(PointCloud::CInf(pts)).unwrap()
    }

    #[test]
    fn uniform_square_components_have_dimension_two() {
        let m = lattice(10);
        let p = UniformDimParams { m: 4, levels: (1, 4), ..Default::default() };
        let r = uniform_entropy_dim_on(&m, "square", 2.0, &p, 0).unwrap();
        assert!(r.get_f64("fraction").unwrap() > 0.99);
        assert_eq!(r.verdict, Verdict::Consistent);
    }

    #[test]
    fn atom_is_flagged_against_positive_dimension() {
        let m = EmpiricalMeasure::uniform(PointCloud::CInf(vec![ExtendedComplex::finite(0.3, 0.3); 100])).unwrap();
        let p = UniformDimParams { m: 4, levels: (1, 3), ..Default::default() };
        let r = uniform_entropy_dim_on(&m, "atom", 1.0, &p, 0).unwrap();
        assert_eq!(r.get_f64("fraction").unwrap(), 0.0);
        assert_eq!(r.verdict, Verdict::Inconsistent);
        let r0 = uniform_entropy_dim_on(&m, "atom", 0.0, &p, 0).unwrap();
        assert_eq!(r0.verdict, Verdict::Consistent);
    }
}

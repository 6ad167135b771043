use crate::error::{Error, Result};
use crate::measure::{
    dim_entropy_slope, DimEstimate, EmpiricalMeasure, PointCloud, DEFAULT_BOUNDARY_MAX_LEN,
};
use crate::sl2::{chart_g, chart_g_inv, dist_g_proxy, Sl2};

/// Finite atomic measure on G, given by chart coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicTheta {
    pub atoms: Vec<[f64; 6]>,
    pub weights: Vec<f64>,
}

impl AtomicTheta {
    pub fn uniform(atoms: Vec<[f64; 6]>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        let w = 1.0 / atoms.len() as f64;
        Ok(AtomicTheta { weights: vec![w; atoms.len()], atoms })
    }

    pub fn from_elements(gs: &[Sl2]) -> Result<Self> {
        Self::uniform(gs.iter().map(chart_g).collect())
    }

    pub fn identity() -> Self {
        AtomicTheta { atoms: vec![[0.0; 6]], weights: vec![1.0] }
    }

    /// Four atoms exp(t X_k) for unit Frobenius-norm X_k along
    /// diag(1,-1), [[0,1],[1,0]], [[0,i],[-i,0]] and diag(i,-i).
    pub fn four_directions(t: f64) -> Result<Self> {
        let s = t / 2f64.sqrt();
        let (ch, sh) = (s.cosh(), s.sinh());
        let (c, sn) = (s.cos(), s.sin());
        let gs = [
            Sl2::real(ch + sh, 0.0, 0.0, ch - sh)?,
            Sl2::real(ch, sh, sh, ch)?,
            Sl2::from_entries([
                crate::sl2::C64::new(ch, 0.0),
                crate::sl2::C64::new(0.0, sh),
                crate::sl2::C64::new(0.0, -sh),
                crate::sl2::C64::new(ch, 0.0),
            ]),
            Sl2::from_entries([
                crate::sl2::C64::new(c, sn),
                crate::sl2::C64::new(0.0, 0.0),
                crate::sl2::C64::new(0.0, 0.0),
                crate::sl2::C64::new(c, -sn),
            ]),
        ];
        Self::from_elements(&gs)
    }

    pub fn elements(&self) -> Result<Vec<Sl2>> {
        self.atoms.iter().map(chart_g_inv).collect()
    }

    pub fn measure(&self) -> Result<EmpiricalMeasure> {
        EmpiricalMeasure::weighted(PointCloud::GChart(self.atoms.clone()), self.weights.clone())
    }

    /// Largest distance of an atom from the identity.
    pub fn radius(&self) -> Result<f64> {
        let id = Sl2::identity();
        self.elements()?.iter().try_fold(0.0f64, |r, g| Ok(r.max(dist_g_proxy(&id, g)?)))
    }
}

/// Boundary sampling budget shared by the experiments.
pub(crate) fn boundary_opts(target_bits: f64) -> crate::measure::BoundaryOptions {
    crate::measure::BoundaryOptions { target_bits, transpose: false, max_len: DEFAULT_BOUNDARY_MAX_LEN }
}

pub(crate) fn dim_hat(m: &EmpiricalMeasure, window: (u32, u32)) -> Result<DimEstimate> {
    dim_entropy_slope(m, window.0, window.1)
}

/// Weighted quantile by nearest rank.
pub(crate) fn weighted_quantile(items: &[(f64, f64)], q: f64) -> f64 {
    let mut v: Vec<(f64, f64)> = items.iter().copied().filter(|x| x.1 > 0.0).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = v.iter().map(|x| x.1).sum();
    let mut acc = 0.0;
    for (x, w) in &v {
        acc += w;
        if acc >= q * total {
            return *x;
        }
    }
    v.last().unwrap().0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_directions_sit_on_the_sphere() {
        let t = AtomicTheta::four_directions(0.15).unwrap();
        let id = Sl2::identity();
        for g in t.elements().unwrap() {
            assert!((dist_g_proxy(&id, &g).unwrap() - 0.15).abs() < 1e-9);
        }
        assert!((t.radius().unwrap() - 0.15).abs() < 1e-9);
    }

    #[test]
    fn quantile() {
        let v = [(1.0, 1.0), (2.0, 1.0), (3.0, 1.0), (4.0, 1.0)];
        assert_eq!(weighted_quantile(&v, 0.05), 1.0);
        assert_eq!(weighted_quantile(&v, 0.5), 2.0);
        assert_eq!(weighted_quantile(&v, 1.0), 4.0);
    }
}

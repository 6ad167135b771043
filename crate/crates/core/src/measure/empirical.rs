use crate::error::{Error, Result};
use crate::sl2::{psi, ExtendedComplex, ProjPoint, RPoint};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Space {
    Cp1,
    CInf,
    Rp1,
    GChart,
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::Cp1 => "cp1",
            Space::CInf => "c_inf",
            Space::Rp1 => "rp1",
            Space::GChart => "g_chart",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PointCloud {
    Cp1(Vec<ProjPoint>),
    CInf(Vec<ExtendedComplex>),
    Rp1(Vec<RPoint>),
    GChart(Vec<[f64; 6]>),
}

impl PointCloud {
    pub fn len(&self) -> usize {
        match self {
            PointCloud::Cp1(v) => v.len(),
            PointCloud::CInf(v) => v.len(),
            PointCloud::Rp1(v) => v.len(),
            PointCloud::GChart(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn space(&self) -> Space {
        match self {
            PointCloud::Cp1(_) => Space::Cp1,
            PointCloud::CInf(_) => Space::CInf,
            PointCloud::Rp1(_) => Space::Rp1,
            PointCloud::GChart(_) => Space::GChart,
        }
    }

    fn select(&self, idx: &[usize]) -> PointCloud {
        match self {
            PointCloud::Cp1(v) => PointCloud::Cp1(idx.iter().map(|&i| v[i]).collect()),
            PointCloud::CInf(v) => PointCloud::CInf(idx.iter().map(|&i| v[i]).collect()),
            PointCloud::Rp1(v) => PointCloud::Rp1(idx.iter().map(|&i| v[i]).collect()),
            PointCloud::GChart(v) => PointCloud::GChart(idx.iter().map(|&i| v[i]).collect()),
        }
    }
}

/// Finitely supported probability measure on one of the working spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalMeasure {
    cloud: PointCloud,
    /// `None` means equal weights 1/N.
    weights: Option<Vec<f64>>,
}

impl EmpiricalMeasure {
    pub fn uniform(cloud: PointCloud) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        Ok(EmpiricalMeasure { cloud, weights: None })
    }

    /// Weights are normalized to sum to one; they must be nonnegative with positive sum.
    pub fn weighted(cloud: PointCloud, weights: Vec<f64>) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        if weights.len() != cloud.len() {
            return Err(Error::InvalidParameter("one weight per point".into()));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter("weights must be nonnegative".into()));
        }
        let s: f64 = weights.iter().sum();
        if !(s > 0.0) {
            return Err(Error::EmptyMeasure);
        }
        Ok(EmpiricalMeasure { cloud, weights: Some(weights.into_iter().map(|w| w / s).collect()) })
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn space(&self) -> Space {
        self.cloud.space()
    }

    pub fn len(&self) -> usize {
        self.cloud.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cloud.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        self.weights.is_none()
    }

    pub fn weight(&self, i: usize) -> f64 {
        match &self.weights {
            None => 1.0 / self.len() as f64,
            Some(w) => w[i],
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }

    pub(crate) fn explicit_weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn cp1_points(&self) -> Result<&[ProjPoint]> {
        match &self.cloud {
            PointCloud::Cp1(v) => Ok(v),
            _ => Err(Error::WrongSpace { expected: "cp1" }),
        }
    }

    pub fn c_inf_points(&self) -> Result<&[ExtendedComplex]> {
        match &self.cloud {
            PointCloud::CInf(v) => Ok(v),
            _ => Err(Error::WrongSpace { expected: "c_inf" }),
        }
    }

    /// Restriction to the given indices, renormalized.
    pub fn restrict(&self, idx: &[usize]) -> Result<EmpiricalMeasure> {
        let cloud = self.cloud.select(idx);
        match &self.weights {
            None => EmpiricalMeasure::uniform(cloud),
            Some(w) => EmpiricalMeasure::weighted(cloud, idx.iter().map(|&i| w[i]).collect()),
        }
    }

    /// Push-forward of a cp1 measure under psi.
    pub fn to_c_inf(&self) -> Result<EmpiricalMeasure> {
        let pts = self.cp1_points()?;
        Ok(EmpiricalMeasure { cloud: PointCloud::CInf(pts.iter().map(psi).collect()), weights: self.weights.clone() })
    }

    /// Mass at the point at infinity (c_inf only).
    pub fn infinity_mass(&self) -> f64 {
        match &self.cloud {
            PointCloud::CInf(v) => v
                .iter()
                .enumerate()
                .filter(|(_, z)| z.is_infinite())
                .map(|(i, _)| self.weight(i))
                .sum(),
            _ => 0.0,
        }
    }

    /// Same points, cloud replaced by `f`; weights are kept.
    pub fn map_cloud(&self, cloud: PointCloud) -> Result<EmpiricalMeasure> {
        if cloud.len() != self.len() {
            return Err(Error::InvalidParameter("point count changed".into()));
        }
        Ok(EmpiricalMeasure { cloud, weights: self.weights.clone() })
    }
}

use super::empirical::{PointCloud, Space};
use crate::error::{Error, Result};
use crate::sl2::{ExtendedComplex, ProjPoint, RPoint};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Deepest supported level on cp1 (indices fit in 32 bits).
pub const CP1_MAX_LEVEL: u32 = 31;
/// Deepest supported level on c_inf.
pub const C_INF_MAX_LEVEL: u32 = 52;
/// Deepest supported level on rp1.
pub const RP1_MAX_LEVEL: u32 = 62;
/// Deepest supported level on the chart of G.
pub const G_CHART_MAX_LEVEL: u32 = 16;
const G_BITS: u32 = 21;
const G_OFFSET: i64 = 1 << (G_BITS - 1);
const ATOM: i64 = i64::MIN;

/// Cell of the level-n dyadic partition of one of the working spaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicCellId {
    pub space: Space,
    pub level: u32,
    key: u128,
}

fn pack2(i: i64, j: i64) -> u128 {
    ((i as u64 as u128) << 64) | (j as u64 as u128)
}

fn unpack2(k: u128) -> (i64, i64) {
    ((k >> 64) as u64 as i64, k as u64 as i64)
}

fn pack_g(idx: &[i64; 6]) -> u128 {
    idx.iter().fold(0u128, |acc, &i| (acc << G_BITS) | ((i + G_OFFSET) as u128))
}

fn unpack_g(k: u128) -> [i64; 6] {
    let mut out = [0i64; 6];
    for (t, o) in out.iter_mut().enumerate() {
        let shift = G_BITS * (5 - t as u32);
        *o = ((k >> shift) & ((1u128 << G_BITS) - 1)) as i64 - G_OFFSET;
    }
    out
}

pub(crate) fn max_level(space: Space) -> u32 {
    match space {
        Space::Cp1 => CP1_MAX_LEVEL,
        Space::CInf => C_INF_MAX_LEVEL,
        Space::Rp1 => RP1_MAX_LEVEL,
        Space::GChart => G_CHART_MAX_LEVEL,
    }
}

pub(crate) fn check_level(space: Space, n: u32) -> Result<()> {
    if n > max_level(space) {
        return Err(Error::InvalidParameter(format!(
            "level {n} exceeds the maximum {} for {space}",
            max_level(space)
        )));
    }
    Ok(())
}

fn scaled_floor(x: f64, n: u32) -> i64 {
    let v = (x * 2f64.powi(n as i32)).floor();
    if v >= i64::MAX as f64 {
        i64::MAX
    } else if v <= (ATOM + 1) as f64 || v.is_nan() {
        ATOM + 1
    } else {
        v as i64
    }
}

/// Chart bit and coordinate w with |w| <= 1; ties go to chart 0.
pub fn cp1_chart(p: &ProjPoint) -> (u8, crate::sl2::C64) {
    let (z1, z2) = p.coords();
    if z1.norm() >= z2.norm() {
        (0, z2 / z1)
    } else {
        (1, z1 / z2)
    }
}

pub(crate) fn key_cp1(p: &ProjPoint, n: u32) -> u128 {
    let (chart, w) = cp1_chart(p);
    let top = (1i64 << n) - 1;
    let f = 2f64.powi(n as i32 - 1);
    let i = (((w.re + 1.0) * f).floor() as i64).clamp(0, top);
    let j = (((w.im + 1.0) * f).floor() as i64).clamp(0, top);
    ((chart as u128) << 64) | ((i as u128) << 32) | j as u128
}

pub(crate) fn key_c_inf(z: &ExtendedComplex, n: u32) -> u128 {
    match z {
        ExtendedComplex::Infinity => pack2(ATOM, ATOM),
        ExtendedComplex::Finite(z) => pack2(scaled_floor(z.re, n), scaled_floor(z.im, n)),
    }
}

pub(crate) fn atom_key() -> u128 {
    pack2(ATOM, ATOM)
}

pub(crate) fn key_rp1(x: &RPoint, n: u32) -> u128 {
    let top = (1u128 << n) - 1;
    let v = (x.angle() / PI * 2f64.powi(n as i32)).floor();
    if v <= 0.0 {
        0
    } else {
        (v as u128).min(top)
    }
}

pub(crate) fn key_g(x: &[f64; 6], n: u32) -> Result<u128> {
    let mut idx = [0i64; 6];
    for (o, &c) in idx.iter_mut().zip(x.iter()) {
        let v = (c * 2f64.powi(n as i32)).floor();
        if !(v >= -(G_OFFSET as f64) && v < G_OFFSET as f64) {
            return Err(Error::ChartDomain);
        }
        *o = v as i64;
    }
    Ok(pack_g(&idx))
}

/// Key of the ancestor `d` levels up.
pub(crate) fn parent_key(space: Space, key: u128, d: u32) -> u128 {
    if d == 0 {
        return key;
    }
    match space {
        Space::Cp1 => {
            let chart = key >> 64;
            let i = (key >> 32) & 0xffff_ffff;
            let j = key & 0xffff_ffff;
            (chart << 64) | ((i >> d) << 32) | (j >> d)
        }
        Space::CInf => {
            let (i, j) = unpack2(key);
            if i == ATOM && j == ATOM {
                key
            } else {
                let d = d.min(63);
                pack2((i >> d).max(ATOM + 1), (j >> d).max(ATOM + 1))
            }
        }
        Space::Rp1 => key >> d.min(127),
        Space::GChart => {
            let mut idx = unpack_g(key);
            for i in idx.iter_mut() {
                *i >>= d;
            }
            pack_g(&idx)
        }
    }
}

/// Keys of all points of a cloud at level n, in point order.
pub(crate) fn cloud_keys(cloud: &PointCloud, n: u32) -> Result<Vec<u128>> {
    check_level(cloud.space(), n)?;
    Ok(match cloud {
        PointCloud::Cp1(v) => v.par_iter().map(|p| key_cp1(p, n)).collect(),
        PointCloud::CInf(v) => v.par_iter().map(|z| key_c_inf(z, n)).collect(),
        PointCloud::Rp1(v) => v.par_iter().map(|x| key_rp1(x, n)).collect(),
        PointCloud::GChart(v) => v.par_iter().map(|x| key_g(x, n)).collect::<Result<Vec<_>>>()?,
    })
}

impl DyadicCellId {
    pub(crate) fn from_key(space: Space, level: u32, key: u128) -> Self {
        DyadicCellId { space, level, key }
    }

    pub fn key(&self) -> u128 {
        self.key
    }

    pub fn cp1(p: &ProjPoint, n: u32) -> Result<Self> {
        check_level(Space::Cp1, n)?;
        Ok(Self::from_key(Space::Cp1, n, key_cp1(p, n)))
    }

    pub fn c_inf(z: &ExtendedComplex, n: u32) -> Result<Self> {
        check_level(Space::CInf, n)?;
        Ok(Self::from_key(Space::CInf, n, key_c_inf(z, n)))
    }

    pub fn rp1(x: &RPoint, n: u32) -> Result<Self> {
        check_level(Space::Rp1, n)?;
        Ok(Self::from_key(Space::Rp1, n, key_rp1(x, n)))
    }

    pub fn g_chart(x: &[f64; 6], n: u32) -> Result<Self> {
        check_level(Space::GChart, n)?;
        Ok(Self::from_key(Space::GChart, n, key_g(x, n)?))
    }

    /// The reserved cell {infinity} of the c_inf partition.
    pub fn is_atom(&self) -> bool {
        self.space == Space::CInf && self.key == atom_key()
    }

    /// Chart bit for cp1 cells.
    pub fn chart(&self) -> Option<u8> {
        (self.space == Space::Cp1).then_some((self.key >> 64) as u8)
    }

    /// Per-axis integer indices; empty for the atom.
    pub fn indices(&self) -> Vec<i64> {
        match self.space {
            Space::Cp1 => vec![((self.key >> 32) & 0xffff_ffff) as i64, (self.key & 0xffff_ffff) as i64],
            Space::CInf => {
                if self.is_atom() {
                    vec![]
                } else {
                    let (i, j) = unpack2(self.key);
                    vec![i, j]
                }
            }
            Space::Rp1 => vec![self.key as i64],
            Space::GChart => unpack_g(self.key).to_vec(),
        }
    }

    /// The cell containing this one at a coarser level.
    pub fn ancestor(&self, level: u32) -> Result<Self> {
        if level > self.level {
            return Err(Error::InvalidParameter("ancestor level must not exceed the cell level".into()));
        }
        Ok(Self::from_key(self.space, level, parent_key(self.space, self.key, self.level - level)))
    }
}

/// Cell of the i-th point of a cloud.
pub fn dyadic_cell(cloud: &PointCloud, i: usize, n: u32) -> Result<DyadicCellId> {
    match cloud {
        PointCloud::Cp1(v) => DyadicCellId::cp1(&v[i], n),
        PointCloud::CInf(v) => DyadicCellId::c_inf(&v[i], n),
        PointCloud::Rp1(v) => DyadicCellId::rp1(&v[i], n),
        PointCloud::GChart(v) => DyadicCellId::g_chart(&v[i], n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Streams;
    use crate::sl2::C64;
    use rand::Rng;

    #[test]
    fn c_inf_example_cell() {
        let c = DyadicCellId::c_inf(&ExtendedComplex::finite(0.3, 0.7), 1).unwrap();
        assert_eq!(c.indices(), vec![0, 1]);
        let neg = DyadicCellId::c_inf(&ExtendedComplex::finite(-0.3, -2.5), 2).unwrap();
        assert_eq!(neg.indices(), vec![-2, -10]);
        assert_eq!(neg.ancestor(0).unwrap().indices(), vec![-1, -3]);
    }

    #[test]
    fn infinity_is_the_atom_at_every_level() {
        for n in [0, 3, 30] {
            let c = DyadicCellId::c_inf(&ExtendedComplex::Infinity, n).unwrap();
            assert!(c.is_atom());
            assert!(c.indices().is_empty());
            assert!(c.ancestor(0).unwrap().is_atom());
        }
    }

    #[test]
    fn cp1_refinement_floor_halves() {
        let mut rng = Streams::new(3).rng(0);
        for _ in 0..100_000 {
            let p = ProjPoint::new(
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            )
            .unwrap();
            let n = rng.random_range(0..CP1_MAX_LEVEL);
            let fine = DyadicCellId::cp1(&p, n + 1).unwrap();
            let coarse = DyadicCellId::cp1(&p, n).unwrap();
            assert_eq!(fine.ancestor(n).unwrap(), coarse);
            assert_eq!(fine.chart(), coarse.chart());
            let fi = fine.indices();
            assert_eq!(vec![fi[0] / 2, fi[1] / 2], coarse.indices());
        }
    }

    #[test]
    fn cp1_level_zero_has_one_cell_per_chart() {
        let a = DyadicCellId::cp1(&ProjPoint::e1(), 0).unwrap();
        let b = DyadicCellId::cp1(&ProjPoint::e2(), 0).unwrap();
        assert_eq!(a.indices(), vec![0, 0]);
        assert_eq!(b.indices(), vec![0, 0]);
        assert_ne!(a, b);
    }

    #[test]
    fn rp1_and_g_chart_cells() {
        let x = RPoint::from_angle(PI * 0.75);
        assert_eq!(DyadicCellId::rp1(&x, 2).unwrap().indices(), vec![3]);
        let g = [0.1, -0.2, 0.3, -0.4, 0.5, -0.6];
        let c = DyadicCellId::g_chart(&g, 4).unwrap();
        assert_eq!(c.indices(), vec![1, -4, 4, -7, 8, -10]);
        assert_eq!(c.ancestor(2).unwrap(), DyadicCellId::g_chart(&g, 2).unwrap());
        assert_eq!(DyadicCellId::g_chart(&[1e6, 0.0, 0.0, 0.0, 0.0, 0.0], 4), Err(Error::ChartDomain));
    }
}

/// Position of the i-th point inside a cp1 or c_inf cell, scaled to [0,1)^2.
pub fn normalized_in_cell(cloud: &PointCloud, i: usize, cell: &DyadicCellId) -> Option<(f64, f64)> {
    let idx = cell.indices();
    match cloud {
        PointCloud::Cp1(v) => {
            let (_, w) = cp1_chart(&v[i]);
            let side = 2f64.powi(1 - cell.level as i32);
            Some(((w.re + 1.0) / side - idx[0] as f64, (w.im + 1.0) / side - idx[1] as f64))
        }
        PointCloud::CInf(v) => {
            let z = v[i].as_finite()?;
            let s = 2f64.powi(cell.level as i32);
            Some((z.re * s - idx[0] as f64, z.im * s - idx[1] as f64))
        }
        _ => None,
    }
}

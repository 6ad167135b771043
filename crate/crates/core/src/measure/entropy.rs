use super::dyadic::{atom_key, check_level, cloud_keys, parent_key, DyadicCellId};
use super::empirical::{EmpiricalMeasure, PointCloud, Space};
use crate::assumptions::shannon_bits;
use crate::error::{Error, Result};
use crate::sl2::{proj_line, ExtendedComplex, RPoint};
use rayon::prelude::*;

/// Occupied cells of one level with their masses, sorted by key.
#[derive(Clone, Debug, PartialEq)]
pub struct CellTable {
    pub space: Space,
    pub level: u32,
    pub keys: Vec<u128>,
    pub counts: Vec<u64>,
    pub masses: Vec<f64>,
    /// Number of points that entered the table.
    pub samples: usize,
    /// Mass at infinity that was excluded (c_inf only).
    pub infinity_mass: f64,
}

impl CellTable {
    pub fn occupied(&self) -> usize {
        self.keys.len()
    }

    pub fn entropy(&self) -> f64 {
        shannon_bits(self.masses.iter().copied())
    }

    pub fn cell(&self, i: usize) -> DyadicCellId {
        DyadicCellId::from_key(self.space, self.level, self.keys[i])
    }

    fn mass_of(&self, key: u128) -> Option<f64> {
        self.keys.binary_search(&key).ok().map(|i| self.masses[i])
    }

    /// The table of a coarser level obtained by merging children.
    pub fn coarsen(&self, level: u32) -> Result<CellTable> {
        if level > self.level {
            return Err(Error::InvalidParameter("conditioning level must not exceed the level".into()));
        }
        let d = self.level - level;
        let mut pairs: Vec<(u128, u64, f64)> = (0..self.keys.len())
            .map(|i| (parent_key(self.space, self.keys[i], d), self.counts[i], self.masses[i]))
            .collect();
        pairs.sort_by_key(|p| p.0);
        let mut out = CellTable { level, keys: vec![], counts: vec![], masses: vec![], ..self.clone() };
        for (k, c, m) in pairs {
            if out.keys.last() == Some(&k) {
                *out.counts.last_mut().unwrap() += c;
                *out.masses.last_mut().unwrap() += m;
            } else {
                out.keys.push(k);
                out.counts.push(c);
                out.masses.push(m);
            }
        }
        Ok(out)
    }

    /// H(fine | coarse) = sum over fine cells of -w log2(w / W(parent)).
    pub fn conditional_entropy(&self, coarse: &CellTable) -> f64 {
        let d = self.level - coarse.level;
        shannon_bits_ratio(self.keys.iter().zip(self.masses.iter()).map(|(k, &w)| {
            let parent = coarse.mass_of(parent_key(self.space, *k, d)).unwrap_or(w);
            (w, parent)
        }))
    }
}

fn shannon_bits_ratio(it: impl Iterator<Item = (f64, f64)>) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for (w, parent) in it {
        if w > 0.0 && parent > 0.0 {
            let t = -w * (w / parent).log2();
            let u = s + t;
            if s.abs() >= t.abs() {
                c += (s - u) + t;
            } else {
                c += (t - u) + s;
            }
            s = u;
        }
    }
    (s + c).max(0.0)
}

/// Occupied level-n cells of a measure. On c_inf the atom at infinity is
/// excluded and the remaining mass renormalized.
pub fn cell_table(m: &EmpiricalMeasure, n: u32) -> Result<CellTable> {
    let space = m.space();
    check_level(space, n)?;
    let keys = cloud_keys(m.cloud(), n)?;
    let atom = (space == Space::CInf).then(atom_key);
    let mut table = CellTable {
        space,
        level: n,
        keys: vec![],
        counts: vec![],
        masses: vec![],
        samples: 0,
        infinity_mass: 0.0,
    };
    match m.explicit_weights() {
        None => {
            let mut keys = keys;
            keys.par_sort_unstable();
            let mut inf = 0usize;
            for k in keys {
                if Some(k) == atom {
                    inf += 1;
                } else if table.keys.last() == Some(&k) {
                    *table.counts.last_mut().unwrap() += 1;
                } else {
                    table.keys.push(k);
                    table.counts.push(1);
                }
            }
            let finite = m.len() - inf;
            table.samples = finite;
            table.infinity_mass = inf as f64 / m.len() as f64;
            table.masses = table.counts.iter().map(|&c| c as f64 / finite as f64).collect();
        }
        Some(w) => {
            let mut pairs: Vec<(u128, usize)> = keys.into_iter().enumerate().map(|(i, k)| (k, i)).collect();
            pairs.par_sort_unstable();
            let mut inf = 0.0;
            let mut raw = vec![];
            for (k, i) in pairs {
                if Some(k) == atom {
                    inf += w[i];
                    continue;
                }
                table.samples += 1;
                if table.keys.last() == Some(&k) {
                    *table.counts.last_mut().unwrap() += 1;
                    *raw.last_mut().unwrap() += w[i];
                } else {
                    table.keys.push(k);
                    table.counts.push(1);
                    raw.push(w[i]);
                }
            }
            let total: f64 = raw.iter().sum();
            table.infinity_mass = inf;
            table.masses = raw.into_iter().map(|x| if total > 0.0 { x / total } else { 0.0 }).collect();
        }
    }
    if table.samples == 0 {
        return Err(Error::InfinityMass);
    }
    Ok(table)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyReport {
    pub space: Space,
    pub level: u32,
    pub cond: Option<u32>,
    /// Entropy in bits.
    pub entropy: f64,
    /// Entropy divided by the number of levels it spans.
    pub normalized: f64,
    pub samples: usize,
    pub occupied: usize,
    pub infinity_mass: f64,
    /// Set when occupied cells exceed samples / 10.
    pub undersampled: bool,
    /// Miller-Madow correction (occupied - 1) / (2 N ln 2), attached as a note.
    pub miller_madow: f64,
}

impl EntropyReport {
    pub fn bias_note(&self) -> Option<String> {
        self.undersampled.then(|| {
            format!(
                "{} occupied cells for {} samples; plug-in entropy biased low by about {:.3e} bits",
                self.occupied, self.samples, self.miller_madow
            )
        })
    }
}

fn report(table: &CellTable, cond: Option<u32>, entropy: f64) -> EntropyReport {
    let span = match cond {
        Some(c) => table.level - c,
        None => table.level,
    };
    let occupied = table.occupied();
    EntropyReport {
        space: table.space,
        level: table.level,
        cond,
        entropy,
        normalized: if span > 0 { entropy / span as f64 } else { entropy },
        samples: table.samples,
        occupied,
        infinity_mass: table.infinity_mass,
        undersampled: occupied * 10 > table.samples,
        miller_madow: (occupied as f64 - 1.0) / (2.0 * table.samples as f64 * std::f64::consts::LN_2),
    }
}

/// H(m, D_n), or H(m, D_n | D_cond) when `cond` is given.
pub fn entropy(m: &EmpiricalMeasure, n: u32, cond: Option<u32>) -> Result<EntropyReport> {
    let table = cell_table(m, n)?;
    Ok(entropy_of_table(&table, cond)?)
}

pub fn entropy_of_table(table: &CellTable, cond: Option<u32>) -> Result<EntropyReport> {
    match cond {
        None => Ok(report(table, None, table.entropy())),
        Some(c) => {
            let coarse = table.coarsen(c)?;
            Ok(report(table, Some(c), table.conditional_entropy(&coarse)))
        }
    }
}

/// A level-i component: the normalized restriction to one occupied cell.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub cell: DyadicCellId,
    pub mass: f64,
    pub measure: EmpiricalMeasure,
}

/// Index groups of the occupied level-i cells, in key order.
pub(crate) fn cell_groups(m: &EmpiricalMeasure, i: u32) -> Result<Vec<(u128, Vec<usize>)>> {
    let keys = cloud_keys(m.cloud(), i)?;
    let mut order: Vec<(u128, usize)> = keys.into_iter().enumerate().map(|(j, k)| (k, j)).collect();
    order.par_sort_unstable();
    let mut out: Vec<(u128, Vec<usize>)> = vec![];
    for (k, j) in order {
        match out.last_mut() {
            Some((lk, v)) if *lk == k => v.push(j),
            _ => out.push((k, vec![j])),
        }
    }
    Ok(out)
}

/// Level-i components with their masses; masses sum to one.
pub fn components(m: &EmpiricalMeasure, i: u32) -> Result<Vec<Component>> {
    let space = m.space();
    cell_groups(m, i)?
        .into_iter()
        .map(|(k, idx)| {
            let mass = idx.iter().map(|&j| m.weight(j)).sum();
            Ok(Component { cell: DyadicCellId::from_key(space, i, k), mass, measure: m.restrict(&idx)? })
        })
        .collect()
}

/// Entropy summary of one level-i component at level i + k.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentEntropy {
    pub cell: DyadicCellId,
    /// Mass of the component within the finite part of the measure.
    pub mass: f64,
    pub samples: u64,
    pub occupied: usize,
    /// H(component, D_{i+k}) in bits.
    pub entropy: f64,
}

impl ComponentEntropy {
    pub fn undersampled(&self) -> bool {
        self.occupied as u64 * 10 > self.samples
    }
}

/// H(m_{x,i}, D_{i+k}) for every occupied level-i cell, from one table.
pub fn component_entropies(m: &EmpiricalMeasure, i: u32, k: u32) -> Result<Vec<ComponentEntropy>> {
    let fine = cell_table(m, i + k)?;
    let mut rows: Vec<(u128, u128, f64, u64)> = (0..fine.keys.len())
        .map(|j| (parent_key(fine.space, fine.keys[j], k), fine.keys[j], fine.masses[j], fine.counts[j]))
        .collect();
    rows.sort_unstable_by_key(|r| (r.0, r.1));
    let mut out = vec![];
    let mut s = 0;
    while s < rows.len() {
        let mut e = s;
        while e < rows.len() && rows[e].0 == rows[s].0 {
            e += 1;
        }
        let mass: f64 = rows[s..e].iter().map(|r| r.2).sum();
        let samples = rows[s..e].iter().map(|r| r.3).sum();
        let entropy = if mass > 0.0 { shannon_bits_ratio(rows[s..e].iter().map(|r| (r.2, mass))) / mass } else { 0.0 };
        out.push(ComponentEntropy {
            cell: DyadicCellId::from_key(fine.space, i, rows[s].0),
            mass,
            samples,
            occupied: e - s,
            entropy,
        });
        s = e;
    }
    Ok(out)
}

/// Push-forward under the orthogonal projection onto the line x.
pub fn project_component(m: &EmpiricalMeasure, x: &RPoint) -> Result<EmpiricalMeasure> {
    let pts = m.c_inf_points()?;
    let out = pts
        .iter()
        .map(|z| match z {
            ExtendedComplex::Finite(z) => Ok(ExtendedComplex::Finite(proj_line(x, *z))),
            ExtendedComplex::Infinity => Err(Error::InfinityMass),
        })
        .collect::<Result<Vec<_>>>()?;
    m.map_cloud(PointCloud::CInf(out))
}

/// Total variation distance between the level-n cell masses of two measures.
pub fn level_distance(a: &EmpiricalMeasure, b: &EmpiricalMeasure, n: u32) -> Result<f64> {
    if a.space() != b.space() {
        return Err(Error::InvalidParameter("measures live on different spaces".into()));
    }
    let (ta, tb) = (cell_table(a, n)?, cell_table(b, n)?);
    let (mut i, mut j) = (0, 0);
    let mut s = 0.0;
    while i < ta.keys.len() || j < tb.keys.len() {
        let ka = ta.keys.get(i).copied();
        let kb = tb.keys.get(j).copied();
        match (ka, kb) {
            (Some(x), Some(y)) if x == y => {
                s += (ta.masses[i] - tb.masses[j]).abs();
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                s += ta.masses[i];
                i += 1;
            }
            (Some(_), None) => {
                s += ta.masses[i];
                i += 1;
            }
            _ => {
                s += tb.masses[j];
                j += 1;
            }
        }
    }
    Ok(0.5 * s)
}

use crate::error::{Error, Result};
use crate::rng::fnv1a;
use crate::sl2::{ExactSl2, Sl2};

/// Finite generating set with a positive probability vector.
#[derive(Clone, Debug)]
pub struct System {
    name: String,
    generators: Vec<Sl2>,
    exact: Option<Vec<ExactSl2>>,
    probs: Vec<f64>,
}

pub const MAX_GENERATORS: usize = 256;

fn check_probs(n: usize, probs: &[f64]) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidSystem("no generators".into()));
    }
    if n > MAX_GENERATORS {
        return Err(Error::InvalidSystem(format!("at most {MAX_GENERATORS} generators")));
    }
    if probs.len() != n {
        return Err(Error::InvalidSystem(format!(
            "{} generators but {} probabilities",
            n,
            probs.len()
        )));
    }
    if let Some(i) = probs.iter().position(|p| !(*p > 0.0) || !p.is_finite()) {
        return Err(Error::InvalidSystem(format!("p[{i}] must be positive")));
    }
    let s: f64 = probs.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidSystem(format!("probabilities sum to {s}")));
    }
    Ok(())
}

impl System {
    pub fn new(name: &str, generators: Vec<Sl2>, probs: Vec<f64>) -> Result<Self> {
        check_probs(generators.len(), &probs)?;
        for (i, g) in generators.iter().enumerate() {
            let [a, b, c, d] = g.entries();
            Sl2::new(a, b, c, d, i)?;
        }
        Ok(System { name: name.to_string(), generators, exact: None, probs })
    }

    pub fn uniform(name: &str, generators: Vec<Sl2>) -> Result<Self> {
        let n = generators.len().max(1);
        Self::new(name, generators, vec![1.0 / n as f64; n])
    }

    /// Exact-capable system; float generators are the rounded exact ones.
    pub fn new_exact(name: &str, exact: Vec<ExactSl2>, probs: Vec<f64>) -> Result<Self> {
        check_probs(exact.len(), &probs)?;
        let generators = exact.iter().map(|g| g.to_float()).collect();
        Ok(System { name: name.to_string(), generators, exact: Some(exact), probs })
    }

    pub fn uniform_exact(name: &str, exact: Vec<ExactSl2>) -> Result<Self> {
        let n = exact.len().max(1);
        Self::new_exact(name, exact, vec![1.0 / n as f64; n])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Sl2] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &Sl2 {
        &self.generators[i]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact_generators(&self) -> Option<&[ExactSl2]> {
        self.exact.as_deref()
    }

    /// Drops exact entries so all computations run in floating point.
    pub fn into_float(mut self) -> Self {
        self.exact = None;
        self
    }

    /// Shannon entropy of p in bits.
    pub fn entropy_bits(&self) -> f64 {
        self.probs.iter().map(|p| -p * p.log2()).sum()
    }

    /// max_i ||g_i||^2.
    pub fn max_norm_sqr(&self) -> f64 {
        self.generators.iter().map(|g| g.op_norm().powi(2)).fold(1.0, f64::max)
    }

    /// System generated by the transposes, same probabilities.
    pub fn transpose(&self) -> System {
        System {
            name: format!("{}^T", self.name),
            generators: self.generators.iter().map(|g| g.transpose()).collect(),
            exact: None,
            probs: self.probs.clone(),
        }
    }

    /// Conjugate system h g_i h^-1.
    pub fn conjugate(&self, h: &Sl2) -> System {
        let hi = h.inverse();
        System {
            name: format!("{}^h", self.name),
            generators: self.generators.iter().map(|g| h.mul(g).mul(&hi)).collect(),
            exact: None,
            probs: self.probs.clone(),
        }
    }

    /// Short stable identifier: name plus a hash of entries and probabilities.
    pub fn fingerprint(&self) -> String {
        let mut bytes = Vec::new();
        for g in &self.generators {
            for z in g.entries() {
                bytes.extend_from_slice(&z.re.to_bits().to_le_bytes());
                bytes.extend_from_slice(&z.im.to_bits().to_le_bytes());
            }
        }
        for p in &self.probs {
            bytes.extend_from_slice(&p.to_bits().to_le_bytes());
        }
        format!("{}#{:016x}", self.name, fnv1a(&bytes))
    }
}

use super::system::System;
use super::word::{all_words, Word, WordSet};
use crate::error::{Error, Result};
use crate::sl2::{ExactSl2, Sl2, DEFAULT_EXACT_BITS_CAP};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::cmp::Ordering;

/// Compares chi_g with an integer threshold n.
///
/// Exact mode uses sigma^2 + sigma^-2 = F^2, so chi > n iff F^2 > 2^n + 2^-n.
pub(crate) enum Threshold {
    Float(f64),
    Exact(BigRational),
}

impl Threshold {
    pub(crate) fn new(n: u32, exact: bool) -> Self {
        if exact {
            let p = BigInt::from(1) << (n as usize);
            let t = BigRational::from_integer(p.clone()) + BigRational::new(BigInt::from(1), p);
            Threshold::Exact(t)
        } else {
            Threshold::Float(n as f64)
        }
    }

    pub(crate) fn cmp_float(&self, g: &Sl2) -> Ordering {
        let n = match self {
            Threshold::Float(n) => *n,
            Threshold::Exact(_) => unreachable!(),
        };
        let chi = 2.0 * g.op_norm().log2();
        if (chi - n).abs() <= 1e-12 * n.max(1.0) {
            Ordering::Equal
        } else if chi > n {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    pub(crate) fn cmp_exact(&self, g: &ExactSl2) -> Ordering {
        match self {
            Threshold::Exact(t) => g.frobenius_sqr().cmp(t),
            Threshold::Float(_) => unreachable!(),
        }
    }
}

struct Node {
    word: Word,
    g: Sl2,
    exact: Option<ExactSl2>,
    p: f64,
}

fn extend(node: &Node, block: &Node) -> Result<Node> {
    let mut word = node.word.clone();
    word.extend_from_slice(&block.word);
    let exact = match (&node.exact, &block.exact) {
        (Some(a), Some(b)) => Some(a.mul_capped(b, DEFAULT_EXACT_BITS_CAP)?),
        _ => None,
    };
    Ok(Node { word, g: node.g.mul(&block.g), exact, p: node.p * block.p })
}

fn blocks(sys: &System, len: usize) -> Result<Vec<Node>> {
    let root = Node {
        word: Vec::new(),
        g: Sl2::identity(),
        exact: sys.exact_generators().map(|_| ExactSl2::identity()),
        p: 1.0,
    };
    let mut out = vec![root];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * sys.len());
        for n in &out {
            for i in 0..sys.len() {
                let letter = Node {
                    word: vec![i as u8],
                    g: *sys.generator(i),
                    exact: sys.exact_generators().map(|e| e[i].clone()),
                    p: sys.probs()[i],
                };
                next.push(extend(n, &letter)?);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Psi(j, l; n): words u0 u1 ... us with u0 in Lambda^j, ui in Lambda^l,
/// chi of the full word > n and chi of every proper block prefix <= n.
pub fn enumerate_first_passage(sys: &System, j: usize, l: usize, n: u32, cap: usize) -> Result<WordSet> {
    if l == 0 {
        return Err(Error::InvalidParameter("block length l must be positive".into()));
    }
    let exact = sys.is_exact();
    let thr = Threshold::new(n, exact);
    let block = blocks(sys, l)?;
    let mut frontier = blocks(sys, j)?;
    let mut out = WordSet::default();
    let mut generated = frontier.len();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for node in frontier {
            let ord = match &node.exact {
                Some(e) => thr.cmp_exact(e),
                None => thr.cmp_float(&node.g),
            };
            if ord == Ordering::Equal {
                out.ties += 1;
            }
            if ord == Ordering::Greater {
                out.words.push(node.word);
                out.weights.push(node.p);
            } else {
                for b in &block {
                    next.push(extend(&node, b)?);
                }
                generated += block.len();
            }
            if generated > cap {
                return Err(Error::CapExceeded { cap });
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// max over Lambda^j and Lambda^l of ||g_v||: bounds ||g_u|| / 2^(n/2) on Psi(j, l; n).
pub fn block_norm_constant(sys: &System, j: usize, l: usize) -> f64 {
    let mx = |len: usize| {
        all_words(sys.len(), len)
            .iter()
            .map(|w| super::word::product_of_word(sys, w).op_norm())
            .fold(1.0, f64::max)
    };
    mx(j).max(mx(l))
}

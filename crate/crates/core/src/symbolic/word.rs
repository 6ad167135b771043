use super::system::System;
use crate::error::{Error, Result};
use crate::sl2::{ExactSl2, ScaledMat, Sl2, DEFAULT_EXACT_BITS_CAP};

/// Finite word over the generator alphabet.
pub type Word = Vec<u8>;

/// Collection of words with their probabilities p_u.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WordSet {
    pub words: Vec<Word>,
    pub weights: Vec<f64>,
    /// Words whose chi equalled the threshold (resolved by strict comparison).
    pub ties: usize,
}

impl WordSet {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        self.words.iter().any(|x| x.as_slice() == w)
    }
}

pub fn product_of_word(sys: &System, u: &[u8]) -> Sl2 {
    u.iter().fold(Sl2::identity(), |acc, &i| acc.mul(sys.generator(i as usize)))
}

pub fn product_of_word_exact(sys: &System, u: &[u8]) -> Result<ExactSl2> {
    let gens = sys.exact_generators().ok_or(Error::ExactUnavailable)?;
    let mut acc = ExactSl2::identity();
    for &i in u {
        acc = acc.mul_capped(&gens[i as usize], DEFAULT_EXACT_BITS_CAP)?;
    }
    Ok(acc)
}

pub fn scaled_product(sys: &System, u: &[u8]) -> ScaledMat {
    let mut p = ScaledMat::identity();
    for &i in u {
        p.mul_right(sys.generator(i as usize));
    }
    p
}

/// chi_u = 2 log2 ||g_u||.
pub fn chi_word(sys: &System, u: &[u8]) -> f64 {
    scaled_product(sys, u).chi().max(0.0)
}

pub fn word_prob(sys: &System, u: &[u8]) -> f64 {
    u.iter().map(|&i| sys.probs()[i as usize]).product()
}

/// All words of length `n` in lexicographic order.
pub fn all_words(alphabet: usize, n: usize) -> Vec<Word> {
    let mut out = vec![Vec::with_capacity(n)];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * alphabet);
        for w in &out {
            for i in 0..alphabet {
                let mut v = w.clone();
                v.push(i as u8);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sanov() -> System {
        System::uniform(
            "sanov",
            vec![Sl2::real(1.0, 2.0, 0.0, 1.0).unwrap(), Sl2::real(1.0, 0.0, 2.0, 1.0).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn products_by_hand() {
        let s = sanov();
        let g = product_of_word(&s, &[0, 1]);
        assert_eq!(g, Sl2::real(5.0, 2.0, 2.0, 1.0).unwrap());
        assert_eq!(product_of_word(&s, &[]), Sl2::identity());
        assert!(product_of_word_exact(&s, &[0]).is_err());
    }

    #[test]
    fn chi_of_generator() {
        let s = sanov();
        let expected = 2.0 * (1.0 + 2f64.sqrt()).log2();
        assert!((chi_word(&s, &[0]) - expected).abs() < 1e-14);
        assert_eq!(chi_word(&s, &[]), 0.0);
    }

    #[test]
    fn word_listing() {
        let w = all_words(3, 2);
        assert_eq!(w.len(), 9);
        assert_eq!(w[5], vec![1, 2]);
    }
}

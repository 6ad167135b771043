use super::system::System;
use super::word::Word;
use crate::error::{Error, Result};
use crate::sl2::ScaledMat;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

/// Default guard on the length of first-passage samples.
pub const DEFAULT_MAX_LEN: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WordKind {
    /// i.i.d. letters of fixed length.
    Fixed(usize),
    /// A random element of Psi(j, l; n): blocks are drawn until chi > n.
    FirstPassage { j: usize, l: usize, n: f64, max_len: usize },
}

/// Letter sampler for the probability vector of a system.
#[derive(Clone, Debug)]
pub struct LetterSampler {
    dist: WeightedIndex<f64>,
}

impl LetterSampler {
    pub fn new(sys: &System) -> Self {
        LetterSampler { dist: WeightedIndex::new(sys.probs()).expect("validated probabilities") }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.dist.sample(rng)
    }
}

pub fn sample_word<R: Rng + ?Sized>(sys: &System, kind: WordKind, rng: &mut R) -> Result<Word> {
    let letters = LetterSampler::new(sys);
    match kind {
        WordKind::Fixed(n) => Ok((0..n).map(|_| letters.sample(rng) as u8).collect()),
        WordKind::FirstPassage { j, l, n, max_len } => {
            if l == 0 {
                return Err(Error::InvalidParameter("block length l must be positive".into()));
            }
            let mut w = Vec::new();
            let mut p = ScaledMat::identity();
            let push = |w: &mut Word, p: &mut ScaledMat, rng: &mut R| {
                let i = letters.sample(rng);
                w.push(i as u8);
                p.mul_right(sys.generator(i));
            };
            for _ in 0..j {
                push(&mut w, &mut p, rng);
            }
            while p.chi() <= n {
                if w.len() + l > max_len {
                    return Err(Error::Stall { target: n, max_len });
                }
                for _ in 0..l {
                    push(&mut w, &mut p, rng);
                }
            }
            Ok(w)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::Sl2;
    use crate::symbolic::word::chi_word;
    use rand::SeedableRng;

    #[test]
    fn first_passage_samples_cross_threshold() {
        let s = System::uniform(
            "s",
            vec![Sl2::real(1.0, 2.0, 0.0, 1.0).unwrap(), Sl2::real(1.0, 0.0, 2.0, 1.0).unwrap()],
        )
        .unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let w = sample_word(&s, WordKind::FirstPassage { j: 1, l: 2, n: 10.0, max_len: 1000 }, &mut rng)
                .unwrap();
            assert_eq!((w.len() - 1) % 2, 0);
            assert!(chi_word(&s, &w) > 10.0);
            assert!(chi_word(&s, &w[..w.len() - 2]) <= 10.0 || w.len() == 1);
        }
    }

    #[test]
    fn unitary_system_stalls() {
        let s = System::uniform("r", vec![Sl2::diag(crate::sl2::C64::from_polar(1.0, 0.2))]).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let e = sample_word(&s, WordKind::FirstPassage { j: 0, l: 1, n: 3.0, max_len: 100 }, &mut rng);
        assert!(matches!(e, Err(Error::Stall { .. })));
    }
}

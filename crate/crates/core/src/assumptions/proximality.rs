use super::circles::find_fixed_circles;
use crate::sl2::{op_norm_general, ScaledMat, Sl2};
use crate::symbolic::{all_words, product_of_word, product_of_word_exact, LetterSampler, System, Word};
use crate::Check;
use num_rational::BigRational;
use rand::Rng;

/// log2 of the norm that certifies unboundedness.
pub const UNBOUNDED_LOG2: f64 = 32.0;
/// Margin above 2 for the loxodromic witness in float mode.
pub const TRACE_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct ProximalityResult {
    /// Non-compactness: some product has norm above 2^32.
    pub verdict: Check,
    /// Largest log2 ||g_u|| reached.
    pub max_log2_norm: f64,
    /// A product with |trace| > 2 (strict proximality).
    pub strict: Check,
    pub witness: Option<Word>,
    pub witness_trace: Option<f64>,
}

/// Exact traces are only computed when the float trace is within this of 2,
/// or when the float product is too large for its trace to be trusted.
const EXACT_SCREEN: f64 = 1e-6;
const EXACT_SCREEN_MAX_FROBENIUS: f64 = 1e6;

fn loxodromic(sys: &System, w: &[u8]) -> Option<f64> {
    let g = product_of_word(sys, w);
    let tf = g.trace().norm();
    if sys.is_exact() && g.frobenius_sqr() < EXACT_SCREEN_MAX_FROBENIUS && (tf - 2.0).abs() > EXACT_SCREEN {
        return (tf > 2.0).then_some(tf);
    }
    if sys.is_exact() {
        let g = product_of_word_exact(sys, w).ok()?;
        let t = g.trace();
        let four = BigRational::from_integer(4.into());
        if t.norm_sqr() > four {
            return Some(t.to_c64().norm());
        }
        return None;
    }
    if tf > 2.0 + TRACE_TOL {
        Some(tf)
    } else {
        None
    }
}

/// Searches random, greedy and repeatedly squared products up to `depth`
/// multiplications for growth, and short words for a loxodromic element.
pub fn check_proximality<R: Rng + ?Sized>(sys: &System, depth: usize, trials: usize, rng: &mut R) -> ProximalityResult {
    let mut best = 0.0f64;
    let mut best_mat = ScaledMat::identity();
    let letters = LetterSampler::new(sys);
    'trials: for _ in 0..trials {
        let mut p = ScaledMat::identity();
        for _ in 0..depth {
            p.mul_right(sys.generator(letters.sample(rng)));
            if p.log2_op_norm() > best {
                best = p.log2_op_norm();
                best_mat = p;
            }
            if best > UNBOUNDED_LOG2 {
                break 'trials;
            }
        }
    }
    if best <= UNBOUNDED_LOG2 {
        let mut p = ScaledMat::identity();
        for _ in 0..depth {
            let next = sys
                .generators()
                .iter()
                .map(|g| {
                    let mut q = p;
                    q.mul_right(g);
                    q
                })
                .max_by(|a, b| a.log2_op_norm().total_cmp(&b.log2_op_norm()))
                .expect("non-empty system");
            p = next;
            if p.log2_op_norm() > best {
                best = p.log2_op_norm();
                best_mat = p;
            }
            if best > UNBOUNDED_LOG2 {
                break;
            }
        }
    }
    if best <= UNBOUNDED_LOG2 && best > 1e-9 {
        // Squaring doubles word length per multiplication.
        let mut m = best_mat.mantissa();
        let mut e = best_mat.exponent() as f64;
        for _ in 0..depth {
            let g = Sl2::from_entries(m);
            let mut q = ScaledMat::from_sl2(&g);
            q.mul_right(&g);
            e = 2.0 * e + q.exponent() as f64;
            m = q.mantissa();
            let l = e + op_norm_general(&m).log2();
            if l > best {
                best = l;
            }
            if best > UNBOUNDED_LOG2 || !l.is_finite() {
                break;
            }
        }
    }
    let (verdict, strict_hint) = if best > UNBOUNDED_LOG2 {
        (Check::Pass, None)
    } else if find_fixed_circles(sys).has_definite_form() {
        (Check::Fail, Some(Check::Fail))
    } else {
        (Check::Inconclusive, None)
    };

    let mut witness = None;
    let mut witness_trace = None;
    let max_len = {
        let mut len = 0;
        let mut count = 1usize;
        while len < depth.min(24) && count.saturating_mul(sys.len()) <= 1 << 16 {
            count *= sys.len();
            len += 1;
        }
        len
    };
    // A compact group has no loxodromic element.
    let compact = strict_hint == Some(Check::Fail);
    'search: for len in 1..=if compact { 0 } else { max_len } {
        for w in all_words(sys.len(), len) {
            if let Some(t) = loxodromic(sys, &w) {
                witness = Some(w);
                witness_trace = Some(t);
                break 'search;
            }
        }
    }
    if witness.is_none() && !compact {
        for _ in 0..trials {
            let len = rng.random_range(1..=depth.clamp(1, 64));
            let w: Word = (0..len).map(|_| letters.sample(rng) as u8).collect();
            if let Some(t) = loxodromic(sys, &w) {
                witness = Some(w);
                witness_trace = Some(t);
                break;
            }
        }
    }
    let strict = if witness.is_some() {
        Check::Pass
    } else {
        strict_hint.unwrap_or(if verdict == Check::Pass { Check::Fail } else { Check::Inconclusive })
    };
    ProximalityResult { verdict, max_log2_norm: best, strict, witness, witness_trace }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::C64;
    use rand::SeedableRng;

    fn rng() -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(3)
    }

    #[test]
    fn sanov_witness_is_ab() {
        let s = System::uniform(
            "s",
            vec![Sl2::real(1.0, 2.0, 0.0, 1.0).unwrap(), Sl2::real(1.0, 0.0, 2.0, 1.0).unwrap()],
        )
        .unwrap();
        let r = check_proximality(&s, 64, 8, &mut rng());
        assert_eq!(r.verdict, Check::Pass);
        assert_eq!(r.strict, Check::Pass);
        assert_eq!(r.witness, Some(vec![0, 1]));
        assert!((r.witness_trace.unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn single_parabolic_grows_but_is_not_loxodromic() {
        let s = System::uniform("p", vec![Sl2::real(1.0, 1.0, 0.0, 1.0).unwrap()]).unwrap();
        let r = check_proximality(&s, 64, 4, &mut rng());
        assert_eq!(r.verdict, Check::Pass);
        assert_eq!(r.strict, Check::Fail);
    }

    #[test]
    fn unitary_system_fails() {
        let u = Sl2::from_entries([C64::new(0.6, 0.0), C64::new(0.0, -0.8), C64::new(0.0, -0.8), C64::new(0.6, 0.0)]);
        let s = System::uniform("u", vec![u]).unwrap();
        let r = check_proximality(&s, 64, 4, &mut rng());
        assert_eq!(r.verdict, Check::Fail);
        assert_eq!(r.strict, Check::Fail);
    }
}

use super::report::ExperimentReport;
use crate::assumptions::find_fixed_circles;
use crate::error::{Error, Result};
use crate::measure::{BoundaryOptions, DEFAULT_BOUNDARY_MAX_LEN};
use crate::rng::{try_par_chunks, Streams};
use crate::sl2::{dist_rp1, ProjPoint, RPoint, ScaledMat, C64};
use crate::symbolic::{LetterSampler, System};
use crate::verdict::Verdict;
use rand::Rng;
use std::f64::consts::PI;

/// Chain-rule tolerance on RP^1.
pub const CHAIN_RULE_TOL: f64 = 1e-6;
/// Size of the net of centers used by the concentration score.
pub const SCORE_NET: usize = 2048;
const POLE_TOL: f64 = 1e-12;
const MAX_RESAMPLES: usize = 100;

/// Derivative directions alpha_1..alpha_n along one sampled word.
#[derive(Clone, Debug, PartialEq)]
pub struct CocycleTrace {
    pub n: usize,
    pub alphas: Vec<RPoint>,
    /// Truncation level of the tail boundary point.
    pub q: f64,
    pub letters: Vec<u8>,
    /// Largest RP^1 distance between the accumulated cocycle and the
    /// derivative of the prefix product.
    pub chain_rule_error: f64,
}

/// arg of phi_g'(z) = arg (c z + d)^-2 at the point [z1 : z2], reduced mod pi.
fn derivative_angle(c: C64, d: C64, p: &ProjPoint) -> Option<f64> {
    let (z1, z2) = p.coords();
    let den = c * z1 + d * z2;
    if den.norm() < POLE_TOL || z2.norm() < POLE_TOL {
        return None;
    }
    Some((-2.0 * (den.arg() - z2.arg())).rem_euclid(PI))
}

/// One cocycle trace; `None` when the orbit comes within the pole tolerance.
pub fn direction_cocycle<R: Rng + ?Sized>(sys: &System, n: usize, q: f64, rng: &mut R) -> Result<Option<CocycleTrace>> {
    let letters = LetterSampler::new(sys);
    let gens = sys.generators();
    let word: Vec<u8> = (0..n).map(|_| letters.sample(rng) as u8).collect();
    let opts = BoundaryOptions { target_bits: q, transpose: false, max_len: DEFAULT_BOUNDARY_MAX_LEN };
    let tail = crate::measure::draw_boundary(gens, &letters, &opts, rng)?;
    // points[k] = L(sigma^k w) for k = 0..=n.
    let mut points = vec![tail.point; n + 1];
    for k in (0..n).rev() {
        points[k] = gens[word[k] as usize].act(&points[k + 1]);
    }
    let mut alphas = Vec::with_capacity(n);
    let mut acc = 0.0f64;
    let mut prefix = ScaledMat::identity();
    let mut err = 0.0f64;
    for i in 1..=n {
        let g = &gens[word[i - 1] as usize];
        let Some(step) = derivative_angle(g.c(), g.d(), &points[i]) else {
            return Ok(None);
        };
        acc = (acc + step).rem_euclid(PI);
        prefix.mul_right(g);
        let m = prefix.mantissa();
        let Some(direct) = derivative_angle(m[2], m[3], &points[i]) else {
            return Ok(None);
        };
        let a = RPoint::from_angle(acc);
        err = err.max(dist_rp1(&a, &RPoint::from_angle(direct)));
        alphas.push(a);
    }
    Ok(Some(CocycleTrace { n, alphas, q, letters: word, chain_rule_error: err }))
}

/// Largest share of the angles inside one ball B(x, delta), x over a net of RP^1.
pub fn concentration_score(angles: &[f64], delta: f64, net: usize) -> (f64, f64) {
    if angles.is_empty() {
        return (0.0, 0.0);
    }
    let mut a: Vec<f64> = angles.iter().map(|x| x.rem_euclid(PI)).collect();
    a.sort_by(f64::total_cmp);
    let half = delta.min(1.0).asin();
    let count_below = |x: f64| a.partition_point(|v| *v < x);
    let count_in = |lo: f64, hi: f64| {
        // Half-open arc [lo, hi) of the circle R / pi Z.
        if hi - lo >= PI {
            a.len()
        } else if lo < 0.0 {
            count_below(hi) + (a.len() - count_below(lo + PI))
        } else if hi > PI {
            (a.len() - count_below(lo)) + count_below(hi - PI)
        } else {
            count_below(hi) - count_below(lo)
        }
    };
    let mut best = (0usize, 0.0);
    for k in 0..net {
        let x = PI * k as f64 / net as f64;
        let c = count_in(x - half, x + half);
        if c > best.0 {
            best = (c, x);
        }
    }
    (best.0 as f64 / a.len() as f64, best.1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CocycleParams {
    pub n: usize,
    pub q: f64,
    pub delta: f64,
    pub trials: usize,
}

impl Default for CocycleParams {
    fn default() -> Self {
        CocycleParams { n: 10_000, q: 40.0, delta: 0.1, trials: 20 }
    }
}

pub fn exp_direction_cocycle(sys: &System, p: &CocycleParams, streams: &Streams) -> Result<ExperimentReport> {
    if p.n == 0 || p.trials == 0 || !(p.delta > 0.0 && p.delta < 1.0) {
        return Err(Error::InvalidParameter("need n, trials > 0 and delta in (0, 1)".into()));
    }
    let mut r = ExperimentReport::new(
        "direction-cocycle",
        &sys.fingerprint(),
        streams.seed(),
        &["trial", "score", "center", "keyed_score", "chain_rule_error", "resamples"],
    );
    r.param("n", p.n).param("q", p.q).param("delta", p.delta).param("trials", p.trials);
    let s = streams.derive("cocycle");
    let k = sys.len();
    let results = try_par_chunks(p.trials, |c, start, len| {
        let mut out = Vec::with_capacity(len);
        for t in start..start + len {
            let mut rng = s.rng(((c as u64) << 32) | t as u64);
            let mut resamples = 0;
            let trace = loop {
                match direction_cocycle(sys, p.n, p.q, &mut rng)? {
                    Some(tr) => break tr,
                    None if resamples < MAX_RESAMPLES => resamples += 1,
                    None => return Err(Error::Pole),
                }
            };
            let angles: Vec<f64> = trace.alphas.iter().map(|a| a.angle()).collect();
            let (score, center) = concentration_score(&angles, p.delta, SCORE_NET);
            // Generator-keyed family h(w) = pi * w_0 / |Lambda| applied at sigma^i w.
            let keyed: Vec<f64> = (0..p.n)
                .map(|i| {
                    let next = if i + 1 < p.n { trace.letters[i + 1] } else { 0 };
                    angles[i] + PI * next as f64 / k as f64
                })
                .collect();
            let (keyed_score, _) = concentration_score(&keyed, p.delta, SCORE_NET);
            out.push((score, center, keyed_score, trace.chain_rule_error, resamples));
        }
        Ok(out)
    })?;
    let mut max_score = 0.0f64;
    let mut max_err = 0.0f64;
    let mut resamples = 0usize;
    let mut violations = 0usize;
    let mut mean = 0.0;
    for (t, (score, center, keyed, err, rs)) in results.iter().enumerate() {
        r.row(vec![t.into(), (*score).into(), (*center).into(), (*keyed).into(), (*err).into(), (*rs).into()]);
        max_score = max_score.max(*score);
        max_err = max_err.max(*err);
        resamples += rs;
        violations += (*err > CHAIN_RULE_TOL) as usize;
        mean += score / results.len() as f64;
    }
    let circle = find_fixed_circles(sys).has_circle();
    r.set("score", max_score).set("mean_score", mean).set("chain_rule_max_error", max_err);
    r.set("chain_rule_violations", violations).set("pole_resamples", resamples).set("fixed_circle", circle);
    let concentrated = max_score > 1.0 - p.delta;
    r.set("concentrated", concentrated);
    r.verdict = if violations > 0 {
        r.note("chain-rule check failed on some traces");
        Verdict::Inconclusive
    } else if circle {
        r.note("a fixed generalized circle is expected to concentrate the cocycle");
        Verdict::from_bool(concentrated)
    } else {
        Verdict::from_bool(!concentrated)
    };
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::preset;

    #[test]
    fn score_of_point_mass_and_spread() {
        assert_eq!(concentration_score(&[0.3; 50], 0.1, SCORE_NET).0, 1.0);
        let spread: Vec<f64> = (0..1000).map(|i| PI * i as f64 / 1000.0).collect();
        let (s, _) = concentration_score(&spread, 0.1, SCORE_NET);
        assert!((s - 2.0 * 0.1f64.asin() / PI).abs() < 0.01);
        // Balls wrap around pi.
        let (w, _) = concentration_score(&[0.01, PI - 0.01], 0.1, SCORE_NET);
        assert_eq!(w, 1.0);
    }

    #[test]
    fn sanov_cocycle_is_real() {
        let p = CocycleParams { n: 500, trials: 4, ..Default::default() };
        let r = exp_direction_cocycle(&preset("sanov").unwrap(), &p, &Streams::new(1)).unwrap();
        assert_eq!(r.get_f64("score").unwrap(), 1.0);
        assert_eq!(r.verdict, Verdict::Consistent);
    }

    #[test]
    fn chain_rule_holds_on_twist() {
        let sys = preset("twist").unwrap();
        let mut rng = Streams::new(4).rng(0);
        let tr = direction_cocycle(&sys, 2000, 40.0, &mut rng).unwrap().unwrap();
        assert_eq!(tr.alphas.len(), 2000);
        assert!(tr.chain_rule_error < CHAIN_RULE_TOL, "{}", tr.chain_rule_error);
    }
}

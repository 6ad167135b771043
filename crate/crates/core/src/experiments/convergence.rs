use super::report::ExperimentReport;
use rand_chacha::ChaCha8Rng;
use crate::error::{Error, Result};
use crate::measure::lyapunov_estimate;
use crate::rng::{try_par_chunks, Streams};
use crate::sl2::{ProjPoint, ScaledMat, Sl2};
use crate::symbolic::{LetterSampler, System};
use crate::verdict::Verdict;

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceParams {
    pub ns: Vec<usize>,
    pub eta: f64,
    pub trials: usize,
    /// Truncation of the limit point L(w).
    pub q: f64,
    /// Lyapunov estimate in bits per step; estimated when absent.
    pub chi: Option<f64>,
    pub max_len: usize,
}

impl Default for ConvergenceParams {
    fn default() -> Self {
        ConvergenceParams { ns: vec![5, 10, 20, 30, 60, 100, 150], eta: 0.2, trials: 1000, q: 40.0, chi: None, max_len: 1 << 16 }
    }
}

pub fn exp_boundary_convergence(sys: &System, p: &ConvergenceParams, streams: &Streams) -> Result<ExperimentReport> {
    if p.ns.is_empty() || p.trials == 0 {
        return Err(Error::InvalidParameter("need a nonempty ladder and trials > 0".into()));
    }
    let mut r = ExperimentReport::new(
        "boundary-convergence",
        &sys.fingerprint(),
        streams.seed(),
        &["n", "bound_log2", "fraction", "median_log2_distance"],
    );
    r.param("ns", p.ns.clone()).param("eta", p.eta).param("trials", p.trials).param("q", p.q);
    let chi = match p.chi {
        Some(c) => c,
        None => lyapunov_estimate(sys, 1000, 200, &streams.derive("chi"))?.estimate.value,
    };
    r.set("chi", chi);
    let rate = 2.0 * chi - p.eta;
    if rate <= 0.0 {
        r.note("2 chi - eta <= 0: the bound is vacuous");
        r.verdict = Verdict::Inconclusive;
        return Ok(r);
    }
    let mut ns = p.ns.clone();
    ns.sort_unstable();
    let n_max = *ns.last().unwrap();
    let gens = sys.generators();
    let letters = LetterSampler::new(sys);
    let s = streams.derive("convergence");
    // log2 d(L(w), L(g_{w|n})) for each trial and n, with L(w) = g_{w|n} L(s^n w)
    // and L(s^n w) approximated by the tail product reaching chi > 2q.
    let logs: Vec<Vec<f64>> = try_par_chunks(p.trials, |k, _, len| {
        let mut rng = s.rng(k as u64);
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            let mut word: Vec<usize> = (0..n_max).map(|_| letters.sample(&mut rng)).collect();
            let mut prod = ScaledMat::identity();
            let mut row = Vec::with_capacity(ns.len());
            let mut next = 0;
            for i in 0..n_max {
                prod.mul_right(&gens[word[i]]);
                while next < ns.len() && ns[next] == i + 1 {
                    let tail: ProjPoint = tail_direction(&mut word, i + 1, gens, &letters, p, &mut rng)?;
                    row.push(prod.log2_dist_image(&tail));
                    next += 1;
                }
            }
            out.push(row);
        }
        Ok::<_, Error>(out)
    })?;
    let mut last_fraction = 0.0;
    for (j, &n) in ns.iter().enumerate() {
        let bound = -(n as f64) * rate;
        let mut col: Vec<f64> = logs.iter().map(|v| v[j]).collect();
        let fraction = col.iter().filter(|&&x| x <= bound).count() as f64 / col.len() as f64;
        col.sort_by(f64::total_cmp);
        r.row(vec![n.into(), bound.into(), fraction.into(), col[col.len() / 2].into()]);
        last_fraction = fraction;
    }
    r.set("fraction_at_max_n", last_fraction);
    r.verdict = Verdict::from_bool(last_fraction > 1.0 - p.eta);
    Ok(r)
}

fn tail_direction(
    word: &mut Vec<usize>,
    start: usize,
    gens: &[Sl2],
    letters: &LetterSampler,
    p: &ConvergenceParams,
    rng: &mut ChaCha8Rng,
) -> Result<ProjPoint> {
    let mut tail = ScaledMat::identity();
    let mut i = start;
    while tail.chi() <= 2.0 * p.q {
        if i - start >= p.max_len {
            return Err(Error::Stall { target: 2.0 * p.q, max_len: p.max_len });
        }
        if i == word.len() {
            word.push(letters.sample(rng));
        }
        tail.mul_right(&gens[word[i]]);
        i += 1;
    }
    Ok(tail.direction())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets::preset;

    #[test]
    fn diagonal_converges_exactly() {
        let s = System::uniform("d", vec![Sl2::real(2.0, 0.0, 0.0, 0.5).unwrap()]).unwrap();
        let p = ConvergenceParams { trials: 20, ..Default::default() };
        let r = exp_boundary_convergence(&s, &p, &Streams::new(1)).unwrap();
        assert_eq!(r.get_f64("fraction_at_max_n").unwrap(), 1.0);
        assert_eq!(r.verdict, Verdict::Consistent);
    }

    #[test]
    fn unitary_control_is_inconclusive() {
        let p = ConvergenceParams { trials: 20, ..Default::default() };
        let r = exp_boundary_convergence(&preset("su2-control").unwrap(), &p, &Streams::new(1)).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }
}

use super::empirical::{EmpiricalMeasure, PointCloud};
use super::stats::{mean_stderr, EstimateWithCI};
use crate::error::{Error, Result};
use crate::rng::{try_par_chunks, Streams};
use crate::sl2::{ProjPoint, ScaledMat, Sl2, C64};
use crate::symbolic::{LetterSampler, System};
use rand::Rng;

/// Default truncation level q: products are run until chi > 2q.
pub const DEFAULT_TARGET_BITS: f64 = 40.0;
/// Default guard on the number of factors per boundary sample.
pub const DEFAULT_BOUNDARY_MAX_LEN: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryOptions {
    pub target_bits: f64,
    /// Sample the measure of the transposed system.
    pub transpose: bool,
    pub max_len: usize,
}

impl Default for BoundaryOptions {
    fn default() -> Self {
        BoundaryOptions { target_bits: DEFAULT_TARGET_BITS, transpose: false, max_len: DEFAULT_BOUNDARY_MAX_LEN }
    }
}

/// One draw of L(g_{w|T}) with its word length T and first letter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundarySample {
    pub point: ProjPoint,
    pub first_letter: u8,
    pub length: usize,
}

fn generators(sys: &System, transpose: bool) -> Vec<Sl2> {
    if transpose {
        sys.generators().iter().map(Sl2::transpose).collect()
    } else {
        sys.generators().to_vec()
    }
}

pub fn draw_boundary<R: Rng + ?Sized>(
    gens: &[Sl2],
    letters: &LetterSampler,
    opts: &BoundaryOptions,
    rng: &mut R,
) -> Result<BoundarySample> {
    let mut p = ScaledMat::identity();
    let mut first = None;
    let mut len = 0;
    while p.chi() <= 2.0 * opts.target_bits {
        if len >= opts.max_len {
            return Err(Error::Stall { target: 2.0 * opts.target_bits, max_len: opts.max_len });
        }
        let i = letters.sample(rng);
        first.get_or_insert(i as u8);
        p.mul_right(&gens[i]);
        len += 1;
    }
    Ok(BoundarySample { point: p.direction(), first_letter: first.unwrap_or(0), length: len })
}

/// N i.i.d. boundary samples with first letters, chunked over seeded streams.
pub fn sample_boundary_detailed(
    sys: &System,
    opts: &BoundaryOptions,
    n: usize,
    streams: &Streams,
) -> Result<Vec<BoundarySample>> {
    if !(opts.target_bits > 0.0) {
        return Err(Error::InvalidParameter("target bits must be positive".into()));
    }
    let gens = generators(sys, opts.transpose);
    let letters = LetterSampler::new(sys);
    let s = streams.derive("boundary");
    try_par_chunks(n, |k, _, len| {
        let mut rng = s.rng(k as u64);
        (0..len).map(|_| draw_boundary(&gens, &letters, opts, &mut rng)).collect()
    })
}

/// The empirical Furstenberg measure: N equal-weight draws on cp1.
pub fn sample_boundary(sys: &System, opts: &BoundaryOptions, n: usize, streams: &Streams) -> Result<EmpiricalMeasure> {
    let pts = sample_boundary_detailed(sys, opts, n, streams)?.into_iter().map(|b| b.point).collect();
    EmpiricalMeasure::uniform(PointCloud::Cp1(pts))
}

/// Push-forward of a cp1 measure under g.
pub fn push_cp1(m: &EmpiricalMeasure, g: &Sl2) -> Result<EmpiricalMeasure> {
    let pts = m.cp1_points()?.iter().map(|p| g.act(p)).collect();
    m.map_cloud(PointCloud::Cp1(pts))
}

/// The one-step average sum_i p_i g_i m, as a weighted measure.
pub fn stationary_image(sys: &System, m: &EmpiricalMeasure) -> Result<EmpiricalMeasure> {
    let pts = m.cp1_points()?;
    let mut out = Vec::with_capacity(pts.len() * sys.len());
    let mut w = Vec::with_capacity(pts.len() * sys.len());
    for (g, &p) in sys.generators().iter().zip(sys.probs()) {
        for (j, x) in pts.iter().enumerate() {
            out.push(g.act(x));
            w.push(p * m.weight(j));
        }
    }
    EmpiricalMeasure::weighted(PointCloud::Cp1(out), w)
}

/// Both Lyapunov estimators.
#[derive(Clone, Debug, PartialEq)]
pub struct LyapunovReport {
    /// Estimator A: (1/n) log2 ||g_{w|n}||.
    pub estimate: EstimateWithCI,
    /// Estimator B: telescoped vector growth along the orbit.
    pub telescoped: EstimateWithCI,
}

/// Growth rate of log2 of the operator norm, in bits per step.
pub fn lyapunov_estimate(sys: &System, n: usize, trials: usize, streams: &Streams) -> Result<LyapunovReport> {
    if n == 0 || trials == 0 {
        return Err(Error::InvalidParameter("n and trials must be positive".into()));
    }
    let gens = sys.generators();
    let letters = LetterSampler::new(sys);
    let s = streams.derive("lyapunov");
    let pairs = try_par_chunks(trials, |k, _, len| {
        let mut rng = s.rng(k as u64);
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            let t = rng.random::<f64>() * std::f64::consts::TAU;
            let mut v = [C64::new(t.cos(), 0.0), C64::new(t.sin(), 0.0)];
            let mut p = ScaledMat::identity();
            let mut tele = 0.0;
            for _ in 0..n {
                let g = &gens[letters.sample(&mut rng)];
                p.mul_right(g);
                let [a, b, c, d] = g.entries();
                let w = [a * v[0] + b * v[1], c * v[0] + d * v[1]];
                let nw = w[0].norm().hypot(w[1].norm());
                tele += nw.log2();
                v = [w[0] / nw, w[1] / nw];
            }
            out.push((p.log2_op_norm() / n as f64, tele / n as f64));
        }
        Ok::<_, Error>(out)
    })?;
    let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (ma, sa) = mean_stderr(&a);
    let (mb, sb) = mean_stderr(&b);
    Ok(LyapunovReport {
        estimate: EstimateWithCI { value: ma, stderr: sa, trials, method: "norm-growth".into() },
        telescoped: EstimateWithCI { value: mb, stderr: sb, trials, method: "vector-telescoping".into() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::psi;

    fn sanov() -> System {
        System::uniform("sanov", vec![Sl2::real(1.0, 2.0, 0.0, 1.0).unwrap(), Sl2::real(1.0, 0.0, 2.0, 1.0).unwrap()]).unwrap()
    }

    #[test]
    fn diagonal_lyapunov_is_exactly_one() {
        let s = System::uniform("d", vec![Sl2::real(2.0, 0.0, 0.0, 0.5).unwrap()]).unwrap();
        let r = lyapunov_estimate(&s, 100, 50, &Streams::new(1)).unwrap();
        assert_eq!(r.estimate.value, 1.0);
        assert_eq!(r.estimate.stderr, 0.0);
    }

    #[test]
    fn diagonal_boundary_is_e1() {
        let s = System::uniform("d", vec![Sl2::real(2.0, 0.0, 0.0, 0.5).unwrap()]).unwrap();
        let m = sample_boundary(&s, &BoundaryOptions::default(), 100, &Streams::new(1)).unwrap();
        for p in m.cp1_points().unwrap() {
            assert_eq!(*p, ProjPoint::e1());
        }
    }

    #[test]
    fn sanov_boundary_is_real() {
        let m = sample_boundary(&sanov(), &BoundaryOptions::default(), 2000, &Streams::new(2)).unwrap();
        for p in m.cp1_points().unwrap() {
            if let Some(z) = psi(p).as_finite() {
                assert!(z.im.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn rotation_stalls() {
        let r = Sl2::new(C64::new(0.6, 0.0), C64::new(-0.8, 0.0), C64::new(0.8, 0.0), C64::new(0.6, 0.0), 0).unwrap();
        let s = System::uniform("rot", vec![r]).unwrap();
        let opts = BoundaryOptions { max_len: 100, ..Default::default() };
        assert!(matches!(sample_boundary(&s, &opts, 10, &Streams::new(0)), Err(Error::Stall { .. })));
        let l = lyapunov_estimate(&s, 200, 20, &Streams::new(0)).unwrap();
        assert!(l.estimate.value.abs() < 1e-12);
    }
}

//! Subcommand implementations; each produces one report.

use crate::config::RunConfig;
use crate::error::CliError;
use furst_core::assumptions::{check_assumptions, diophantine_probe, random_walk_entropy};
use furst_core::experiments::{
    exp_action_entropy_transfer, exp_boundary_convergence, exp_direction_cocycle, exp_entropy_increase,
    exp_linearization_check, exp_main_theorem, exp_projection_entropy, exp_uniform_entropy_dim, linearization_fixture,
    AtomicTheta, ConvergenceParams, CocycleParams, ExperimentReport, IncreaseParams, LinearizationParams, MainParams,
    ProjectionParams, TransferParams, UniformDimParams, Value,
};
use furst_core::measure::{
    delta_ladder, dim_estimate, lyapunov_estimate, sample_boundary, BoundaryOptions, DimScheme, EmpiricalMeasure,
    PointCloud,
};
use furst_core::presets::list_presets;
use furst_core::rng::Streams;
use furst_core::sl2::C64;
use furst_core::symbolic::System;
use furst_core::Check;
use std::str::FromStr;

pub const EXPERIMENTS: [&str; 8] = [
    "uniform-entropy-dim",
    "projection-entropy",
    "direction-cocycle",
    "entropy-increase",
    "action-entropy-transfer",
    "linearization",
    "boundary-convergence",
    "main-theorem",
];

/// A finished command: experiments carry a verdict, measurements are complete.
pub enum Outcome {
    Experiment(ExperimentReport),
    Measurement(ExperimentReport),
    /// Raw CSV text with a report for the JSON form.
    Sample { report: ExperimentReport, csv: String },
}

/// Typed access to `[params]` values.
pub struct Params<'a>(pub &'a RunConfig);

impl Params<'_> {
    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        match self.0.param(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| CliError::Usage(format!("parameter {key}: cannot parse '{v}'"))),
        }
    }

    pub fn list<T: FromStr>(&self, key: &str, default: Vec<T>) -> Result<Vec<T>, CliError> {
        match self.0.param(key) {
            None => Ok(default),
            Some(v) => v
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| CliError::Usage(format!("parameter {key}: cannot parse '{s}'"))))
                .collect(),
        }
    }

    pub fn pair(&self, key: &str, default: (u32, u32)) -> Result<(u32, u32), CliError> {
        let v = self.list(key, vec![default.0, default.1])?;
        match v[..] {
            [a, b] => Ok((a, b)),
            _ => Err(CliError::Usage(format!("parameter {key}: expected two comma-separated values"))),
        }
    }

    /// Theta from repeated `theta = c1,..,c6` lines, `theta = identity`, or four directions of size `theta_t`.
    pub fn theta(&self) -> Result<AtomicTheta, CliError> {
        let lines = self.0.param_all("theta");
        if lines == ["identity"] {
            return Ok(AtomicTheta::identity());
        }
        if lines.is_empty() {
            return Ok(AtomicTheta::four_directions(self.get("theta_t", 0.15)?)?);
        }
        let atoms = lines
            .iter()
            .map(|l| {
                let v: Vec<f64> = l
                    .split(',')
                    .map(|s| s.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| CliError::Usage(format!("theta: cannot parse '{l}'")))?;
                <[f64; 6]>::try_from(v).map_err(|_| CliError::Usage(format!("theta: expected 6 chart coordinates in '{l}'")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AtomicTheta::uniform(atoms)?)
    }
}

fn check_text(c: Check) -> Value {
    c.to_string().into()
}

pub fn check(sys: &System, p: &Params, streams: &Streams) -> Result<Outcome, CliError> {
    let depth = p.get("depth", 256usize)?;
    let trials = p.get("trials", 64usize)?;
    let a = check_assumptions(sys, depth, trials, &mut streams.derive("check").rng(0));
    let mut r = ExperimentReport::new("check", &sys.fingerprint(), streams.seed(), &["check", "result", "detail"]);
    r.param("depth", depth).param("trials", trials);
    r.row(vec!["irreducible".into(), check_text(a.irreducible), format!("{} common fixed points", a.fixed_points.len()).into()]);
    let si = &a.strongly_irreducible;
    r.row(vec![
        "strongly_irreducible".into(),
        check_text(si.verdict),
        format!("invariant set of {} points; elliptic only: {}", si.invariant_set.len(), si.elliptic_only).into(),
    ]);
    let pr = &a.proximal;
    r.row(vec!["proximal".into(), check_text(pr.verdict), format!("max log2 norm {}", pr.max_log2_norm).into()]);
    let witness = match (&pr.witness, pr.witness_trace) {
        (Some(w), Some(t)) => format!("word {w:?} with |trace| {t}"),
        _ => "no witness".into(),
    };
    r.row(vec!["strictly_proximal".into(), check_text(pr.strict), witness.into()]);
    let circles: Vec<Value> = a.circles.circles().map(|c| Value::from(c.coords().to_vec())).collect();
    let fixed = if a.circles.has_circle() { Check::Fail } else { Check::Pass };
    r.row(vec![
        "no_fixed_circle".into(),
        check_text(fixed),
        format!("{} circles; {} degenerate families", circles.len(), a.circles.degenerate.len()).into(),
    ]);
    r.row(vec!["zariski_dense".into(), a.zariski_dense.into(), "".into()]);
    r.set("circle_count", circles.len());
    r.set("circles", circles);
    let classes: Vec<Value> =
        a.circles.classes.iter().map(|c| Value::from(vec![c.h11, c.h22, c.h12.re, c.h12.im, c.det_sign as f64])).collect();
    r.set("hermitian_classes", classes);
    r.set("degenerate_family", !a.circles.degenerate.is_empty());
    r.set("definite_form", a.circles.has_definite_form());
    r.set("all_pass", a.all_pass());
    Ok(Outcome::Measurement(r))
}

pub fn chi(sys: &System, p: &Params, streams: &Streams) -> Result<Outcome, CliError> {
    let n = p.get("n", 10_000usize)?;
    let trials = p.get("trials", 1000usize)?;
    let l = lyapunov_estimate(sys, n, trials, streams)?;
    let mut r = ExperimentReport::new("chi", &sys.fingerprint(), streams.seed(), &["method", "value", "stderr", "trials"]);
    r.param("n", n).param("trials", trials);
    for e in [&l.estimate, &l.telescoped] {
        r.row(vec![e.method.clone().into(), e.value.into(), e.stderr.into(), e.trials.into()]);
    }
    let gap = (l.estimate.value - l.telescoped.value).abs();
    r.set("chi", l.estimate.value).set("chi_stderr", l.estimate.stderr);
    r.set("chi_telescoped", l.telescoped.value).set("chi_telescoped_stderr", l.telescoped.stderr);
    r.set("agree", gap <= 2.0 * (l.estimate.stderr + l.telescoped.stderr));
    Ok(Outcome::Measurement(r))
}

pub fn hrw(sys: &System, p: &Params, streams: &Streams) -> Result<Outcome, CliError> {
    let nmax = p.get("nmax", 10usize)?;
    let cap = p.get("cap", 1usize << 22)?;
    let t = random_walk_entropy(sys, nmax, cap)?;
    let mut r = ExperimentReport::new("hrw", &sys.fingerprint(), streams.seed(), &["n", "h", "h_over_n", "support"]);
    r.param("nmax", nmax).param("cap", cap);
    for row in &t.rows {
        r.row(vec![row.n.into(), row.h.into(), row.h_over_n.into(), row.support.into()]);
    }
    r.set("h_rw", t.h_rw_estimate).set("free", t.free).set("exact", t.exact);
    r.set("ambiguous", t.ambiguous).set("min_separation", t.min_separation);
    Ok(Outcome::Measurement(r))
}

pub fn dio(sys: &System, p: &Params, streams: &Streams) -> Result<Outcome, CliError> {
    let nmax = p.get("nmax", 8usize)?;
    let cap = p.get("cap", 1usize << 16)?;
    let t = diophantine_probe(sys, nmax, cap)?;
    let cols = ["n", "s_n", "collisions", "branch_skipped", "ambiguous"];
    let mut r = ExperimentReport::new("dio", &sys.fingerprint(), streams.seed(), &cols);
    r.param("nmax", nmax).param("cap", cap);
    for row in &t.rows {
        let s: Value = row.s_n.map_or(Value::Text("none".into()), Value::from);
        r.row(vec![row.n.into(), s, row.collisions.into(), row.branch_skipped.into(), row.ambiguous.into()]);
    }
    r.set("fitted_c", t.fitted_c.map_or(Value::Text("none".into()), Value::from)).set("exact", t.exact);
    r.set("collisions", t.rows.iter().map(|r| r.collisions).sum::<usize>());
    Ok(Outcome::Measurement(r))
}

fn boundary(sys: &System, p: &Params, streams: &Streams, default_samples: usize) -> Result<(EmpiricalMeasure, usize, f64), CliError> {
    let samples = p.get("samples", default_samples)?;
    let target_bits = p.get("target_bits", 40.0)?;
    let opts = BoundaryOptions { target_bits, ..Default::default() };
    Ok((sample_boundary(sys, &opts, samples, streams)?, samples, target_bits))
}

pub fn sample(sys: &System, p: &Params, streams: &Streams) -> Result<Outcome, CliError> {
    let (m, samples, target_bits) = boundary(sys, p, streams, 10_000)?;
    let csv = furst_core::measure::to_csv(&m)?;
    let cols = ["z1re", "z1im", "z2re", "z2im", "weight"];
    let mut r = ExperimentReport::new("sample", &sys.fingerprint(), streams.seed(), &cols);
    r.param("samples", samples).param("target_bits", target_bits);
    if let PointCloud::Cp1(pts) = m.cloud() {
        for (i, q) in pts.iter().enumerate() {
            let (a, b): (C64, C64) = q.coords();
            r.row(vec![a.re.into(), a.im.into(), b.re.into(), b.im.into(), m.weight(i).into()]);
        }
    }
    Ok(Outcome::Sample { report: r, csv })
}

pub fn dim(sys: &System, p: &Params, streams: &Streams) -> Result<Outcome, CliError> {
    let (m, samples, _) = boundary(sys, p, &streams.derive("nu"), 1_000_000)?;
    let scheme_name: String = p.get("scheme", "slope".to_string())?;
    let scheme = match scheme_name.as_str() {
        "slope" => {
            let (n0, n1) = p.pair("window", (3, 9))?;
            DimScheme::entropy_slope(n0, n1)
        }
        "local" => DimScheme::LocalDimension {
            radii_log2: p.list("radii_log2", (4..=10).map(|k| -k).collect())?,
            centers: p.get("centers", 1000usize)?,
        },
        other => return Err(CliError::Usage(format!("unknown dimension scheme '{other}' (slope, local)"))),
    };
    let d = dim_estimate(&m, &scheme, &streams.derive("dim"))?;
    let mut r = ExperimentReport::new("dim", &sys.fingerprint(), streams.seed(), &["x", "y", "used"]);
    r.param("samples", samples).param("scheme", scheme_name);
    for row in &d.rows {
        r.row(vec![row.x.into(), row.y.into(), row.used.into()]);
    }
    r.set("dim", d.estimate.value).set("dim_stderr", d.estimate.stderr).set("method", d.estimate.method.clone());
    for w in d.warnings {
        r.note(w);
    }
    Ok(Outcome::Measurement(r))
}

pub fn delta(sys: &System, p: &Params, streams: &Streams) -> Result<Outcome, CliError> {
    let samples = p.get("samples", 1_000_000usize)?;
    let qs = p.list("qs", vec![4u32, 6, 8, 10, 12, 14])?;
    let opts = BoundaryOptions { target_bits: p.get("target_bits", 40.0)?, ..Default::default() };
    let d = delta_ladder(sys, &qs, samples, &opts, streams)?;
    let cols = ["q", "delta", "stderr", "median_bin", "occupied", "undersampled"];
    let mut r = ExperimentReport::new("delta", &sys.fingerprint(), streams.seed(), &cols);
    r.param("samples", samples).param("qs", qs.clone());
    for row in &d.rows {
        r.row(vec![
            row.q.into(),
            row.estimate.value.into(),
            row.estimate.stderr.into(),
            row.median_bin.into(),
            row.occupied.into(),
            row.undersampled.into(),
        ]);
    }
    r.set("entropy_p", d.entropy_p);
    if let Some(f) = d.finest_well_sampled() {
        r.set("finest_q", f.q).set("delta", f.estimate.value);
    }
    for w in d.warnings() {
        r.note(w);
    }
    Ok(Outcome::Measurement(r))
}

pub fn experiment(name: &str, sys: &System, p: &Params, streams: &Streams) -> Result<Outcome, CliError> {
    let report = match name {
        "uniform-entropy-dim" => {
            let d = UniformDimParams::default();
            let q = UniformDimParams {
                m: p.get("m", d.m)?,
                levels: p.pair("levels", d.levels)?,
                samples: p.get("samples", d.samples)?,
                eps: p.get("eps", d.eps)?,
                window: p.pair("window", d.window)?,
                target_bits: p.get("target_bits", d.target_bits)?,
            };
            exp_uniform_entropy_dim(sys, &q, streams)?
        }
        "projection-entropy" => {
            let d = ProjectionParams::default();
            let q = ProjectionParams {
                m: p.get("m", d.m)?,
                levels: p.pair("levels", d.levels)?,
                directions: p.get("directions", d.directions)?,
                components: p.get("components", d.components)?,
                samples: p.get("samples", d.samples)?,
                window: p.pair("window", d.window)?,
                target_bits: p.get("target_bits", d.target_bits)?,
            };
            exp_projection_entropy(sys, &q, streams)?
        }
        "direction-cocycle" => {
            let d = CocycleParams::default();
            let q = CocycleParams {
                n: p.get("n", d.n)?,
                q: p.get("q", d.q)?,
                delta: p.get("delta", d.delta)?,
                trials: p.get("trials", d.trials)?,
            };
            exp_direction_cocycle(sys, &q, streams)?
        }
        "entropy-increase" => {
            let d = IncreaseParams::default();
            let q = IncreaseParams {
                n: p.get("n", d.n)?,
                samples: p.get("samples", d.samples)?,
                target_bits: p.get("target_bits", d.target_bits)?,
                r: p.get("r", d.r)?,
                window: p.pair("window", d.window)?,
            };
            exp_entropy_increase(sys, &p.theta()?, &q, streams)?
        }
        "action-entropy-transfer" => {
            let d = TransferParams::default();
            let q = TransferParams {
                k: p.get("k", d.k)?,
                n: p.get("n", d.n)?,
                z_samples: p.get("z_samples", d.z_samples)?,
                target_bits: p.get("target_bits", d.target_bits)?,
                eps_step: p.get("eps_step", d.eps_step)?,
            };
            exp_action_entropy_transfer(sys, &p.theta()?, &q, streams)?
        }
        "linearization" => {
            let d = LinearizationParams::default();
            let q = LinearizationParams { k: p.get("k", d.k)?, delta: p.get("delta", d.delta)?, eps: p.get("eps", d.eps)? };
            let g = sys.generator(p.get("generator", 0usize)?.min(sys.len() - 1));
            let zc = p.list("z", vec![0.3, 0.2])?;
            let [zr, zi] = zc[..] else {
                return Err(CliError::Usage("parameter z: expected re,im".into()));
            };
            let z = C64::new(zr, zi);
            let (theta, xi) =
                linearization_fixture(g, z, q.delta, p.get("atoms", 16usize)?, p.get("side", 128usize)?, streams)?;
            let mut r = exp_linearization_check(g, z, &theta, &xi, &q, streams.seed())?;
            r.system = sys.fingerprint();
            r
        }
        "boundary-convergence" => {
            let d = ConvergenceParams::default();
            let chi: f64 = p.get("chi", f64::NAN)?;
            let q = ConvergenceParams {
                ns: p.list("ns", d.ns)?,
                eta: p.get("eta", d.eta)?,
                trials: p.get("trials", d.trials)?,
                q: p.get("q", d.q)?,
                chi: if chi.is_nan() { None } else { Some(chi) },
                max_len: p.get("max_len", d.max_len)?,
            };
            exp_boundary_convergence(sys, &q, streams)?
        }
        "main-theorem" => exp_main_theorem(sys, &main_params(p)?, streams)?,
        other => {
            return Err(CliError::Usage(format!("unknown experiment '{other}'; one of: {}", EXPERIMENTS.join(", "))));
        }
    };
    Ok(Outcome::Experiment(report))
}

pub fn main_params(p: &Params) -> Result<MainParams, CliError> {
    let d = MainParams::default();
    Ok(MainParams {
        samples: p.get("samples", d.samples)?,
        target_bits: p.get("target_bits", d.target_bits)?,
        chi_n: p.get("chi_n", d.chi_n)?,
        chi_trials: p.get("chi_trials", d.chi_trials)?,
        hrw_nmax: p.get("hrw_nmax", d.hrw_nmax)?,
        hrw_cap: p.get("hrw_cap", d.hrw_cap)?,
        delta_qs: p.list("delta_qs", d.delta_qs)?,
        window: p.pair("window", d.window)?,
        local_radii_log2: p.list("local_radii_log2", d.local_radii_log2)?,
        local_centers: p.get("local_centers", d.local_centers)?,
        tol_upper: p.get("tol_upper", d.tol_upper)?,
        tol: p.get("tol", d.tol)?,
        tol_ly: p.get("tol_ly", d.tol_ly)?,
        assumption_depth: p.get("assumption_depth", d.assumption_depth)?,
        assumption_trials: p.get("assumption_trials", d.assumption_trials)?,
        diameter_pairs: p.get("diameter_pairs", d.diameter_pairs)?,
        diameter_lengths: p.list("diameter_lengths", d.diameter_lengths)?,
        scaling_n: p.get("scaling_n", d.scaling_n)?,
        scaling_base_level: p.get("scaling_base_level", d.scaling_base_level)?,
        scaling_eta: p.get("scaling_eta", d.scaling_eta)?,
        scaling_elements: p.get("scaling_elements", d.scaling_elements)?,
        scaling_slack: p.get("scaling_slack", d.scaling_slack)?,
    })
}

pub fn presets(seed: u64) -> Outcome {
    let mut r = ExperimentReport::new("presets", "", seed, &["name", "exact", "description"]);
    for info in list_presets() {
        r.row(vec![info.name.into(), info.exact.into(), info.description.into()]);
    }
    Outcome::Measurement(r)
}

//! Line-oriented run configuration with `[system]`, `[params]` and `[output]` sections.

use crate::error::CliError;
use furst_core::presets::preset;
use furst_core::sl2::{parse_rational, rational_to_f64, ExactSl2, GaussianRational, Sl2, C64};
use furst_core::symbolic::System;
use std::fmt::Write as _;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Exact when every entry is a rational literal with exact determinant 1.
    Auto,
    Exact,
    Float,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(Mode::Auto),
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            _ => Err(format!("unknown mode '{s}' (auto, exact, float)")),
        }
    }
}

impl Mode {
    fn as_str(&self) -> &'static str {
        match self {
            Mode::Auto => "auto",
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format '{s}' (json, csv)")),
        }
    }
}

impl Format {
    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SystemSource {
    Preset(String),
    /// Entry literals as written (8 per generator) and optional probabilities.
    Inline { name: String, matrices: Vec<[String; 8]>, probs: Option<Vec<String>> },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OutputConfig {
    pub path: Option<String>,
    pub format: Option<Format>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub system: Option<SystemSource>,
    pub mode: Mode,
    /// Estimator parameters in file order; keys may repeat (e.g. `theta`).
    pub params: Vec<(String, String)>,
    pub seed: u64,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { system: None, mode: Mode::Auto, params: vec![], seed: 0, output: OutputConfig::default() }
    }
}

impl RunConfig {
    /// Last value of a parameter.
    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// All values of a repeated parameter.
    pub fn param_all(&self, key: &str) -> Vec<&str> {
        self.params.iter().filter(|(k, _)| k == key).map(|(_, v)| v.as_str()).collect()
    }

    pub fn set_param(&mut self, key: &str, value: &str) {
        self.params.retain(|(k, _)| k != key);
        self.params.push((key.to_string(), value.to_string()));
    }
}

enum Section {
    None,
    System,
    Params,
    Output,
}

fn err(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Config { line, msg: msg.into() }
}

/// Parses and validates a config; inline matrices must have determinant 1.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    let mut section = Section::None;
    let mut preset_name: Option<String> = None;
    let mut name: Option<String> = None;
    let mut matrices: Vec<([String; 8], usize)> = vec![];
    let mut probs: Option<(Vec<String>, usize)> = None;
    let mut seen_mode = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(h) = line.strip_prefix('[') {
            let h = h.strip_suffix(']').ok_or_else(|| err(line_no, "unterminated section header"))?;
            section = match h.trim() {
                "system" => Section::System,
                "params" => Section::Params,
                "output" => Section::Output,
                other => return Err(err(line_no, format!("unknown section [{other}]"))),
            };
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| err(line_no, "expected 'key = value'"))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(err(line_no, "empty key"));
        }
        match section {
            Section::None => return Err(err(line_no, "key outside of a section")),
            Section::System => match key {
                "preset" => {
                    preset_name = Some(value.to_string());
                }
                "name" => name = Some(value.to_string()),
                "mode" => {
                    if seen_mode {
                        return Err(err(line_no, "duplicate mode"));
                    }
                    seen_mode = true;
                    cfg.mode = value.parse().map_err(|e| err(line_no, e))?;
                }
                "g" => {
                    let parts: Vec<String> = value.split(',').map(|s| s.trim().to_string()).collect();
                    let arr: [String; 8] = parts
                        .try_into()
                        .map_err(|v: Vec<String>| err(line_no, format!("expected 8 entries, found {}", v.len())))?;
                    for (j, s) in arr.iter().enumerate() {
                        if parse_rational(s).is_none() {
                            return Err(err(line_no, format!("entry {} ('{s}') is not a number or p/q literal", j + 1)));
                        }
                    }
                    matrices.push((arr, line_no));
                }
                "p" => {
                    let ps: Vec<String> = value.split(',').map(|s| s.trim().to_string()).collect();
                    for s in &ps {
                        if parse_rational(s).is_none() {
                            return Err(err(line_no, format!("probability '{s}' is not a number or p/q literal")));
                        }
                    }
                    probs = Some((ps, line_no));
                }
                other => return Err(err(line_no, format!("unknown system key '{other}'"))),
            },
            Section::Params => {
                if key == "seed" {
                    cfg.seed = value.parse().map_err(|_| err(line_no, format!("seed '{value}' is not a 64-bit unsigned integer")))?;
                } else {
                    cfg.params.push((key.to_string(), value.to_string()));
                }
            }
            Section::Output => match key {
                "path" => cfg.output.path = Some(value.to_string()),
                "format" => cfg.output.format = Some(value.parse().map_err(|e| err(line_no, e))?),
                other => return Err(err(line_no, format!("unknown output key '{other}'"))),
            },
        }
    }
    match (preset_name, matrices.is_empty()) {
        (Some(_), false) => return Err(err(matrices[0].1, "both a preset and inline matrices are given")),
        (Some(p), true) => {
            if let Some((_, l)) = &probs {
                return Err(err(*l, "probabilities cannot be given with a preset"));
            }
            preset(&p).map_err(|e| err(0, format!("preset '{p}': {e}")))?;
            cfg.system = Some(SystemSource::Preset(p));
        }
        (None, false) => {
            if let Some((ps, l)) = &probs {
                if ps.len() != matrices.len() {
                    return Err(err(*l, format!("{} probabilities for {} generators", ps.len(), matrices.len())));
                }
            }
            let source = SystemSource::Inline {
                name: name.unwrap_or_else(|| "inline".to_string()),
                matrices: matrices.iter().map(|m| m.0.clone()).collect(),
                probs: probs.map(|p| p.0),
            };
            build_inline(&source, cfg.mode, &matrices.iter().map(|m| m.1).collect::<Vec<_>>())?;
            cfg.system = Some(source);
        }
        (None, true) => {
            if let Some((_, l)) = probs {
                return Err(err(l, "probabilities without generators"));
            }
        }
    }
    Ok(cfg)
}

/// Writes a config that `parse_config` reads back to an identical value.
pub fn serialize_config(cfg: &RunConfig) -> String {
    let mut s = String::new();
    s.push_str("[system]\n");
    match &cfg.system {
        Some(SystemSource::Preset(p)) => {
            let _ = writeln!(s, "preset = {p}");
        }
        Some(SystemSource::Inline { name, matrices, probs }) => {
            let _ = writeln!(s, "name = {name}");
            for m in matrices {
                let _ = writeln!(s, "g = {}", m.join(","));
            }
            if let Some(p) = probs {
                let _ = writeln!(s, "p = {}", p.join(","));
            }
        }
        None => {}
    }
    let _ = writeln!(s, "mode = {}", cfg.mode.as_str());
    s.push_str("\n[params]\n");
    let _ = writeln!(s, "seed = {}", cfg.seed);
    for (k, v) in &cfg.params {
        let _ = writeln!(s, "{k} = {v}");
    }
    s.push_str("\n[output]\n");
    if let Some(p) = &cfg.output.path {
        let _ = writeln!(s, "path = {p}");
    }
    if let Some(f) = cfg.output.format {
        let _ = writeln!(s, "format = {}", f.as_str());
    }
    s
}

fn gauss(re: &str, im: &str) -> GaussianRational {
    GaussianRational::new(parse_rational(re).expect("validated literal"), parse_rational(im).expect("validated literal"))
}

fn f(s: &str) -> f64 {
    rational_to_f64(&parse_rational(s).expect("validated literal"))
}

fn build_inline(source: &SystemSource, mode: Mode, lines: &[usize]) -> Result<System, CliError> {
    let SystemSource::Inline { name, matrices, probs } = source else { unreachable!() };
    let line_of = |k: usize| lines.get(k).copied().unwrap_or(0);
    let ps: Vec<f64> = match probs {
        Some(p) => p.iter().map(|s| f(s)).collect(),
        None => vec![1.0 / matrices.len() as f64; matrices.len()],
    };
    if mode != Mode::Float {
        let mut exact = vec![];
        let mut failure = None;
        for (k, m) in matrices.iter().enumerate() {
            let e: [GaussianRational; 4] =
                std::array::from_fn(|j| gauss(&m[2 * j], &m[2 * j + 1]));
            match ExactSl2::new(e, k) {
                Ok(g) => exact.push(g),
                Err(e) => {
                    failure = Some((k, e));
                    break;
                }
            }
        }
        match failure {
            None => return System::new_exact(name, exact, ps).map_err(|e| err(line_of(0), e.to_string())),
            Some((k, e)) if mode == Mode::Exact => {
                return Err(err(line_of(k), format!("generator {k}: {e} (exact mode)")));
            }
            Some(_) => {}
        }
    }
    let mut gens = vec![];
    for (k, m) in matrices.iter().enumerate() {
        let c: [C64; 4] = std::array::from_fn(|j| C64::new(f(&m[2 * j]), f(&m[2 * j + 1])));
        let g = Sl2::new(c[0], c[1], c[2], c[3], k).map_err(|e| err(line_of(k), format!("generator {k}: {e}")))?;
        gens.push(g);
    }
    System::new(name, gens, ps).map_err(|e| err(0, e.to_string()))
}

/// The system described by a validated config.
pub fn build_system(cfg: &RunConfig) -> Result<System, CliError> {
    match &cfg.system {
        None => Err(CliError::Usage("no system given: use --preset or a [system] section".into())),
        Some(SystemSource::Preset(p)) => {
            let sys = preset(p)?;
            match cfg.mode {
                Mode::Float => Ok(sys.into_float()),
                Mode::Exact if !sys.is_exact() => Err(CliError::Usage(format!("preset '{p}' has no exact form"))),
                _ => Ok(sys),
            }
        }
        Some(src @ SystemSource::Inline { matrices, .. }) => build_inline(src, cfg.mode, &vec![0; matrices.len()]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_reference() {
        let cfg = parse_config("[system]\npreset = sanov\n").unwrap();
        let sys = build_system(&cfg).unwrap();
        assert_eq!(sys.name(), "sanov");
        assert!(sys.is_exact());
        assert_eq!(cfg.seed, 0);
    }

    #[test]
    fn inline_identity_is_a_valid_degenerate_system() {
        let cfg = parse_config("[system]\ng = 1,0,0,0,0,0,1,0\np = 1\n").unwrap();
        let sys = build_system(&cfg).unwrap();
        assert_eq!(sys.len(), 1);
        assert!(sys.is_exact());
    }

    #[test]
    fn bad_determinant_names_the_line_and_generator() {
        let text = "[system]\ng = 1,0,0,0,0,0,1,0\ng = 2,0,0,0,0,0,1,0\n";
        match parse_config(text) {
            Err(CliError::Config { line, msg }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("generator 1"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn decimal_entries_fall_back_to_float() {
        let s = "0.70710678118654752";
        let text = format!("[system]\ng = {s},0,{s},0,-{s},0,{s},0\n");
        let sys = build_system(&parse_config(&text).unwrap()).unwrap();
        assert!(!sys.is_exact());
        let exact = format!("[system]\nmode = exact\ng = {s},0,{s},0,-{s},0,{s},0\n");
        assert!(matches!(parse_config(&exact), Err(CliError::Config { line: 3, .. })));
    }

    #[test]
    fn parse_errors_are_line_numbered() {
        for (text, line) in [
            ("[system]\npreset = sanov\n[bogus]\n", 3),
            ("[params]\nseed = -1\n", 2),
            ("x = 1\n", 1),
            ("[system]\ng = 1,0,0\n", 2),
            ("[system]\ng = 1,0,0,0,0,0,1,0\np = 1/2,1/2\n", 3),
        ] {
            match parse_config(text) {
                Err(CliError::Config { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn serialization_round_trips() {
        let text = "[system]\nname = pair\ng = 2,0,0,0,0,0,1/2,0\ng = 1/2,0,0,0,0,0,2,0\np = 1/3,2/3\nmode = exact\n\
                    [params]\nseed = 42\nsamples = 1000\ntheta = 0,0,0.1,0,0,0\ntheta = 0,0,0,0,0.1,0\n\
                    [output]\npath = out.json\nformat = csv\n";
        let cfg = parse_config(text).unwrap();
        let again = parse_config(&serialize_config(&cfg)).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(again.param_all("theta").len(), 2);
        let p = parse_config("[system]\npreset = twist\n").unwrap();
        assert_eq!(parse_config(&serialize_config(&p)).unwrap(), p);
    }
}

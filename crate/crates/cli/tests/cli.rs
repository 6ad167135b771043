use furst_cli::config::{parse_config, serialize_config, Format, Mode, OutputConfig, RunConfig, SystemSource};
use furst_cli::run_with_env;
use proptest::prelude::*;
use std::path::PathBuf;
use std::process::Command;

fn run(args: &[&str], env_seed: Option<&str>) -> (i32, String, String) {
    let mut argv = vec!["furst".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_with_env(&argv, env_seed, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("furst-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_config(name: &str, text: &str) -> String {
    let p = tmp(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn check_on_sanov_reports_one_circle() {
    let cfg = write_config("sanov.cfg", "[system]\npreset = sanov\n");
    let (code, out, _) = run(&["check", "--config", &cfg], None);
    assert_eq!(code, 0);
    let j: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(j["experiment"], "check");
    assert_eq!(j["summary"]["circle_count"], "1");
    assert_eq!(j["summary"]["circles"].as_array().unwrap().len(), 1);
    assert_eq!(j["verdict"], "complete");
}

#[test]
fn twist_passes_check_and_su2_fails_proximality() {
    let (code, out, _) = run(&["check", "--preset", "twist"], None);
    assert_eq!(code, 0);
    let j: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(j["summary"]["all_pass"], true);
    let (_, out, _) = run(&["check", "--preset", "su2-control"], None);
    let j: serde_json::Value = serde_json::from_str(&out).unwrap();
    let prox = j["rows"].as_array().unwrap().iter().find(|r| r["check"] == "proximal").unwrap();
    assert_eq!(prox["result"], "fail");
}

#[test]
fn hrw_on_sanov_is_free() {
    let cfg = write_config("sanov-hrw.cfg", "[system]\npreset = sanov\n");
    let (code, out, _) = run(&["hrw", "--config", &cfg, "--nmax", "10", "--format", "csv"], None);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,h,h_over_n,support");
    assert_eq!(lines.len(), 11);
    for l in &lines[1..] {
        assert_eq!(l.split(',').nth(2).unwrap().parse::<f64>().unwrap(), 1.0, "{l}");
    }
}

#[test]
fn inline_determinant_violation_is_rejected() {
    let cfg = write_config("bad.cfg", "[system]\ng = 1,0,1,0,0,0,1,0\ng = 1,0,1,0,1,0,1,0\n");
    let (code, _, err) = run(&["check", "--config", &cfg], None);
    assert_eq!(code, 1);
    assert!(err.contains("line 3") && err.contains("generator 1"), "{err}");
}

#[test]
fn inline_identity_is_accepted() {
    let cfg = write_config("id.cfg", "[system]\ng = 1,0,0,0,0,0,1,0\np = 1\n");
    let (code, out, _) = run(&["hrw", "--config", &cfg, "--nmax", "3", "--format", "csv"], None);
    assert_eq!(code, 0);
    assert!(out.lines().skip(1).all(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap() == 0.0), "{out}");
}

#[test]
fn unknown_subcommand_prints_usage_and_fails() {
    let (code, _, err) = run(&["frobnicate"], None);
    assert_eq!(code, 1);
    assert!(err.contains("Usage"), "{err}");
    let (code, _, _) = run(&["exp", "no-such-experiment", "--preset", "sanov"], None);
    assert_eq!(code, 1);
    let (code, out, _) = run(&["--help"], None);
    assert_eq!(code, 0);
    assert!(out.contains("Usage"));
}

#[test]
fn missing_system_is_an_error() {
    let (code, _, err) = run(&["chi"], None);
    assert_eq!(code, 1);
    assert!(err.contains("no system"), "{err}");
}

#[test]
fn seed_precedence_flag_env_config() {
    let cfg = write_config("seeded.cfg", "[system]\npreset = twist\n[params]\nseed = 11\nsamples = 200\n");
    let seed_of = |args: &[&str], env: Option<&str>| {
        let mut a = vec!["sample", "--config", cfg.as_str()];
        a.extend_from_slice(args);
        let (code, out, _) = run(&a, env);
        assert_eq!(code, 0);
        let j: serde_json::Value = serde_json::from_str(&out).unwrap();
        j["seed"].as_str().unwrap().to_string()
    };
    assert_eq!(seed_of(&[], None), "11");
    assert_eq!(seed_of(&[], Some("12")), "12");
    assert_eq!(seed_of(&["--seed", "13"], Some("12")), "13");
}

#[test]
fn env_seed_reaches_the_binary() {
    let bin = env!("CARGO_BIN_EXE_furst");
    let out = |env: &str| {
        let o = Command::new(bin)
            .args(["sample", "--preset", "twist", "--samples", "50", "--format", "csv"])
            .env("FURST_SEED", env)
            .output()
            .unwrap();
        assert!(o.status.success());
        o.stdout
    };
    assert_eq!(out("3"), out("3"));
    assert_ne!(out("3"), out("4"));
}

#[test]
fn output_files_are_byte_identical_across_runs_and_workers() {
    let cfg = write_config("det.cfg", "[system]\npreset = twist\n[params]\nsamples = 3000\nn = 500\ntrials = 40\n");
    let mut outputs = vec![];
    for (i, workers) in ["1", "4", "16", "4"].iter().enumerate() {
        for cmd in ["sample", "chi", "dim"] {
            let path = tmp(&format!("det-{cmd}-{i}.json"));
            let p = path.display().to_string();
            let args = ["--seed", "5", cmd, "--config", &cfg, "--workers", workers, "--out", &p, "-P", "window=2,5"];
            let (code, out, err) = run(&args, None);
            assert_eq!(code, 0, "{err}");
            assert!(out.is_empty());
            outputs.push((cmd, std::fs::read(&path).unwrap()));
        }
    }
    for (cmd, bytes) in &outputs[3..] {
        let first = &outputs.iter().find(|(c, _)| c == cmd).unwrap().1;
        assert_eq!(first, bytes, "{cmd}");
    }
}

#[test]
fn experiment_exit_code_follows_verdict() {
    let (code, out, _) = run(
        &["exp", "direction-cocycle", "--preset", "sanov", "-P", "n=500", "-P", "trials=4", "--seed", "1"],
        None,
    );
    let j: serde_json::Value = serde_json::from_str(&out).unwrap();
    let expected = match j["verdict"].as_str().unwrap() {
        "consistent" => 0,
        "inconsistent" => 2,
        _ => 3,
    };
    assert_eq!(code, expected);
}

#[test]
fn linearization_experiment_runs_from_cli() {
    let (code, out, err) = run(&["exp", "linearization", "--preset", "twist", "-P", "side=32"], None);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("\"gap\""));
}

fn literal() -> impl Strategy<Value = String> {
    prop_oneof![
        (-50i64..50).prop_map(|n| n.to_string()),
        (-50i64..50, 1i64..20).prop_map(|(p, q)| format!("{p}/{q}")),
        (-5.0f64..5.0).prop_map(|x| format!("{x}")),
    ]
}

fn key() -> impl Strategy<Value = String> {
    "[a-z][a-z_0-9]{0,8}".prop_filter("reserved", |k| k != "seed")
}

fn value() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9.,/_-][a-zA-Z0-9 .,/_-]{0,12}[a-zA-Z0-9.,/_-]"
}

fn run_config() -> impl Strategy<Value = RunConfig> {
    let system = prop_oneof![
        Just(None),
        prop::sample::select(vec!["sanov", "twist", "inverse-pair", "discrete-gaussian", "su2-control"])
            .prop_map(|p| Some(SystemSource::Preset(p.to_string()))),
        (1usize..4, prop::bool::ANY, literal()).prop_map(|(k, with_p, x)| {
            // Upper-triangular unipotent matrices [[1, x], [0, 1]] have det exactly 1.
            let m: [String; 8] = ["1", "0", &x, "0", "0", "0", "1", "0"].map(String::from);
            let probs = with_p.then(|| vec![format!("1/{k}"); k]);
            Some(SystemSource::Inline { name: "gen".into(), matrices: vec![m; k], probs })
        }),
    ];
    let mode = prop::sample::select(vec![Mode::Auto, Mode::Exact, Mode::Float]);
    let params = prop::collection::vec((key(), value()), 0..6);
    let output = (prop::option::of("[a-z]{1,8}\\.(json|csv)"), prop::option::of(prop::sample::select(vec![Format::Json, Format::Csv])))
        .prop_map(|(path, format)| OutputConfig { path, format });
    (system, mode, params, any::<u64>(), output).prop_map(|(system, mode, params, seed, output)| {
        let mode = match (&system, mode) {
            (Some(SystemSource::Preset(p)), Mode::Exact) if p == "twist" => Mode::Auto,
            _ => mode,
        };
        RunConfig { system, mode, params, seed, output }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn config_round_trips(cfg in run_config()) {
        let text = serialize_config(&cfg);
        let again = parse_config(&text).unwrap();
        prop_assert_eq!(&again, &cfg);
        prop_assert_eq!(serialize_config(&again), text);
    }
}

//! End-to-end behaviour of the command line: exit codes, diagnostics,
//! settings precedence, output formats and artifacts.

use std::path::{Path, PathBuf};

use colorcenter_cli::{run_with_env, Outcome};
use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn cli(args: &[&str]) -> Outcome {
    cli_env(args, None)
}

fn cli_env(args: &[&str], env: Option<PathBuf>) -> Outcome {
    run_with_env(std::iter::once("colorcenter").chain(args.iter().copied()), env)
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let o = cli(&a);
    assert_eq!(o.code, 0, "{args:?}: {}", o.stderr);
    serde_json::from_str(&o.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn e_mm(o: &Outcome) -> f64 {
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v: Value = serde_json::from_str(&o.stdout).unwrap();
    v["payload"]["e_mm"].as_f64().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(cli(&["corr", "mm", "--q", "1", "--L", "14.271"]).code, 0);
    // Parses, but the reaction does not balance.
    let o = cli(&["thermo", "react", &fixture("unbalanced.json")]);
    assert_eq!(o.code, 1);
    assert!(o.stderr.contains("unbalanced"), "{}", o.stderr);
    assert!(o.stdout.is_empty());
    // Domain: non-positive cell length.
    assert_eq!(cli(&["corr", "mm", "--q", "1", "--L", "0"]).code, 1);
    // Usage.
    assert_eq!(cli(&["corr", "mm", "--q", "1"]).code, 2);
    assert_eq!(cli(&["nonsense"]).code, 2);
    assert_eq!(cli(&["sym", "product", "--group", "C2v", "B1", "Q7"]).code, 2);
    assert_eq!(cli(&["lattice", "defect", "--kind", "nv"]).code, 2);
    assert_eq!(cli(&["--threads", "0", "corr", "mm", "--q", "1", "--L", "10"]).code, 2);
    // I/O.
    let o = cli(&["optics", "eval", "/definitely/not/here.json"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.starts_with("/definitely/not/here.json: error:"), "{}", o.stderr);
    // Help and version are successful.
    let h = cli(&["--help"]);
    assert_eq!(h.code, 0);
    assert!(h.stdout.contains("Usage"));
    assert_eq!(cli(&["--version"]).code, 0);
}

#[test]
fn parse_errors_are_located() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.vasp", "x\n1.0\n1 0 0\n0 1 0\n0 0 q\nC\n1\nDirect\n0 0 0\n");
    let o = cli(&["lattice", "carve", "--structure", &bad, "--dopant", "0"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.starts_with(&format!("{bad}:5:5: error:")), "{}", o.stderr);

    let js = write(dir.path(), "t.json", "{\"transitions\": [\n  {\"label_i\": \"a\", \"label_j\": \"b\", \"vee\": \"x\"}\n]}");
    let o = cli(&["optics", "eval", &js]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.starts_with(&format!("{js}:2:")), "{}", o.stderr);
    assert!(o.stderr.contains("(at /transitions/0/vee)"), "{}", o.stderr);

    let bin = dir.path().join("bin.grid");
    std::fs::write(&bin, [0x66, 0x6f, 0xff, 0x0a]).unwrap();
    let o = cli(&["corr", "moments", bin.to_str().unwrap()]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains(":1:"), "{}", o.stderr);

    let toml = write(dir.path(), "c.toml", "eps_r = 5.0\nn_r = -1\n");
    let o = cli(&["--config", &toml, "corr", "mm", "--q", "1", "--L", "10"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.starts_with(&format!("{toml}:2:1: error:")), "{}", o.stderr);
}

#[test]
fn settings_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "a.toml", "eps_r = 10.0\n");
    let env_cfg = write(dir.path(), "b.toml", "eps_r = 20.0\n");
    let base = ["--format", "json", "corr", "mm", "--q", "1", "--L", "10"];
    let with = |extra: &[&str], env: Option<&str>| {
        let mut a: Vec<&str> = extra.to_vec();
        a.extend(base);
        e_mm(&cli_env(&a, env.map(PathBuf::from)))
    };
    let default = with(&[], None);
    let from_env = with(&[], Some(&env_cfg));
    let from_flag_cfg = with(&["--config", &cfg], Some(&env_cfg));
    let from_set = with(&["--config", &cfg, "--set", "eps_r=40"], Some(&env_cfg));
    let mut a = vec!["--config", cfg.as_str(), "--set", "eps_r=40"];
    a.extend(base);
    a.extend(["--eps", "80"]);
    let from_arg = e_mm(&cli(&a));
    assert!((default / from_env - 20.0 / 5.69).abs() < 1e-12);
    assert!((default / from_flag_cfg - 10.0 / 5.69).abs() < 1e-12);
    assert!((default / from_set - 40.0 / 5.69).abs() < 1e-12);
    assert!((default / from_arg - 80.0 / 5.69).abs() < 1e-12);
    assert_eq!(cli(&["--set", "nope=1", "corr", "mm", "--q", "1", "--L", "10"]).code, 2);
    assert_eq!(cli(&["--set", "eps_r", "corr", "mm", "--q", "1", "--L", "10"]).code, 2);
    assert_eq!(cli_env(&base, Some(PathBuf::from("/missing.toml"))).code, 2);
}

#[test]
fn text_and_json_show_the_same_numbers() {
    let args = ["optics", "eval", &fixture("table1.json")];
    let j = json(&args);
    let t = cli(&args);
    assert_eq!(t.code, 0);
    for (k, row) in j["payload"]["rows"].as_array().unwrap().iter().enumerate() {
        for key in ["f_total", "f_per_state", "vee_ev"] {
            let line = format!("rows[{k}].{key} = {}\n", row[key]);
            assert!(t.stdout.contains(&line), "missing {line:?}");
        }
    }
    assert!(t.stdout.starts_with("# colorcenter "));
    assert!(t.stdout.contains("# input transitions: sha256 "));
    assert_eq!(j["inputs"].as_object().unwrap().len(), 1);
}

#[test]
fn conflicting_sources_are_rejected_before_reading() {
    let o = cli(&["lattice", "carve", "--kind", "ocvc", "--structure", "/missing.vasp", "--dopant", "0"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("cannot be used with"), "{}", o.stderr);
    let o = cli(&["sym", "csm", "--kind", "ocvc", "--xyz", "/missing.xyz", "--group", "C3v"]);
    assert_eq!(o.code, 2);
    assert!(!o.stderr.contains("missing.xyz: error"));
    assert_eq!(cli(&["thermo", "ladder", "--delta-e-ct", "1", "--level", "2"]).code, 2);
    assert_eq!(cli(&["lattice", "carve", "--structure", "/missing.vasp"]).code, 2);
}

#[test]
fn artifacts_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let poscar = dir.path().join("sc.vasp");
    let o = cli(&["lattice", "build", "--n", "2", "--poscar", poscar.to_str().unwrap()]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let s = colorcenter::io::parse_poscar(&std::fs::read_to_string(&poscar).unwrap()).unwrap();
    assert_eq!(s.len(), 16);

    let xyz = dir.path().join("cap.xyz");
    let o = cli(&["lattice", "cap", "--kind", "ocvc", "--xyz", xyz.to_str().unwrap()]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let atoms = colorcenter::io::parse_xyz_atoms(&std::fs::read_to_string(&xyz).unwrap()).unwrap();
    assert_eq!(atoms.len(), 16 + 12 + 12);

    // A carved supercell written by one command is accepted by another.
    let sc = dir.path().join("defect.vasp");
    assert_eq!(cli(&["lattice", "defect", "--kind", "ocvc", "--poscar", sc.to_str().unwrap()]).code, 0);
    let dopant = json(&["lattice", "defect", "--kind", "ocvc"])["payload"]["dopant_id"].as_u64().unwrap().to_string();
    let carved = json(&["lattice", "cap", "--structure", sc.to_str().unwrap(), "--dopant", &dopant]);
    assert_eq!(carved["payload"]["formula"], "C15OF12O12");

    let out = dir.path().join("r.json");
    let o = cli(&["--format", "json", "-o", out.to_str().unwrap(), "zfs", "levels", "--d", "2.87", "--e", "0"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["payload"]["transitions"][0], 2.87);

    let o = cli(&["-o", "/no/such/dir/x.json", "zfs", "levels", "--d", "1", "--e", "0"]);
    assert_eq!(o.code, 2);
}

#[test]
fn reruns_are_byte_identical() {
    let cases: [Vec<String>; 4] = [
        vec!["optics".into(), "eval".into(), fixture("table1.json")],
        vec!["sym".into(), "detect".into(), "--kind".into(), "vcocvc".into()],
        vec!["corr".into(), "moments".into(), fixture("CHGCAR")],
        vec!["thermo".into(), "diagram".into(), fixture("levels.json")],
    ];
    for c in &cases {
        let mut a: Vec<&str> = c.iter().map(String::as_str).collect();
        a.extend(["--format", "json"]);
        let first = cli(&a);
        assert_eq!(first.code, 0, "{c:?}: {}", first.stderr);
        assert_eq!(first, cli(&a));
    }
}

#[test]
fn record_values_beat_the_default_from_flags_and_settings() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(
        dir.path(),
        "t.json",
        r#"{"transitions": [{"label_i": "a", "label_j": "b", "vee": 2.0, "mu": 3.0, "g_i": 1, "g_j": 1, "n_r": 2.0}]}"#,
    );
    let n = |extra: &[&str]| {
        let mut a = vec!["optics", "eval", t.as_str()];
        a.extend(extra);
        json(&a)["payload"]["rows"][0]["n_r"].as_f64().unwrap()
    };
    assert_eq!(n(&[]), 2.0);
    assert_eq!(n(&["--set", "n_r=1.5"]), 2.0);
    assert_eq!(n(&["--n-r", "1.7"]), 2.0);
    let d = |extra: &[&str]| {
        let mut a = vec!["optics", "eval", t.as_str()];
        a.extend(extra);
        json(&a)["payload"]["n_r_default"].as_f64().unwrap()
    };
    assert_eq!(d(&["--set", "n_r=1.5"]), 1.5);
    assert_eq!(d(&["--set", "n_r=1.5", "--n-r", "1.7"]), 1.7);
}

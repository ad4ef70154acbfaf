use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command as Process;

use serde_json::Value;
use varlp::cli::{run, Args, Command, Status};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn invoke(command: Command, config: &Path, out: &Path, strict: bool) -> Status {
    run(&Args { command, config: config.to_path_buf(), strict, seed: None, out: Some(out.to_path_buf()) })
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

const TINY_VERIFY: &str = r#"
seed = 1
refine = false

[grid]
n = 1
nodes = 128
half_width = 10.0

[corpus]
count = 4

[exponents.p]
family = "constant"
value = 2
"#;

#[test]
fn intersection_demo_passes_with_constant_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(invoke(Command::Verify, &config("intersection_young.toml"), dir.path(), false), Status::Ok);
    let v = read_json(&dir.path().join("verify.json"));
    assert_eq!(v["schema_version"], 1);
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["inequality_id"], "intersection_young");
    assert!(reports[0]["max_ratio"].as_f64().unwrap() <= 1.0 + 1e-6);
    let csv = fs::read_to_string(dir.path().join("ratios.csv")).unwrap();
    assert!(csv.starts_with("inequality_id,sample,t,lhs,rhs,ratio,case\n"));
    assert_eq!(csv.lines().count(), 25);
    let m = read_json(&dir.path().join("manifest.json"));
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(m["seed"], 11);
}

#[test]
fn malformed_configs_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cases = [
        ("syntax.toml", "seed = 1\n[grid\nn = 1\n"),
        ("unknown_field.toml", &format!("{TINY_VERIFY}\ncolour = 3\n")),
        ("bad_name.toml", &format!("{TINY_VERIFY}\n[[verify]]\ninequality = \"young_constant_r\"\np = \"nope\"\nr = 2\n")),
        ("bad_family.toml", "seed = 1\n[grid]\nn = 1\nnodes = 8\nhalf_width = 1.0\n[exponents.p]\nfamily = \"constant\"\nvalue = 0.5\n[[norm]]\nexponent = \"p\"\nfunction = \"one\"\n"),
        ("no_entries.toml", TINY_VERIFY),
    ];
    for (name, text) in cases {
        let p = write(dir.path(), name, text);
        assert_eq!(invoke(Command::Verify, &p, &out, false), Status::Schema, "{name}");
    }
    assert!(!out.exists(), "nothing is written for a rejected config");
}

#[test]
fn schema_errors_name_the_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "c.toml",
        &format!("{TINY_VERIFY}\n[[verify]]\ninequality = \"young_constant_r\"\np = \"p\"\nr = 2\nextra = 1\n"),
    );
    let outp = Process::new(env!("CARGO_BIN_EXE_varlp"))
        .args(["verify", "--config", p.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(outp.status.code(), Some(2));
    let err = String::from_utf8_lossy(&outp.stderr);
    // the parser points at the table that holds the stray key
    assert!(err.contains("line 17"), "{err}");
    assert!(err.contains("extra"), "{err}");
}

#[test]
fn seed_is_required_for_a_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let text =
        TINY_VERIFY.replace("seed = 1\n", "") + "[[verify]]\ninequality = \"young_constant_r\"\np = \"p\"\nr = 2\n";
    let p = write(dir.path(), "c.toml", &text);
    assert_eq!(invoke(Command::Verify, &p, dir.path(), false), Status::Schema);
    let with_seed = run(&Args {
        command: Command::Verify,
        config: p,
        strict: false,
        seed: Some(4),
        out: Some(dir.path().join("o")),
    });
    assert_eq!(with_seed, Status::Ok);
    assert_eq!(read_json(&dir.path().join("o/verify.json"))["seed"], 4);
}

#[test]
fn command_in_config_must_match() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(invoke(Command::Solve, &config("intersection_young.toml"), dir.path(), false), Status::Schema);
}

#[test]
fn refused_checks_are_recorded_and_strict_turns_them_into_3() {
    let dir = tempfile::tempdir().unwrap();
    // eta estimate needs p_minus >= 2
    let text = TINY_VERIFY.replace("value = 2", "value = 1.5")
        + "[[verify]]\ninequality = \"eta_halfexp\"\np = \"p\"\nvariant = \"varphi\"\n"
        + "[[verify]]\ninequality = \"young_constant_r\"\np = \"p\"\nr = 2\n";
    let p = write(dir.path(), "c.toml", &text);
    assert_eq!(invoke(Command::Verify, &p, &dir.path().join("a"), false), Status::Ok);
    let v = read_json(&dir.path().join("a/verify.json"));
    assert_eq!(v["refused"].as_array().unwrap().len(), 1);
    assert_eq!(v["refused"][0]["check"], "eta_halfexp");
    assert_eq!(v["reports"].as_array().unwrap().len(), 1);
    assert_eq!(invoke(Command::Verify, &p, &dir.path().join("b"), true), Status::Hypothesis);
    assert!(dir.path().join("b/verify.json").exists());
}

#[test]
fn large_data_under_strict_exits_with_3_and_keeps_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(invoke(Command::Solve, &config("solve_large.toml"), dir.path(), true), Status::Hypothesis);
    let v = read_json(&dir.path().join("solve.json"));
    let d = &v["diagnostics"];
    assert!(d["contraction_margin"].as_f64().unwrap() >= 1.0);
    assert_eq!(d["pass"], false);
    assert!(v["solver"].is_null());
    assert!(fs::read_to_string(dir.path().join("conditions.csv")).unwrap().contains("4 C_B |e0| < 1"));
}

#[test]
fn large_data_without_strict_is_a_numerical_abort() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(invoke(Command::Solve, &config("solve_large.toml"), dir.path(), false), Status::Numerical);
    let v = read_json(&dir.path().join("solve.json"));
    assert!(v["abort"].as_str().unwrap().contains("diverged"));
}

#[test]
fn small_data_solve_passes_the_gate_and_converges() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(invoke(Command::Solve, &config("solve_small.toml"), dir.path(), true), Status::Ok);
    let v = read_json(&dir.path().join("solve.json"));
    let d = &v["diagnostics"];
    assert_eq!(d["theorem_id"], "local_bounded_q");
    assert!((d["delta"].as_f64().unwrap() - 1.0 / 24.0).abs() < 1e-12);
    assert!(d["contraction_margin"].as_f64().unwrap() < 1.0);
    let s = &v["solver"];
    assert_eq!(s["converged"], true);
    assert!(s["mild_residual"].as_f64().unwrap() < 1e-6);
    let iters = fs::read_to_string(dir.path().join("iterations.csv")).unwrap();
    assert!(iters.starts_with("iteration,increment,ratio,norm\n"));
    assert_eq!(iters.lines().count(), 1 + s["iterations"].as_u64().unwrap() as usize);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, cfg) in [(Command::Verify, "eta_halfexp.toml"), (Command::Solve, "solve_small.toml")] {
        let a = dir.path().join(format!("{}-a", cmd.as_str()));
        let b = dir.path().join(format!("{}-b", cmd.as_str()));
        assert_eq!(invoke(cmd, &config(cfg), &a, false), Status::Ok);
        assert_eq!(invoke(cmd, &config(cfg), &b, false), Status::Ok);
        let files = read_json(&a.join("manifest.json"))["files"].clone();
        for f in files.as_array().unwrap() {
            let f = f.as_str().unwrap();
            assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
        }
    }
}

#[test]
fn thread_count_does_not_change_reports() {
    let dir = tempfile::tempdir().unwrap();
    let run_with = |threads: &str, out: &str| {
        Process::new(env!("CARGO_BIN_EXE_varlp"))
            .env("VARLP_THREADS", threads)
            .args(["verify", "--config", config("eta_halfexp.toml").to_str().unwrap(), "--out"])
            .arg(dir.path().join(out))
            .output()
            .unwrap()
    };
    assert_eq!(run_with("1", "one").status.code(), Some(0));
    assert_eq!(run_with("3", "three").status.code(), Some(0));
    assert_eq!(
        fs::read(dir.path().join("one/verify.json")).unwrap(),
        fs::read(dir.path().join("three/verify.json")).unwrap()
    );
    assert_eq!(read_json(&dir.path().join("three/manifest.json"))["threads"], 3);
    assert_eq!(run_with("zero", "bad").status.code(), Some(2));
}

#[test]
fn unit_norm_matches_the_transcendental_root() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(invoke(Command::Norm, &config("unit_norm.toml"), dir.path(), false), Status::Ok);
    let v = read_json(&dir.path().join("norm.json"));
    let e = &v["norms"][0];
    let norm = e["samples"][0]["norm"].as_f64().unwrap();
    // λ ln λ = 2
    assert!((norm - 2.345_750_756_3).abs() < 1e-3, "{norm}");
    assert_eq!(e["box_growth"]["stabilized"], true);
    assert_eq!(e["pass"], true);
}

#[test]
fn failed_bound_in_norm_exits_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let text =
        fs::read_to_string(config("unit_norm.toml")).unwrap().replace("at_most = 7.38905609893065", "at_most = 2.0");
    let p = write(dir.path(), "c.toml", &text);
    assert_eq!(invoke(Command::Norm, &p, &dir.path().join("o"), false), Status::AssertionFailed);
}

#[test]
fn report_summarises_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = fs::read_to_string(config("eta_halfexp.toml")).unwrap().replace("command = \"verify\"\n", "");
    let any = write(dir.path(), "any.toml", &cfg);
    let out = dir.path().join("o");
    assert_eq!(invoke(Command::Report, &any, &out, false), Status::Schema, "nothing to summarise yet");
    assert_eq!(invoke(Command::Verify, &config("eta_halfexp.toml"), &out, false), Status::Ok);
    assert_eq!(invoke(Command::Semigroup, &config("smoothing_variable.toml"), &out, false), Status::Ok);
    assert_eq!(invoke(Command::Report, &any, &out, false), Status::Ok);
    let csv = fs::read_to_string(out.join("summary.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "source,id,verdict,max_ratio");
    assert!(lines[1].starts_with("verify,eta_halfexp,pass,"));
    assert!(lines[2].starts_with("verify,product_l2,pass,"));
    assert!(lines[3].starts_with("semigroup,smoothing_sigma,pass,"));
    assert_eq!(lines.len(), 6);
    assert_eq!(read_json(&out.join("summary.json"))["pass"], true);
}

#[test]
fn formats_select_the_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let text = TINY_VERIFY.to_string()
        + "[[verify]]\ninequality = \"young_constant_r\"\np = \"p\"\nr = 2\n[output]\nformats = [\"csv\"]\n";
    let p = write(dir.path(), "c.toml", &text);
    assert_eq!(invoke(Command::Verify, &p, dir.path(), false), Status::Ok);
    assert!(!dir.path().join("verify.json").exists());
    assert!(dir.path().join("ratios.csv").exists());
    let files = read_json(&dir.path().join("manifest.json"))["files"].clone();
    assert_eq!(files, serde_json::json!(["ratios.csv", "curves.csv"]));
}

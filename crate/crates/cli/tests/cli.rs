//! End-to-end runs of the `metac` binary: exit codes, output shapes,
//! configuration handling, and the external-solver plumbing via a fake
//! solver script.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const TINY: &str = "a :- initially.\nnext((2,3),b) :- a.\n";

fn metac() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_metac"));
    // isolate each invocation from the developer's environment
    cmd.env_remove("METAC_ASP_BIN")
        .env_remove("METAC_ASPDC_BIN")
        .env_remove("METAC_ATOM_CAP")
        .env_remove("METAC_VAR_CAP");
    cmd
}

fn write_tiny(dir: &TempDir) -> PathBuf {
    let path = dir.path().join("tiny.mlp");
    fs::write(&path, TINY).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

fn fake_solver(dir: &Path, body: &str) -> PathBuf {
    use std::os::unix::fs::PermissionsExt;
    let path = dir.join("fake-solver.sh");
    fs::write(&path, format!("#!/bin/sh\ncat > /dev/null\n{body}\n")).unwrap();
    fs::set_permissions(&path, fs::Permissions::from_mode(0o755)).unwrap();
    path
}

#[test]
fn solve_prints_traces_and_a_count() {
    let dir = TempDir::new().unwrap();
    let tiny = write_tiny(&dir);
    let out = metac()
        .args(["solve"])
        .arg(&tiny)
        .args(["--backend", "bool", "--lambda", "2", "--nu", "3", "--all"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("model 1:"), "{text}");
    assert!(text.contains("step 0: {a} @ time 0"), "{text}");
    assert!(text.contains("step 1: {b} @ time 2"), "{text}");
    assert!(text.ends_with("1 model\n"), "{text}");
}

#[test]
fn solve_agrees_across_backends() {
    let dir = TempDir::new().unwrap();
    let tiny = write_tiny(&dir);
    let bool_out = metac()
        .args(["solve"])
        .arg(&tiny)
        .args(["--backend", "bool", "--lambda", "2", "--nu", "3", "--all"])
        .output()
        .unwrap();
    let dc_out = metac()
        .args(["solve"])
        .arg(&tiny)
        .args(["--backend", "dc", "--lambda", "2", "--nu", "3", "--all"])
        .output()
        .unwrap();
    assert_eq!(code(&bool_out), 0);
    assert_eq!(code(&dc_out), 0);
    assert_eq!(stdout(&bool_out), stdout(&dc_out));
}

#[test]
fn unsatisfiable_programs_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("unsat.mlp");
    fs::write(&path, "a :- initially.\n:- a.\n").unwrap();
    let out = metac()
        .args(["solve"])
        .arg(&path)
        .args(["--backend", "bool", "--lambda", "1", "--nu", "1"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out), "UNSATISFIABLE\n");
}

#[test]
fn bool_backend_without_nu_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let tiny = write_tiny(&dir);
    for subcommand in ["compile", "solve", "stats"] {
        let out = metac()
            .args([subcommand])
            .arg(&tiny)
            .args(["--backend", "bool", "--lambda", "2"])
            .output()
            .unwrap();
        assert_eq!(code(&out), 2, "{subcommand}");
        assert!(stderr(&out).contains("--nu"), "{subcommand}: {}", stderr(&out));
    }
}

#[test]
fn dc_compile_warns_about_nu_and_ignores_it() {
    let dir = TempDir::new().unwrap();
    let tiny = write_tiny(&dir);
    let with_nu = metac()
        .args(["compile"])
        .arg(&tiny)
        .args(["--backend", "dc", "--lambda", "2", "--nu", "7"])
        .output()
        .unwrap();
    assert_eq!(code(&with_nu), 0);
    assert!(stderr(&with_nu).contains("ignored"), "{}", stderr(&with_nu));
    let without = metac()
        .args(["compile"])
        .arg(&tiny)
        .args(["--backend", "dc", "--lambda", "2"])
        .output()
        .unwrap();
    assert_eq!(stdout(&with_nu), stdout(&without));
    assert!(stderr(&without).is_empty());
}

#[test]
fn compile_emits_the_expected_text_and_writes_files() {
    let dir = TempDir::new().unwrap();
    let tiny = write_tiny(&dir);
    let out = metac()
        .args(["compile"])
        .arg(&tiny)
        .args(["--backend", "bool", "--lambda", "2", "--nu", "3"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("o(a,0).\n"), "{text}");
    assert!(text.contains("t(1,1) ; t(1,2) ; t(1,3) :- t(0,0)."), "{text}");

    let target = dir.path().join("out.lp");
    let out = metac()
        .args(["compile"])
        .arg(&tiny)
        .args(["--backend", "bool", "--lambda", "2", "--nu", "3", "-o"])
        .arg(&target)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
    assert_eq!(fs::read_to_string(&target).unwrap(), text);
}

#[test]
fn compile_json_round_trips() {
    let dir = TempDir::new().unwrap();
    let tiny = write_tiny(&dir);
    let out = metac()
        .args(["compile"])
        .arg(&tiny)
        .args(["--backend", "dc", "--lambda", "2", "--format", "json"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["format"], "metac-ground");
    assert_eq!(value["backend"], "dc");
}

#[test]
fn head_shift_toggle_changes_dc_output() {
    let dir = TempDir::new().unwrap();
    let tiny = write_tiny(&dir);
    let shifted = metac()
        .args(["compile"])
        .arg(&tiny)
        .args(["--backend", "dc", "--lambda", "2"])
        .output()
        .unwrap();
    let plain = metac()
        .args(["compile"])
        .arg(&tiny)
        .args(["--backend", "dc", "--lambda", "2", "--head-shift", "off"])
        .output()
        .unwrap();
    assert!(stdout(&shifted).contains("&sum{t(0) ; -t(1)} <= -2 :- o(a,0)."));
    assert!(stdout(&plain).contains(":- o(a,0), not &sum{t(0) ; -t(1)} <= -2."));
}

#[test]
fn malformed_input_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.mlp");
    fs::write(&path, "a :- B.\n").unwrap();
    let out = metac()
        .args(["solve"])
        .arg(&path)
        .args(["--backend", "bool", "--lambda", "1", "--nu", "1"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("bad.mlp"), "{}", stderr(&out));

    let missing = metac()
        .args(["solve", "no-such-file.mlp", "--backend", "bool", "--lambda", "1", "--nu", "1"])
        .output()
        .unwrap();
    assert_eq!(code(&missing), 3);
}

#[test]
fn cap_overruns_exit_with_four() {
    let dir = TempDir::new().unwrap();
    let tiny = write_tiny(&dir);
    let out = metac()
        .env("METAC_ATOM_CAP", "3")
        .args(["solve"])
        .arg(&tiny)
        .args(["--backend", "bool", "--lambda", "2", "--nu", "3"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    assert!(stderr(&out).contains("cap"), "{}", stderr(&out));
}

#[test]
fn config_file_sets_caps_with_environment_override() {
    let dir = TempDir::new().unwrap();
    let tiny = write_tiny(&dir);
    let config = dir.path().join("metac.toml");
    fs::write(&config, "[caps]\natom_cap = 3\n").unwrap();
    let out = metac()
        .current_dir(dir.path())
        .args(["solve", "tiny.mlp", "--backend", "bool", "--lambda", "2", "--nu", "3"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    // the environment wins over the file
    let out = metac()
        .current_dir(dir.path())
        .env("METAC_ATOM_CAP", "64")
        .args(["solve", "tiny.mlp", "--backend", "bool", "--lambda", "2", "--nu", "3"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let _ = tiny;
}

#[test]
fn malformed_config_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let tiny = write_tiny(&dir);
    let config = dir.path().join("metac.toml");
    fs::write(&config, "[caps]\nnot_a_cap = true\n").unwrap();
    let out = metac()
        .current_dir(dir.path())
        .args(["solve", "tiny.mlp", "--backend", "bool", "--lambda", "2", "--nu", "3"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let _ = tiny;
}

#[test]
fn external_engine_without_a_binary_exits_with_five() {
    let dir = TempDir::new().unwrap();
    let tiny = write_tiny(&dir);
    let out = metac()
        .args(["solve"])
        .arg(&tiny)
        .args(["--backend", "bool", "--lambda", "2", "--nu", "3", "--engine", "external"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 5);
    assert!(stderr(&out).contains("METAC_ASP_BIN"), "{}", stderr(&out));
}

#[test]
fn external_engine_parses_solver_answers() {
    let dir = TempDir::new().unwrap();
    let tiny = write_tiny(&dir);
    let solver = fake_solver(
        dir.path(),
        "echo 'Answer: 1'\necho 'o(a,0) t(0,0) o(b,1) t(1,2)'\necho SATISFIABLE\nexit 30",
    );
    let out = metac()
        .env("METAC_ASP_BIN", &solver)
        .args(["solve"])
        .arg(&tiny)
        .args(["--backend", "bool", "--lambda", "2", "--nu", "3", "--engine", "external", "--all"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("step 1: {b} @ time 2"), "{text}");
    assert!(text.ends_with("1 model\n"), "{text}");
}

#[test]
fn external_engine_reads_the_binary_from_the_config_file() {
    let dir = TempDir::new().unwrap();
    write_tiny(&dir);
    let solver = fake_solver(dir.path(), "echo UNSATISFIABLE\nexit 20");
    fs::write(
        dir.path().join("metac.toml"),
        format!("[solvers]\nasp_bin = \"{}\"\n", solver.display()),
    )
    .unwrap();
    let out = metac()
        .current_dir(dir.path())
        .args(["solve", "tiny.mlp", "--backend", "bool", "--lambda", "2", "--nu", "3"])
        .args(["--engine", "external"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    assert_eq!(stdout(&out), "UNSATISFIABLE\n");
}

#[test]
fn external_solver_failures_exit_with_five() {
    let dir = TempDir::new().unwrap();
    let tiny = write_tiny(&dir);
    let solver = fake_solver(dir.path(), "echo boom >&2\nexit 65");
    let out = metac()
        .env("METAC_ASP_BIN", &solver)
        .args(["solve"])
        .arg(&tiny)
        .args(["--backend", "bool", "--lambda", "2", "--nu", "3", "--engine", "external"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 5);
    assert!(stderr(&out).contains("boom"), "{}", stderr(&out));
}

#[test]
fn verify_reports_pass_per_backend() {
    let dir = TempDir::new().unwrap();
    let tiny = write_tiny(&dir);
    let out = metac()
        .args(["verify"])
        .arg(&tiny)
        .args(["--lambda", "2", "--nu", "3"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("bool: PASS"), "{text}");
    assert!(text.contains("dc: PASS"), "{text}");
    assert!(text.contains("2/2 checks passed"), "{text}");
}

#[test]
fn verify_random_is_deterministic_and_emits_json() {
    let run = || {
        let out = metac()
            .args(["verify", "--random", "4", "--seed", "9", "--lambda", "2", "--nu", "2"])
            .args(["--backend", "bool", "--json"])
            .output()
            .unwrap();
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        stdout(&out)
    };
    let first = run();
    assert_eq!(first, run());
    let reports: serde_json::Value = serde_json::from_str(&first).unwrap();
    let list = reports.as_array().unwrap();
    assert_eq!(list.len(), 4);
    assert_eq!(list[0]["format"], "metac-verify");
    assert_eq!(list[0]["generator"]["seed"], 9);
    assert_eq!(list[3]["generator"]["index"], 3);
}

#[test]
fn verify_needs_a_file_or_a_seeded_count() {
    let no_source = metac().args(["verify", "--lambda", "2", "--nu", "2"]).output().unwrap();
    assert_eq!(code(&no_source), 2);
    let no_seed =
        metac().args(["verify", "--random", "2", "--lambda", "2", "--nu", "2"]).output().unwrap();
    assert_eq!(code(&no_seed), 2);
    assert!(stderr(&no_seed).contains("--seed"), "{}", stderr(&no_seed));
}

#[test]
fn stats_prints_the_size_counters() {
    let dir = TempDir::new().unwrap();
    let tiny = write_tiny(&dir);
    let out = metac()
        .args(["stats"])
        .arg(&tiny)
        .args(["--backend", "bool", "--lambda", "2", "--nu", "3"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("backend: bool"), "{text}");
    assert!(text.contains("generated: core 4 + timing 5 + constraints 4 = 13"), "{text}");

    let json = metac()
        .args(["stats"])
        .arg(&tiny)
        .args(["--backend", "dc", "--lambda", "2", "--json"])
        .output()
        .unwrap();
    let value: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(value["backend"], "dc");
    assert_eq!(value["generated"]["timing"], 2);
}

#[test]
fn bench_walks_a_corpus_directory() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("tiny.mlp"), TINY).unwrap();
    fs::write(dir.path().join("notes.txt"), "not a program").unwrap();
    let out = metac()
        .args(["bench"])
        .arg(dir.path())
        .args(["--scales", "1,2", "--lambda", "2", "--base-nu", "5"])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("tiny"), "{text}");
    assert!(text.contains("dc scale-invariant: true"), "{text}");

    let json = metac()
        .args(["bench"])
        .arg(dir.path())
        .args(["--scales", "1,2", "--lambda", "2", "--base-nu", "5", "--json"])
        .output()
        .unwrap();
    let value: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(value["format"], "metac-bench");
    assert_eq!(value["entries"].as_array().unwrap().len(), 2);
}

#[test]
fn missing_bench_directory_is_an_input_error() {
    let out = metac().args(["bench", "no-such-dir"]).output().unwrap();
    assert_eq!(code(&out), 3);
}

use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn lfoc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lfoc"))
        .args(args)
        .current_dir(root())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lfoc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn countdown_below_the_time_diverges() {
    let o = lfoc(&["countdown", "samples/two_beta.lfoc", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).trim_end().ends_with("Diverges"), "{}", stdout(&o));
    let o = lfoc(&["countdown", "samples/two_beta.lfoc", "2", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "normalizes");
    assert_eq!(v["counter"], 0);
}

#[test]
fn certify_cbn_identity_application() {
    let o = lfoc(&["certify", "corpus/cbn_id_id/deriv.json", "--monoid", "nat", "--json"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["bound_respected"], true);
    assert_eq!(v["linear_bound_respected"], true);
    assert_eq!(v["time"], 1);
    assert_eq!(v["steps"]["beta"], 1);
}

#[test]
fn certify_the_whole_corpus() {
    let o = lfoc(&["certify", "--all", "corpus"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("41 entries, 41 passed, 0 failed"), "{}", stdout(&o));
}

#[test]
fn soft_entries_fail_the_nat_bound_only_by_capability() {
    // the soft exponential does not exist in the integer monoid
    let o = lfoc(&["certify", "corpus/sal_use_1/deriv.json", "--monoid", "nat"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("soft exponential"));
}

#[test]
fn force_on_a_shift() {
    let o = lfoc(&["force", "dn X", "r"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("A*:     \\r1:i. dn X r1"), "{out}");
    assert!(out.contains(") r\n"), "applied to r: {out}");
    assert!(out.contains("kind:   o-"), "{out}");
}

#[test]
fn parse_errors_carry_positions() {
    let bad = scratch("bad.lfoc", "<+x |\n  mu (+a, +a). <a | b>>\n");
    let o = lfoc(&["parse", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr).into_owned();
    assert!(err.contains("bad.lfoc:2:"), "{err}");
}

#[test]
fn run_prints_a_trace() {
    let o = lfoc(&["run", "samples/two_beta.lfoc"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("1\tbeta\t"), "{out}");
    assert!(out.ends_with("# outcome=normal mu=0 beta=2 bang=0\n"), "{out}");
    let o = lfoc(&["run", "samples/two_beta.lfoc", "--fuel", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn encode_with_derivation_round_trips_through_check() {
    let o = lfoc(&["encode", "cbv", "samples/k_id_id.lam", "--derive", "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["type"], "o1 -> o1");
    let deriv = scratch("k.json", &v["derivation"].to_string());
    let o = lfoc(&["certify", deriv.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict: PASS"));
}

#[test]
fn encode_rejects_a_wrong_type() {
    let o = lfoc(&["encode", "cbn", "samples/k_id_id.lam", "--type", "a -> b"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selftest_single_criterion() {
    let o = lfoc(&["selftest", "--only", "6"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("criterion 6: PASS"), "{}", stdout(&o));
    assert!(stdout(&o).contains("1/1 passed"));
}

#[test]
fn check_respects_the_mode_flag() {
    let o = lfoc(&["check", "corpus/sal_use_1/deriv.json"]);
    assert!(o.status.success());
    let o = lfoc(&["check", "corpus/sal_use_1/deriv.json", "--mode", "mal"]);
    assert_eq!(o.status.code(), Some(2));
}

use std::path::Path;
use std::process::{Command, Output};

use gcs_core::codec::{parse_gcs_records, parse_matrix_text, read_hmat};
use gcs_core::constructions::GcsSet;
use gcs_core::golay::is_golay;
use gcs_core::hadamard::verify_hadamard_full;

fn gcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcs")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn pair_26_is_complementary() {
    let o = gcs(&["pair", "26"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let recs = parse_gcs_records(&stdout(&o)).unwrap();
    assert_eq!(recs.len(), 1);
    let set = GcsSet::certify(recs[0].clone()).unwrap();
    assert_eq!((set.cardinality(), set.max_len()), (2, 26));
}

#[test]
fn uncovered_pair_length_exits_3() {
    let o = gcs(&["pair", "7"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr(&o).lines().count(), 1);
}

#[test]
fn set_87_with_plan_reverifies() {
    let dir = tempfile::tempdir().unwrap();
    let seqs = dir.path().join("s.gcs");
    let plan = dir.path().join("p.json");
    let o = gcs(&["set", "87", "--plan", arg(&plan), "-o", arg(&seqs)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&plan).unwrap()).unwrap();
    assert_eq!(json["length"], 87);
    for f in [&seqs, &plan] {
        let v = gcs(&["verify", arg(f)]);
        assert!(v.status.success(), "{}", stderr(&v));
    }
}

#[test]
fn gs_matrix_file_reverifies() {
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("h.hmat");
    let txt = dir.path().join("h.txt");
    assert!(gcs(&["hadamard", "gs", "87", "-o", arg(&bin)]).status.success());
    assert!(gcs(&["hadamard", "gs", "87", "-o", arg(&txt)]).status.success());
    let a = read_hmat(&std::fs::read(&bin).unwrap()).unwrap();
    let b = parse_matrix_text(&std::fs::read_to_string(&txt).unwrap()).unwrap();
    assert_eq!(a.order(), 696);
    assert_eq!(a.to_rows(), b.to_rows());
    assert!(verify_hadamard_full(&a).ok);
    let v = gcs(&["verify", arg(&bin)]);
    assert!(v.status.success());
}

#[test]
fn corrupted_matrix_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let txt = dir.path().join("h.txt");
    assert!(gcs(&["hadamard", "gs", "1", "-o", arg(&txt)]).status.success());
    let text = std::fs::read_to_string(&txt).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let flipped = if lines[2].starts_with('+') { "-" } else { "+" };
    lines[2].replace_range(0..1, flipped);
    std::fs::write(&txt, lines.join("\n") + "\n").unwrap();
    assert_eq!(gcs(&["verify", arg(&txt)]).status.code(), Some(1));
}

#[test]
fn malformed_token_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.gcs");
    std::fs::write(&f, "#gcs n=3 L=2\n1,1,-1\n1,2,1\n").unwrap();
    let o = gcs(&["verify", arg(&f)]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("column"), "{err}");
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Vec<u8>> = ["1", "3"]
        .iter()
        .map(|jobs| {
            let f = dir.path().join(format!("s{jobs}.gcs"));
            let o = gcs(&["--jobs", jobs, "set", "1000", "-o", arg(&f)]);
            assert!(o.status.success(), "{}", stderr(&o));
            std::fs::read(&f).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn density_k1_matches_membership() {
    let o = gcs(&["density", "--k", "1", "--limit", "2000"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,rho,density"));
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let n: u64 = f[0].parse().unwrap();
        let rho: u64 = f[1].parse().unwrap();
        assert_eq!(rho, (1..=n).filter(|&m| is_golay(m)).count() as u64, "n = {n}");
    }
}

#[test]
fn conflicting_flags_rejected_before_work() {
    assert_eq!(gcs(&["density", "--k", "1", "--dense", "--limit", "10"]).status.code(), Some(2));
    assert_eq!(gcs(&["hadamard", "sp", "--cbs", "9:8", "--mult", "1,2"]).status.code(), Some(2));
}

#[test]
fn memory_cap_exits_4() {
    let o = Command::new(env!("CARGO_BIN_EXE_gcs"))
        .args(["coverage", "--k", "2", "--limit", "100000"])
        .env("GCS_MEMORY_CAP", "1K")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
}

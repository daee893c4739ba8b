use std::process::{Command, Output};

use goebel_cli::record::RunRecord;

fn goebel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_goebel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_temp(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("goebel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn seq_listings() {
    let o = goebel(&["seq", "--k", "2", "--n-max", "0"]);
    assert_eq!(stdout(&o), "1\n");
    let o = goebel(&["seq", "--k", "3", "--n-max", "4", "--format", "csv"]);
    assert_eq!(stdout(&o), "n,g\n0,1\n1,2\n2,5\n3,45\n4,22815\n");
}

#[test]
fn seq_over_budget_is_partial_with_exit_two() {
    let o = goebel(&["seq", "--k", "2", "--n-max", "12", "--digit-budget", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "1 2 3 5 10 28 154 3520\n");
    assert!(stderr(&o).contains("truncated at n = 8"));
}

#[test]
fn modseq_domain_error_names_the_limit() {
    let o = goebel(&["modseq", "--k", "2", "--p", "7", "--r", "2", "--n-max", "21"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("largest legal n_max is 20"), "{}", stderr(&o));
}

#[test]
fn modseq_flags_zero_precision() {
    let o = goebel(&[
        "modseq", "--k", "2", "--p", "7", "--r", "2", "--n-max", "18", "--format", "json",
    ]);
    let record = RunRecord::from_json(&stdout(&o)).unwrap();
    assert!(record.notes.iter().any(|n| n.contains("from n = 14")));
    assert_eq!(record.results[6].value, "{6,1}");
}

#[test]
fn nk_single_and_variant() {
    let o = goebel(&["nk", "--k", "6", "--format", "csv"]);
    assert_eq!(
        stdout(&o),
        "k,n_k,certificate_prime,certificate_index\n6,19,p=19,n=19\n"
    );
    let o = goebel(&["nk", "--k", "2", "--init", "3"]);
    assert_eq!(stdout(&o), "2 7 p=7 n=7\n");
    let o = goebel(&["nk", "--k", "2", "--init", "1", "--hard-cap", "128"]);
    assert_eq!(stdout(&o), "2 >128\n");
}

#[test]
fn nk_is_independent_of_jobs() {
    let results = |jobs: &str| {
        let o = goebel(&["nk", "--k", "2..24", "--jobs", jobs, "--format", "json"]);
        assert!(o.status.success());
        let r = RunRecord::from_json(&stdout(&o)).unwrap();
        (r.results, r.certificates)
    };
    assert_eq!(results("1"), results("4"));
}

#[test]
fn bad_usage_exits_two() {
    assert_eq!(goebel(&["nk", "--k", "1"]).status.code(), Some(2));
    assert_eq!(goebel(&["nk", "--k", "9..3"]).status.code(), Some(2));
    assert_eq!(goebel(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        goebel(&["modseq", "--k", "2", "--p", "8", "--r", "1", "--n-max", "3"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_fails_loudly_on_corrupted_arithmetic() {
    let o = Command::new(env!("CARGO_BIN_EXE_goebel"))
        .arg("verify")
        .env("GOEBEL_FAULT_INJECT", "40,5")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("k = 40, p = 5"), "{}", stderr(&o));
}

#[test]
fn verify_json_is_a_theorem_report() {
    let o = goebel(&["verify", "--json"]);
    assert!(o.status.success());
    let report: goebel::TheoremReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.min_nk, Some(19));
    assert_eq!(report.failing_classes, vec![6, 14]);
}

#[test]
fn oeis_check_matches_and_mismatches() {
    let good = write_temp("good.txt", "# A108394\n2 43\r\n3 89\n");
    let o = goebel(&["oeis-check", good.to_str().unwrap(), "--k-to", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("2 matches, 0 mismatches"));

    let shifted = write_temp("shifted.txt", "0 43\n1 89\n");
    let o = goebel(&["oeis-check", shifted.to_str().unwrap(), "--offset", "0"]);
    assert_eq!(o.status.code(), Some(0));

    let wrong = write_temp("wrong.txt", "2 43\n3 90\n");
    let o = goebel(&["oeis-check", wrong.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("mismatch expected=90 computed=89"));

    let bad = write_temp("bad.txt", "2 fortythree\n");
    let o = goebel(&["oeis-check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1"));
}

#[test]
fn nset_examples() {
    let o = goebel(&["nset", "--k-to", "2"]);
    assert_eq!(stdout(&o), "43 prime k = 2\n");

    let o = goebel(&["nset", "--k-to", "61", "--format", "json"]);
    let record = RunRecord::from_json(&stdout(&o)).unwrap();
    let smallest = |v: &str| record.results.iter().find(|r| r.index == v).map(|r| r.value.clone());
    assert_eq!(smallest("19").as_deref(), Some("6"));
    assert_eq!(smallest("214").as_deref(), Some("5"));
    assert_eq!(smallest("23").as_deref(), Some("16"));
    assert_eq!(smallest("41"), None);
    let text = stdout(&goebel(&["nset", "--k-to", "61"]));
    assert!(text.contains("23 prime k = 16,38\n"), "{text}");
    assert!(text.contains("214 composite k = 5\n"));
}

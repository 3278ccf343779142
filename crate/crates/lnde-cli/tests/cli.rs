//! End-to-end checks of the binary: exit codes, report shapes, and
//! byte-stable output files.

use std::process::{Command, Output};

fn lnde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lnde"))
        .args(args)
        .env_remove("LNDE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn add_three_ones() {
    let out = lnde(&["add", "--inputs", "111"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("outputs=11"), "{text}");
    assert!(text.contains("S=3"), "{text}");
    assert!(text.contains("verified=1/1"), "{text}");
}

#[test]
fn seed_env_var_sets_the_default() {
    let out = Command::new(env!("CARGO_BIN_EXE_lnde"))
        .args(["add", "--inputs", "1010"])
        .env("LNDE_SEED", "12345")
        .output()
        .expect("binary runs");
    assert!(out.status.success());
    assert!(stdout(&out).contains("seed=12345"), "{}", stdout(&out));
}

#[test]
fn add_length_mismatch_is_usage_error() {
    let out = lnde(&["add", "--inputs", "10", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn add_rejects_malformed_bits() {
    let out = lnde(&["add", "--inputs", "10a1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn add_random_batch_verifies_against_the_sum() {
    let out = lnde(&["add", "--n", "8", "--random", "100", "--seed", "7"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("verified=100/100"));
}

#[test]
fn add_both_backends_agree() {
    let out = lnde(&["add", "--inputs", "10110", "--backend", "both"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("backend=both"));
}

#[test]
fn add_table_format_has_one_row_per_run() {
    let out = lnde(&["add", "--n", "4", "--random", "3", "--format", "table"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("run\tN\tm\tseed\t"), "{text}");
    assert_eq!(text.lines().count(), 1 + 3 + 1); // header + rows + verified
}

#[test]
fn transcripts_are_byte_identical_for_same_seed() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = lnde(&[
            "add",
            "--n",
            "6",
            "--random",
            "5",
            "--seed",
            "40",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    for index in 0..5 {
        let name = format!("transcript_{index:04}.txt");
        let a = std::fs::read(dir_a.path().join(&name)).unwrap();
        let b = std::fs::read(dir_b.path().join(&name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
        assert!(!a.is_empty());
    }
}

#[test]
fn search_reports_the_majority_digit_infeasible() {
    let out = lnde(&["search", "--n", "3", "--m", "2", "--target", "s1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("feasible=false"), "{text}");
    assert!(text.contains("strategies_examined=4096"), "{text}");
    assert!(text.contains("wall_time_ms="), "{text}");
}

#[test]
fn search_finds_the_parity_witness() {
    let out = lnde(&["search", "--n", "3", "--m", "1", "--target", "s0"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("feasible=true"), "{text}");
    assert!(text.contains("witness.C[0]=111"), "{text}");
    assert!(text.contains("witness.B=0"), "{text}");
    assert!(text.contains("witness.H[0]=2"), "{text}");
}

#[test]
fn search_with_derived_m_rejects_top_digit() {
    // m defaults to floor(log2 4) + 1 = 3 for N=4.
    let out = lnde(&["search", "--n", "4", "--target", "s2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("feasible=false"));
}

#[test]
fn search_over_budget_exits_three() {
    let out = lnde(&["search", "--n", "10", "--m", "5", "--target", "s2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("154742504910672534362390528"), "{}", stderr(&out));
}

#[test]
fn search_report_files_are_byte_identical() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = lnde(&[
            "search",
            "--n",
            "3",
            "--m",
            "2",
            "--target",
            "s1",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let name = "search_s1_n3_m2.txt";
    let a = std::fs::read(dir_a.path().join(name)).unwrap();
    let b = std::fs::read(dir_b.path().join(name)).unwrap();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(!text.contains("wall_time"), "report files stay deterministic");
}

#[test]
fn anf_of_the_top_digit_is_the_full_product() {
    let out = lnde(&["anf", "--digit", "4:2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "anf=x0*x1*x2*x3\ndegree=4\n");
}

#[test]
fn anf_of_the_three_sender_middle_digit() {
    let out = lnde(&["anf", "--digit", "3:1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "anf=x0*x1 + x0*x2 + x1*x2\ndegree=2\n");
}

#[test]
fn anf_accepts_truth_table_literals() {
    let out = lnde(&["anf", "--tt", "k=2:8"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "anf=x0*x1\ndegree=2\n");
}

#[test]
fn anf_rejects_bad_tables() {
    let out = lnde(&["anf", "--tt", "k=2:zz"]);
    assert_eq!(out.status.code(), Some(2));
    let out = lnde(&["anf", "--digit", "4-2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_quick_passes() {
    let out = lnde(&["verify", "--quick"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 10, "{text}");
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
}

#[test]
fn verify_negative_control_fails_at_residual_phase() {
    let out = lnde(&["verify", "--quick", "--flip-rotation-sign"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("FAIL residual-phase"), "{text}");
}

#[test]
fn verify_reports_are_byte_identical() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = lnde(&[
            "verify",
            "--quick",
            "--seed",
            "3",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let a = std::fs::read(dir_a.path().join("verify_report.txt")).unwrap();
    let b = std::fs::read(dir_b.path().join("verify_report.txt")).unwrap();
    assert_eq!(a, b);
}

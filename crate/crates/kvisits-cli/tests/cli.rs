//! End-to-end tests for the `kvisits` binary: the exit-code contract, the
//! TSV payloads, and determinism of generation. Everything runs the real
//! executable via `CARGO_BIN_EXE_kvisits` in a temporary directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kvisits"))
}

fn write(dir: &TempDir, name: &str, content: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, content).expect("test file is writable");
    path
}

fn run(mut cmd: Command) -> (i32, String, String) {
    let Output { status, stdout, stderr } = cmd.output().expect("binary runs");
    (
        status.code().expect("no signal"),
        String::from_utf8(stdout).expect("stdout is UTF-8"),
        String::from_utf8(stderr).expect("stderr is UTF-8"),
    )
}

fn args(cmd: &mut Command, list: &[&str]) {
    for a in list {
        cmd.arg(a);
    }
}

fn run_args(list: &[&str], paths: &[&Path]) -> (i32, String, String) {
    let mut cmd = bin();
    args(&mut cmd, list);
    for p in paths {
        cmd.arg(p);
    }
    run(cmd)
}

const GOLDEN7: &str = "kvisits 1\nk 2\ndeadlines 6 8 8 8 11 11 14\n";
const GOLDEN12: &str = "kvisits 1\nk 2\ndeadlines 4 5 6 7 8 8 10 10 11 15 22 23\n";

#[test]
fn solve_feasible_instance_exits_zero_with_schedule() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "g7.txt", GOLDEN7);
    let (code, out, _) = run_args(&["solve"], &[&file]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict\tfeasible"));
    let schedule_line = out
        .lines()
        .find(|l| l.starts_with("schedule\t"))
        .expect("schedule line present");
    let entries: Vec<usize> = schedule_line
        .split('\t')
        .nth(1)
        .unwrap()
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(entries.len(), 14);
    for node in 1..=7 {
        assert_eq!(entries.iter().filter(|&&e| e == node).count(), 2);
    }
}

#[test]
fn solve_infeasible_instance_exits_one_with_reason() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "bad.txt", "kvisits 1\nk 2\ndeadlines 2 2 4 4\n");
    let (code, out, _) = run_args(&["solve"], &[&file]);
    assert_eq!(code, 1);
    assert!(out.contains("verdict\tinfeasible"));
    assert!(out.contains("reason\tcluster-matching-infeasible"));
}

#[test]
fn solve_refuses_three_visits_pointing_at_oracle() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "k3.txt", "kvisits 1\nk 3\ndeadlines 2 3 6\n");
    let (code, out, err) = run_args(&["solve"], &[&file]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("oracle"));
}

#[test]
fn solve_k_override_replaces_file_visit_count() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "g7.txt", GOLDEN7);
    let (code, out, _) = run_args(&["solve", "--k", "1"], &[&file]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict\tfeasible"));
    let (code, _, err) = run_args(&["solve", "--k", "4"], &[&file]);
    assert_eq!(code, 2);
    assert!(err.contains("k = 4"));
}

#[test]
fn solve_trace_reports_per_cluster_dispatch() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "g12.txt", GOLDEN12);
    let (code, out, _) = run_args(&["solve", "--trace"], &[&file]);
    assert_eq!(code, 0);
    let trace: Vec<&str> = out.lines().filter(|l| l.starts_with("trace\t")).collect();
    assert_eq!(trace.len(), 3);
    assert_eq!(trace[0], "trace\t1\t1\t9\texact\tfeasible");
    assert_eq!(trace[1], "trace\t2\t10\t10\tsingle-value\tfeasible");
    assert_eq!(trace[2], "trace\t3\t11\t12\ttwo-values\tfeasible");
}

#[test]
fn emitted_schedule_round_trips_through_verify() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "g12.txt", GOLDEN12);
    let out = bin()
        .args(["solve", "--emit-schedule"])
        .arg(&file)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc = String::from_utf8(out.stdout).unwrap();
    assert!(doc.starts_with("schedule 1\n"), "stdout is the schedule document: {doc}");
    assert!(String::from_utf8(out.stderr).unwrap().contains("verdict\tfeasible"));
    let sched = write(&dir, "sched.txt", &doc);
    let (code, out, _) = run_args(&["verify"], &[&file, &sched]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "ok");
}

#[test]
fn verify_locates_the_earliest_violation() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "g7.txt", GOLDEN7);
    // Node 1 (deadline 6) waits 7 positions between its visits.
    let sched = write(
        &dir,
        "late.txt",
        "schedule 1\nentries 1 2 3 4 5 6 7 1 2 3 4 5 6 7\n",
    );
    let (code, out, _) = run_args(&["verify"], &[&file, &sched]);
    assert_eq!(code, 1);
    assert_eq!(
        out.trim(),
        "violation\tdeadline-exceeded\tnode\t1\toccurrence\t2\tposition\t8\tallowed_by\t7"
    );
}

#[test]
fn verify_rejects_wrong_file_kinds_as_usage_errors() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "g7.txt", GOLDEN7);
    let not_a_schedule = write(&dir, "also.txt", GOLDEN7);
    let (code, _, err) = run_args(&["verify"], &[&inst, &not_a_schedule]);
    assert_eq!(code, 2);
    assert!(err.contains("expected `schedule`"));
}

#[test]
fn analyze_prints_decomposition_and_exact_density() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "g7.txt", GOLDEN7);
    let (code, out, _) = run_args(&["analyze"], &[&file]);
    assert_eq!(code, 0);
    assert!(out.contains("discretized\t5 6 7 8 10 11 14"));
    assert!(out.contains("clusters\t3"));
    assert!(out.contains("gaps\t1 2 3 4 9 12 13"));
    assert!(out.contains("density\t1469/1848"));
    assert!(out.contains("exceeds_five_sixths\tfalse"));
}

#[test]
fn analyze_flags_density_above_five_sixths() {
    let dir = TempDir::new().unwrap();
    let tight = write(&dir, "tight.txt", "kvisits 1\nk 2\ndeadlines 2 3 6\n");
    let (code, out, _) = run_args(&["analyze"], &[&tight]);
    assert_eq!(code, 0);
    assert!(out.contains("density\t1/1"));
    assert!(out.contains("exceeds_five_sixths\ttrue"));

    // Density above the threshold does not by itself make an instance
    // infeasible: all-fours has density 1 and a feasible schedule.
    let fours = write(&dir, "fours.txt", "kvisits 1\nk 2\ndeadlines 4 4 4 4\n");
    let (code, out, _) = run_args(&["analyze"], &[&fours]);
    assert_eq!(code, 0);
    assert!(out.contains("density\t1/1"));
    let (code, _, _) = run_args(&["solve"], &[&fours]);
    assert_eq!(code, 0);
}

#[test]
fn oracle_exit_codes_cover_all_outcomes() {
    let dir = TempDir::new().unwrap();
    let yes = write(&dir, "yes.txt", "kvisits 1\nk 2\ndeadlines 2 2\n");
    let no = write(&dir, "no.txt", "kvisits 1\nk 2\ndeadlines 2 2 4 4\n");

    let (code, out, _) = run_args(&["oracle"], &[&yes]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict\tfeasible"));

    let (code, out, _) = run_args(&["oracle"], &[&no]);
    assert_eq!(code, 1);
    assert!(out.contains("verdict\tinfeasible"));

    let (code, out, _) = run_args(&["oracle", "--budget", "2"], &[&no]);
    assert_eq!(code, 3);
    assert!(out.contains("verdict\tbudget-exhausted"));
}

#[test]
fn oracle_budget_env_var_is_honored_and_validated() {
    let dir = TempDir::new().unwrap();
    let no = write(&dir, "no.txt", "kvisits 1\nk 2\ndeadlines 2 2 4 4\n");

    let mut cmd = bin();
    cmd.arg("oracle").arg(&no).env("KVISITS_BUDGET", "2");
    let (code, out, _) = run(cmd);
    assert_eq!(code, 3);
    assert!(out.contains("budget-exhausted"));

    // The flag wins over the environment.
    let mut cmd = bin();
    cmd.args(["oracle", "--budget", "1000000"]).arg(&no).env("KVISITS_BUDGET", "2");
    let (code, _, _) = run(cmd);
    assert_eq!(code, 1);

    let mut cmd = bin();
    cmd.arg("oracle").arg(&no).env("KVISITS_BUDGET", "lots");
    let (code, _, err) = run(cmd);
    assert_eq!(code, 2);
    assert!(err.contains("KVISITS_BUDGET"));
}

#[test]
fn oracle_decides_matching_instances_and_emits_witnesses() {
    let dir = TempDir::new().unwrap();
    let rn3dm = write(&dir, "r.txt", "rn3dm 1\nA 3 3\nsigma 6\n");
    let (code, out, _) = run_args(&["oracle", "--emit-schedule"], &[&rn3dm]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict\tfeasible"));
    // Two triples, each summing to sigma = 6.
    let triples: Vec<Vec<i64>> = out
        .lines()
        .filter(|l| l.starts_with("triple\t"))
        .map(|l| l.split('\t').skip(1).map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(triples.len(), 2);
    for t in &triples {
        assert_eq!(t.iter().sum::<i64>(), 6);
    }

    let pm = write(&dir, "p.txt", "pm 1\nD 2 2\nA 1 2\nT 3 4\n");
    let (code, out, _) = run_args(&["oracle"], &[&pm]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict\tfeasible"));

    let in3dm_no = write(&dir, "i.txt", "in3dm 1\nA 2 2\nT 3 7\n");
    let (code, out, _) = run_args(&["oracle"], &[&in3dm_no]);
    assert_eq!(code, 1);
    assert!(out.contains("verdict\tinfeasible"));
}

#[test]
fn reduce_writes_numbered_stage_files_and_preserves_the_verdict() {
    let dir = TempDir::new().unwrap();
    let rn3dm = write(&dir, "r.txt", "rn3dm 1\nA 3 3\nsigma 6\n");
    let out_dir = dir.path().join("chain");
    let mut cmd = bin();
    cmd.arg("reduce").arg(&rn3dm).args(["--to", "varkvisits", "--out-dir"]).arg(&out_dir);
    let (code, out, _) = run(cmd);
    assert_eq!(code, 0);
    for name in [
        "01_in3dm.txt",
        "02_in3dm_normalized.txt",
        "03_pm.txt",
        "04_pm_shifted.txt",
        "05_kvisits.txt",
        "06_varkvisits.txt",
    ] {
        assert!(out_dir.join(name).exists(), "missing {name}");
        assert!(out.contains(name), "stage line for {name}");
    }

    // The source is feasible, so every stage must stay feasible.
    let (code, _, _) = run_args(&["oracle"], &[&rn3dm]);
    assert_eq!(code, 0);
    let (code, _, _) = run_args(&["solve"], &[&out_dir.join("05_kvisits.txt")]);
    assert_eq!(code, 0);
    let (code, _, _) = run_args(&["oracle"], &[&out_dir.join("06_varkvisits.txt")]);
    assert_eq!(code, 0);
}

#[test]
fn reduce_can_stop_early_and_branch_to_thresholds() {
    let dir = TempDir::new().unwrap();
    let rn3dm = write(&dir, "r.txt", "rn3dm 1\nA 3 3\nsigma 6\n");

    let short = dir.path().join("short");
    let mut cmd = bin();
    cmd.arg("reduce").arg(&rn3dm).args(["--to", "pm", "--out-dir"]).arg(&short);
    let (code, _, _) = run(cmd);
    assert_eq!(code, 0);
    assert!(short.join("03_pm.txt").exists());
    assert!(!short.join("04_pm_shifted.txt").exists());

    let tp = dir.path().join("tp");
    let mut cmd = bin();
    cmd.arg("reduce").arg(&rn3dm).args(["--to", "tpws", "--out-dir"]).arg(&tp);
    let (code, _, _) = run(cmd);
    assert_eq!(code, 0);
    let text = fs::read_to_string(tp.join("06_tpws.txt")).unwrap();
    assert!(text.starts_with("tpws 1\n"));
}

#[test]
fn reduce_reports_trivially_infeasible_instances() {
    let dir = TempDir::new().unwrap();
    // Largest target 10 exceeds the largest pair sum 1 + (1 + 2) = 4.
    let in3dm = write(&dir, "i.txt", "in3dm 1\nA 1 1\nT 9 10\n");
    let out_dir = dir.path().join("chain");
    let mut cmd = bin();
    cmd.arg("reduce").arg(&in3dm).args(["--to", "kvisits", "--out-dir"]).arg(&out_dir);
    let (code, out, _) = run(cmd);
    assert_eq!(code, 1);
    assert!(out.contains("resolved\tin3dm-normalized\tinfeasible"));
    assert!(!out_dir.join("02_in3dm_normalized.txt").exists());

    // Value spread 8 > 2n - 2 = 2 resolves at the balanced entry point.
    let rn3dm = write(&dir, "wide.txt", "rn3dm 1\nA 1 9\nsigma 8\n");
    let wide_dir = dir.path().join("wide-chain");
    let mut cmd = bin();
    cmd.arg("reduce").arg(&rn3dm).args(["--to", "kvisits", "--out-dir"]).arg(&wide_dir);
    let (code, out, _) = run(cmd);
    assert_eq!(code, 1);
    assert!(out.contains("resolved\trn3dm\tinfeasible"));
    assert!(!wide_dir.join("01_in3dm.txt").exists());
}

#[test]
fn reduce_validates_stage_flags() {
    let dir = TempDir::new().unwrap();
    let rn3dm = write(&dir, "r.txt", "rn3dm 1\nA 3 3\nsigma 6\n");
    let out_dir = dir.path().join("chain");

    let mut cmd = bin();
    cmd.arg("reduce")
        .arg(&rn3dm)
        .args(["--from", "pm", "--to", "kvisits", "--out-dir"])
        .arg(&out_dir);
    let (code, _, err) = run(cmd);
    assert_eq!(code, 2);
    assert!(err.contains("--from pm"));

    let kv = write(&dir, "k.txt", GOLDEN7);
    let mut cmd = bin();
    cmd.arg("reduce").arg(&kv).args(["--to", "pm", "--out-dir"]).arg(&out_dir);
    let (code, _, err) = run(cmd);
    assert_eq!(code, 2);
    assert!(err.contains("not downstream"));
}

#[test]
fn gen_is_reproducible_bit_for_bit() {
    let dir = TempDir::new().unwrap();
    let first = dir.path().join("a");
    let second = dir.path().join("b");
    for out in [&first, &second] {
        let mut cmd = bin();
        cmd.args([
            "gen",
            "--family",
            "kvisits",
            "--n",
            "5",
            "--seed",
            "99",
            "--count",
            "8",
            "--label-with-oracle",
            "--out-dir",
        ])
        .arg(out);
        let (code, _, _) = run(cmd);
        assert_eq!(code, 0);
    }
    for i in 0..8 {
        let name = format!("kvisits_s99_{i:04}.txt");
        let a = fs::read(first.join(&name)).unwrap();
        let b = fs::read(second.join(&name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn gen_output_parses_and_respects_the_size_cap() {
    let (code, out, _) = run_args(
        &["gen", "--family", "kvisits", "--n", "6", "--seed", "3"],
        &[],
    );
    assert_eq!(code, 0);
    assert!(out.starts_with("kvisits 1\n"));
    let deadlines: Vec<i64> = out
        .lines()
        .find(|l| l.starts_with("deadlines "))
        .unwrap()
        .split_whitespace()
        .skip(1)
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(deadlines.len(), 6);
    assert!(deadlines.iter().all(|&d| (1..=12).contains(&d)));

    let (code, _, err) = run_args(
        &["gen", "--family", "kvisits", "--n", "4", "--max-deadline", "20", "--seed", "3"],
        &[],
    );
    assert_eq!(code, 2);
    assert!(err.contains("--allow-oversize"));

    let (code, out, _) = run_args(
        &[
            "gen",
            "--family",
            "kvisits",
            "--n",
            "4",
            "--max-deadline",
            "20",
            "--seed",
            "3",
            "--allow-oversize",
        ],
        &[],
    );
    assert_eq!(code, 0);
    assert!(out.starts_with("kvisits 1\n"));
}

#[test]
fn gen_can_label_stdout_instances_with_a_comment() {
    let (code, out, _) = run_args(
        &["gen", "--family", "rn3dm", "--n", "2", "--seed", "7", "--label-with-oracle"],
        &[],
    );
    assert_eq!(code, 0);
    assert!(out.starts_with("# label "));
    assert!(out.contains("rn3dm 1\n"));
}

#[test]
fn gen_parallel_output_matches_sequential_output() {
    let dir = TempDir::new().unwrap();
    let seq = dir.path().join("seq");
    let par = dir.path().join("par");
    for (out, jobs) in [(&seq, None), (&par, Some("4"))] {
        let mut cmd = bin();
        cmd.args(["gen", "--family", "pm", "--n", "4", "--seed", "11", "--count", "6"]);
        if let Some(j) = jobs {
            cmd.args(["--jobs", j]);
        }
        cmd.arg("--out-dir").arg(out);
        let (code, _, _) = run(cmd);
        assert_eq!(code, 0);
    }
    for i in 0..6 {
        let name = format!("pm_s11_{i:04}.txt");
        assert_eq!(
            fs::read(seq.join(&name)).unwrap(),
            fs::read(par.join(&name)).unwrap(),
            "{name} depends on --jobs"
        );
    }
}

#[test]
fn bench_suites_emit_tsv_rows() {
    let (code, out, _) = run_args(
        &["bench", "--suite", "oracle-agreement", "--max-n", "3", "--count", "25"],
        &[],
    );
    assert_eq!(code, 0);
    assert!(out.lines().filter(|l| l.starts_with("oracle-agreement\t")).count() == 2);
    assert!(out.contains("agreement\texact"));

    let (code, out, _) = run_args(
        &["bench", "--suite", "distinct-scaling", "--max-n", "4000"],
        &[],
    );
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("distinct-scaling\t")).count(), 4);

    let (code, out, _) = run_args(&["bench", "--suite", "cluster-fpt", "--max-n", "10"], &[]);
    assert_eq!(code, 0);
    assert!(out.lines().all(|l| l.starts_with("cluster-fpt\t")));
    assert!(out.lines().count() >= 3);
}

#[test]
fn version_lists_format_versions() {
    let (code, out, _) = run_args(&["--version"], &[]);
    assert_eq!(code, 0);
    assert!(out.contains("formats: kvisits=1 varkvisits=1 schedule=1 pm=1 rn3dm=1 in3dm=1 tpws=1"));
}

#[test]
fn malformed_input_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let junk = write(&dir, "junk.txt", "kvisits 1\nk 2\ndeadlines 3 two 5\n");
    for sub in ["solve", "analyze", "oracle"] {
        let (code, _, err) = run_args(&[sub], &[&junk]);
        assert_eq!(code, 2, "{sub} on malformed input");
        assert!(!err.is_empty());
    }
    let (code, _, _) = run_args(&["solve"], &[Path::new("/nonexistent/file.txt")]);
    assert_eq!(code, 2);
}

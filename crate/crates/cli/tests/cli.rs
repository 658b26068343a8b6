use std::path::Path;
use std::process::Command;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn entest(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_entest"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Header and data rows of a csv table, skipping `#` metadata.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn metadata(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn estimate_examples() {
    let r = entest(&["estimate", "--counts", "2,1", "--estimator", "naive"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (h, rows) = csv_rows(&r.stdout);
    assert_eq!(
        h,
        ["estimator_id", "leading_term", "value_nats", "value_bits"]
    );
    assert_eq!(rows[0][0], "naive");
    assert!((num(&rows[0][2]) - 0.6365).abs() < 5e-5);
    assert!((num(&rows[0][3]) - 0.9183).abs() < 5e-5);

    let r = entest(&[
        "estimate",
        "--counts",
        "2,1",
        "--a-strategy",
        "explicit",
        "--a",
        "1,1",
    ]);
    let (_, rows) = csv_rows(&r.stdout);
    assert_eq!(rows[0][0], "schuermann_binomial");
    assert_eq!(rows[0][1], "psi_N");
    let want = std::f64::consts::LN_2 + 1.0 / 6.0;
    assert!((num(&rows[0][2]) - want).abs() < 1e-11);

    let r = entest(&["estimate", "--counts", "0,0"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("positive count"));

    let r = entest(&["estimate", "--counts", "2,x"]);
    assert_eq!(r.code, 2);
}

#[test]
fn estimate_from_counts_file_and_oracle_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "c.txt", "3\n1\n");
    let r = entest(&[
        "estimate",
        "--counts-file",
        &f,
        "--a-strategy",
        "optimal_from_p",
        "--p",
        "3/4,1/4",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let meta = metadata(&r.stdout);
    assert!(meta
        .iter()
        .any(|(k, v)| k == "a_resolved" && v == "0.3333333333333333,3.0"));
    assert!(meta.iter().any(|(k, v)| k == "safety" && v == "pass"));
}

#[test]
fn overflow_exits_with_numerical_code() {
    let r = entest(&[
        "estimate",
        "--counts",
        "2,500",
        "--a-strategy",
        "explicit",
        "--a",
        "1,1000",
    ]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("box 1"), "{}", r.stderr);
}

#[test]
fn io_failure_exit_code() {
    let r = entest(&[
        "estimate",
        "--counts",
        "1",
        "--output",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(r.code, 4);
    let r = entest(&["sweep", "--config", "/nonexistent-dir/x.cfg"]);
    assert_eq!(r.code, 4);
}

#[test]
fn bias_exact_examples() {
    let r = entest(&[
        "bias-exact",
        "--p",
        "0.5,0.5",
        "--n",
        "3",
        "--a-strategy",
        "all_ones",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (h, rows) = csv_rows(&r.stdout);
    let col = |name: &str| h.iter().position(|c| c == name).unwrap();
    assert!(num(&rows[0][col("bias_closed_bits")]).abs() < 1e-12);
    assert!(num(&rows[0][col("bias_enumeration_bits")]).abs() < 1e-12);

    let r = entest(&["bias-exact", "--p", "0.75,0.25", "--n", "2"]);
    let (_, rows) = csv_rows(&r.stdout);
    assert_eq!(rows[0][1], "0.333333333333");
    assert_eq!(rows[0][2], "3");
    assert!(num(&rows[0][3]).abs() < 1e-12);
    assert!(num(&rows[0][4]).abs() < 1e-12);

    let r = entest(&[
        "bias-exact",
        "--p",
        "0.5,0.5",
        "--n",
        "3",
        "--a-strategy",
        "explicit",
        "--a",
        "0,0",
    ]);
    let (_, rows) = csv_rows(&r.stdout);
    assert!(num(&rows[0][3]) < 0.0);
    assert!(num(&rows[0][4]) < 0.0);
    assert!(num(&rows[0][5]).abs() < 1e-12);
}

#[test]
fn bias_exact_skips_enumeration_over_budget() {
    let r = entest(&[
        "bias-exact",
        "--p",
        "0.25,0.25,0.25,0.25",
        "--n",
        "40",
        "--set",
        "max_outcomes=100",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (_, rows) = csv_rows(&r.stdout);
    assert_eq!(rows[0][6], "");
    assert!(metadata(&r.stdout)
        .iter()
        .any(|(k, _)| k == "enumeration_skipped.N40"));
}

const SMALL_SWEEP: &str =
    "p = 3/4, 1/4\nn = 2, 3\na = 1/3, 3; 1/3, 1\nreplicates = 2000\nseed = 9\n";

#[test]
fn sweep_columns_determinism_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.cfg", SMALL_SWEEP);
    let a = entest(&["sweep", "--config", &cfg]);
    let b = entest(&["sweep", "--config", &cfg]);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    let (h, rows) = csv_rows(&a.stdout);
    assert_eq!(
        h,
        [
            "N",
            "a_1",
            "a_2",
            "mean_bits",
            "std_error_bits",
            "variance",
            "overflow_count"
        ]
    );
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[2][0], "3");
    for row in &rows {
        let mean = num(&row[3]);
        let se = num(&row[4]);
        let var = num(&row[5]);
        assert!((se - (var / 2000.0).sqrt()).abs() < 1e-11 * se.max(1e-300) + 1e-12);
        assert!(mean.is_finite());
    }

    let j = entest(&["sweep", "--config", &cfg, "--format", "json-lines"]);
    let lines: Vec<serde_json::Value> = j
        .stdout
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(lines[0]["metadata"]["config.seed"] == "9");
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[1]["N"], 2);
    assert_eq!(num(&rows[0][3]), lines[1]["mean_bits"].as_f64().unwrap());
}

#[test]
fn rerun_from_embedded_metadata_reproduces_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "s.cfg", SMALL_SWEEP);
    let first = entest(&["sweep", "--config", &cfg]);
    let rebuilt: String = metadata(&first.stdout)
        .into_iter()
        .filter_map(|(k, v)| k.strip_prefix("config.").map(|k| format!("{k} = {v}\n")))
        .collect();
    let cfg2 = write(dir.path(), "re.cfg", &rebuilt);
    let second = entest(&["sweep", "--config", &cfg2]);
    assert_eq!(second.code, 0, "{}", second.stderr);
    assert_eq!(csv_rows(&first.stdout), csv_rows(&second.stdout));
}

#[test]
fn sweep_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(
        dir.path(),
        "e.cfg",
        "p = 1/2, 1/2\nn = 2\na =\nreplicates = 10\n",
    );
    let r = entest(&["sweep", "--config", &empty]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("a-grid is empty"), "{}", r.stderr);

    let unknown = write(dir.path(), "u.cfg", "p = 1/2, 1/2\nn = 2\nbogus = 1\n");
    let r = entest(&["sweep", "--config", &unknown]);
    assert_eq!(r.code, 2);
    assert!(
        r.stderr.contains("line 3") && r.stderr.contains("bogus"),
        "{}",
        r.stderr
    );

    let misaligned = write(dir.path(), "m.cfg", "p = 1/2, 1/2\nn = 2\na = 1,1,1\n");
    assert_eq!(entest(&["sweep", "--config", &misaligned]).code, 2);
}

#[test]
fn mi_on_dataset_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("x\ty\n");
    for i in 0..400u32 {
        let x = i % 10;
        let y = if x < 5 {
            (i % 7 != 0) as u32
        } else {
            (i % 7 == 0) as u32
        };
        text.push_str(&format!("{x}\t{y}\n"));
    }
    let data = write(dir.path(), "d.tsv", &text);
    let r = entest(&[
        "mi",
        "--dataset",
        &data,
        "--set",
        "n_grid=50,400",
        "--set",
        "replicates=20",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let (h, rows) = csv_rows(&r.stdout);
    assert_eq!(
        h,
        [
            "N",
            "mean_mi_bits",
            "std_error",
            "mean_mi_unclipped_bits",
            "std_error_unclipped",
            "replicates"
        ]
    );
    // Full-size subsample without replacement has zero spread.
    assert_eq!(num(&rows[1][2]), 0.0);
    let meta = metadata(&r.stdout);
    for key in ["thresholds", "a_table", "replacement"] {
        assert!(meta.iter().any(|(k, _)| k == key), "missing {key}");
    }
}

#[test]
fn mi_reports_malformed_line() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "bad.csv", "x,y\n0,1\n1,0\n2,7\n");
    let r = entest(&["mi", "--dataset", &data, "--set", "n_grid=2"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 4"), "{}", r.stderr);
}

#[test]
fn mi_synthetic_writes_truth_record() {
    let dir = tempfile::tempdir().unwrap();
    let truth = dir.path().join("truth.json");
    let data = dir.path().join("data.csv");
    let r = entest(&[
        "mi",
        "--synth",
        "spherical_like",
        "--set",
        "synth_size=5000",
        "--set",
        "n_grid=100,1000",
        "--set",
        "replicates=10",
        "--set",
        &format!("truth_output={}", truth.display()),
        "--set",
        &format!("dataset_output={}", data.display()),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&truth).unwrap()).unwrap();
    assert_eq!(record["profile"], "spherical_like");
    assert_eq!(record["q"].as_array().unwrap().len(), 4000);
    let r2 = entest(&[
        "mi",
        "--dataset",
        data.to_str().unwrap(),
        "--set",
        "n_grid=100,1000",
        "--set",
        "replicates=10",
    ]);
    assert_eq!(r2.code, 0, "{}", r2.stderr);
    assert_eq!(csv_rows(&r.stdout), csv_rows(&r2.stdout));
}

#[test]
fn n_grid_beyond_dataset_is_rejected() {
    let r = entest(&[
        "mi",
        "--synth",
        "pym_like",
        "--set",
        "synth_size=1000",
        "--set",
        "n_grid=2000",
    ]);
    assert_eq!(r.code, 2);
    let r = entest(&[
        "mi",
        "--synth",
        "pym_like",
        "--set",
        "synth_size=1000",
        "--set",
        "n_grid=2000",
        "--set",
        "replacement=true",
        "--set",
        "replicates=3",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
}

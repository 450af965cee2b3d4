use std::path::Path;
use std::process::{Command, Output};

fn saris(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_saris")).args(args).output().expect("spawn saris")
}

fn run_into(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    for (flag, value) in [("--trials", "2"), ("--seed", "5"), ("--jobs", "2")] {
        if !extra.contains(&flag) {
            args.extend([flag, value]);
        }
    }
    let o = saris(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    o
}

fn table(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let head = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (head, rows)
}

fn column(head: &[String], name: &str) -> usize {
    head.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_into(&a, &["--algo", "saris"]);
    run_into(&b, &["--algo", "saris", "--jobs", "1"]);
    let (head, ra) = table(&a.join("runs.csv"));
    let (_, rb) = table(&b.join("runs.csv"));
    let t = column(&head, "wall_time_s");
    let strip = |rows: Vec<Vec<String>>| -> Vec<Vec<String>> {
        rows.into_iter().map(|mut r| {
            r.remove(t);
            r
        }).collect()
    };
    assert_eq!(strip(ra), strip(rb));
    for name in ["saris-000000.csv", "saris-000001.csv"] {
        let x = std::fs::read(a.join("traces").join(name)).unwrap();
        let y = std::fs::read(b.join("traces").join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
}

#[test]
fn all_algorithms_are_summarized() {
    let dir = tempfile::tempdir().unwrap();
    run_into(dir.path(), &["--random-draws", "5"]);
    let (head, rows) = table(&dir.path().join("summary.csv"));
    let a = column(&head, "algo");
    let algos: Vec<&str> = rows.iter().map(|r| r[a].as_str()).collect();
    assert_eq!(algos, ["saris", "mismatched", "random"]);
    let (_, runs) = table(&dir.path().join("runs.csv"));
    assert_eq!(runs.len(), 6);
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("metadata.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 5);
    assert_eq!(meta["trials"], 2);
}

#[test]
fn summary_matches_runs() {
    let dir = tempfile::tempdir().unwrap();
    run_into(dir.path(), &["--algo", "saris", "--trials", "3"]);
    let (rh, runs) = table(&dir.path().join("runs.csv"));
    let rates: Vec<f64> = runs.iter().map(|r| r[column(&rh, "final_sum_rate")].parse().unwrap()).collect();
    let n = rates.len() as f64;
    let mean = rates.iter().sum::<f64>() / n;
    let std = (rates.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    let (sh, summary) = table(&dir.path().join("summary.csv"));
    let m: f64 = summary[0][column(&sh, "mean_rate")].parse().unwrap();
    let s: f64 = summary[0][column(&sh, "std_rate")].parse().unwrap();
    assert!((m - mean).abs() <= 1e-12 * mean.abs());
    assert!((s - std).abs() <= 1e-9 * std.max(1.0));
    assert_eq!(summary[0][column(&sh, "trials")], "3");
}

#[test]
fn config_hash_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.cfg");
    std::fs::write(&cfg, "# reference deployment, smaller RIS\nN = 9\nN_c = 2\n").unwrap();
    let c = cfg.to_str().unwrap();
    let hashes: Vec<String> = ["a", "b"]
        .iter()
        .map(|d| {
            let out = dir.path().join(d);
            run_into(&out, &["--config", c, "--algo", "saris", "--trials", "1"]);
            let (h, rows) = table(&out.join("runs.csv"));
            let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("metadata.json")).unwrap()).unwrap();
            assert_eq!(meta["config_hash"], rows[0][column(&h, "config_hash")].as_str());
            rows[0][column(&h, "config_hash")].clone()
        })
        .collect();
    assert_eq!(hashes[0], hashes[1]);
    assert_eq!(hashes[0].len(), 64);

    let other = dir.path().join("c");
    run_into(&other, &["--algo", "saris", "--trials", "1"]);
    let (h, rows) = table(&other.join("runs.csv"));
    assert_ne!(rows[0][column(&h, "config_hash")], hashes[0]);
}

#[test]
fn missing_config_is_an_io_error_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = saris(&["run", "--config", "/nonexistent/scenario.cfg", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn invalid_configs_exit_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    for (i, text) in ["N = 15\n", "frequency = 28e9\n", "d = -1λ\n", "M = 4\nM = 4\n"].iter().enumerate() {
        let cfg = dir.path().join(format!("bad{i}.cfg"));
        std::fs::write(&cfg, text).unwrap();
        let out = dir.path().join(format!("out{i}"));
        let o = saris(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{text:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!out.exists());
    }
}

#[test]
fn unknown_sweep_variable_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = saris(&["sweep", "--sweep", "M", "--values", "2,4", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = saris(&["sweep", "--sweep", "N", "--values", "15", "--out", dir.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn single_value_sweep_equals_run() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("run");
    run_into(&run, &["--algo", "saris"]);
    let sweep = dir.path().join("sweep");
    let o = saris(&[
        "sweep", "--sweep", "N", "--values", "16", "--algo", "saris", "--trials", "2", "--seed", "5", "--out",
        sweep.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (sh, rows) = table(&sweep.join("sweep.csv"));
    let (uh, summary) = table(&run.join("summary.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][column(&sh, "var")], "N");
    assert_eq!(rows[0][column(&sh, "mean_rate")], summary[0][column(&uh, "mean_rate")]);
    assert_eq!(rows[0][column(&sh, "mean_iters")], summary[0][column(&uh, "mean_iters")]);
}

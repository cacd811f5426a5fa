use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bm2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bm2")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = bm2(args);
    assert!(out.status.success(), "bm2 {args:?} failed:\n{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn metric(path: &Path, column: &str) -> f64 {
    let mut r = csv::Reader::from_path(path).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == column).unwrap();
    r.records().next().unwrap().unwrap()[idx].parse().unwrap()
}

#[test]
fn missing_input_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no-such-ratings.data");
    let out = bm2(&["fit", "--data", s(&missing), "-k", "2", "-l", "2", "--out", s(&dir.path().join("o"))]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("no-such-ratings.data"), "stderr: {err}");
}

#[test]
fn bad_arguments_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = bm2(&["simulate", "--scenario", "6", "--out", s(dir.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("5, 7 or 9"));
    let out = bm2(&["fit", "--data", "x", "--alpha", "1,1", "-k", "2", "-l", "2", "--out", s(dir.path())]);
    assert!(!out.status.success());
}

#[test]
fn simulate_fit_predict_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let fit = dir.path().join("fit");
    let stdout = ok(&["simulate", "--scenario", "5", "--seed", "4", "--n-users", "80", "--n-items", "60", "--eta", "0.4", "--out", s(&sim)]);
    assert!(stdout.contains("80 users x 60 items"));
    for f in ["scenario.txt", "observed.tsv", "hidden.tsv", "true_clusters.csv"] {
        assert!(sim.join(f).exists(), "missing {f}");
    }

    ok(&[
        "fit", "--data", s(&sim.join("observed.tsv")), "--test", s(&sim.join("hidden.tsv")),
        "-k", "5", "-l", "5", "--max-iters", "100", "--edges", "--out", s(&fit),
    ]);
    for f in ["mu.txt", "pi_users.txt", "pi_items.txt", "elbo.csv", "clusters.csv", "predictions.csv", "metrics.csv", "edges.csv", "report.txt"] {
        assert!(fit.join(f).exists(), "missing {f}");
    }
    let mae = metric(&fit.join("metrics.csv"), "mae");
    assert!(mae > 0.0 && mae < 1.3, "MAE {mae}");

    let again = dir.path().join("again.csv");
    let table = ok(&["predict", "--model", s(&fit), "--pairs", s(&sim.join("hidden.tsv")), "--out", s(&again)]);
    assert!(table.contains("bm2"));
    assert_eq!(fs::read_to_string(fit.join("predictions.csv")).unwrap(), fs::read_to_string(&again).unwrap());

    let elbo = fs::read_to_string(fit.join("elbo.csv")).unwrap();
    let values: Vec<f64> = elbo.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] >= w[0] - 1e-8 * w[0].abs()));
}

#[test]
fn ten_by_ten_fit_reports_every_cluster() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    ok(&["simulate", "--scenario", "9", "--seed", "1", "--n-users", "60", "--n-items", "50", "--eta", "0.3", "--out", s(&sim)]);
    let fit = dir.path().join("fit");
    let stdout = ok(&[
        "fit", "--data", s(&sim.join("observed.tsv")), "--train-fraction", "0.8",
        "-k", "10", "-l", "10", "--max-iters", "20", "--out", s(&fit),
    ]);
    assert!(stdout.contains("user cluster"));
    let clusters = fs::read_to_string(fit.join("clusters.csv")).unwrap();
    let users = clusters.lines().filter(|l| l.starts_with("user,")).count();
    let items = clusters.lines().filter(|l| l.starts_with("item,")).count();
    assert_eq!((users, items), (10, 10));
}

#[test]
fn baselines_and_cv_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    ok(&["simulate", "--scenario", "5", "--seed", "2", "--n-users", "60", "--n-items", "40", "--eta", "0.5", "--out", s(&sim)]);
    let base = dir.path().join("base");
    let table = ok(&[
        "baseline", "--data", s(&sim.join("observed.tsv")), "--train-fraction", "0.5",
        "--methods", "naive,user-based,item-based,pmf", "--pmf-epochs", "30", "--out", s(&base),
    ]);
    for name in ["naive", "user-based", "item-based", "pmf"] {
        assert!(table.contains(name), "{table}");
    }
    let metrics = fs::read_to_string(base.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 5);

    let cv = dir.path().join("cv");
    let stdout = ok(&["cv", "--data", s(&sim.join("observed.tsv")), "--candidates", "1,2", "--folds", "3", "--max-iters", "30", "--out", s(&cv)]);
    assert!(stdout.contains("selected K = "));
    assert!(cv.join("cv.csv").exists());
}

#[test]
fn bench_summarises_replicates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    let table = ok(&[
        "bench", "--scenario", "5", "--n-users", "50", "--n-items", "40", "--replicates", "2",
        "--informative", "--max-iters", "30", "--out", s(&out),
    ]);
    assert!(table.contains("bm2*"));
    let per_run = fs::read_to_string(out.join("replicates.csv")).unwrap();
    assert_eq!(per_run.lines().count(), 1 + 2 * 2);
}

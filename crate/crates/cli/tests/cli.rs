use std::path::Path;
use std::process::{Command, Output};

fn shapley(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shapley"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = shapley(dir, args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("glove.txt"),
        "# three-player glove game\nfamily=glove\nleft=0,1\nright=2\n",
    )
    .unwrap();
    dir
}

fn meta_value(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_string()
}

#[test]
fn exact_prints_glove_values() {
    let dir = workspace();
    let out = ok(dir.path(), &["exact", "--game", "glove.txt"]);
    assert_eq!(
        out,
        "player,phi\n0,0.166666666666667\n1,0.166666666666667\n2,0.666666666666667\n"
    );
}

#[test]
fn estimate_writes_csv_and_sidecar() {
    let dir = workspace();
    let args = [
        "estimate",
        "--game",
        "glove.txt",
        "--method",
        "gt-improved",
        "--epsilon",
        "0.5",
        "--delta",
        "0.1",
        "--seed",
        "4",
        "--out",
        "e.csv",
    ];
    ok(dir.path(), &args);
    let csv = std::fs::read_to_string(dir.path().join("e.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("player,phi_hat\n"));
    let meta = std::fs::read_to_string(dir.path().join("e.csv.meta")).unwrap();
    assert_eq!(meta_value(&meta, "method"), "gt-improved");
    assert_eq!(meta_value(&meta, "T"), "831");
    assert_eq!(meta_value(&meta, "seed"), "4");
    assert!(!meta.contains("elapsed"));

    ok(dir.path(), &args);
    assert_eq!(std::fs::read_to_string(dir.path().join("e.csv")).unwrap(), csv);

    let mut timed = args.to_vec();
    timed.push("--timing");
    ok(dir.path(), &timed);
    assert!(std::fs::read_to_string(dir.path().join("e.csv.meta"))
        .unwrap()
        .contains("elapsed_seconds="));
}

#[test]
fn missing_game_file_is_reported() {
    let dir = workspace();
    let out = shapley(
        dir.path(),
        &[
            "estimate",
            "--game",
            "absent.txt",
            "--method",
            "gt",
            "--epsilon",
            "0.5",
            "--delta",
            "0.1",
        ],
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.txt"));
}

#[test]
fn bad_game_file_is_reported() {
    let dir = workspace();
    std::fs::write(dir.path().join("bad.txt"), "family=glove\nleft=0\n").unwrap();
    let out = shapley(dir.path(), &["exact", "--game", "bad.txt"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.txt") && err.contains("right"), "{err}");
}

#[test]
fn warm_cache_reduces_evaluations() {
    let dir = workspace();
    std::fs::write(
        dir.path().join("rb.txt"),
        "family=random_bounded\nn_players=9\nseed=2\n",
    )
    .unwrap();
    let run = |out: &str| {
        ok(
            dir.path(),
            &[
                "estimate",
                "--game",
                "rb.txt",
                "--method",
                "gt",
                "--epsilon",
                "0.5",
                "--budget",
                "400",
                "--seed",
                "1",
                "--cache",
                "cache.csv",
                "--out",
                out,
            ],
        );
        let meta = std::fs::read_to_string(dir.path().join(format!("{out}.meta"))).unwrap();
        meta_value(&meta, "utility_evals").parse::<u64>().unwrap()
    };
    let cold = run("a.csv");
    let warm = run("b.csv");
    assert!(cold > 0);
    assert!(warm < cold, "{warm} vs {cold}");
    assert_eq!(
        std::fs::read(dir.path().join("a.csv")).unwrap(),
        std::fs::read(dir.path().join("b.csv")).unwrap()
    );
    let cache = std::fs::read_to_string(dir.path().join("cache.csv")).unwrap();
    assert!(cache.starts_with("coalition_hex,utility\n"));
}

#[test]
fn several_methods_share_one_cache() {
    let dir = workspace();
    ok(
        dir.path(),
        &[
            "estimate",
            "--game",
            "glove.txt",
            "--method",
            "gt,gt-improved,perm",
            "--epsilon",
            "0.5",
            "--budget",
            "200",
            "--out",
            "m.csv",
        ],
    );
    for m in ["gt", "gt-improved", "perm"] {
        assert!(dir.path().join(format!("m.{m}.csv")).exists());
        assert!(dir.path().join(format!("m.{m}.csv.meta")).exists());
    }
    let later = std::fs::read_to_string(dir.path().join("m.perm.csv.meta")).unwrap();
    assert_eq!(meta_value(&later, "utility_evals"), "0");
}

#[test]
fn bound_prints_one_line() {
    let dir = workspace();
    let out = ok(
        dir.path(),
        &[
            "bound",
            "--n",
            "10",
            "--epsilon",
            "0.5",
            "--delta",
            "0.1",
            "--variant",
            "gt-improved",
        ],
    );
    let lines: Vec<_> = out.lines().collect();
    assert_eq!(lines[0], "variant,n,epsilon,delta,T,utility_evals,Z,q_tot");
    assert!(lines[1].starts_with("gt-improved,10,0.500000000000000,0.100000000000000,4866,4866,"));
}

#[test]
fn coverage_summary_and_check() {
    let dir = workspace();
    let out = ok(
        dir.path(),
        &[
            "coverage",
            "--game",
            "glove.txt",
            "--method",
            "gt-improved",
            "--n-trials",
            "1",
            "--check",
        ],
    );
    let row = out.lines().nth(1).unwrap();
    let coverage = row.split(',').nth(4).unwrap();
    assert!(
        coverage == "1.00000000000000" || coverage == "0.00000000000000",
        "{row}"
    );

    ok(
        dir.path(),
        &[
            "coverage",
            "--game",
            "glove.txt",
            "--n-trials",
            "20",
            "--out",
            "cov.csv",
        ],
    );
    let trials = std::fs::read_to_string(dir.path().join("cov.csv")).unwrap();
    let summary = std::fs::read_to_string(dir.path().join("cov.summary.csv")).unwrap();
    assert_eq!(trials.lines().count(), 41);
    // an external reader recomputes the summary from the trial rows
    for line in summary.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let eps: f64 = f[5].parse().unwrap();
        let hits = trials
            .lines()
            .skip(1)
            .filter(|r| r.starts_with(&format!("{},", f[0])))
            .filter(|r| r.split(',').nth(4).unwrap().parse::<f64>().unwrap() <= eps)
            .count();
        assert_eq!(hits.to_string(), f[3]);
    }
}

#[test]
fn config_file_supplies_defaults() {
    let dir = workspace();
    std::fs::write(
        dir.path().join("exp.txt"),
        "game=glove.txt\nmethods=perm,gt-improved\nbudgets=100,400\nn_trials=4\nmaster_seed=3\noutput_dir=results\n",
    )
    .unwrap();
    ok(dir.path(), &["bench", "--config", "exp.txt"]);
    let bench = std::fs::read_to_string(dir.path().join("results/bench.csv")).unwrap();
    assert_eq!(bench.lines().count(), 5);
    assert!(bench.lines().skip(1).all(|l| {
        let f: Vec<&str> = l.split(',').collect();
        f[3].parse::<f64>().unwrap() >= 0.0 && f[4].parse::<f64>().is_ok()
    }));
}

#[test]
fn diagnose_reports_identities() {
    let dir = workspace();
    let out = ok(dir.path(), &["diagnose", "--n", "3"]);
    assert_eq!(
        out,
        "n,variant,Z,q_tot,effective_fraction,two_over_Z\n3,original,3.00000000000000,0.333333333333333,0.666666666666667,0.666666666666667\n"
    );
    let out = ok(dir.path(), &["diagnose", "--n", "10,1000", "--empirical", "2000"]);
    let fractions: Vec<f64> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert!(fractions[1] < fractions[0]);
    assert!(out.lines().next().unwrap().ends_with("empirical_T,empirical_fraction"));
}

use std::path::{Path, PathBuf};

use uncertts::cli::run;
use uncertts::io::REPORT_HEADER;

fn gunpoint() -> (PathBuf, PathBuf) {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/ucr/GunPoint");
    (dir.join("GunPoint_TRAIN.txt"), dir.join("GunPoint_TEST.txt"))
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("uncertts").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn with_data(args: &[&str]) -> (i32, String, String) {
    let (train, test) = gunpoint();
    let (train, test) = (train.to_str().unwrap().to_string(), test.to_str().unwrap().to_string());
    let mut all: Vec<&str> = args.to_vec();
    all.extend(["--train", &train, "--test", &test]);
    cli(&all)
}

fn line<'a>(out: &'a str, key: &str) -> Vec<&'a str> {
    out.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no `{key}` line in {out}"))
        .split_whitespace()
        .collect()
}

#[test]
fn missing_config_is_a_data_error_naming_the_path() {
    let (code, _, err) = cli(&["bench", "--config", "missing.toml"]);
    assert_eq!(code, 2);
    assert!(err.contains("missing.toml"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    for args in [&["frobnicate"][..], &["query", "--no-such-flag"], &[]] {
        let (code, _, err) = cli(args);
        assert_eq!(code, 1, "{args:?}");
        assert!(err.contains("Usage"), "{args:?}: {err}");
    }
    for args in [&["query", "--technique", "dtw"][..], &["sweep", "--param", "height"]] {
        let (code, _, err) = cli(args);
        assert_eq!(code, 1, "{args:?}");
        assert!(err.contains("invalid value"), "{args:?}: {err}");
    }
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("bench") && out.contains("perturb"));
}

#[test]
fn invalid_parameters_exit_one() {
    let (code, _, err) = with_data(&["query", "--technique", "proud"]);
    assert_eq!(code, 1);
    assert!(err.contains("--tau"), "{err}");
    let (code, _, _) = with_data(&["query", "--sigma", "-1"]);
    assert_eq!(code, 1);
    let (code, _, _) = with_data(&["query", "--query", "5000"]);
    assert_eq!(code, 1);
}

#[test]
fn malformed_data_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("X_TRAIN.txt");
    std::fs::write(&a, "1,0.5,oops\n").unwrap();
    let a = a.to_str().unwrap();
    let (code, _, err) = cli(&["chisq", "--train", a, "--test", a]);
    assert_eq!(code, 2);
    assert!(err.contains("row 1"), "{err}");
}

#[test]
fn noiseless_euclidean_query_returns_ground_truth() {
    for q in ["0", "17", "150"] {
        let (code, out, err) = with_data(&["query", "--technique", "euclid", "--sigma", "0", "--query", q]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(line(&out, "matches"), line(&out, "truth"));
        assert_eq!(line(&out, "truth").len(), 10);
    }
}

#[test]
fn probabilistic_query_takes_tau() {
    let (code, out, err) = with_data(&["query", "--technique", "proud", "--tau", "0.01", "--sigma", "0.2"]);
    assert_eq!(code, 0, "{err}");
    let strict = with_data(&["query", "--technique", "proud", "--tau", "0.99", "--sigma", "0.2"]).1;
    assert!(line(&strict, "matches").len() <= line(&out, "matches").len());
}

#[test]
fn window_sweep_has_a_row_per_w() {
    let (code, out, err) = with_data(&["sweep", "--param", "w", "--technique", "uma", "--sigma", "1.0"]);
    assert_eq!(code, 0, "{err}");
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], REPORT_HEADER);
    assert_eq!(rows.len(), 22);
    for (w, row) in rows[1..].iter().enumerate() {
        assert_eq!(row.split(',').nth(4).unwrap(), format!("{w}.000000"));
    }
}

// The timing column is the only one allowed to differ between runs.
fn without_timing(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            f.remove(11);
            f.join(",")
        })
        .collect()
}

#[test]
fn bench_is_reproducible_under_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = gunpoint();
    let cfg = dir.path().join("bench.toml");
    std::fs::write(
        &cfg,
        format!(
            "sigmas = [0.4, 1.0]\ntechniques = [\"euclid\", \"proud\", \"dust\", \"uema\"]\n\n[data]\nmax_series = 40\nqueries = 6\n\n[[dataset]]\nname = \"GunPoint\"\ntrain = {:?}\ntest = {:?}\n",
            train, test
        ),
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let (code, _, err) = cli(&["bench", "--config", cfg, "--seed", "9", "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
    }
    let a = std::fs::read_to_string(a).unwrap();
    let b = std::fs::read_to_string(b).unwrap();
    assert_eq!(a.lines().count(), 9);
    assert_eq!(without_timing(&a), without_timing(&b));

    let (code, stdout, _) = cli(&["bench", "--config", cfg, "--seed", "10"]);
    assert_eq!(code, 0);
    assert_ne!(without_timing(&stdout), without_timing(&a));
}

#[test]
fn calibrate_prints_both_thresholds() {
    let (code, out, err) = with_data(&["calibrate", "--sigma", "0.4"]);
    assert_eq!(code, 0, "{err}");
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "dataset,sigma,query,neighbor,eps_eucl,eps_dust");
    assert_eq!(rows.len(), 201);
    for r in &rows[1..] {
        let f: Vec<f64> = r.split(',').skip(4).map(|v| v.parse().unwrap()).collect();
        assert!(f[0] > 0.0 && f[1] > 0.0);
    }
}

#[test]
fn chisq_reports_one_row_per_dataset() {
    let (code, out, err) = with_data(&["chisq", "--alpha", "0.01"]);
    assert_eq!(code, 0, "{err}");
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "GunPoint");
    assert_eq!(row[1], "30000");
    assert_eq!(row[3], "173");
}

#[test]
fn perturb_writes_a_loadable_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("noisy.txt");
    let o = out.to_str().unwrap();
    let (code, _, err) = with_data(&[
        "perturb", "--sigma", "0.5", "--kind", "uniform", "--out", o, "--seed", "3",
    ]);
    assert_eq!(code, 0, "{err}");
    let first = std::fs::read_to_string(&out).unwrap();
    let f = uncertts::io::read_ucr(&out).unwrap();
    assert_eq!((f.rows.len(), f.rows[0].len()), (200, 150));

    with_data(&[
        "perturb", "--sigma", "0.5", "--kind", "uniform", "--out", o, "--seed", "3",
    ]);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), first);

    let (code, _, err) = with_data(&["perturb", "--sigma", "0.5"]);
    assert_eq!(code, 1);
    assert!(err.contains("--out"), "{err}");
}

use std::path::Path;

use uncertts::eval::{
    parameter_sweep, run_experiment, run_on_datasets, DataOptions, DatasetSource, EvalReport, ExperimentConfig,
    MixedStd, Selection, SweepParam,
};
use uncertts::io::load_ucr;
use uncertts::{Dataset, Technique};

fn ucr_root() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/ucr")
}

fn gunpoint() -> Dataset {
    let s = DatasetSource::in_archive(&ucr_root(), "GunPoint");
    load_ucr(&s.train, &s.test).unwrap()
}

fn small() -> ExperimentConfig {
    ExperimentConfig {
        sigmas: vec![0.4, 1.2],
        techniques: vec![
            Technique::Euclid,
            Technique::Proud,
            Technique::Dust,
            Technique::Uma,
            Technique::Uema,
        ],
        data: DataOptions {
            max_series: Some(40),
            selection: Selection::Random,
            queries: Some(8),
            ..DataOptions::default()
        },
        ..ExperimentConfig::default()
    }
}

// Every column except the timing one.
fn stable(r: &EvalReport) -> Vec<String> {
    r.cells
        .iter()
        .map(|c| {
            format!(
                "{} {} {} {} {:?} {:.12} {:.12} {:.12} {} {}",
                c.dataset,
                c.technique,
                c.error_kind,
                c.sigma,
                c.param,
                c.precision,
                c.recall,
                c.f1,
                c.queries,
                c.skipped
            )
        })
        .collect()
}

#[test]
fn seeded_runs_repeat_exactly() {
    let ds = [gunpoint()];
    let a = run_on_datasets(&small(), &ds).unwrap();
    let b = run_on_datasets(&small(), &ds).unwrap();
    assert_eq!(stable(&a), stable(&b));
    assert_eq!(a.cells.len(), 10);

    let mut other = small();
    other.seed = 43;
    assert_ne!(stable(&a), stable(&run_on_datasets(&other, &ds).unwrap()));
}

#[test]
fn thread_count_does_not_change_results() {
    let ds = [gunpoint()];
    let serial = run_on_datasets(&small(), &ds).unwrap();
    let mut cfg = small();
    cfg.threads = Some(3);
    assert_eq!(stable(&serial), stable(&run_on_datasets(&cfg, &ds).unwrap()));
}

#[test]
fn cells_do_not_depend_on_the_rest_of_the_grid() {
    let ds = [gunpoint()];
    let full = run_on_datasets(&small(), &ds).unwrap();
    let mut one = small();
    one.sigmas = vec![1.2];
    one.techniques = vec![Technique::Dust];
    let part = run_on_datasets(&one, &ds).unwrap();
    let want = full.cell("GunPoint", Technique::Dust, 1.2).unwrap();
    assert_eq!(part.cells[0].f1, want.f1);
    assert_eq!(part.cells[0].precision, want.precision);
}

#[test]
fn config_file_round_trips_and_resolves_paths() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        r#"
seed = 11
sigmas = [0.6]
techniques = ["euclid", "dust"]
output = "out/report.csv"

[data]
max_series = 30
queries = 4

[[dataset]]
name = "GunPoint"
train = "{0}/GunPoint/GunPoint_TRAIN.txt"
test = "{0}/GunPoint/GunPoint_TEST.txt"
"#,
        ucr_root().display()
    );
    let path = dir.path().join("exp.toml");
    std::fs::write(&path, &text).unwrap();
    let cfg = ExperimentConfig::from_file(&path).unwrap();
    assert_eq!(cfg.output.as_deref(), Some(dir.path().join("out/report.csv").as_path()));

    let again_path = dir.path().join("again.toml");
    std::fs::write(&again_path, cfg.to_toml()).unwrap();
    assert_eq!(ExperimentConfig::from_file(&again_path).unwrap(), cfg);

    let report = run_experiment(&cfg).unwrap();
    assert_eq!(report.cells.len(), 2);
    assert!(report.cells.iter().all(|c| c.queries == 4 && c.skipped == 0));
}

#[test]
fn mixed_schedule_reports_one_sigma() {
    let mut cfg = small();
    cfg.perturbation.mixed = Some(MixedStd {
        fraction_high: 0.2,
        std_high: 1.0,
        std_low: 0.4,
    });
    let r = run_on_datasets(&cfg, &[gunpoint()]).unwrap();
    assert_eq!(r.cells.len(), 5);
    assert!(r
        .cells
        .iter()
        .all(|c| (c.sigma - 0.7).abs() < 1e-12 && c.error_kind == "normal/mixed-std"));
}

#[test]
fn window_sweep_has_one_row_per_value() {
    let mut cfg = small();
    cfg.techniques = vec![Technique::Uma];
    cfg.sigmas = vec![1.0];
    let values = SweepParam::W.default_values(&cfg);
    let r = parameter_sweep(&cfg, &[gunpoint()], SweepParam::W, &values).unwrap();
    let params: Vec<f64> = r.cells.iter().map(|c| c.param.unwrap()).collect();
    assert_eq!(params, (0..=20).map(f64::from).collect::<Vec<_>>());
}

#[test]
fn tau_sweep_keeps_one_run_per_sigma() {
    let mut cfg = small();
    cfg.techniques = vec![Technique::Proud];
    cfg.sigmas = vec![0.4];
    let taus = [0.1, 0.5, 0.9];
    let r = parameter_sweep(&cfg, &[gunpoint()], SweepParam::Tau, &taus).unwrap();
    assert_eq!(r.cells.len(), 3);
    // a stricter τ never admits more candidates, so recall cannot rise
    let recall: Vec<f64> = r.cells.iter().map(|c| c.recall).collect();
    assert!(recall.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{recall:?}");
}

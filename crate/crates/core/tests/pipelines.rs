use lipflow::experiment::{exit_code, run, run_embed_topo, run_main_lemma, ExperimentConfig, Subcommand};
use lipflow::Error;

fn circle() -> ExperimentConfig {
    ExperimentConfig { flow: "torus1".into(), scale: 8.0, cover: 4, points: 10, trials: 300, ..Default::default() }
}

fn logistic() -> ExperimentConfig {
    ExperimentConfig { flow: "logistic".into(), cover: 8, delta: 0.3, points: 10, trials: 300, ..Default::default() }
}

#[test]
fn main_lemma_on_the_circle_and_interval() {
    for cfg in [circle(), logistic()] {
        let r = run_main_lemma(&cfg).unwrap().report;
        assert!(r.all_pass(), "{}: {}", cfg.flow, r.to_csv_string());
        assert_eq!(r.get("edge_deviation").unwrap().value, 0.0);
        assert!(r.get("negative_control_violations").unwrap().value >= 1.0);
    }
}

#[test]
fn marker_perturbation_on_the_circle_and_interval() {
    for cfg in [circle(), logistic()] {
        let out = run_embed_topo(&cfg).unwrap();
        assert!(out.report.all_pass(), "{}: {}", cfg.flow, out.report.to_csv_string());
        assert!(out.report.get("gbc_min_separation").unwrap().value > 0.0);
        assert_eq!(out.grids.len(), 2);
    }
}

#[test]
fn coarse_cover_exceeds_the_budget() {
    // A single cover set cannot keep the slow circle's images within δ/8.
    let cfg = ExperimentConfig { cover: 1, ..circle() };
    let err = run(Subcommand::MainLemma, &cfg).expect_err("budget error");
    assert!(matches!(err, Error::BudgetExceeded(_)));
    assert_eq!(exit_code(&err), 1);
}

#[test]
fn sections_closer_than_delta_are_rejected() {
    let cfg = ExperimentConfig { delta: 0.4, ..logistic() };
    let err = run_embed_topo(&cfg).expect_err("precondition error");
    assert!(err.to_string().contains("delta too large for section pair"));
    assert_eq!(exit_code(&err), 2);
}

#[test]
fn outputs_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig { output: Some(dir.path().to_path_buf()), trials: 50, skip_negative_control: true, ..circle() };
    let (code, out) = lipflow::experiment::run_and_report(Subcommand::MainLemma, &cfg);
    assert_eq!(code, 0);
    assert!(out.unwrap().report.get("negative_control_violations").is_none());
    for f in ["report.csv", "stage_f.csv", "stage_g.csv", "plot_g0_line.csv", "plot_g_line.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

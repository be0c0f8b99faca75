//! Acceptance run: eight end-to-end criteria, one pass/fail line each.
//! Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use lipflow::experiment::{
    run_embed_borel, run_embed_topo, run_main_lemma, run_mcshane, run_mollify, ExperimentConfig, InputEnsemble,
};
use lipflow::flows::{logistic_interval_flow, torus_translation_flow};
use lipflow::genvec::{sample_generic_vectors, RANK_TOL};
use lipflow::lipfun::lip_const_estimate;
use lipflow::report::Report;
use lipflow::topo::{choose_main_lemma_params, line_targets, min_bwidth, CoverData, Ensemble, GaussianBase};
use lipflow::GridSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn failed_rows(r: &Report) -> String {
    let names: Vec<String> = r.failures().map(|f| format!("{}={:e}", f.check_id, f.value)).collect();
    if names.is_empty() {
        String::new()
    } else {
        format!("; failing rows: {}", names.join(", "))
    }
}

fn row(r: &Report, id: &str) -> f64 {
    r.get(id).map(|x| x.value).unwrap_or(f64::NAN)
}

fn gaussian_base() -> Outcome {
    let flows = [torus_translation_flow(1, 8.0).unwrap(), torus_translation_flow(2, 8.0).unwrap(), logistic_interval_flow()];
    let mut worst_lip = 0.0f64;
    let mut worst_res = 0.0f64;
    for flow in &flows {
        let k = flow.k();
        let base = GaussianBase::new(flow, min_bwidth(k)).unwrap();
        let window = if k == 1 {
            GridSpec::symmetric(1, -10.0, 10.0, 201).unwrap()
        } else {
            GridSpec::symmetric(2, -6.0, 6.0, 31).unwrap()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let x = flow.sample_state(&mut rng);
            worst_lip = worst_lip.max(lip_const_estimate(&base.on_grid(&x, &window)).unwrap());
        }
        for _ in 0..100 {
            let x = flow.sample_state(&mut rng);
            let r: Vec<f64> = (0..k).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let t: Vec<f64> = (0..k).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let tr: Vec<f64> = t.iter().zip(&r).map(|(a, b)| a + b).collect();
            let res = (base.eval(&flow.act(&r, &x), &t) - base.eval(&x, &tr)).abs();
            worst_res = worst_res.max(res);
        }
    }
    Outcome {
        pass: worst_lip <= 0.52 && worst_res <= 1e-6,
        detail: format!("max Lipschitz estimate {worst_lip:.6} (<= 0.52), equivariance residual {worst_res:.2e} (<= 1e-6)"),
    }
}

fn mcshane() -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for dim in [1, 2] {
        let cfg = ExperimentConfig { dim, points: 50, anchors: 40, ..ExperimentConfig::default() };
        let r = run_mcshane(&cfg).unwrap().report;
        pass &= r.all_pass();
        detail.push(format!(
            "k={dim}: anchor error {:.1e}, Lipschitz excess {:.1e}{}",
            row(&r, "anchor_match"),
            row(&r, "lipschitz_excess"),
            failed_rows(&r)
        ));
    }
    Outcome { pass, detail: detail.join("; ") }
}

fn mollify() -> Outcome {
    let cfg = ExperimentConfig { dim: 2, points: 20, delta: 0.05, epsilon: 0.05, tau: 0.9, ..ExperimentConfig::default() };
    let r = run_mollify(&cfg).unwrap().report;
    Outcome {
        pass: r.all_pass(),
        detail: format!(
            "boundary change {:e}, max |Phi - phi| {:.4}, Lipschitz {:.4} (<= {:.4}), constant error {:.1e}{}",
            row(&r, "boundary_change"),
            row(&r, "max_deviation"),
            row(&r, "lipschitz"),
            r.get("lipschitz").map(|x| x.threshold).unwrap_or(f64::NAN),
            row(&r, "constant_error"),
            failed_rows(&r)
        ),
    }
}

fn main_lemma() -> (Outcome, String) {
    let r = run_main_lemma(&ExperimentConfig::default()).unwrap().report;
    let needed = [
        "max_deviation",
        "edge_deviation",
        "min_line_spread",
        "anchor_deviation",
        "fuzz_violations",
        "negative_control_violations",
    ];
    let present = needed.iter().all(|id| r.get(id).is_some());
    let out = Outcome {
        pass: present && r.all_pass(),
        detail: format!(
            "|g-f| {:.4} (< 0.8), edge {:e}, spread {:.2e}, anchor deviation {:.4} (< 0.2), fuzz violations {}, negative control violations {}{}",
            row(&r, "max_deviation"),
            row(&r, "edge_deviation"),
            row(&r, "min_line_spread"),
            row(&r, "anchor_deviation"),
            row(&r, "fuzz_violations"),
            row(&r, "negative_control_violations"),
            failed_rows(&r)
        ),
    };
    (out, r.to_csv_string())
}

fn genericity() -> (Outcome, String) {
    let cfg = ExperimentConfig::default();
    let input = InputEnsemble::new(&cfg).unwrap();
    let f1 = input.f1(cfg.delta).unwrap();
    let params = choose_main_lemma_params(1.0, 2, cfg.delta, f1.tau(), 2).unwrap();
    let geometry = params.geometry().unwrap();
    let cover = CoverData::diagonal(&input.flow, 2).unwrap();
    let targets = line_targets(&f1, &cover, &geometry);
    let mut report = Report::new();
    let (mut ok, mut first, mut min_cert) = (0usize, 0usize, f64::INFINITY);
    for seed in 0..100u64 {
        if let Ok(set) = sample_generic_vectors(&targets, &geometry.line, params.eta, seed, 10) {
            ok += 1;
            if set.attempts == 1 {
                first += 1;
            }
            for c in set.certificates {
                min_cert = min_cert.min(c);
            }
        }
    }
    report.at_most("failed_seeds", "generic-vectors", (100 - ok) as f64, 0.0);
    report.above("min_certificate", "generic-vectors", min_cert, RANK_TOL);
    report.push("first_draw_rate", "generic-vectors", first as f64 / 100.0, 0.95, first >= 95);
    let out = Outcome {
        pass: report.all_pass(),
        detail: format!(
            "N = {}, {ok}/100 seeds within 10 retries, min certificate {min_cert:.2e}, first-draw rate {first}%",
            params.n
        ),
    };
    (out, report.to_csv_string())
}

fn borel() -> (Outcome, String) {
    let mut csv = String::new();
    let mut pass = true;
    let mut detail = Vec::new();
    for (flow, scale) in [("torus1", 8.0), ("logistic", 1.0)] {
        let cfg = ExperimentConfig {
            flow: flow.into(),
            scale,
            points: 50,
            window: Some(20.0),
            m_max: Some(20),
            ..ExperimentConfig::default()
        };
        let r = run_embed_borel(&cfg).unwrap().report;
        let fixed_ok = flow != "logistic" || (r.get("fixed_point_value").is_some() && r.get("fixed_point_separation").is_some());
        pass &= r.all_pass() && fixed_ok;
        detail.push(format!(
            "{flow}: excess {:e}, residual {:.1e}, min separation {:.2e}{}{}",
            row(&r, "lipschitz_excess"),
            row(&r, "equivariance_residual"),
            row(&r, "min_pairwise_separation"),
            if flow == "logistic" {
                format!(", fixed points sup {} sep {:.3}", row(&r, "fixed_point_value"), row(&r, "fixed_point_separation"))
            } else {
                String::new()
            },
            failed_rows(&r)
        ));
        csv.push_str(&r.to_csv_string());
    }
    (Outcome { pass, detail: detail.join("; ") }, csv)
}

fn marker_perturbation() -> (Outcome, String) {
    let r = run_embed_topo(&ExperimentConfig::default()).unwrap().report;
    let out = Outcome {
        pass: r.all_pass(),
        detail: format!(
            "d(B0,C0) {:.3} > delta 0.4, G(A) min spread {:.3e}, G(B,C) min distance {:.3e}, |g1-f| {:.4} (<= 1.6), residual {:.1e}{}",
            row(&r, "section_distance"),
            row(&r, "ga_min_spread"),
            row(&r, "gbc_min_separation"),
            row(&r, "g1_max_deviation"),
            row(&r, "g1_equivariance_residual"),
            failed_rows(&r)
        ),
    };
    (out, r.to_csv_string())
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn print(n: usize, name: &str, o: &Outcome, took: Duration, budget: Duration) -> bool {
    let pass = o.pass && took <= budget;
    println!(
        "criterion {n} [{}] {name}: {} ({:.1}s of {}s)",
        if pass { "PASS" } else { "FAIL" },
        o.detail,
        took.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut all = true;

    let (o, t) = timed(gaussian_base);
    all &= print(1, "Gaussian base", &o, t, secs(60));
    let (o, t) = timed(mcshane);
    all &= print(2, "McShane extension", &o, t, secs(10));
    let (o, t) = timed(mollify);
    all &= print(3, "mollification", &o, t, secs(120));
    let ((o, csv4), t) = timed(main_lemma);
    all &= print(4, "main lemma", &o, t, secs(300));
    let ((o, csv5), t) = timed(genericity);
    all &= print(5, "genericity", &o, t, secs(300));
    let ((o, csv6), t) = timed(borel);
    all &= print(6, "Borel embedding", &o, t, secs(60));
    let ((o, csv7), t) = timed(marker_perturbation);
    all &= print(7, "marker perturbation", &o, t, secs(300));

    let (o, t) = timed(|| {
        let again = [main_lemma().1, genericity().1, borel().1, marker_perturbation().1];
        let first = [csv4, csv5, csv6, csv7];
        let same: Vec<bool> = first.iter().zip(&again).map(|(a, b)| a == b).collect();
        Outcome {
            pass: same.iter().all(|&s| s),
            detail: format!("byte-identical reports for criteria 4-7: {same:?}"),
        }
    });
    all &= print(8, "determinism", &o, t, secs(900));

    if all {
        println!("acceptance: all 8 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: some criteria failed");
        ExitCode::FAILURE
    }
}

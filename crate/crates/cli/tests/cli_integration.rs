//! Pipeline-level tests: ingestion round trips, experiment determinism,
//! constraint diagnostics and the hypothesis-suite surface.

use faircca_cli::config::{
    ClassifierKind, CsvPaths, DataSource, ExperimentConfig, HypothesisConfig, Method,
};
use faircca_cli::experiment::{run_experiment, stratified_split, Modality};
use faircca_cli::hypothesis::run_hypothesis_suite;
use faircca_cli::report::{write_experiment, OutputFormat};
use faircca_cli::{data, CliError};
use faircca_core::stats::Decision;
use faircca_core::SynthConfig;

fn small_synth(seed: u64) -> SynthConfig {
    SynthConfig {
        n_samples: 80,
        dim_x: 6,
        dim_y: 7,
        planted_rho: vec![0.7, 0.4],
        seed,
        ..SynthConfig::default()
    }
}

fn small_experiment_config() -> ExperimentConfig {
    ExperimentConfig {
        source: DataSource::Synth(small_synth(5)),
        methods: vec![Method::Raw, Method::Cca, Method::Frcca],
        rank: 2,
        unsupervised_rank: None,
        ridge: 1e-8,
        split_fraction: 0.7,
        tuning_seed: 0,
        eval_seeds: vec![1, 2, 3],
        classifier: ClassifierKind::Svm,
        search: None,
        svm_params: None,
        logreg_lambda: 1.0,
        gsg_bins: 5,
    }
}

#[test]
fn synth_output_reingests_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_synth(9);
    let dataset = faircca_core::generate_dataset(&config).unwrap();
    dataset.write_to_dir(dir.path()).unwrap();
    let paths = CsvPaths {
        x: dir.path().join("x.csv"),
        y: dir.path().join("y.csv"),
        z: dir.path().join("z.csv"),
        labels: dir.path().join("labels.csv"),
    };
    let loaded = data::ingest_csv(&paths).unwrap();
    assert_eq!(loaded.x.values(), dataset.x.values());
    assert_eq!(loaded.y.values(), dataset.y.values());
    assert_eq!(loaded.z, dataset.z);
    assert_eq!(loaded.labels, dataset.labels);
}

#[test]
fn ingest_shape_and_binary_validation() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("x.csv"),
        "f1,f2,f3\n1.0,2.0,3.0\n4.0,5.0,6.0\n",
    )
    .unwrap();
    std::fs::write(dir.path().join("y.csv"), "f1\n1.5\n2.5\n").unwrap();
    std::fs::write(dir.path().join("z.csv"), "z\n1\n2\n").unwrap();
    std::fs::write(dir.path().join("labels.csv"), "label\n1\n2\n").unwrap();
    let paths = CsvPaths {
        x: dir.path().join("x.csv"),
        y: dir.path().join("y.csv"),
        z: dir.path().join("z.csv"),
        labels: dir.path().join("labels.csv"),
    };
    let loaded = data::ingest_csv(&paths).unwrap();
    assert_eq!((loaded.x.n_samples(), loaded.x.n_features()), (2, 3));

    // Three distinct z values: rejected.
    std::fs::write(dir.path().join("z.csv"), "z\n1\n2\n").unwrap();
    std::fs::write(dir.path().join("x.csv"), "f1\n1.0\n2.0\n3.0\n").unwrap();
    std::fs::write(dir.path().join("y.csv"), "f1\n1.5\n2.5\n0.5\n").unwrap();
    std::fs::write(dir.path().join("z.csv"), "z\n1\n2\n3\n").unwrap();
    std::fs::write(dir.path().join("labels.csv"), "label\n1\n2\n1\n").unwrap();
    let err = data::ingest_csv(&paths).unwrap_err();
    assert_eq!(err.exit_code(), 3, "{err}");

    // Unparsable float reports row and column.
    std::fs::write(dir.path().join("x.csv"), "f1\n1.0\nnope\n0.5\n").unwrap();
    std::fs::write(dir.path().join("z.csv"), "z\n1\n2\n1\n").unwrap();
    let err = data::ingest_csv(&paths).unwrap_err();
    match err {
        CliError::Parse { row, col, .. } => {
            assert_eq!((row, col), (3, 1));
        }
        other => panic!("expected parse error, got {other}"),
    }
}

#[test]
fn split_preserves_label_proportions() {
    let labels: Vec<u8> = (0..101).map(|i| if i % 3 == 0 { 2 } else { 1 }).collect();
    for seed in 0..20 {
        let (train, test) = stratified_split(&labels, 0.7, seed).unwrap();
        assert_eq!(train.len() + test.len(), labels.len());
        for class in [1u8, 2u8] {
            let total = labels.iter().filter(|l| **l == class).count() as f64;
            let in_train = train.iter().filter(|&&i| labels[i] == class).count() as f64;
            assert!(
                (in_train - 0.7 * total).abs() <= 1.0,
                "class {class}: {in_train} of {total}"
            );
        }
    }
}

#[test]
fn experiment_emits_constraint_diagnostics_and_is_deterministic() {
    let config = small_experiment_config();
    let out1 = run_experiment(&config).unwrap();
    assert!(out1.failures.is_empty(), "failures: {:?}", out1.failures);
    // 3 methods x 2 modalities x 3 seeds.
    assert_eq!(out1.runs.len(), 18);
    for run in &out1.runs {
        match run.method {
            Method::Frcca => {
                let residual = run.gamma_residual.expect("frcca records carry residuals");
                assert!(residual <= 1e-8, "residual {residual}");
            }
            _ => assert!(run.gamma_residual.is_none()),
        }
    }
    // Determinism: identical outputs (runs, summary, deltas) on a rerun.
    let out2 = run_experiment(&config).unwrap();
    assert_eq!(
        serde_json::to_string(&out1.runs).unwrap(),
        serde_json::to_string(&out2.runs).unwrap()
    );
    assert_eq!(
        serde_json::to_string(&out1.summary).unwrap(),
        serde_json::to_string(&out2.summary).unwrap()
    );
    assert_eq!(
        serde_json::to_string(&out1.deltas).unwrap(),
        serde_json::to_string(&out2.deltas).unwrap()
    );

    // File emission: everything except timing.json is byte-identical.
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    write_experiment(&out1, d1.path(), OutputFormat::Tsv).unwrap();
    write_experiment(&out2, d2.path(), OutputFormat::Tsv).unwrap();
    for name in ["runs.jsonl", "summary.json", "summary.tsv", "deltas.tsv"] {
        let a = std::fs::read(d1.path().join(name)).unwrap();
        let b = std::fs::read(d2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between reruns");
    }
}

#[test]
fn experiment_summary_covers_every_cell() {
    let mut config = small_experiment_config();
    config.eval_seeds = vec![1, 2];
    let out = run_experiment(&config).unwrap();
    // Every (method, modality) pair appears with all seven metrics.
    for method in [Method::Raw, Method::Cca, Method::Frcca] {
        for modality in Modality::BOTH {
            let cells: Vec<_> = out
                .summary
                .iter()
                .filter(|c| c.method == method && c.modality == modality)
                .collect();
            assert_eq!(cells.len(), 7, "{method:?} {modality:?}");
            assert!(cells.iter().all(|c| c.n == 2));
        }
    }
    // Unsupervised deltas cover the planted rank.
    assert_eq!(out.deltas.len(), 2);
    assert!(out.deltas.iter().all(|d| d.delta_fair_pct > 99.9999));
}

#[test]
fn hypothesis_suite_has_table_shape_and_null_behaviour() {
    let base = HypothesisConfig {
        source: DataSource::Synth(small_synth(7)),
        baseline: Method::Cca,
        proposed: Method::Frcca,
        rank: 2,
        ridge: 1e-8,
        split_fraction: 0.7,
        n_seeds: 6,
        seed_start: 1,
        classifier: ClassifierKind::Svm,
        search: None,
        tuning_seed: 0,
        svm_params: None,
        logreg_lambda: 1.0,
        gsg_bins: 5,
        alpha: 0.05,
    };
    let out = run_hypothesis_suite(&base).unwrap();
    assert_eq!(out.table.len(), 3);
    for metric in ["gsg", "dpg", "eog"] {
        let row = &out.table[metric];
        assert!(row.contains_key("X") && row.contains_key("Y"));
    }
    assert_eq!(out.reports.len(), 6);

    // Proposed == baseline: the exact null; nothing may be rejected.
    let null_config = HypothesisConfig {
        proposed: Method::Cca,
        ..base
    };
    let out = run_hypothesis_suite(&null_config).unwrap();
    for report in &out.reports {
        assert_eq!(report.decision, Decision::NotRejectH0);
        assert!(report.degenerate);
    }
}

#[test]
fn logreg_classifier_path_works_end_to_end() {
    let mut config = small_experiment_config();
    config.classifier = ClassifierKind::Logreg;
    config.eval_seeds = vec![1];
    let out = run_experiment(&config).unwrap();
    assert_eq!(out.runs.len(), 6);
    assert!(out.failures.is_empty());
}

#[test]
fn search_path_chooses_params_and_records_them() {
    use faircca_cli::config::SearchSettings;
    use faircca_core::classify::Scorer;
    let mut config = small_experiment_config();
    config.methods = vec![Method::Cca, Method::Frcca];
    config.eval_seeds = vec![1];
    config.search = Some(SearchSettings {
        n_iter: 3,
        scorer: Scorer::Accuracy,
    });
    let out = run_experiment(&config).unwrap();
    assert!(out.failures.is_empty(), "{:?}", out.failures);
    // One best-params record per (method, modality) in the documented shape.
    assert_eq!(out.best_params.len(), 4);
    let doc = serde_json::to_value(&out.best_params[0]).unwrap();
    for key in [
        "kind", "C", "kernel", "gamma", "coef0", "scorer", "cv_score",
    ] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
    assert_eq!(doc["kind"], "svm");
    assert_eq!(doc["scorer"], "accuracy");
    // The experiment reruns identically with the same search settings.
    let again = run_experiment(&config).unwrap();
    assert_eq!(
        serde_json::to_string(&out.best_params).unwrap(),
        serde_json::to_string(&again.best_params).unwrap()
    );
}

#[test]
fn fairness_report_serializes_with_fixed_key_order() {
    let config = small_experiment_config();
    let out = run_experiment(&config).unwrap();
    let line = serde_json::to_string(&out.runs[0].report).unwrap();
    let dpg_pos = line.find("\"dpg\"").unwrap();
    let eog_pos = line.find("\"eog\"").unwrap();
    let gsg_pos = line.find("\"gsg\"").unwrap();
    let acc_pos = line.find("\"accuracy\"").unwrap();
    assert!(dpg_pos < eog_pos && eog_pos < gsg_pos && gsg_pos < acc_pos);
}

use spareshare::experiment::{curve_row_count, render_outputs, run_experiment, ExperimentConfig, Preset};

fn small(preset: Preset) -> ExperimentConfig {
    ExperimentConfig::preset(preset).with_scale(4, 300).with_seed(11)
}

#[test]
fn output_layout_and_row_counts() {
    for preset in [Preset::AlgoCompare, Preset::EnhanceCompare, Preset::Spectrum, Preset::Scaling] {
        let report = run_experiment(&small(preset)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        report.write_to(dir.path()).unwrap();
        let mut rows = 0;
        for c in &report.conditions {
            let cdir = dir.path().join("curves").join(&c.name);
            let files: Vec<_> = std::fs::read_dir(&cdir).unwrap().collect();
            assert_eq!(files.len(), 4);
            for f in files {
                let text = std::fs::read_to_string(f.unwrap().path()).unwrap();
                assert!(text.starts_with("f,repairability,ci95,trials,estimator\n"));
                rows += text.lines().count() - 1;
            }
            assert!(dir.path().join(format!("mean_{}.csv", c.name)).is_file());
        }
        assert_eq!(rows, curve_row_count(&report));
        let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(summary.lines().count(), report.conditions.len() + 1);
    }
}

#[test]
fn same_seed_same_bytes() {
    let a = render_outputs(&run_experiment(&small(Preset::Spectrum)).unwrap());
    let b = render_outputs(&run_experiment(&small(Preset::Spectrum).with_workers(Some(3))).unwrap());
    assert_eq!(a, b);
    let c = render_outputs(&run_experiment(&small(Preset::Spectrum).with_seed(12)).unwrap());
    assert_ne!(a, c);
}

#[test]
fn invalid_config_rejected() {
    assert!(run_experiment(&small(Preset::AlgoCompare).with_scale(0, 10)).is_err());
    assert!(run_experiment(&small(Preset::AlgoCompare).with_scale(3, 0)).is_err());
}

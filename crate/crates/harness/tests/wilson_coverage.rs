//! The exact `f(1) = 0` probability should fall inside the 99% Wilson interval
//! in at least 98% of independent replications.

use polyirr_core::sampling::CoefficientModel;
use polyirr_harness::{run_experiment_with, Detector, ExperimentConfig, KRule, RunOptions};

#[test]
fn exact_reference_coverage_over_fifty_replications() {
    let dir = tempfile::tempdir().unwrap();
    let replications = 50u64;
    let mut inside = 0;
    let mut exact = None;
    for rep in 0..replications {
        let config = ExperimentConfig {
            model: CoefficientModel::UniformSymmetric { k: 2 },
            d_list: vec![30],
            k_rule: Some(KRule::Fixed { k: 2 }),
            trials: 4000,
            seed: 0x5eed_0000 + rep,
            detector: Detector::FAt1,
            constants: Default::default(),
            output_dir: dir.path().to_path_buf(),
            checkpoint_every: 4000,
        };
        let options = RunOptions { workers: None, resume: false };
        let row = run_experiment_with(&config, &options).unwrap().rows.remove(0);
        assert!(row.hits <= row.trials);
        exact.get_or_insert(row.exact_ref.unwrap());
        inside += u64::from(row.exact_in_interval().unwrap());
    }
    let exact = exact.unwrap();
    assert!(exact > 0.01 && exact < 0.2, "exact reference {exact}");
    assert!(
        inside * 100 >= 98 * replications,
        "only {inside} of {replications} intervals cover {exact}"
    );
}

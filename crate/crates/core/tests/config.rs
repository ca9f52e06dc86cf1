use proptest::prelude::*;

use solspace::drunkwalk::Strategy as Walk;
use solspace::harness::config::{Charges, Experiment, ExperimentConfig, Family};
use solspace::harness::run;
use solspace::scaling::FitModel;
use solspace::Error;

fn experiment() -> impl Strategy<Value = Experiment> {
    prop::sample::select(Experiment::ALL.to_vec())
}

prop_compose! {
    fn any_config()(
        exp in experiment(),
        family in prop::sample::select(vec![Family::RandomKsat, Family::Twosat, Family::Hornsat, Family::Xorsat, Family::Tseitin]),
        n in prop::option::of(0usize..400),
        alpha in prop::option::of(-1.0f64..8.0),
        k in 0usize..6,
        m in prop::option::of(0usize..12),
        odd in any::<bool>(),
        fraction in -0.5f64..1.5,
        probes in 0usize..300,
        tau in prop::option::of(0usize..400),
        budget in 0u64..1_000_000,
        trials in 0usize..60,
        triples in 0usize..300,
        sizes in prop::collection::vec(0usize..200, 0..6),
        seeds in 0usize..10,
        max_dim in 0usize..30,
        strategies in prop::collection::vec(prop::sample::select(Walk::ALL.to_vec()), 0..4),
        two_thirds in prop::option::of(any::<bool>()),
        payload_n in prop::option::of(0usize..40),
        master_seed in any::<u64>(),
        workers in 0usize..300,
    ) -> ExperimentConfig {
        ExperimentConfig {
            family, n, alpha, k, m,
            charges: if odd { Charges::Odd } else { Charges::Even },
            fraction, probes, tau, budget, trials, triples, sizes, seeds, max_dim, strategies,
            fit_model: two_thirds.map(|t| if t { FitModel::ExpTwoThirds } else { FitModel::ExpLinear }),
            payload_n, master_seed, workers,
            ..ExperimentConfig::new(exp)
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn json_round_trip(c in any_config()) {
        let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
        prop_assert_eq!(back, c);
    }

    /// Invalid configs are refused before anything touches the output
    /// directory.
    #[test]
    fn invalid_configs_never_start(c in any_config()) {
        let tmp = tempfile::tempdir().unwrap();
        let c = ExperimentConfig { output_dir: tmp.path().join("out"), ..c };
        if let Err(e) = c.validate() {
            prop_assert!(matches!(e, Error::Config(ref v) if !v.is_empty()));
            prop_assert!(matches!(run(&c), Err(Error::Config(_))));
            prop_assert!(!tmp.path().join("out").exists());
        }
    }
}

/// Every config that validates runs every item without a precondition
/// error; small sizes keep this fast.
#[test]
fn valid_small_configs_run_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    let base = |exp| ExperimentConfig { output_dir: tmp.path().to_path_buf(), seeds: 2, ..ExperimentConfig::new(exp) };
    let configs = [
        ExperimentConfig { n: Some(10), alpha: Some(3.0), ..base(Experiment::Gen) },
        ExperimentConfig { family: Family::Tseitin, m: Some(2), ..base(Experiment::Gen) },
        ExperimentConfig { family: Family::Tseitin, m: Some(2), ..base(Experiment::Solve) },
        ExperimentConfig { family: Family::Twosat, n: Some(12), alpha: Some(1.0), ..base(Experiment::Homology) },
        ExperimentConfig { family: Family::Hornsat, n: Some(12), alpha: Some(2.0), tau: Some(3), ..base(Experiment::Shatter) },
        ExperimentConfig { n: Some(30), alpha: Some(3.5), trials: 2, probes: 10, strategies: vec![Walk::S2, Walk::S4], ..base(Experiment::Drunkwalk) },
        ExperimentConfig { family: Family::Xorsat, n: Some(12), alpha: Some(0.3), ..base(Experiment::Xortest) },
        ExperimentConfig { family: Family::Tseitin, sizes: vec![2, 3], seeds_per_size: 2, payload_n: Some(8), ..base(Experiment::Scaling) },
    ];
    for c in configs {
        c.validate().unwrap();
        let rec = run(&c).unwrap();
        assert_eq!(rec.failed_items(), 0, "{}: {:?}", c.experiment, rec.items.iter().find_map(|i| i.error.clone()));
    }
}

#[test]
fn homology_guard_counts_tseitin_edges() {
    let c = ExperimentConfig { family: Family::Tseitin, m: Some(3), ..ExperimentConfig::new(Experiment::Homology) };
    match c.validate() {
        Err(Error::Config(v)) => assert!(v.iter().any(|e| e.field == "n")),
        other => panic!("expected guard refusal, got {other:?}"),
    }
}

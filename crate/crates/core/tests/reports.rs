use std::io::Write;

use mol_core::experiment::ExperimentResult;
use mol_core::{
    bic_order, derive_seed, estimate_order_entropy, estimate_order_fluctuation, estimate_range, naive_flatspot_order,
    run_experiment, sample_lattice, sample_markov, EstimationReport, Execution, ExperimentPlan, FlatspotConfig,
    FluctuationConfig, LatticeModel, MarkovModel, MrfConfig,
};

#[test]
fn json_round_trip_for_every_method() {
    let x = sample_markov(&MarkovModel::two_state(0.1, 0.1).unwrap(), 5_000, 1).unwrap();
    let lat = sample_lattice(&LatticeModel::Iid { probs: vec![0.5, 0.5] }, 32, 1).unwrap();
    let reports = vec![
        estimate_order_entropy(&x, None).unwrap(),
        estimate_order_fluctuation(&x, &FluctuationConfig::default()).unwrap(),
        bic_order(&x, 4).unwrap().into(),
        naive_flatspot_order(&x, &FlatspotConfig::default()).unwrap(),
        estimate_range(&lat, &MrfConfig::default()).unwrap(),
    ];
    for r in reports {
        assert!(r.is_consistent());
        let back = EstimationReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}

#[test]
fn bic_agrees_with_fluctuation_on_two_state_chain() {
    let model = MarkovModel::two_state(0.1, 0.1).unwrap();
    let agree = (0..30)
        .filter(|&i| {
            let x = sample_markov(&model, 100_000, derive_seed(12, i)).unwrap();
            let b = bic_order(&x, 5).unwrap().chosen_order;
            b == 1
                && b == estimate_order_fluctuation(&x, &FluctuationConfig::with_k_max(4))
                    .unwrap()
                    .chosen_order
        })
        .count();
    assert!(agree >= 27, "{agree}/30");
}

#[test]
fn plan_files_resolve_model_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("chain.toml"),
        "kind = \"flatspot\"\nlag = 2\nstay_prob = 0.9\n",
    )
    .unwrap();
    let mut f = std::fs::File::create(dir.path().join("plan.toml")).unwrap();
    writeln!(
        f,
        "name = \"lag2\"\nmodel_file = \"chain.toml\"\nn = [2000, 4000]\nseeds = 4\n\n[[estimators]]\nmethod = \"flatspot\"\n\n[[estimators]]\nmethod = \"fluctuation\"\nwindow = {{ kind = \"fixed\", k_max = 4 }}"
    )
    .unwrap();
    let plan = ExperimentPlan::from_file(dir.path().join("plan.toml")).unwrap();
    let res = run_experiment(&plan, Execution::Parallel).unwrap();
    assert!(res.rows.iter().all(|r| r.model == "lag2" && r.true_order == 2));
    assert_eq!(ExperimentResult::parse_rows(&res.rows_csv()).unwrap(), res.rows);
    assert_eq!(
        res.to_csv(),
        run_experiment(&plan, Execution::Sequential).unwrap().to_csv()
    );
}

#[test]
fn lattice_plans_run() {
    let plan = ExperimentPlan::from_toml(
        "n = [24, 32]\nseeds = 2\n[lattice]\nkind = \"iid\"\nprobs = [0.5, 0.5]\n[[estimators]]\nmethod = \"mrf\"\n",
    )
    .unwrap();
    let res = run_experiment(&plan, Execution::Parallel).unwrap();
    assert_eq!(res.rows.len(), 4);
    assert!(res.rows.iter().all(|r| r.true_order == 0 && r.error.is_none()));
}

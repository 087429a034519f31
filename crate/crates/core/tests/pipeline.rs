use rnaqubo::dataset::{known_stems, read_ct};
use rnaqubo::models::build;
use rnaqubo::pipeline::{candidates_for, predict_from};
use rnaqubo::solvers::{decode, solve};
use rnaqubo::*;

fn golden() -> (RnaSequence, SecondaryStructure) {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixtures/golden.ct");
    read_ct(&path).unwrap()
}

#[test]
fn solvers_agree_on_the_golden_sequence() {
    let (seq, _) = golden();
    let cfg = PredictConfig::default();
    for kind in ModelKind::ALL {
        let set = candidates_for(kind, &seq, &cfg).unwrap();
        let qubo = build(&set, &ModelParams::defaults(kind), &cfg.loops).unwrap();
        let exact = solve(&qubo, &SolveRequest::new(SolveMethod::Exhaustive, 0)).unwrap();
        for method in [SolveMethod::SimAnneal, SolveMethod::Tabu] {
            let r = solve(&qubo, &SolveRequest::new(method, 1)).unwrap();
            assert!(
                (r.best_energy - exact.best_energy).abs() < 1e-9,
                "model {kind} {method:?}: {} vs {}",
                r.best_energy,
                exact.best_energy
            );
        }
        decode(&set, &exact.best_q).unwrap();
    }
}

#[test]
fn qubo_json_round_trip_preserves_energies() {
    let (seq, _) = golden();
    let cfg = PredictConfig::default();
    let set = candidates_for(ModelKind::Three, &seq, &cfg).unwrap();
    let qubo = build(&set, &ModelParams::defaults(ModelKind::Three), &cfg.loops).unwrap();
    let back = Qubo::from_json(&qubo.to_json()).unwrap();
    assert_eq!(back, qubo);
}

#[test]
fn true_stems_decode_to_the_true_structure() {
    let (seq, truth) = golden();
    let cfg = PredictConfig::default();
    let (stems, _) = known_stems(&truth, 1, WeightMode::BpLength, &seq, &cfg.nn).unwrap();
    let set = CandidateSet::new("golden", seq.len(), CandidateKind::Stem(WeightMode::BpLength), stems);
    let q = vec![true; set.len()];
    assert_eq!(decode(&set, &q).unwrap(), truth);
}

#[test]
fn prediction_from_prebuilt_candidates() {
    let seq = RnaSequence::parse("GGGCGAAAGCCCAAAGGGCGAAAGCCC", "two").unwrap();
    let mut cfg = PredictConfig::default();
    cfg.solver = SolveRequest::new(SolveMethod::Exhaustive, 0);
    let set = candidates_for(ModelKind::One, &seq, &cfg).unwrap();
    let p = predict_from(set, &ModelParams::defaults(ModelKind::One), &cfg).unwrap();
    assert!(p.structure.len() >= 8, "{:?}", p.structure.pairs());
    assert!(!p.structure.is_pseudoknotted());
}

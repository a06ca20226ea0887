use std::path::PathBuf;

use mechcheck::harness::Verdict;
use mechcheck::scenario::{load, Overrides};
use mechcheck::utility::sample::{random_parallel_profile, rng_from_seed};
use mechcheck::witness::{run_impossibility_sweep, RefutationReport, SweepConfig};
use mechcheck::{AffineMaximizerSpec, TypeProfile};

fn scenarios() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

#[test]
fn profiles_survive_json_bit_for_bit() {
    let mut rng = rng_from_seed(11);
    for _ in 0..50 {
        let p = random_parallel_profile(&mut rng, 3, 4, 5.0, false);
        let text = serde_json::to_string(&p).unwrap();
        let back: TypeProfile = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
        let spec = AffineMaximizerSpec::utilitarian(3, 4);
        assert_eq!(
            mechcheck::mechanism::gwvcg_run(&spec, &back).unwrap(),
            mechcheck::mechanism::gwvcg_run(&spec, &p).unwrap()
        );
    }
}

#[test]
fn shipped_scenarios_give_expected_verdicts() {
    let expect = [
        ("worked.json", Verdict::Pass),
        ("parallel_suite.json", Verdict::Pass),
        ("pareto.json", Verdict::Fail),
        ("onto_unhit.json", Verdict::Inconclusive),
    ];
    for (file, verdict) in expect {
        let loaded = load(&scenarios().join(file)).unwrap();
        let worst = loaded
            .iter()
            .map(|(n, s)| s.check(n, Overrides::default()).unwrap().verdict)
            .max()
            .unwrap();
        assert_eq!(worst, verdict, "{file}");
    }
}

#[test]
fn manifest_expands_relative_paths() {
    let loaded = load(&scenarios().join("manifest.json")).unwrap();
    assert_eq!(loaded.len(), 2);
}

#[test]
fn serialized_refutations_replay() {
    let out = run_impossibility_sweep(&SweepConfig::default()).unwrap();
    assert!(!out.reports.is_empty());
    for r in out.reports.iter().step_by(7) {
        let back: RefutationReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back.slack.to_bits(), r.slack.to_bits());
        let replayed = back.replay().unwrap().expect("still refuted");
        assert!(replayed >= back.slack - 1e-9);
    }
}

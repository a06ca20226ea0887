//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use mechcheck::harness::suite::{gwvcg_suite, monotonicity_suite};
use mechcheck::harness::{
    check_deterministic, check_dsic, check_ir, check_no_subsidy, check_onto, check_pareto, classical_vcg_oracle,
    pareto_domination, CheckReport, DeviationConfig, DeviationSet, Property, SuiteReport, Verdict,
};
use mechcheck::mechanism::{gwvcg_fixed_payment_run, gwvcg_run, FixedPaymentGwvcg};
use mechcheck::utility::sample::{random_parallel, rng_from_seed, sample_quasi_linear_profile};
use mechcheck::witness::{
    run_impossibility_sweep, two_positive_weight_specs, two_slope_refutation, Grid, SweepConfig,
};
use mechcheck::{AffineMaximizerSpec, AgentType, TypeProfile};

const TOL: f64 = 1e-9;
const SEED: u64 = 0;

struct Outcome {
    pass: bool,
    detail: String,
    /// Machine report compared across reruns.
    machine: String,
}

fn violations(suite: &SuiteReport, p: Property) -> u64 {
    suite.get(p).map_or(u64::MAX, |r| r.violations)
}

fn gwvcg_positive(seed: u64) -> Outcome {
    let suite = gwvcg_suite(seed..seed + 1000, TOL).expect("suite runs");
    let v: Vec<u64> = [Property::Dsic, Property::Ir, Property::NoSubsidy]
        .into_iter()
        .map(|p| violations(&suite, p))
        .collect();
    let trials = suite.get(Property::Dsic).map_or(0, |r| r.trials);
    Outcome {
        pass: v.iter().all(|&x| x == 0),
        detail: format!("1000 profiles, {trials} deviations; violations dsic/ir/no_subsidy = {v:?}"),
        machine: suite.to_json(),
    }
}

fn quasi_linear_equivalence(seed: u64) -> Outcome {
    let mut mismatches = Vec::new();
    for s in seed..seed + 1000 {
        let n = 1 + (s % 3) as usize;
        let m = 3 + ((s / 3) % 2) as usize;
        let profile = sample_quasi_linear_profile(s, n, m);
        let spec = AffineMaximizerSpec::utilitarian(n, m);
        let values: Vec<Vec<f64>> = profile.agents().iter().map(|t| t.values().to_vec()).collect();
        let ours = gwvcg_run(&spec, &profile).expect("valid");
        let oracle = classical_vcg_oracle(&values, &spec.tiebreak);
        if ours != oracle {
            mismatches.push(s);
        }
    }
    Outcome {
        pass: mismatches.is_empty(),
        detail: format!("1000 quasi-linear profiles, mismatching seeds {mismatches:?}"),
        machine: format!("{mismatches:?}"),
    }
}

fn standard_prices(seed: u64) -> Outcome {
    let suite = gwvcg_suite(seed..seed + 1000, TOL).expect("suite runs");
    let r = suite.get(Property::StandardPrices).expect("present");
    Outcome {
        pass: r.violations == 0 && r.trials > 0,
        detail: format!(
            "{} price rows, {} violations, {} tied zero-weight rows skipped",
            r.trials, r.violations, r.degenerate
        ),
        machine: r.to_json(),
    }
}

fn necessary_conditions(seed: u64) -> Outcome {
    let suite = monotonicity_suite(seed, 10_000, TOL).expect("suite runs");
    let w = suite.get(Property::Wmon).expect("present");
    let p = suite.get(Property::Pad).expect("present");
    Outcome {
        pass: w.violations == 0 && p.violations == 0 && w.trials == 10_000 && p.trials == 10_000,
        detail: format!(
            "wmon {} pairs {} violations; pad {} pairs {} violations ({} vacuous)",
            w.trials, w.violations, p.trials, p.violations, p.vacuous
        ),
        machine: suite.to_json(),
    }
}

fn impossibility_witness(seed: u64) -> Outcome {
    let grid = Some(Grid {
        lo: 0.0,
        hi: 2.25,
        step: 0.05,
    });
    let config = SweepConfig {
        grid,
        slope_pairs: Vec::new(),
        seed,
        ..SweepConfig::default()
    };
    let out = run_impossibility_sweep(&config).expect("sweep runs");
    let counts = out.summary.price_vector;
    let replayed = out
        .reports
        .iter()
        .filter(|r| r.reports.len() == 3 && r.reports.iter().all(CheckReport::failed))
        .filter(|r| r.replay().ok().flatten().is_some_and(|s| s >= r.slack - 1e-9))
        .count();
    let control = run_impossibility_sweep(&SweepConfig {
        weights: vec![1.0, 0.0],
        constants: Some(vec![0.0, 0.0, 1.0]),
        ..config.clone()
    })
    .expect("control runs");
    let c = control.summary.control.as_ref().expect("control summary");
    let pass = counts.total == 46
        && counts.refuted == 46
        && replayed == 46
        && c.passed()
        && c.prices == [1.0, 1.0, 0.0]
        && c.profiles == 46;
    Outcome {
        pass,
        detail: format!(
            "{}/{} candidates refuted, {replayed} replayed; control z={:?} on {} profiles: {}",
            counts.refuted,
            counts.total,
            c.prices,
            c.profiles,
            if c.passed() { "pass" } else { "FAIL" }
        ),
        machine: format!("{}\n{}", out.summary.to_json(), control.summary.to_json()),
    }
}

fn two_slope(seed: u64) -> Outcome {
    let mut total = 0;
    let mut refuted = 0;
    let mut min_gain = f64::INFINITY;
    let mut machine = String::new();
    for (alpha, beta) in [(1.0, 2.0), (1.0, 1.01)] {
        for (k, c) in two_positive_weight_specs(seed, 20) {
            total += 1;
            let r = two_slope_refutation(alpha, beta, k, &c, TOL).expect("valid spec");
            let replay = r.replay().expect("replay runs");
            if r.refuted() && replay.is_some_and(|s| s >= r.slack - 1e-9) {
                refuted += 1;
                min_gain = min_gain.min(r.slack);
            }
            machine += &r.to_json();
        }
    }
    Outcome {
        pass: total == 40 && refuted == 40,
        detail: format!(
            "{refuted}/{total} specs refuted by a replayable dsic violation, survivors {}, smallest gain {min_gain:.4}",
            total - refuted
        ),
        machine,
    }
}

/// Two strictly parallel agents with weight 1 and a zero-weight agent with
/// all-zero willingness to pay.
fn fixed_payment_profile(seed: u64) -> TypeProfile {
    let mut rng = rng_from_seed(seed);
    let m = 3;
    let mut agents: Vec<AgentType> = (0..2)
        .map(|_| AgentType::parallel(random_parallel(&mut rng, m, 5.0, true)).expect("valid sample"))
        .collect();
    agents.push(AgentType::quasi_linear(vec![0.0; m]).expect("valid"));
    TypeProfile::unnamed(agents).expect("valid profile")
}

fn fixed_payment(seed: u64) -> Outcome {
    let spec = AffineMaximizerSpec::new(vec![1.0, 1.0, 0.0], vec![0.0; 3]);
    let strict = DeviationConfig {
        random: 16,
        strict: true,
    };
    let run = |z_star: f64| -> SuiteReport {
        let mech = FixedPaymentGwvcg {
            spec: spec.clone(),
            z_star,
        };
        let mut all = Vec::new();
        for s in seed..seed + 100 {
            let p = fixed_payment_profile(s);
            let devs = DeviationSet::generate(&p, s, strict);
            all.push(check_dsic(&mech, &p, &devs, TOL).expect("runs"));
            all.push(check_deterministic(&mech, &p).expect("runs"));
            all.push(check_ir(&mech, &p, TOL).expect("runs"));
            all.push(check_no_subsidy(&mech, &p, TOL).expect("runs"));
        }
        let mut k = 0;
        all.push(
            check_onto(
                &mech,
                3,
                |_| {
                    k += 1;
                    fixed_payment_profile(seed.wrapping_mul(31).wrapping_add(k))
                },
                300,
                seed,
            )
            .expect("runs"),
        );
        SuiteReport::from_reports(all)
    };
    let verdict = |s: &SuiteReport, p: Property| s.get(p).map(|r| r.verdict);
    let plus = run(1.0);
    let minus = run(-1.0);
    let plus_ok = [Property::Dsic, Property::Deterministic, Property::Onto, Property::NoSubsidy]
        .into_iter()
        .all(|p| verdict(&plus, p) == Some(Verdict::Pass))
        && verdict(&plus, Property::Ir) == Some(Verdict::Fail);
    let minus_ok = [Property::Dsic, Property::Deterministic, Property::Onto, Property::Ir]
        .into_iter()
        .all(|p| verdict(&minus, p) == Some(Verdict::Pass))
        && verdict(&minus, Property::NoSubsidy) == Some(Verdict::Fail);
    let zero_mismatch = (seed..seed + 100)
        .filter(|&s| {
            let p = fixed_payment_profile(s);
            gwvcg_fixed_payment_run(&spec, 0.0, &p).ok() != gwvcg_run(&spec, &p).ok()
        })
        .count();
    Outcome {
        pass: plus_ok && minus_ok && zero_mismatch == 0,
        detail: format!(
            "z*=+1 ir counterexample {}, others pass {}; z*=-1 no_subsidy counterexample {}, others pass {}; z*=0 mismatches {zero_mismatch}",
            verdict(&plus, Property::Ir) == Some(Verdict::Fail),
            plus_ok,
            verdict(&minus, Property::NoSubsidy) == Some(Verdict::Fail),
            minus_ok,
        ),
        machine: format!("{}\n{}", plus.to_json(), minus.to_json()),
    }
}

fn pareto_example(_seed: u64) -> Outcome {
    let profile = TypeProfile::from_wtp(&[
        vec![10.0, 0.0, 0.0],
        vec![5.0, 10.0, 0.0],
        vec![4.0, 0.0, 8.0],
    ])
    .expect("valid");
    let spec = AffineMaximizerSpec::new(vec![0.0, 1.0, 1.0], vec![0.0; 3]);
    let out = gwvcg_run(&spec, &profile).expect("runs");
    let report = check_pareto(&profile, &out, TOL);
    let dom = pareto_domination(&profile, &out, TOL);
    let pass = out.chosen == 1
        && out.payments[1] == 8.0
        && report.failed()
        && dom.as_ref().is_some_and(|d| d.alternative == 0 && d.payments == [8.0, 0.0, 0.0]);
    Outcome {
        pass,
        detail: format!(
            "chosen {}, payments {:?}, dominated by {:?}",
            profile.alternatives()[out.chosen],
            out.payments,
            dom.map(|d| (profile.alternatives()[d.alternative].clone(), d.payments))
        ),
        machine: report.to_json(),
    }
}

type Criterion = (&'static str, fn(u64) -> Outcome);

const CRITERIA: [Criterion; 8] = [
    ("gwvcg positive result", gwvcg_positive),
    ("quasi-linear equivalence", quasi_linear_equivalence),
    ("standard prices", standard_prices),
    ("w-mon and pad", necessary_conditions),
    ("impossibility witness", impossibility_witness),
    ("two-slope impossibility", two_slope),
    ("fixed-payment variant", fixed_payment),
    ("pareto violation", pareto_example),
];

fn main() -> ExitCode {
    let mut all_pass = true;
    let mut first = Vec::new();
    for (i, (name, f)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let o = f(SEED);
        all_pass &= o.pass;
        println!(
            "criterion {} {name}: {} ({}; {:.1}s)",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        first.push(o.machine);
    }
    let start = Instant::now();
    let differing: Vec<usize> = CRITERIA
        .iter()
        .zip(&first)
        .enumerate()
        .filter(|(_, ((_, f), m))| f(SEED).machine != **m)
        .map(|(i, _)| i + 1)
        .collect();
    let pass = differing.is_empty();
    all_pass &= pass;
    println!(
        "criterion 9 determinism: {} (criteria 1-8 rerun with seed {SEED}, differing {differing:?}; {:.1}s)",
        if pass { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Checkers for incentive and efficiency properties of black-box
//! mechanisms, with replayable counterexamples.

pub mod checks;
pub mod deviations;
pub mod oracle;
pub mod report;
pub mod suite;

pub use checks::{
    agent_maximizing_shortfall, check_agent_maximizing, check_deterministic, check_dsic, check_ir, check_no_subsidy,
    check_onto, check_pad, check_pareto, check_price_rows, check_standard_prices, check_wmon, pareto_domination,
    Domination, Shortfall, DEFAULT_TOL,
};
pub use deviations::{DeviationConfig, DeviationSet};
pub use oracle::classical_vcg_oracle;
pub use report::{CheckReport, Counterexample, Property, Verdict};
pub use suite::SuiteReport;

use crate::mechanism::{Mechanism, MechanismError};

/// Re-runs the checker that produced `report` on its counterexample alone.
/// `None` when there is nothing to replay (no counterexample, or a sampled
/// ontoness report).
pub fn replay<M: Mechanism + ?Sized>(report: &CheckReport, mech: &M) -> Option<Result<CheckReport, MechanismError>> {
    let tol = report.tolerance;
    let cx = report.counterexample.as_deref()?;
    Some(match cx {
        Counterexample::Dsic {
            profile,
            agent,
            deviation,
            ..
        } => {
            let mut per_agent = vec![Vec::new(); profile.num_agents()];
            per_agent[*agent] = vec![deviation.clone()];
            check_dsic(mech, profile, &DeviationSet::new(profile, per_agent), tol)
        }
        Counterexample::Ir { profile, .. } => check_ir(mech, profile, tol),
        Counterexample::NoSubsidy { profile, .. } => check_no_subsidy(mech, profile, tol),
        Counterexample::Deterministic { profile, .. } => check_deterministic(mech, profile),
        Counterexample::StandardPrices { profile, row, .. } => match profile {
            Some(p) => check_price_rows(mech, p, tol),
            None => {
                let mut r = CheckReport::new(Property::StandardPrices, mech.name(), tol);
                r.trials = 1;
                if !check_standard_prices(row, tol) {
                    r.violation(cx.clone());
                }
                Ok(r)
            }
        },
        Counterexample::AgentMaximizing {
            profile,
            schedule,
            chosen,
            ..
        } => Ok(check_agent_maximizing(profile, schedule, *chosen, tol)),
        Counterexample::Wmon {
            profile,
            agent,
            original,
            alternate,
            ..
        } => check_wmon(mech, profile, *agent, original, alternate, tol),
        Counterexample::Pad { profile, alternate, .. } => check_pad(mech, profile, alternate, tol),
        Counterexample::Pareto { profile, outcome, .. } => Ok(check_pareto(profile, outcome, tol)),
        Counterexample::Onto { .. } => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanism::{FnMechanism, MechanismOutcome};
    use crate::utility::TypeProfile;

    #[test]
    fn failures_replay_to_the_same_violation() {
        let rebate = FnMechanism::new("rebate", |p: &TypeProfile| {
            Ok(MechanismOutcome {
                chosen: 0,
                payments: vec![-0.5; p.num_agents()],
            })
        });
        let profile = TypeProfile::from_wtp(&[vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        let r = check_no_subsidy(&rebate, &profile, DEFAULT_TOL).unwrap();
        assert!(r.failed());
        let again = replay(&r, &rebate).unwrap().unwrap();
        assert!(again.failed());
        assert_eq!(again.counterexample, r.counterexample);
    }

    #[test]
    fn passing_reports_have_nothing_to_replay() {
        let profile = TypeProfile::from_wtp(&[vec![0.0, 1.0]]).unwrap();
        let c = FnMechanism::constant(1);
        let r = check_no_subsidy(&c, &profile, DEFAULT_TOL).unwrap();
        assert!(replay(&r, &c).is_none());
    }
}

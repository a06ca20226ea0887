//! The individual property checkers.
//!
//! Mechanisms are treated as black boxes `profile -> outcome`. Utilities
//! are always evaluated with the agent's true curves; misreports only
//! change what the mechanism sees.

use rand_chacha::ChaCha8Rng;

use super::deviations::DeviationSet;
use super::report::{CheckReport, Counterexample, Property, Verdict};
use crate::mechanism::{Mechanism, MechanismError, MechanismOutcome, Price, PriceSchedule};
use crate::utility::sample::rng_from_seed;
use crate::utility::{AgentType, TypeProfile};

/// Default absolute tolerance for every checker.
pub const DEFAULT_TOL: f64 = 1e-9;

fn realized(t: &AgentType, out: &MechanismOutcome, i: usize) -> f64 {
    t.utility(out.chosen, out.payments[i])
}

/// No agent gains by reporting any type in `deviations` instead of the
/// truth, by more than `tol` utils.
pub fn check_dsic<M: Mechanism + ?Sized>(
    mech: &M,
    profile: &TypeProfile,
    deviations: &DeviationSet,
    tol: f64,
) -> Result<CheckReport, MechanismError> {
    let mut report = CheckReport::new(Property::Dsic, mech.name(), tol);
    let truthful = mech.run(profile)?;
    for i in 0..profile.num_agents() {
        let truth = profile.agent(i);
        let honest = realized(truth, &truthful, i);
        for dev in deviations.for_agent(i) {
            report.trials += 1;
            let deviated = mech.run(&profile.with_agent(i, dev.clone())?)?;
            let lie = realized(truth, &deviated, i);
            if lie > honest + tol {
                report.violation(Counterexample::Dsic {
                    profile: profile.clone(),
                    agent: i,
                    deviation: dev.clone(),
                    truthful: truthful.clone(),
                    deviated,
                    truthful_utility: honest,
                    deviated_utility: lie,
                });
            }
        }
    }
    Ok(report)
}

/// Every agent ends up at least as well off as with its worst alternative
/// for free: `u_{i,x}(t_i) >= min_a v_{i,a} - tol`.
pub fn check_ir<M: Mechanism + ?Sized>(mech: &M, profile: &TypeProfile, tol: f64) -> Result<CheckReport, MechanismError> {
    let mut report = CheckReport::new(Property::Ir, mech.name(), tol);
    let out = mech.run(profile)?;
    for (i, t) in profile.agents().iter().enumerate() {
        report.trials += 1;
        let utility = realized(t, &out, i);
        let floor = t.min_value();
        if utility < floor - tol {
            report.violation(Counterexample::Ir {
                profile: profile.clone(),
                agent: i,
                outcome: out.clone(),
                utility,
                floor,
            });
        }
    }
    Ok(report)
}

/// No agent receives money: `t_i >= -tol`.
pub fn check_no_subsidy<M: Mechanism + ?Sized>(
    mech: &M,
    profile: &TypeProfile,
    tol: f64,
) -> Result<CheckReport, MechanismError> {
    let mut report = CheckReport::new(Property::NoSubsidy, mech.name(), tol);
    let out = mech.run(profile)?;
    for i in 0..profile.num_agents() {
        report.trials += 1;
        if out.payments[i] < -tol {
            report.violation(Counterexample::NoSubsidy {
                profile: profile.clone(),
                agent: i,
                outcome: out.clone(),
            });
        }
    }
    Ok(report)
}

/// Running the mechanism twice on the same profile gives bit-identical
/// outcomes.
pub fn check_deterministic<M: Mechanism + ?Sized>(mech: &M, profile: &TypeProfile) -> Result<CheckReport, MechanismError> {
    let mut report = CheckReport::new(Property::Deterministic, mech.name(), 0.0);
    let first = mech.run(profile)?;
    let second = mech.run(profile)?;
    report.trials = 1;
    let same = first.chosen == second.chosen
        && first.payments.len() == second.payments.len()
        && first.payments.iter().zip(&second.payments).all(|(x, y)| x.to_bits() == y.to_bits());
    if !same {
        report.violation(Counterexample::Deterministic {
            profile: profile.clone(),
            first,
            second,
        });
    }
    Ok(report)
}

/// Sampled ontoness. Passes once every alternative has been selected;
/// unhit alternatives make the verdict inconclusive, or a failure if the
/// mechanism declares itself constant.
pub fn check_onto<M, F>(mech: &M, m: usize, mut sampler: F, trials: u64, seed: u64) -> Result<CheckReport, MechanismError>
where
    M: Mechanism + ?Sized,
    F: FnMut(&mut ChaCha8Rng) -> TypeProfile,
{
    let mut report = CheckReport::new(Property::Onto, mech.name(), 0.0).with_seed(seed);
    report.declared_constant = mech.declared_constant();
    let mut rng = rng_from_seed(seed);
    let mut hits = vec![0u64; m];
    for _ in 0..trials {
        let profile = sampler(&mut rng);
        let out = mech.run(&profile)?;
        hits[out.chosen] += 1;
        report.trials += 1;
    }
    report.hits = Some(hits);
    report.settle_onto();
    if report.verdict == Verdict::Fail {
        report.violations = 1;
    }
    Ok(report)
}

/// Lemma-style standard prices: finite entries are non-negative and the
/// smallest is zero, both up to `tol`.
pub fn check_standard_prices(row: &[Price], tol: f64) -> bool {
    let finite: Vec<f64> = row.iter().filter_map(|p| p.finite()).collect();
    if finite.is_empty() {
        return false;
    }
    let min = finite.iter().copied().fold(f64::INFINITY, f64::min);
    finite.iter().all(|&x| x >= -tol) && min.abs() <= tol
}

/// Checks every price row the mechanism reports for `profile`. Rows that
/// are undetermined because of a tied zero-weight sub-economy are counted
/// as degenerate.
pub fn check_price_rows<M: Mechanism + ?Sized>(mech: &M, profile: &TypeProfile, tol: f64) -> Result<CheckReport, MechanismError> {
    let mut report = CheckReport::new(Property::StandardPrices, mech.name(), tol);
    for i in 0..profile.num_agents() {
        match mech.prices(profile, i) {
            None => {}
            Some(Err(MechanismError::TiedSubEconomy { .. })) => report.degenerate += 1,
            Some(Err(e)) => return Err(e),
            Some(Ok(row)) => {
                report.trials += 1;
                if !check_standard_prices(&row, tol) {
                    report.violation(Counterexample::StandardPrices {
                        profile: Some(profile.clone()),
                        agent: i,
                        row,
                    });
                }
            }
        }
    }
    if report.trials == 0 && report.verdict == Verdict::Pass {
        report.verdict = Verdict::Inconclusive;
    }
    Ok(report)
}

/// How far alternative `x` is from being agent-maximising, for the agent
/// where the gap is largest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shortfall {
    pub agent: usize,
    pub preferred: usize,
    /// `max_a u_{i,a}(t_{i,a}) - u_{i,x}(t_{i,x})`, `+inf` if `x` is
    /// priced at infinity.
    pub amount: f64,
}

/// Worst shortfall of `x` across agents; `None` without agents.
pub fn agent_maximizing_shortfall(profile: &TypeProfile, schedule: &PriceSchedule, x: usize) -> Option<Shortfall> {
    let mut worst: Option<Shortfall> = None;
    for (i, row) in schedule.rows.iter().enumerate() {
        let t = profile.agent(i);
        let mut preferred = x;
        let mut best = f64::NEG_INFINITY;
        for (a, price) in row.iter().enumerate() {
            if let Price::Finite(z) = price {
                let u = t.utility(a, *z);
                if u > best {
                    best = u;
                    preferred = a;
                }
            }
        }
        let amount = match row[x] {
            Price::Finite(z) => (best - t.utility(x, z)).max(0.0),
            Price::Infinite => f64::INFINITY,
        };
        if worst.is_none_or(|w| amount > w.amount) {
            worst = Some(Shortfall {
                agent: i,
                preferred,
                amount,
            });
        }
    }
    worst
}

/// `chosen` maximises every agent's utility at its own prices
/// simultaneously. Infinite prices never maximise.
pub fn check_agent_maximizing(profile: &TypeProfile, schedule: &PriceSchedule, chosen: usize, tol: f64) -> CheckReport {
    let mut report = CheckReport::new(Property::AgentMaximizing, "price schedule", tol);
    report.trials = 1;
    if let Some(s) = agent_maximizing_shortfall(profile, schedule, chosen) {
        if s.amount > tol {
            report.violation(Counterexample::AgentMaximizing {
                profile: profile.clone(),
                schedule: schedule.clone(),
                chosen,
                agent: s.agent,
                preferred: s.preferred,
                shortfall: s.amount,
            });
        }
    }
    report
}

/// Weak monotonicity for agent `i` switching from `u_i` to `u_i_alt`:
/// with `a`, `b` the respective choices, `p'_b - p_b >= p'_a - p_a - tol`.
pub fn check_wmon<M: Mechanism + ?Sized>(
    mech: &M,
    profile: &TypeProfile,
    i: usize,
    u_i: &AgentType,
    u_i_alt: &AgentType,
    tol: f64,
) -> Result<CheckReport, MechanismError> {
    let mut report = CheckReport::new(Property::Wmon, mech.name(), tol);
    report.trials = 1;
    let with_orig = profile.with_agent(i, u_i.clone())?;
    let with_alt = profile.with_agent(i, u_i_alt.clone())?;
    let a = mech.run(&with_orig)?.chosen;
    let b = mech.run(&with_alt)?.chosen;
    let (p, q) = (u_i.wtp(), u_i_alt.wtp());
    let lhs = q[b] - p[b];
    let rhs = q[a] - p[a];
    if lhs < rhs - tol {
        report.violation(Counterexample::Wmon {
            profile: with_orig,
            agent: i,
            original: u_i.clone(),
            alternate: u_i_alt.clone(),
            chosen: a,
            alternate_chosen: b,
            lhs,
            rhs,
        });
    }
    Ok(report)
}

/// Positive association of differences: if `x(u) = a` and every agent's
/// wtp for `a` rises by more (by a margin `> tol`) than for any other
/// alternative, then `x(u') = a`. Without the premise the trial is vacuous.
pub fn check_pad<M: Mechanism + ?Sized>(
    mech: &M,
    u: &TypeProfile,
    u_alt: &TypeProfile,
    tol: f64,
) -> Result<CheckReport, MechanismError> {
    let mut report = CheckReport::new(Property::Pad, mech.name(), tol);
    report.trials = 1;
    let a = mech.run(u)?.chosen;
    let premise = (0..u.num_agents()).all(|i| {
        let (p, q) = (u.agent(i).wtp(), u_alt.agent(i).wtp());
        let gain_a = q[a] - p[a];
        (0..u.num_alternatives()).all(|b| b == a || gain_a > q[b] - p[b] + tol)
    });
    if !premise {
        report.vacuous = 1;
        return Ok(report);
    }
    let b = mech.run(u_alt)?.chosen;
    if b != a {
        report.violation(Counterexample::Pad {
            profile: u.clone(),
            alternate: u_alt.clone(),
            chosen: a,
            alternate_chosen: b,
        });
    }
    Ok(report)
}

/// Alternative `b` together with payments that leave every agent at least
/// as well off as in `outcome` while collecting the same total.
#[derive(Debug, Clone, PartialEq)]
pub struct Domination {
    pub alternative: usize,
    pub payments: Vec<f64>,
    /// `sum_i u_{i,b}^{-1}(w_i) - sum_i t_i`.
    pub slack: f64,
}

/// The alternative with the largest total slack over `outcome`, if that
/// slack exceeds `tol`.
pub fn pareto_domination(profile: &TypeProfile, outcome: &MechanismOutcome, tol: f64) -> Option<Domination> {
    let total: f64 = outcome.payments.iter().sum();
    let levels: Vec<f64> = profile
        .agents()
        .iter()
        .enumerate()
        .map(|(i, t)| realized(t, outcome, i))
        .collect();
    let mut best: Option<Domination> = None;
    for b in 0..profile.num_alternatives() {
        if b == outcome.chosen {
            continue;
        }
        let caps: Vec<f64> = profile
            .agents()
            .iter()
            .zip(&levels)
            .map(|(t, &w)| t.curve(b).invert(w))
            .collect();
        let slack = caps.iter().sum::<f64>() - total;
        if slack > tol && best.as_ref().is_none_or(|d| slack > d.slack) {
            best = Some(Domination {
                alternative: b,
                payments: fill_payments(&caps, total),
                slack,
            });
        }
    }
    best
}

/// Payments `y_i <= caps_i` summing to `total`: agents with a non-positive
/// cap pay exactly it, the rest are charged in index order up to their cap.
fn fill_payments(caps: &[f64], total: f64) -> Vec<f64> {
    let mut remaining = total - caps.iter().filter(|&&c| c <= 0.0).sum::<f64>();
    caps.iter()
        .map(|&c| {
            if c <= 0.0 {
                c
            } else {
                let y = c.min(remaining.max(0.0));
                remaining -= y;
                y
            }
        })
        .collect()
}

/// Pareto efficiency of `outcome`: no other alternative admits payments
/// that keep everyone's utility and raise strictly more than the current
/// total, beyond `tol`.
pub fn check_pareto(profile: &TypeProfile, outcome: &MechanismOutcome, tol: f64) -> CheckReport {
    let mut report = CheckReport::new(Property::Pareto, "outcome", tol);
    report.trials = 1;
    if let Some(d) = pareto_domination(profile, outcome, tol) {
        report.violation(Counterexample::Pareto {
            profile: profile.clone(),
            outcome: outcome.clone(),
            dominating: d.alternative,
            payments: d.payments,
            slack: d.slack,
        });
    }
    report
}

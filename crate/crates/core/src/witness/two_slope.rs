use super::{Construction, RefutationReport, RefutationStatus, WitnessError};
use crate::harness::deviations::spike;
use crate::harness::{check_dsic, Counterexample, DeviationSet, Property};
use crate::mechanism::{gwvcg_prices, AffineMaximizerSpec, Gwvcg, Price};
use crate::utility::{default_names, AgentType, SlopeChoice, TwoSlopeAgentType, TypeProfile};

/// Gap between agent 1's price level under the two agent-2 types.
const LEVEL_SHIFT: f64 = 10.0;

fn finite_row(row: &[Price]) -> Vec<f64> {
    row.iter().map(|p| p.finite().expect("positive weight gives finite prices")).collect()
}

/// Refutes generalized weighted VCG with two positive weights on the
/// two-slope domain.
///
/// Agent 2 either values only `c` (pushing agent 1's prices for `a` and `b`
/// up by ten) or nothing. Both shift `t_{1,a}` and `t_{1,b}` by the same
/// amount, so the mechanism's choice between `a` and `b` does not move. An
/// agent 1 with slope `alpha` on `a` and `beta` on `b` is indifferent at
/// the midpoint level, so its true ranking flips between the two, and a
/// spike report on the preferred alternative gains `|alpha - beta| * 5`.
/// The same is tried for a copy of agent 1 with `v_b` lowered by `eps`.
pub fn two_slope_refutation(
    alpha: f64,
    beta: f64,
    k: [f64; 2],
    constants: &[f64],
    tol: f64,
) -> Result<RefutationReport, WitnessError> {
    let good = |x: f64| x.is_finite() && x > 0.0;
    if !(good(alpha) && good(beta)) || alpha == beta {
        return Err(WitnessError::BadSlopes { alpha, beta });
    }
    if !(good(k[0]) && good(k[1])) {
        return Err(WitnessError::BadWeights(k[0], k[1]));
    }
    if constants.len() != 3 {
        return Err(WitnessError::Dimension {
            what: "constants",
            expected: 3,
            got: constants.len(),
        });
    }
    if let Some(i) = constants.iter().position(|c| !c.is_finite()) {
        return Err(WitnessError::Infeasible(format!("constant {i} is not finite")));
    }
    let (k1, k2) = (k[0], k[1]);
    let spec = AffineMaximizerSpec::new(k.to_vec(), constants.to_vec());
    let names = default_names(3);
    let top = constants.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let level = (LEVEL_SHIFT * k1 + top - constants[2]) / k2;
    let u2 = AgentType::linear(alpha, vec![0.0, 0.0, alpha * level])?;
    let u2_alt = AgentType::linear(alpha, vec![0.0; 3])?;

    let placeholder = AgentType::quasi_linear(vec![0.0; 3])?;
    let prices = |other: &AgentType| -> Result<Vec<f64>, WitnessError> {
        let p = TypeProfile::new(names.clone(), vec![placeholder.clone(), other.clone()])?;
        Ok(finite_row(&gwvcg_prices(&spec, &p, 0)?))
    };
    let hi = prices(&u2)?;
    let lo = prices(&u2_alt)?;
    let mid: Vec<f64> = hi.iter().zip(&lo).map(|(h, l)| (h + l) / 2.0).collect();
    let eps = (alpha - beta).abs() * (hi[0] - lo[0]) / 4.0;

    // indifferent between a and b at the midpoint price level
    let v_b = beta * hi[1] + 1.0;
    let v_a = v_b + alpha * mid[0] - beta * mid[1];
    let floor = [hi.as_slice(), lo.as_slice()]
        .iter()
        .flat_map(|t| [v_a - alpha * t[0], v_b - eps - beta * t[1]])
        .fold(f64::INFINITY, f64::min);
    let v_c = floor - 1.0;
    let mixed = |v_b: f64| {
        AgentType::two_slope(TwoSlopeAgentType {
            alpha,
            beta,
            values: vec![v_a, v_b, v_c],
            slopes: vec![SlopeChoice::Alpha, SlopeChoice::Beta, SlopeChoice::Alpha],
        })
    };
    let u1 = mixed(v_b)?;
    let u1_alt = mixed(v_b - eps)?;

    let mech = Gwvcg(spec.clone());
    let mut profiles = Vec::new();
    let mut reports = Vec::new();
    for first in [&u1, &u1_alt] {
        for second in [&u2, &u2_alt] {
            let profile = TypeProfile::new(names.clone(), vec![first.clone(), second.clone()])?;
            let others = spec.scores(&profile.wtp_matrix(), Some(0));
            let spread = others.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                - others.iter().copied().fold(f64::INFINITY, f64::min);
            let height = spread / k1 + 1.0;
            let devs: Vec<AgentType> = std::iter::once(first.clone())
                .chain((0..3).map(|a| spike(3, a, height)))
                .collect();
            let set = DeviationSet::new(&profile, vec![devs]);
            reports.push(check_dsic(&mech, &profile, &set, tol)?);
            profiles.push(profile);
        }
    }
    let slack = reports
        .iter()
        .filter_map(|r| match r.counterexample.as_deref() {
            Some(Counterexample::Dsic {
                truthful_utility,
                deviated_utility,
                ..
            }) => Some(deviated_utility - truthful_utility),
            _ => None,
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let status = if reports.iter().any(|r| r.failed()) {
        RefutationStatus::Refuted
    } else {
        RefutationStatus::Survived
    };
    Ok(RefutationReport {
        status,
        violated: Property::Dsic,
        construction: Construction::TwoSlope,
        candidate: None,
        spec,
        profiles,
        slack: if slack.is_finite() { slack } else { 0.0 },
        reports,
    })
}

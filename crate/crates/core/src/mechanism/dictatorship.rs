use super::{argmax_tiebreak, validate_tiebreak, Mechanism, MechanismError, MechanismOutcome};
use crate::utility::TypeProfile;

/// Fixed prices `z_a = (max C - C_a) / k` that turn an affine maximiser
/// with a single positive weight `k` into a fixed-price dictatorship.
/// The minimum entry is exactly zero.
pub fn fixed_prices_from_constants(constants: &[f64], k: f64) -> Vec<f64> {
    let top = constants.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    constants.iter().map(|c| (top - c) / k).collect()
}

/// The dictator gets its favourite alternative at prices `z` and pays the
/// price of that alternative; everyone else pays nothing.
pub fn dictatorship_run(
    dictator: usize,
    z: &[f64],
    tiebreak: &[usize],
    profile: &TypeProfile,
) -> Result<MechanismOutcome, MechanismError> {
    let n = profile.num_agents();
    let m = profile.num_alternatives();
    if dictator >= n {
        return Err(MechanismError::BadDictator { dictator, agents: n });
    }
    if z.len() != m {
        return Err(MechanismError::Dimension {
            what: "fixed prices",
            expected: m,
            got: z.len(),
        });
    }
    if let Some(index) = z.iter().position(|x| !x.is_finite()) {
        return Err(MechanismError::NonFinite {
            what: "fixed prices",
            index,
        });
    }
    validate_tiebreak(tiebreak, m)?;
    let t = profile.agent(dictator);
    let utilities: Vec<f64> = (0..m).map(|a| t.utility(a, z[a])).collect();
    let chosen = argmax_tiebreak(&utilities, tiebreak);
    let mut payments = vec![0.0; n];
    payments[dictator] = z[chosen];
    Ok(MechanismOutcome { chosen, payments })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPriceDictatorship {
    pub dictator: usize,
    pub prices: Vec<f64>,
    pub tiebreak: Vec<usize>,
}

impl FixedPriceDictatorship {
    pub fn new(dictator: usize, prices: Vec<f64>) -> Self {
        let tiebreak = (0..prices.len()).collect();
        Self {
            dictator,
            prices,
            tiebreak,
        }
    }

    /// The dictatorship equivalent to an affine maximiser whose only
    /// positive weight `k` belongs to `dictator`.
    pub fn from_constants(dictator: usize, k: f64, constants: &[f64]) -> Self {
        Self::new(dictator, fixed_prices_from_constants(constants, k))
    }
}

impl Mechanism for FixedPriceDictatorship {
    fn name(&self) -> String {
        format!("dictatorship(agent {})", self.dictator)
    }

    fn run(&self, profile: &TypeProfile) -> Result<MechanismOutcome, MechanismError> {
        dictatorship_run(self.dictator, &self.prices, &self.tiebreak, profile)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::utility::AgentType;

    #[test]
    fn dictator_picks_favourite_under_prices() {
        let profile = TypeProfile::unnamed(vec![
            AgentType::quasi_linear(vec![0.0, 5.0, 0.0]).unwrap(),
            AgentType::quasi_linear(vec![2.0, 1.5, 0.0]).unwrap(),
        ])
        .unwrap();
        let out = dictatorship_run(1, &[1.0, 0.0, 0.0], &[0, 1, 2], &profile).unwrap();
        assert_eq!(out, MechanismOutcome { chosen: 1, payments: vec![0.0, 0.0] });
    }

    #[test]
    fn zero_prices_give_full_dictatorship() {
        let profile = TypeProfile::from_wtp(&[vec![0.0, 3.0, 1.0], vec![9.0, 0.0, 0.0]]).unwrap();
        let out = FixedPriceDictatorship::new(0, vec![0.0; 3]).run(&profile).unwrap();
        assert_eq!(out, MechanismOutcome { chosen: 1, payments: vec![0.0, 0.0] });
    }

    #[test]
    fn prices_from_constants() {
        assert_eq!(fixed_prices_from_constants(&[0.0, 0.0, 1.0], 1.0), vec![1.0, 1.0, 0.0]);
        assert_eq!(fixed_prices_from_constants(&[3.0, 1.0], 4.0), vec![0.0, 0.5]);
    }

    #[test]
    fn dictator_pays_price_of_chosen() {
        let profile = TypeProfile::from_wtp(&[vec![0.0, 3.0, 1.0]]).unwrap();
        let out = FixedPriceDictatorship::new(0, vec![1.0, 1.0, 0.0]).run(&profile).unwrap();
        assert_eq!(out, MechanismOutcome { chosen: 1, payments: vec![1.0] });
    }

    #[test]
    fn rejects_out_of_range_dictator() {
        let profile = TypeProfile::from_wtp(&[vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            dictatorship_run(3, &[0.0, 0.0], &[0, 1], &profile),
            Err(MechanismError::BadDictator { .. })
        ));
    }
}

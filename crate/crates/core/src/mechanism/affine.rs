use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{argmax_set, argmax_tiebreak, validate_tiebreak, Mechanism, MechanismError, MechanismOutcome, Price, PriceRow};
use crate::hexfloat;
use crate::utility::TypeProfile;

/// Weights `k_i >= 0`, constants `C_a` and a report-independent tiebreak
/// order (earlier entries win ties).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMaximizerSpec {
    #[serde(with = "hexfloat::vec")]
    pub weights: Vec<f64>,
    #[serde(with = "hexfloat::vec")]
    pub constants: Vec<f64>,
    pub tiebreak: Vec<usize>,
}

impl AffineMaximizerSpec {
    /// Spec with the identity tiebreak order.
    pub fn new(weights: Vec<f64>, constants: Vec<f64>) -> Self {
        let tiebreak = (0..constants.len()).collect();
        Self {
            weights,
            constants,
            tiebreak,
        }
    }

    /// Unit weights and zero constants: plain welfare maximisation.
    pub fn utilitarian(n: usize, m: usize) -> Self {
        Self::new(vec![1.0; n], vec![0.0; m])
    }

    /// Random spec: weights in `[0.05, 3)`, each zero with probability
    /// 1/4 (at least one stays positive), constants in `[-2, 2)`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Self {
        let mut weights: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.05..3.0) })
            .collect();
        if weights.iter().all(|&k| k == 0.0) {
            let i = rng.gen_range(0..n);
            weights[i] = rng.gen_range(0.05..3.0);
        }
        let constants = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
        Self::new(weights, constants)
    }

    pub fn validate(&self) -> Result<(), MechanismError> {
        for (agent, &weight) in self.weights.iter().enumerate() {
            if !(weight.is_finite() && weight >= 0.0) {
                return Err(MechanismError::BadWeight { agent, weight });
            }
        }
        if !self.weights.iter().any(|&k| k > 0.0) {
            return Err(MechanismError::AllWeightsZero);
        }
        for (index, c) in self.constants.iter().enumerate() {
            if !c.is_finite() {
                return Err(MechanismError::NonFinite {
                    what: "constants",
                    index,
                });
            }
        }
        validate_tiebreak(&self.tiebreak, self.constants.len())
    }

    pub fn validate_for(&self, n: usize, m: usize) -> Result<(), MechanismError> {
        if self.weights.len() != n {
            return Err(MechanismError::Dimension {
                what: "weights",
                expected: n,
                got: self.weights.len(),
            });
        }
        if self.constants.len() != m {
            return Err(MechanismError::Dimension {
                what: "constants",
                expected: m,
                got: self.constants.len(),
            });
        }
        self.validate()
    }

    /// `sum_{j != skip} k_j p_{j,a} + C_a` for every `a`. Terms are added in
    /// agent order, so the scores without agent `i` never depend on `i`.
    pub fn scores(&self, wtp: &[Vec<f64>], skip: Option<usize>) -> Vec<f64> {
        (0..self.constants.len())
            .map(|a| {
                let mut s = 0.0;
                for (j, row) in wtp.iter().enumerate() {
                    if Some(j) != skip {
                        s += self.weights[j] * row[a];
                    }
                }
                s + self.constants[a]
            })
            .collect()
    }

    pub fn choose(&self, scores: &[f64]) -> usize {
        argmax_tiebreak(scores, &self.tiebreak)
    }
}

/// Outcome of the affine maximiser over an explicit wtp matrix, with
/// `offset` added to every payment.
fn affine_outcome(spec: &AffineMaximizerSpec, wtp: &[Vec<f64>], offset: f64) -> MechanismOutcome {
    let chosen = spec.choose(&spec.scores(wtp, None));
    let payments = (0..wtp.len())
        .map(|i| {
            let k = spec.weights[i];
            if k == 0.0 {
                return offset;
            }
            let without = spec.scores(wtp, Some(i));
            let best = spec.choose(&without);
            (without[best] - without[chosen]) / k + offset
        })
        .collect();
    MechanismOutcome { chosen, payments }
}

fn affine_prices(spec: &AffineMaximizerSpec, wtp: &[Vec<f64>], i: usize, offset: f64) -> Result<PriceRow, MechanismError> {
    let without = spec.scores(wtp, Some(i));
    let k = spec.weights[i];
    if k > 0.0 {
        let best = without[spec.choose(&without)];
        return Ok(without.iter().map(|s| Price::Finite((best - s) / k + offset)).collect());
    }
    let tied = argmax_set(&without);
    if tied.len() > 1 {
        return Err(MechanismError::TiedSubEconomy { agent: i, tied });
    }
    Ok((0..without.len())
        .map(|a| if a == tied[0] { Price::Finite(offset) } else { Price::Infinite })
        .collect())
}

fn check_agent(profile: &TypeProfile, i: usize) -> Result<(), MechanismError> {
    if i >= profile.num_agents() {
        return Err(MechanismError::Dimension {
            what: "agent index",
            expected: profile.num_agents(),
            got: i,
        });
    }
    Ok(())
}

/// Generalized weighted VCG: choose `argmax_a sum_i k_i p_{i,a} + C_a`;
/// agent `i` with `k_i > 0` pays
/// `(S_{-i}(a*_{-i}) - S_{-i}(a*)) / k_i`, agents with `k_i = 0` pay 0.
pub fn gwvcg_run(spec: &AffineMaximizerSpec, profile: &TypeProfile) -> Result<MechanismOutcome, MechanismError> {
    spec.validate_for(profile.num_agents(), profile.num_alternatives())?;
    Ok(affine_outcome(spec, &profile.wtp_matrix(), 0.0))
}

/// Agent `i`'s agent-independent prices under generalized weighted VCG.
///
/// For `k_i > 0` the row is non-negative with a zero at the economy-without-`i`
/// maximiser. For `k_i = 0` the agent can only ever receive that maximiser,
/// at price 0, and every other alternative is priced `+inf`; if that
/// maximiser is not unique the row is not determined and
/// [`MechanismError::TiedSubEconomy`] is returned.
pub fn gwvcg_prices(spec: &AffineMaximizerSpec, profile: &TypeProfile, i: usize) -> Result<PriceRow, MechanismError> {
    spec.validate_for(profile.num_agents(), profile.num_alternatives())?;
    check_agent(profile, i)?;
    affine_prices(spec, &profile.wtp_matrix(), i, 0.0)
}

fn wtp_wrt_matrix(profile: &TypeProfile, z_star: f64) -> Vec<Vec<f64>> {
    profile.agents().iter().map(|t| t.wtp_wrt(z_star)).collect()
}

/// Generalized weighted VCG run on willingness to pay measured from
/// payment level `z_star`, with `z_star` added to every payment.
pub fn gwvcg_fixed_payment_run(
    spec: &AffineMaximizerSpec,
    z_star: f64,
    profile: &TypeProfile,
) -> Result<MechanismOutcome, MechanismError> {
    spec.validate_for(profile.num_agents(), profile.num_alternatives())?;
    Ok(affine_outcome(spec, &wtp_wrt_matrix(profile, z_star), z_star))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gwvcg(pub AffineMaximizerSpec);

impl Mechanism for Gwvcg {
    fn name(&self) -> String {
        "gwvcg".into()
    }

    fn run(&self, profile: &TypeProfile) -> Result<MechanismOutcome, MechanismError> {
        gwvcg_run(&self.0, profile)
    }

    fn prices(&self, profile: &TypeProfile, agent: usize) -> Option<Result<PriceRow, MechanismError>> {
        Some(gwvcg_prices(&self.0, profile, agent))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPaymentGwvcg {
    pub spec: AffineMaximizerSpec,
    pub z_star: f64,
}

impl Mechanism for FixedPaymentGwvcg {
    fn name(&self) -> String {
        format!("gwvcg_fixed(z*={})", self.z_star)
    }

    fn run(&self, profile: &TypeProfile) -> Result<MechanismOutcome, MechanismError> {
        gwvcg_fixed_payment_run(&self.spec, self.z_star, profile)
    }

    fn prices(&self, profile: &TypeProfile, agent: usize) -> Option<Result<PriceRow, MechanismError>> {
        let run = || {
            self.spec
                .validate_for(profile.num_agents(), profile.num_alternatives())?;
            check_agent(profile, agent)?;
            affine_prices(&self.spec, &wtp_wrt_matrix(profile, self.z_star), agent, self.z_star)
        };
        Some(run())
    }
}

//! Executable impossibility constructions. Each refutation carries the
//! failing checker reports, so it can be replayed through the harness.

pub mod nonparallel;
pub mod refute;
pub mod sweep;
pub mod two_slope;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::harness::{self, CheckReport, Counterexample, Property};
use crate::hexfloat;
use crate::mechanism::{AffineMaximizerSpec, FnMechanism, Gwvcg, MechanismError, PriceRow};
use crate::utility::{TypeProfile, UtilityError};

pub use nonparallel::{build_nonparallel_type, NonParallelParams, NonParallelWitness};
pub use refute::{candidate_from_difference, refute_price_vector, Construction};
pub use sweep::{run_impossibility_sweep, two_positive_weight_specs, ControlSummary, Grid, SweepConfig, SweepCounts, SweepOutcome, SweepSummary};
pub use two_slope::two_slope_refutation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WitnessError {
    #[error("infeasible witness parameters: {0}")]
    Infeasible(String),
    #[error("weights must be finite and positive, got ({0}, {1})")]
    BadWeights(f64, f64),
    #[error("{what}: expected {expected} entries, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("candidate price on alternative {0} must be finite")]
    InfiniteCandidate(usize),
    #[error("slopes must be positive and distinct, got alpha={alpha}, beta={beta}")]
    BadSlopes { alpha: f64, beta: f64 },
    #[error("grid step must be positive and finite, got {0}")]
    BadGrid(f64),
    #[error(transparent)]
    Utility(#[from] UtilityError),
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefutationStatus {
    Refuted,
    /// The construction does not apply (degenerate witness).
    Inconclusive,
    /// The construction ran and the candidate was not refuted.
    Survived,
}

/// A candidate (price vector or mechanism spec), the profiles built against
/// it, and the checker reports showing the violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefutationReport {
    pub status: RefutationStatus,
    pub violated: Property,
    pub construction: Construction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate: Option<PriceRow>,
    pub spec: AffineMaximizerSpec,
    pub profiles: Vec<TypeProfile>,
    /// Smallest shortfall over alternatives for price-vector refutations;
    /// largest deviation gain for DSIC refutations.
    #[serde(with = "hexfloat")]
    pub slack: f64,
    pub reports: Vec<CheckReport>,
}

impl RefutationReport {
    pub fn refuted(&self) -> bool {
        self.status == RefutationStatus::Refuted
    }

    /// Replays every failing report through the harness. Returns the slack
    /// the replay observes, or `None` if some report no longer fails.
    pub fn replay(&self) -> Result<Option<f64>, MechanismError> {
        let failing: Vec<&CheckReport> = self.reports.iter().filter(|r| r.failed()).collect();
        // a price-vector refutation needs every alternative to fail
        let partial = self.violated != Property::Dsic && failing.len() != self.reports.len();
        if failing.is_empty() || partial {
            return Ok(None);
        }
        let mut slacks = Vec::new();
        for r in failing {
            let again = match self.violated {
                Property::Dsic => harness::replay(r, &Gwvcg(self.spec.clone())),
                _ => harness::replay(r, &FnMechanism::constant(0)),
            };
            let again = match again {
                Some(res) => res?,
                None => return Ok(None),
            };
            if !again.failed() {
                return Ok(None);
            }
            match again.counterexample.as_deref() {
                Some(Counterexample::AgentMaximizing { shortfall, .. }) => slacks.push(*shortfall),
                Some(Counterexample::Dsic {
                    truthful_utility,
                    deviated_utility,
                    ..
                }) => slacks.push(deviated_utility - truthful_utility),
                _ => return Ok(None),
            }
        }
        let slack = match self.violated {
            Property::Dsic => slacks.into_iter().fold(f64::NEG_INFINITY, f64::max),
            _ => slacks.into_iter().fold(f64::INFINITY, f64::min),
        };
        Ok(Some(slack))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

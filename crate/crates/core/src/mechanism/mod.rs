//! Mechanisms: a choice of alternative plus a payment per agent.

pub mod affine;
pub mod dictatorship;
pub mod spec;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::hexfloat;
use crate::utility::{TypeProfile, UtilityError};

pub use affine::{gwvcg_fixed_payment_run, gwvcg_prices, gwvcg_run, AffineMaximizerSpec, FixedPaymentGwvcg, Gwvcg};
pub use dictatorship::{dictatorship_run, fixed_prices_from_constants, FixedPriceDictatorship};
pub use spec::MechanismSpec;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MechanismError {
    #[error("{what}: expected {expected} entries, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("weight of agent {agent} is {weight}; weights must be finite and non-negative")]
    BadWeight { agent: usize, weight: f64 },
    #[error("at least one weight must be positive")]
    AllWeightsZero,
    #[error("{what} entry {index} is not finite")]
    NonFinite { what: &'static str, index: usize },
    #[error("tiebreak must be a permutation of 0..{0}")]
    BadTiebreak(usize),
    #[error("dictator {dictator} out of range for {agents} agents")]
    BadDictator { dictator: usize, agents: usize },
    #[error("agent {agent} has zero weight and the economy without it is tied between {tied:?}")]
    TiedSubEconomy { agent: usize, tied: Vec<usize> },
    #[error(transparent)]
    Utility(#[from] UtilityError),
}

/// Chosen alternative and one payment per agent (positive means the agent
/// pays).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanismOutcome {
    pub chosen: usize,
    #[serde(with = "hexfloat::vec")]
    pub payments: Vec<f64>,
}

/// An agent-independent price. `Infinite` marks an alternative the agent
/// can never obtain, whatever it reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Price {
    Finite(f64),
    Infinite,
}

impl Price {
    pub fn finite(self) -> Option<f64> {
        match self {
            Price::Finite(x) => Some(x),
            Price::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Price::Infinite)
    }

    /// `+inf` for the sentinel.
    pub fn as_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Price {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Price::Finite(x) => write!(f, "{x}"),
            Price::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Price {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        hexfloat::serialize(&self.as_f64(), s)
    }
}

impl<'de> Deserialize<'de> for Price {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let x = hexfloat::deserialize(d)?;
        if x == f64::INFINITY {
            Ok(Price::Infinite)
        } else if x.is_finite() {
            Ok(Price::Finite(x))
        } else {
            Err(serde::de::Error::custom("price must be finite or +inf"))
        }
    }
}

/// One agent's prices, indexed by alternative.
pub type PriceRow = Vec<Price>;

/// Prices for every agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSchedule {
    pub rows: Vec<PriceRow>,
}

impl PriceSchedule {
    pub fn finite(rows: Vec<Vec<f64>>) -> Self {
        Self {
            rows: rows.into_iter().map(|r| r.into_iter().map(Price::Finite).collect()).collect(),
        }
    }
}

/// Black-box view of a mechanism used by the checkers.
pub trait Mechanism {
    fn name(&self) -> String;

    fn run(&self, profile: &TypeProfile) -> Result<MechanismOutcome, MechanismError>;

    /// Agent-independent prices faced by `agent`, when the mechanism knows
    /// them in closed form.
    fn prices(&self, _profile: &TypeProfile, _agent: usize) -> Option<Result<PriceRow, MechanismError>> {
        None
    }

    /// `Some(a)` if the mechanism always selects `a` by construction.
    fn declared_constant(&self) -> Option<usize> {
        None
    }
}

type RunFn = dyn Fn(&TypeProfile) -> Result<MechanismOutcome, MechanismError> + Send + Sync;

/// A mechanism given by a closure, for ad-hoc and deliberately broken
/// mechanisms.
pub struct FnMechanism {
    name: String,
    run: Box<RunFn>,
    constant: Option<usize>,
}

impl FnMechanism {
    pub fn new(
        name: impl Into<String>,
        run: impl Fn(&TypeProfile) -> Result<MechanismOutcome, MechanismError> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            run: Box::new(run),
            constant: None,
        }
    }

    /// Always picks `a` and charges nothing.
    pub fn constant(a: usize) -> Self {
        let mut m = Self::new(format!("constant({a})"), move |p: &TypeProfile| {
            Ok(MechanismOutcome {
                chosen: a,
                payments: vec![0.0; p.num_agents()],
            })
        });
        m.constant = Some(a);
        m
    }
}

impl Mechanism for FnMechanism {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn run(&self, profile: &TypeProfile) -> Result<MechanismOutcome, MechanismError> {
        (self.run)(profile)
    }

    fn declared_constant(&self) -> Option<usize> {
        self.constant
    }
}

impl<M: Mechanism + ?Sized> Mechanism for &M {
    fn name(&self) -> String {
        (**self).name()
    }
    fn run(&self, profile: &TypeProfile) -> Result<MechanismOutcome, MechanismError> {
        (**self).run(profile)
    }
    fn prices(&self, profile: &TypeProfile, agent: usize) -> Option<Result<PriceRow, MechanismError>> {
        (**self).prices(profile, agent)
    }
    fn declared_constant(&self) -> Option<usize> {
        (**self).declared_constant()
    }
}

impl<M: Mechanism + ?Sized> Mechanism for Box<M> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn run(&self, profile: &TypeProfile) -> Result<MechanismOutcome, MechanismError> {
        (**self).run(profile)
    }
    fn prices(&self, profile: &TypeProfile, agent: usize) -> Option<Result<PriceRow, MechanismError>> {
        (**self).prices(profile, agent)
    }
    fn declared_constant(&self) -> Option<usize> {
        (**self).declared_constant()
    }
}

/// Checks that `order` is a permutation of `0..m`.
pub(crate) fn validate_tiebreak(order: &[usize], m: usize) -> Result<(), MechanismError> {
    let mut seen = vec![false; m];
    if order.len() != m {
        return Err(MechanismError::BadTiebreak(m));
    }
    for &a in order {
        if a >= m || seen[a] {
            return Err(MechanismError::BadTiebreak(m));
        }
        seen[a] = true;
    }
    Ok(())
}

/// All alternatives attaining the maximum score, in index order.
pub fn argmax_set(scores: &[f64]) -> Vec<usize> {
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (0..scores.len()).filter(|&a| scores[a] == best).collect()
}

/// The maximiser of `scores` that comes first in `tiebreak`.
pub fn argmax_tiebreak(scores: &[f64], tiebreak: &[usize]) -> usize {
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    tiebreak
        .iter()
        .copied()
        .find(|&a| scores[a] == best)
        .expect("non-empty score vector")
}

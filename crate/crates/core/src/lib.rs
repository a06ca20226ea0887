//! Mechanisms with payments for agents whose utility is not quasi-linear in
//! money, plus brute-force checkers for their incentive properties and
//! executable constructions of the classic impossibility witnesses.
//!
//! Alternatives and agents are addressed by `usize` index throughout;
//! [`TypeProfile`] carries the alternative names.

pub mod harness;
pub mod hexfloat;
pub mod mechanism;
pub mod scenario;
pub mod utility;
pub mod witness;

pub use mechanism::{AffineMaximizerSpec, Mechanism, MechanismOutcome, MechanismSpec, Price, PriceRow, PriceSchedule};
pub use utility::{AgentType, ParallelAgentType, TypeProfile, UtilityCurve};

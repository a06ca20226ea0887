use serde::{Deserialize, Serialize};

use crate::hexfloat;
use crate::mechanism::{MechanismOutcome, PriceRow, PriceSchedule};
use crate::utility::{AgentType, TypeProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Dsic,
    Ir,
    NoSubsidy,
    Onto,
    Deterministic,
    StandardPrices,
    AgentMaximizing,
    Wmon,
    Pad,
    Pareto,
}

impl Property {
    pub const ALL: [Property; 10] = [
        Property::Dsic,
        Property::Ir,
        Property::NoSubsidy,
        Property::Onto,
        Property::Deterministic,
        Property::StandardPrices,
        Property::AgentMaximizing,
        Property::Wmon,
        Property::Pad,
        Property::Pareto,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Property::Dsic => "dsic",
            Property::Ir => "ir",
            Property::NoSubsidy => "no_subsidy",
            Property::Onto => "onto",
            Property::Deterministic => "deterministic",
            Property::StandardPrices => "standard_prices",
            Property::AgentMaximizing => "agent_maximizing",
            Property::Wmon => "wmon",
            Property::Pad => "pad",
            Property::Pareto => "pareto",
        }
    }

    pub fn from_id(id: &str) -> Option<Property> {
        Property::ALL.into_iter().find(|p| p.id() == id)
    }
}

impl std::fmt::Display for Property {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Ordered so that merging keeps the worst verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Inconclusive,
    Fail,
}

impl Verdict {
    /// Process exit code: 0 pass, 1 fail, 2 inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

/// Everything needed to reproduce a violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "property", rename_all = "snake_case")]
pub enum Counterexample {
    Dsic {
        profile: TypeProfile,
        agent: usize,
        deviation: AgentType,
        truthful: MechanismOutcome,
        deviated: MechanismOutcome,
        #[serde(with = "hexfloat")]
        truthful_utility: f64,
        #[serde(with = "hexfloat")]
        deviated_utility: f64,
    },
    Ir {
        profile: TypeProfile,
        agent: usize,
        outcome: MechanismOutcome,
        #[serde(with = "hexfloat")]
        utility: f64,
        #[serde(with = "hexfloat")]
        floor: f64,
    },
    NoSubsidy {
        profile: TypeProfile,
        agent: usize,
        outcome: MechanismOutcome,
    },
    Onto {
        unhit: Vec<usize>,
    },
    Deterministic {
        profile: TypeProfile,
        first: MechanismOutcome,
        second: MechanismOutcome,
    },
    StandardPrices {
        profile: Option<TypeProfile>,
        agent: usize,
        row: PriceRow,
    },
    AgentMaximizing {
        profile: TypeProfile,
        schedule: PriceSchedule,
        chosen: usize,
        agent: usize,
        /// The alternative the agent prefers at these prices.
        preferred: usize,
        #[serde(with = "hexfloat")]
        shortfall: f64,
    },
    Wmon {
        profile: TypeProfile,
        agent: usize,
        original: AgentType,
        alternate: AgentType,
        chosen: usize,
        alternate_chosen: usize,
        #[serde(with = "hexfloat")]
        lhs: f64,
        #[serde(with = "hexfloat")]
        rhs: f64,
    },
    Pad {
        profile: TypeProfile,
        alternate: TypeProfile,
        chosen: usize,
        alternate_chosen: usize,
    },
    Pareto {
        profile: TypeProfile,
        outcome: MechanismOutcome,
        dominating: usize,
        #[serde(with = "hexfloat::vec")]
        payments: Vec<f64>,
        #[serde(with = "hexfloat")]
        slack: f64,
    },
}

/// Result of one checker over one or many trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub property: Property,
    pub mechanism: String,
    pub verdict: Verdict,
    pub trials: u64,
    pub violations: u64,
    /// Trials whose premise did not apply (e.g. PAD without the strict
    /// wtp increase).
    pub vacuous: u64,
    /// Instances skipped as degenerate, such as a zero-weight agent facing a
    /// tied economy.
    pub degenerate: u64,
    #[serde(with = "hexfloat")]
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Per-alternative selection counts (onto only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hits: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_constant: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Box<Counterexample>>,
}

impl CheckReport {
    pub fn new(property: Property, mechanism: impl Into<String>, tolerance: f64) -> Self {
        Self {
            property,
            mechanism: mechanism.into(),
            verdict: Verdict::Pass,
            trials: 0,
            violations: 0,
            vacuous: 0,
            degenerate: 0,
            tolerance,
            seed: None,
            hits: None,
            declared_constant: None,
            counterexample: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }

    /// Records one violation, keeping the first counterexample.
    pub(crate) fn violation(&mut self, cx: Counterexample) {
        self.violations += 1;
        self.verdict = Verdict::Fail;
        if self.counterexample.is_none() {
            self.counterexample = Some(Box::new(cx));
        }
    }

    /// Verdict of an onto report from its hit counts.
    pub(crate) fn settle_onto(&mut self) {
        let Some(hits) = &self.hits else { return };
        let unhit: Vec<usize> = (0..hits.len()).filter(|&a| hits[a] == 0).collect();
        if unhit.is_empty() {
            self.verdict = Verdict::Pass;
            self.counterexample = None;
        } else {
            self.verdict = if self.declared_constant.is_some() {
                Verdict::Fail
            } else {
                Verdict::Inconclusive
            };
            self.counterexample = Some(Box::new(Counterexample::Onto { unhit }));
        }
    }

    /// Combines two reports for the same property. Associative: counts add,
    /// the worst verdict wins, the first counterexample and seed are kept.
    pub fn merge(mut self, other: CheckReport) -> CheckReport {
        debug_assert_eq!(self.property, other.property);
        self.trials += other.trials;
        self.violations += other.violations;
        self.vacuous += other.vacuous;
        self.degenerate += other.degenerate;
        self.tolerance = self.tolerance.max(other.tolerance);
        self.seed = self.seed.or(other.seed);
        self.declared_constant = self.declared_constant.or(other.declared_constant);
        if self.property == Property::Onto {
            self.hits = match (self.hits.take(), other.hits) {
                (Some(a), Some(b)) => Some(a.iter().zip(&b).map(|(x, y)| x + y).collect()),
                (a, b) => a.or(b),
            };
            self.settle_onto();
            return self;
        }
        self.verdict = self.verdict.max(other.verdict);
        if self.counterexample.is_none() {
            self.counterexample = other.counterexample;
        }
        self
    }

    /// Merges a sequence of reports; `None` when the sequence is empty.
    pub fn merge_all(reports: impl IntoIterator<Item = CheckReport>) -> Option<CheckReport> {
        reports.into_iter().reduce(CheckReport::merge)
    }

    /// Machine-readable form. Identical inputs give identical bytes.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// One line summary for terminals.
    pub fn summary_line(&self) -> String {
        let mut s = format!(
            "{:<17} {:<12} trials={} violations={}",
            self.property.id(),
            format!("{:?}", self.verdict).to_lowercase(),
            self.trials,
            self.violations
        );
        if self.vacuous > 0 {
            s.push_str(&format!(" vacuous={}", self.vacuous));
        }
        if self.degenerate > 0 {
            s.push_str(&format!(" degenerate={}", self.degenerate));
        }
        if let Some(h) = &self.hits {
            s.push_str(&format!(" hits={h:?}"));
        }
        s
    }
}

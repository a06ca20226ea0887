//! Scenario files: a profile, a mechanism and the checks to run on them.
//!
//! A scenario is one JSON document. Several scenarios are combined with a
//! manifest `{"scenarios": ["a.json", "b.json"]}` whose paths are relative
//! to the manifest itself.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::harness::suite::{pad_bump, schedule_of, SUITE_WTP_RANGE};
use crate::harness::{
    check_agent_maximizing, check_deterministic, check_dsic, check_ir, check_no_subsidy, check_onto, check_pad,
    check_pareto, check_price_rows, check_wmon, CheckReport, DeviationConfig, DeviationSet, Property, Verdict,
    DEFAULT_TOL,
};
use crate::hexfloat;
use crate::mechanism::{Mechanism, MechanismError, MechanismOutcome, MechanismSpec};
use crate::utility::sample::{random_parallel, random_parallel_profile, rng_from_seed};
use crate::utility::{AgentType, TypeProfile};

/// Trials for sampled checks when the scenario does not say.
pub const DEFAULT_TRIALS: u64 = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub property: Property,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "hexfloat::option")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub profile: TypeProfile,
    pub mechanism: MechanismSpec,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
}

/// Command-line overrides applied on top of a scenario.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub trials: Option<u64>,
}

fn is_sampled(p: Property) -> bool {
    matches!(p, Property::Dsic | Property::Onto | Property::Wmon | Property::Pad)
}

impl Scenario {
    pub fn parse(text: &str, path: &str) -> Result<Scenario, ScenarioError> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            path: path.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        s.validate(path)?;
        Ok(s)
    }

    /// Mechanism dimensions match the profile, and sampled checks have a
    /// seed.
    pub fn validate(&self, path: &str) -> Result<(), ScenarioError> {
        let invalid = |message: String| ScenarioError::Invalid {
            path: path.to_string(),
            message,
        };
        let n = self.profile.num_agents();
        let m = self.profile.num_alternatives();
        self.mechanism.build().map_err(|e| invalid(e.to_string()))?;
        match &self.mechanism {
            MechanismSpec::Gwvcg { .. } | MechanismSpec::GwvcgFixed { .. } => {
                let spec = self.mechanism.affine_spec().expect("affine variant");
                spec.validate_for(n, m).map_err(|e| invalid(e.to_string()))?;
            }
            MechanismSpec::Dictatorship {
                dictator, fixed_prices, ..
            } => {
                if *dictator >= n {
                    return Err(invalid(format!("dictator {dictator} out of range for {n} agents")));
                }
                if fixed_prices.len() != m {
                    return Err(invalid(format!(
                        "fixed_prices has {} entries for {m} alternatives",
                        fixed_prices.len()
                    )));
                }
            }
        }
        if let Some(c) = self.checks.iter().find(|c| is_sampled(c.property) && self.seed.is_none()) {
            return Err(invalid(format!("check {} is sampled and needs a seed", c.property)));
        }
        if let Some(c) = self.checks.iter().find(|c| c.tol.is_some_and(|t| !(t.is_finite() && t >= 0.0))) {
            return Err(invalid(format!("check {} has a bad tolerance", c.property)));
        }
        Ok(())
    }

    /// Outcome, realized utilities and wtp table.
    pub fn run(&self, name: &str) -> Result<RunReport, ScenarioError> {
        let mech = self.mechanism.build()?;
        let outcome = mech.run(&self.profile)?;
        Ok(RunReport::new(name, &mech.name(), &self.profile, outcome))
    }

    /// Runs every listed check. An empty list gives an empty, passing
    /// report.
    pub fn check(&self, name: &str, ov: Overrides) -> Result<ScenarioReport, ScenarioError> {
        let seed = ov.seed.or(self.seed);
        let trials = ov.trials.or(self.trials).unwrap_or(DEFAULT_TRIALS);
        let mech = self.mechanism.build()?;
        let run = self.run(name)?;
        let mut reports = Vec::new();
        for c in &self.checks {
            let tol = ov.tol.or(c.tol).unwrap_or(DEFAULT_TOL);
            let seed = match (is_sampled(c.property), seed) {
                (true, None) => {
                    return Err(ScenarioError::Invalid {
                        path: name.to_string(),
                        message: format!("check {} is sampled and needs a seed", c.property),
                    })
                }
                (_, s) => s.unwrap_or(0),
            };
            let mut r = run_check(&*mech, &self.profile, c.property, tol, seed, trials)?;
            r.mechanism = mech.name();
            if is_sampled(c.property) {
                r.seed = Some(seed);
            }
            reports.push(r);
        }
        let verdict = reports.iter().map(|r| r.verdict).max().unwrap_or(Verdict::Pass);
        Ok(ScenarioReport {
            scenario: name.to_string(),
            run,
            verdict,
            checks: reports,
        })
    }
}

fn run_check(
    mech: &dyn Mechanism,
    profile: &TypeProfile,
    property: Property,
    tol: f64,
    seed: u64,
    trials: u64,
) -> Result<CheckReport, MechanismError> {
    let n = profile.num_agents();
    let m = profile.num_alternatives();
    Ok(match property {
        Property::Dsic => {
            let devs = DeviationSet::generate(profile, seed, DeviationConfig::default());
            check_dsic(mech, profile, &devs, tol)?
        }
        Property::Ir => check_ir(mech, profile, tol)?,
        Property::NoSubsidy => check_no_subsidy(mech, profile, tol)?,
        Property::Deterministic => check_deterministic(mech, profile)?,
        Property::Onto => {
            let sampler = |rng: &mut rand_chacha::ChaCha8Rng| random_parallel_profile(rng, n, m, SUITE_WTP_RANGE, false);
            check_onto(mech, m, sampler, trials, seed)?
        }
        Property::StandardPrices => check_price_rows(mech, profile, tol)?,
        Property::AgentMaximizing => {
            let chosen = mech.run(profile)?.chosen;
            match schedule_of(mech, profile) {
                Some(s) => check_agent_maximizing(profile, &s, chosen, tol),
                None => {
                    let mut r = CheckReport::new(Property::AgentMaximizing, mech.name(), tol);
                    r.degenerate = 1;
                    r.verdict = Verdict::Inconclusive;
                    r
                }
            }
        }
        Property::Wmon => {
            let mut rng = rng_from_seed(seed);
            let mut all = Vec::new();
            for _ in 0..trials {
                let i = rng.gen_range(0..n);
                let alt = AgentType::parallel(random_parallel(&mut rng, m, SUITE_WTP_RANGE, false))?;
                all.push(check_wmon(mech, profile, i, profile.agent(i), &alt, tol)?);
            }
            CheckReport::merge_all(all).unwrap_or_else(|| CheckReport::new(property, mech.name(), tol))
        }
        Property::Pad => {
            let mut rng = rng_from_seed(seed);
            let a = mech.run(profile)?.chosen;
            let mut all = Vec::new();
            for _ in 0..trials {
                let bumped = pad_bump(&mut rng, profile, a, 0.01);
                all.push(check_pad(mech, profile, &bumped, tol)?);
            }
            CheckReport::merge_all(all).unwrap_or_else(|| CheckReport::new(property, mech.name(), tol))
        }
        Property::Pareto => check_pareto(profile, &mech.run(profile)?, tol),
    })
}

/// What the mechanism did on the scenario profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub mechanism: String,
    pub alternatives: Vec<String>,
    pub outcome: MechanismOutcome,
    /// `u_{i,x}(t_i)` for the chosen `x`.
    #[serde(with = "hexfloat::vec")]
    pub utilities: Vec<f64>,
    pub wtp: Vec<WtpRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WtpRow(#[serde(with = "hexfloat::vec")] pub Vec<f64>);

impl RunReport {
    pub fn new(scenario: &str, mechanism: &str, profile: &TypeProfile, outcome: MechanismOutcome) -> Self {
        let utilities = profile
            .agents()
            .iter()
            .zip(&outcome.payments)
            .map(|(t, &z)| t.utility(outcome.chosen, z))
            .collect();
        Self {
            scenario: scenario.to_string(),
            mechanism: mechanism.to_string(),
            alternatives: profile.alternatives().to_vec(),
            wtp: profile.agents().iter().map(|t| WtpRow(t.wtp().to_vec())).collect(),
            outcome,
            utilities,
        }
    }

    pub fn human(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario:  {}", self.scenario);
        let _ = writeln!(s, "mechanism: {}", self.mechanism);
        let _ = writeln!(s, "chosen:    {}", self.alternatives[self.outcome.chosen]);
        let _ = writeln!(s, "{:<8}{:>12}{:>12}", "agent", "payment", "utility");
        for (i, (t, u)) in self.outcome.payments.iter().zip(&self.utilities).enumerate() {
            let _ = writeln!(s, "{:<8}{:>12}{:>12}", i, fmt_num(*t), fmt_num(*u));
        }
        let _ = write!(s, "wtp     ");
        for a in &self.alternatives {
            let _ = write!(s, "{a:>10}");
        }
        s.push('\n');
        for (i, row) in self.wtp.iter().enumerate() {
            let _ = write!(s, "{i:<8}");
            for p in &row.0 {
                let _ = write!(s, "{:>10}", fmt_num(*p));
            }
            s.push('\n');
        }
        s
    }
}

fn fmt_num(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Run plus every check of one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub run: RunReport,
    pub verdict: Verdict,
    pub checks: Vec<CheckReport>,
}

impl ScenarioReport {
    pub fn human(&self) -> String {
        let mut s = self.run.human();
        for r in &self.checks {
            let _ = writeln!(s, "{}", r.summary_line());
        }
        let _ = writeln!(s, "verdict: {}", verdict_word(self.verdict));
        s
    }
}

pub fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Inconclusive => "inconclusive",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    scenarios: Vec<PathBuf>,
}

fn read(path: &Path) -> Result<String, ScenarioError> {
    std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads a scenario file, or every scenario listed by a manifest.
pub fn load(path: &Path) -> Result<Vec<(String, Scenario)>, ScenarioError> {
    let text = read(path)?;
    let shown = path.display().to_string();
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| ScenarioError::Parse {
        path: shown.clone(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if value.get("scenarios").is_none() {
        return Ok(vec![(shown.clone(), Scenario::parse(&text, &shown)?)]);
    }
    let manifest: Manifest = serde_json::from_value(value).map_err(|e| ScenarioError::Invalid {
        path: shown.clone(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    manifest
        .scenarios
        .iter()
        .map(|p| {
            let full = base.join(p);
            let name = full.display().to_string();
            let s = Scenario::parse(&read(&full)?, &name)?;
            Ok((name, s))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED: &str = r#"{
        "profile": {"alternatives": ["a", "b", "c"], "agents": [
            {"kind": "quasilinear", "values": [4, 0, 1]},
            {"kind": "quasilinear", "values": [0, 3, 1]}
        ]},
        "mechanism": {"kind": "gwvcg", "weights": [1, 2], "constants": [0, 0, 1]},
        "checks": []
    }"#;

    #[test]
    fn worked_scenario_runs() {
        let s = Scenario::parse(WORKED, "worked").unwrap();
        let r = s.run("worked").unwrap();
        assert_eq!(r.outcome.chosen, 1);
        assert_eq!(r.outcome.payments, vec![0.0, 2.0]);
        assert_eq!(r.utilities, vec![0.0, 1.0]);
        let c = s.check("worked", Overrides::default()).unwrap();
        assert!(c.checks.is_empty());
        assert_eq!(c.verdict, Verdict::Pass);
    }

    #[test]
    fn parse_errors_carry_a_location() {
        match Scenario::parse("{\n  \"profile\": ,\n}", "bad") {
            Err(ScenarioError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sampled_checks_need_a_seed() {
        let text = WORKED.replace("\"checks\": []", "\"checks\": [{\"property\": \"dsic\"}]");
        assert!(matches!(Scenario::parse(&text, "x"), Err(ScenarioError::Invalid { .. })));
        let seeded = text.replace("\"checks\"", "\"seed\": 3, \"checks\"");
        assert!(Scenario::parse(&seeded, "x").is_ok());
    }

    #[test]
    fn dimension_mismatch_is_invalid() {
        let text = WORKED.replace("[0, 0, 1]", "[0, 0]");
        assert!(matches!(Scenario::parse(&text, "x"), Err(ScenarioError::Invalid { .. })));
    }

    #[test]
    fn full_suite_on_parallel_profile_passes() {
        let text = r#"{
            "profile": {"alternatives": ["a", "b", "c"], "agents": [
                {"kind": "quasilinear", "values": [3, 1, 0]},
                {"kind": "linear", "alpha": 2, "values": [0, 4, 1]}
            ]},
            "mechanism": {"kind": "gwvcg", "weights": [1, 1], "constants": [0, 0, 0]},
            "seed": 7,
            "checks": [
                {"property": "dsic"}, {"property": "ir"}, {"property": "no_subsidy"},
                {"property": "deterministic"}, {"property": "onto"}, {"property": "standard_prices"},
                {"property": "agent_maximizing"}, {"property": "wmon"}, {"property": "pad"}
            ]
        }"#;
        let s = Scenario::parse(text, "suite").unwrap();
        let r = s.check("suite", Overrides::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{}", r.human());
        let again = s.check("suite", Overrides::default()).unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap(), serde_json::to_string(&again).unwrap());
    }

    #[test]
    fn pareto_example_fails() {
        let text = r#"{
            "profile": {"alternatives": ["a", "b", "c"], "agents": [
                {"kind": "quasilinear", "values": [10, 0, 0]},
                {"kind": "quasilinear", "values": [5, 10, 0]},
                {"kind": "quasilinear", "values": [4, 0, 8]}
            ]},
            "mechanism": {"kind": "gwvcg", "weights": [0, 1, 1], "constants": [0, 0, 0]},
            "checks": [{"property": "pareto"}]
        }"#;
        let r = Scenario::parse(text, "pe").unwrap().check("pe", Overrides::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.run.outcome.chosen, 1);
        assert_eq!(r.run.outcome.payments, vec![0.0, 8.0, 0.0]);
    }
}

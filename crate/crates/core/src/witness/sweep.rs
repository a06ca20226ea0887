use rand::Rng;
use serde::{Deserialize, Serialize};

use super::refute::candidate_from_difference;
use super::{build_nonparallel_type, refute_price_vector, two_slope_refutation, NonParallelParams};
use super::{RefutationReport, RefutationStatus, WitnessError};
use crate::harness::{
    check_deterministic, check_dsic, check_ir, check_no_subsidy, check_onto, CheckReport, DeviationConfig,
    DeviationSet, SuiteReport, Verdict, DEFAULT_TOL,
};
use crate::hexfloat;
use crate::mechanism::{fixed_prices_from_constants, FixedPriceDictatorship};
use crate::utility::sample::{random_parallel_profile, rng_from_seed};
use crate::utility::TypeProfile;

/// Candidate differences `t_b - t_a` from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(with = "hexfloat")]
    pub lo: f64,
    #[serde(with = "hexfloat")]
    pub hi: f64,
    #[serde(with = "hexfloat")]
    pub step: f64,
}

impl Grid {
    pub fn points(&self) -> Result<Vec<f64>, WitnessError> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(WitnessError::BadGrid(self.step));
        }
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.hi < self.lo {
            return Ok(Vec::new());
        }
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|i| self.lo + i as f64 * self.step).collect())
    }
}

fn unit_weights() -> Vec<f64> {
    vec![1.0, 1.0]
}

fn default_pairs() -> Vec<[f64; 2]> {
    vec![[1.0, 2.0], [1.0, 1.01]]
}

fn default_specs() -> usize {
    20
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

fn default_onto_trials() -> u64 {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub witness: NonParallelParams,
    /// `(k1, k2)`. Exactly one positive entry runs the dictatorship control
    /// instead of refutations.
    #[serde(default = "unit_weights", with = "hexfloat::vec")]
    pub weights: Vec<f64>,
    /// Defaults to all zeros.
    #[serde(default, with = "hexfloat::option_vec")]
    pub constants: Option<Vec<f64>>,
    /// Defaults to `[delta1 - 1, delta2 + 1]` with step 0.05.
    #[serde(default)]
    pub grid: Option<Grid>,
    #[serde(default = "default_pairs")]
    pub slope_pairs: Vec<[f64; 2]>,
    /// Sampled two-positive-weight specs per slope pair.
    #[serde(default = "default_specs")]
    pub specs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tol", with = "hexfloat")]
    pub tol: f64,
    #[serde(default = "default_onto_trials")]
    pub onto_trials: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            witness: NonParallelParams::default(),
            weights: unit_weights(),
            constants: None,
            grid: None,
            slope_pairs: default_pairs(),
            specs: default_specs(),
            seed: 0,
            tol: DEFAULT_TOL,
            onto_trials: default_onto_trials(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SweepCounts {
    pub total: usize,
    pub refuted: usize,
    pub inconclusive: usize,
    pub survivors: usize,
}

impl SweepCounts {
    fn add(&mut self, status: RefutationStatus) {
        self.total += 1;
        match status {
            RefutationStatus::Refuted => self.refuted += 1,
            RefutationStatus::Inconclusive => self.inconclusive += 1,
            RefutationStatus::Survived => self.survivors += 1,
        }
    }

    /// Refuted share in percent, `None` when empty.
    pub fn refuted_percent(&self) -> Option<f64> {
        (self.total > 0).then(|| 100.0 * self.refuted as f64 / self.total as f64)
    }

    fn merge(&mut self, other: SweepCounts) {
        self.total += other.total;
        self.refuted += other.refuted;
        self.inconclusive += other.inconclusive;
        self.survivors += other.survivors;
    }
}

/// Fixed-price dictatorship run on the witness profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSummary {
    pub dictator: usize,
    #[serde(with = "hexfloat::vec")]
    pub prices: Vec<f64>,
    pub profiles: usize,
    pub reports: Vec<CheckReport>,
}

impl ControlSummary {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.verdict == Verdict::Pass)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub seed: u64,
    pub price_vector: SweepCounts,
    pub two_slope: SweepCounts,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<ControlSummary>,
}

impl SweepSummary {
    pub fn overall(&self) -> SweepCounts {
        let mut c = self.price_vector;
        c.merge(self.two_slope);
        c
    }

    pub fn verdict(&self) -> Verdict {
        let c = self.overall();
        let control_ok = self.control.as_ref().is_none_or(ControlSummary::passed);
        if c.survivors > 0 || !control_ok {
            Verdict::Fail
        } else if c.inconclusive > 0 {
            Verdict::Inconclusive
        } else {
            Verdict::Pass
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summaries always serialize")
    }

    pub fn human(&self) -> String {
        let mut out = String::new();
        let line = |name: &str, c: &SweepCounts| match c.refuted_percent() {
            Some(p) => format!(
                "{name}: {} candidates, refuted: {}%, inconclusive: {}, survivors: {}\n",
                c.total,
                trim_percent(p),
                c.inconclusive,
                c.survivors
            ),
            None => format!("{name}: no candidates\n"),
        };
        if self.control.is_none() {
            out += &line("price vectors", &self.price_vector);
            out += &line("two-slope", &self.two_slope);
            let all = self.overall();
            if let Some(p) = all.refuted_percent() {
                out += &format!("refuted: {}%, survivors: {}\n", trim_percent(p), all.survivors);
            }
        }
        if let Some(c) = &self.control {
            if c.passed() {
                out += "dictatorship control: all checks pass\n";
            } else {
                out += "dictatorship control: FAILED\n";
                for r in c.reports.iter().filter(|r| r.verdict != Verdict::Pass) {
                    out += &format!("  {}\n", r.summary_line());
                }
            }
        }
        out
    }
}

fn trim_percent(p: f64) -> String {
    let s = format!("{p:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub summary: SweepSummary,
    /// Every refutation attempt, grid candidates first.
    pub reports: Vec<RefutationReport>,
}

/// Seeded `(weights, constants)` pairs with both weights in `[0.05, 3)` and
/// three constants in `[-2, 2)`.
pub fn two_positive_weight_specs(seed: u64, count: usize) -> Vec<([f64; 2], Vec<f64>)> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|_| {
            let k = [rng.gen_range(0.05..3.0), rng.gen_range(0.05..3.0)];
            let c = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            (k, c)
        })
        .collect()
}

/// Runs the price-vector refutation over the candidate grid and the
/// two-slope refutation over sampled specs; with a single positive weight
/// runs the fixed-price dictatorship on the same witness profiles instead.
pub fn run_impossibility_sweep(config: &SweepConfig) -> Result<SweepOutcome, WitnessError> {
    let w = build_nonparallel_type(&config.witness)?;
    let m = w.u2_star.num_alternatives();
    if config.weights.len() != 2 {
        return Err(WitnessError::Dimension {
            what: "weights",
            expected: 2,
            got: config.weights.len(),
        });
    }
    let constants = config.constants.clone().unwrap_or_else(|| vec![0.0; m]);
    if constants.len() != m {
        return Err(WitnessError::Dimension {
            what: "constants",
            expected: m,
            got: constants.len(),
        });
    }
    let grid = config.grid.unwrap_or(Grid {
        lo: w.delta1 - 1.0,
        hi: w.delta2 + 1.0,
        step: 0.05,
    });
    let points = grid.points()?;
    let (k1, k2) = (config.weights[0], config.weights[1]);
    let positive = config.weights.iter().filter(|&&k| k > 0.0).count();
    let tol = config.tol;

    let mut summary = SweepSummary {
        seed: config.seed,
        price_vector: SweepCounts::default(),
        two_slope: SweepCounts::default(),
        control: None,
    };
    let mut reports = Vec::new();

    if positive == 1 && config.weights.iter().all(|k| k.is_finite() && *k >= 0.0) {
        let dictator = if k1 > 0.0 { 0 } else { 1 };
        let prices = fixed_prices_from_constants(&constants, config.weights[dictator]);
        let mut profiles = Vec::new();
        for &d in &points {
            let cand = candidate_from_difference(m, w.a, w.b, d);
            let r = refute_price_vector(&w, 1.0, 1.0, &constants, &cand, tol)?;
            profiles.extend(r.profiles);
        }
        let control = dictatorship_control(dictator, prices, &profiles, config)?;
        summary.control = Some(control);
        return Ok(SweepOutcome { summary, reports });
    }

    for &d in &points {
        let cand = candidate_from_difference(m, w.a, w.b, d);
        let r = refute_price_vector(&w, k1, k2, &constants, &cand, tol)?;
        summary.price_vector.add(r.status);
        reports.push(r);
    }
    if !points.is_empty() {
        for (k, c) in two_positive_weight_specs(config.seed, config.specs) {
            for &[alpha, beta] in &config.slope_pairs {
                let r = two_slope_refutation(alpha, beta, k, &c, tol)?;
                summary.two_slope.add(r.status);
                reports.push(r);
            }
        }
    }
    Ok(SweepOutcome { summary, reports })
}

/// DSIC, determinism, ontoness, IR and no subsidy for a fixed-price
/// dictatorship.
fn dictatorship_control(
    dictator: usize,
    prices: Vec<f64>,
    profiles: &[TypeProfile],
    config: &SweepConfig,
) -> Result<ControlSummary, WitnessError> {
    let mech = FixedPriceDictatorship::new(dictator, prices.clone());
    let tol = config.tol;
    let mut all = Vec::new();
    for (j, p) in profiles.iter().enumerate() {
        let devs = DeviationSet::generate(p, config.seed.wrapping_add(j as u64), DeviationConfig::default());
        all.push(check_dsic(&mech, p, &devs, tol)?);
        all.push(check_deterministic(&mech, p)?);
        all.push(check_ir(&mech, p, tol)?);
        all.push(check_no_subsidy(&mech, p, tol)?);
    }
    let m = prices.len();
    let n = profiles.first().map_or(2, TypeProfile::num_agents);
    let sampler = |rng: &mut rand_chacha::ChaCha8Rng| random_parallel_profile(rng, n, m, 5.0, false);
    all.push(check_onto(&mech, m, sampler, config.onto_trials, config.seed)?);
    let mut reports = SuiteReport::from_reports(all).reports;
    for r in &mut reports {
        r.seed = Some(config.seed);
    }
    Ok(ControlSummary {
        dictator,
        prices,
        profiles: profiles.len(),
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Property;

    #[test]
    fn grid_points_include_both_ends() {
        let g = Grid {
            lo: 0.0,
            hi: 2.25,
            step: 0.05,
        };
        let p = g.points().unwrap();
        assert_eq!(p.len(), 46);
        assert!((p[45] - 2.25).abs() < 1e-12);
        assert!(Grid { lo: 1.0, hi: 0.0, step: 0.1 }.points().unwrap().is_empty());
        assert!(Grid { lo: 0.0, hi: 1.0, step: 0.0 }.points().is_err());
    }

    #[test]
    fn default_sweep_refutes_everything() {
        let out = run_impossibility_sweep(&SweepConfig::default()).unwrap();
        let s = &out.summary;
        assert_eq!(s.price_vector.total, 46);
        assert_eq!(s.price_vector.refuted, 46);
        assert_eq!(s.two_slope.total, 40);
        assert_eq!(s.two_slope.refuted, 40);
        assert_eq!(s.verdict(), Verdict::Pass);
        assert!(s.human().contains("refuted: 100%, survivors: 0"), "{}", s.human());
        for r in &out.reports {
            assert!(r.replay().unwrap().unwrap() >= r.slack - 1e-9);
        }
    }

    #[test]
    fn empty_grid_gives_empty_summary() {
        let config = SweepConfig {
            grid: Some(Grid { lo: 1.0, hi: 0.0, step: 0.05 }),
            ..SweepConfig::default()
        };
        let out = run_impossibility_sweep(&config).unwrap();
        assert_eq!(out.summary.overall(), SweepCounts::default());
        assert!(out.reports.is_empty());
    }

    #[test]
    fn wide_gap_fine_grid() {
        let config = SweepConfig {
            witness: NonParallelParams::with_gap(0.5),
            grid: Some(Grid { lo: 0.0, hi: 2.5, step: 0.01 }),
            slope_pairs: Vec::new(),
            ..SweepConfig::default()
        };
        let s = run_impossibility_sweep(&config).unwrap().summary;
        assert_eq!(s.price_vector.total, 251);
        assert_eq!(s.price_vector.refuted, 251);
    }

    #[test]
    fn single_weight_runs_the_control() {
        let config = SweepConfig {
            weights: vec![1.0, 0.0],
            constants: Some(vec![0.0, 0.0, 1.0]),
            ..SweepConfig::default()
        };
        let s = run_impossibility_sweep(&config).unwrap().summary;
        let c = s.control.as_ref().unwrap();
        assert_eq!(c.prices, vec![1.0, 1.0, 0.0]);
        assert_eq!(c.profiles, 46);
        assert!(c.passed(), "{}", s.to_json());
        for p in [Property::Dsic, Property::Deterministic, Property::Onto, Property::Ir, Property::NoSubsidy] {
            assert!(c.reports.iter().any(|r| r.property == p));
        }
        assert_eq!(s.human(), "dictatorship control: all checks pass\n");
    }

    #[test]
    fn sweep_is_deterministic() {
        let a = run_impossibility_sweep(&SweepConfig::default()).unwrap();
        let b = run_impossibility_sweep(&SweepConfig::default()).unwrap();
        assert_eq!(a.summary.to_json(), b.summary.to_json());
        assert_eq!(a.reports, b.reports);
    }
}

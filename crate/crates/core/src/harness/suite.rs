//! Seeded batch runs of the checkers over sampled instances.

use std::ops::Range;

use rand::Rng;
use serde::Serialize;

use super::checks::{
    check_agent_maximizing, check_deterministic, check_dsic, check_ir, check_no_subsidy, check_pad, check_price_rows,
    check_wmon,
};
use super::deviations::{DeviationConfig, DeviationSet};
use super::report::{CheckReport, Property, Verdict};
use crate::mechanism::{AffineMaximizerSpec, Gwvcg, Mechanism, MechanismError, PriceSchedule};
use crate::utility::sample::{random_parallel, random_parallel_profile, rng_from_seed};
use crate::utility::{AgentType, TypeProfile};

/// wtp range used by the suite samplers.
pub const SUITE_WTP_RANGE: f64 = 5.0;

/// Several reports, one per property, in a fixed order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub reports: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn from_reports(reports: impl IntoIterator<Item = CheckReport>) -> Self {
        let mut merged: Vec<CheckReport> = Vec::new();
        for r in reports {
            match merged.iter_mut().find(|m| m.property == r.property) {
                Some(m) => *m = m.clone().merge(r),
                None => merged.push(r),
            }
        }
        merged.sort_by_key(|r| r.property);
        Self { reports: merged }
    }

    pub fn get(&self, p: Property) -> Option<&CheckReport> {
        self.reports.iter().find(|r| r.property == p)
    }

    /// Worst verdict over all reports (pass when empty).
    pub fn verdict(&self) -> Verdict {
        self.reports.iter().map(|r| r.verdict).max().unwrap_or(Verdict::Pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

/// Sampled instance for seed `s`: `n = 1 + s % 3` agents,
/// `m = 3 + (s / 3) % 2` alternatives, unrestricted parallel types and a
/// random affine-maximiser spec.
pub fn suite_instance(seed: u64) -> (AffineMaximizerSpec, TypeProfile) {
    let n = 1 + (seed % 3) as usize;
    let m = 3 + ((seed / 3) % 2) as usize;
    let mut rng = rng_from_seed(seed);
    let profile = random_parallel_profile(&mut rng, n, m, SUITE_WTP_RANGE, false);
    let spec = AffineMaximizerSpec::random(&mut rng, n, m);
    (spec, profile)
}

/// Price schedule of a mechanism on `profile`, or `None` when some row is
/// unavailable.
pub fn schedule_of<M: Mechanism + ?Sized>(mech: &M, profile: &TypeProfile) -> Option<PriceSchedule> {
    let rows = (0..profile.num_agents())
        .map(|i| mech.prices(profile, i).and_then(Result::ok))
        .collect::<Option<Vec<_>>>()?;
    Some(PriceSchedule { rows })
}

/// DSIC, IR, no subsidy, determinism, standard prices and
/// agent-maximisation for generalized weighted VCG over `seeds`.
pub fn gwvcg_suite(seeds: Range<u64>, tol: f64) -> Result<SuiteReport, MechanismError> {
    let start = seeds.start;
    let mut all = Vec::new();
    for seed in seeds {
        let (spec, profile) = suite_instance(seed);
        let mech = Gwvcg(spec);
        let deviations = DeviationSet::generate(&profile, seed, DeviationConfig::default());
        all.push(check_dsic(&mech, &profile, &deviations, tol)?);
        all.push(check_ir(&mech, &profile, tol)?);
        all.push(check_no_subsidy(&mech, &profile, tol)?);
        all.push(check_deterministic(&mech, &profile)?);
        all.push(check_price_rows(&mech, &profile, tol)?);
        let chosen = mech.run(&profile)?.chosen;
        match schedule_of(&mech, &profile) {
            Some(s) => all.push(check_agent_maximizing(&profile, &s, chosen, tol)),
            None => {
                let mut r = CheckReport::new(Property::AgentMaximizing, mech.name(), tol);
                r.degenerate = 1;
                all.push(r);
            }
        }
    }
    let mut suite = SuiteReport::from_reports(all);
    for r in &mut suite.reports {
        r.seed = Some(start);
        r.mechanism = "gwvcg".into();
    }
    Ok(suite)
}

/// `u'` from `u` by raising every agent's wtp for `a` by strictly more
/// (at least `margin`) than for any other alternative.
pub fn pad_bump<R: Rng + ?Sized>(rng: &mut R, u: &TypeProfile, a: usize, margin: f64) -> TypeProfile {
    let m = u.num_alternatives();
    let agents = u
        .agents()
        .iter()
        .map(|t| {
            let p = t.wtp();
            let mut q: Vec<f64> = p.iter().map(|&x| (x + rng.gen_range(-1.0..1.0)).max(0.0)).collect();
            if m >= 2 {
                let low = (0..m).filter(|&b| b != a).min_by(|&x, &y| q[x].total_cmp(&q[y])).expect("m >= 2");
                q[low] = 0.0;
            }
            let top = (0..m).filter(|&b| b != a).map(|b| q[b] - p[b]).fold(0.0, f64::max);
            q[a] = p[a] + top + margin + rng.gen_range(0.0..1.0);
            if m == 1 {
                q[a] = 0.0;
            }
            AgentType::with_wtp(q).expect("bumped wtp is valid")
        })
        .collect();
    TypeProfile::new(u.alternatives().to_vec(), agents).expect("same alternatives")
}

/// W-Mon and PAD for generalized weighted VCG on `count` sampled type
/// pairs each.
pub fn monotonicity_suite(seed: u64, count: u64, tol: f64) -> Result<SuiteReport, MechanismError> {
    let mut rng = rng_from_seed(seed);
    let mut all = Vec::new();
    for k in 0..count {
        let (spec, profile) = suite_instance(seed.wrapping_add(k));
        let mech = Gwvcg(spec);
        let m = profile.num_alternatives();
        let i = rng.gen_range(0..profile.num_agents());
        let alt = AgentType::parallel(random_parallel(&mut rng, m, SUITE_WTP_RANGE, false)).expect("valid sample");
        all.push(check_wmon(&mech, &profile, i, profile.agent(i), &alt, tol)?);

        let a = mech.run(&profile)?.chosen;
        let bumped = pad_bump(&mut rng, &profile, a, 0.01);
        all.push(check_pad(&mech, &profile, &bumped, tol)?);
    }
    let mut suite = SuiteReport::from_reports(all);
    for r in &mut suite.reports {
        r.seed = Some(seed);
    }
    Ok(suite)
}

use serde::{Deserialize, Serialize};

use super::{NonParallelWitness, RefutationReport, RefutationStatus, WitnessError};
use crate::harness::{agent_maximizing_shortfall, check_agent_maximizing, Property};
use crate::mechanism::{gwvcg_prices, AffineMaximizerSpec, Price, PriceSchedule};
use crate::utility::{AgentType, TypeProfile};

/// Which alternative maximises agent 1's weighted score in the built
/// profile, and so sits at price zero for agent 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// `b` is agent 2's zero-price alternative and `t_{2,a}` is set freely.
    PivotB,
    /// The least-valued alternative is at zero, `b` costs `z*`.
    PivotLeast,
    TwoSlope,
}

/// Candidate row with `t_b - t_a = d`, the smaller of the two at zero and
/// every other alternative at zero.
pub fn candidate_from_difference(m: usize, a: usize, b: usize, d: f64) -> Vec<Price> {
    let mut row = vec![Price::Finite(0.0); m];
    row[a] = Price::Finite((-d).max(0.0));
    row[b] = Price::Finite(d.max(0.0));
    row
}

struct Setup<'a> {
    w: &'a NonParallelWitness,
    k1: f64,
    k2: f64,
    c: &'a [f64],
}

impl Setup<'_> {
    /// Threshold map `X -> (k2/k1) X + (C_a - C_b) / k1`.
    fn g(&self, x: f64) -> f64 {
        (self.k2 / self.k1) * x + (self.c[self.w.a] - self.c[self.w.b]) / self.k1
    }

    /// `max_c {(k2/k1) p2_c + (C_c - C_ref) / k1}` over `c` not in `skip`.
    fn top(&self, skip: &[usize], reference: usize) -> Option<f64> {
        let p2 = self.w.u2_star.wtp();
        (0..p2.len())
            .filter(|c| !skip.contains(c))
            .map(|c| (self.k2 / self.k1) * p2[c] + (self.c[c] - self.c[reference]) / self.k1)
            .reduce(f64::max)
    }

    /// Agent 1's wtp making `b` the score maximiser with `t_{2,a} = x`.
    fn pivot_b(&self, x: f64) -> Vec<f64> {
        let (a, b) = (self.w.a, self.w.b);
        let m = self.c.len();
        let base = self.top(&[a, b], b).expect("at least three alternatives");
        let mut p = vec![0.0; m];
        p[b] = base;
        p[a] = base - self.g(x);
        p[b] += headroom(&p);
        p[a] = p[b] - self.g(x);
        p
    }

    /// Agent 1's wtp making the least alternative the score maximiser,
    /// with `t_{2,b} = z*` and `t_{2,a} = y + z*`.
    fn pivot_least(&self, y: f64) -> Vec<f64> {
        let (a, b, l) = (self.w.a, self.w.b, self.w.least);
        let m = self.c.len();
        let mut p = vec![0.0; m];
        let rest = self.top(&[a, b, l], a);
        p[a] = rest.unwrap_or(0.0);
        let fill = |p: &mut Vec<f64>| {
            p[b] = p[a] + self.g(y);
            p[l] = p[b] + (self.k2 * self.w.z_star + self.c[b] - self.c[l]) / self.k1;
        };
        fill(&mut p);
        p[a] += match rest {
            Some(_) => headroom(&p),
            // nothing else can carry the zero, so the smallest entry is pinned to it
            None => -[p[a], p[b], p[l]].into_iter().fold(f64::INFINITY, f64::min),
        };
        fill(&mut p);
        p
    }
}

/// Smallest shift making every entry non-negative, plus one unit.
fn headroom(p: &[f64]) -> f64 {
    let lowest = p.iter().copied().fold(f64::INFINITY, f64::min);
    (-lowest).max(0.0) + 1.0
}

/// Builds a parallel agent-1 type against `candidate` such that, with
/// agent 2 reporting the non-parallel witness type and facing its
/// generalized weighted VCG prices, no alternative is agent-maximising for
/// both agents.
pub fn refute_price_vector(
    w: &NonParallelWitness,
    k1: f64,
    k2: f64,
    constants: &[f64],
    candidate: &[Price],
    tol: f64,
) -> Result<RefutationReport, WitnessError> {
    if !(k1.is_finite() && k2.is_finite() && k1 > 0.0 && k2 > 0.0) {
        return Err(WitnessError::BadWeights(k1, k2));
    }
    let m = w.u2_star.num_alternatives();
    for (what, got) in [("constants", constants.len()), ("candidate", candidate.len())] {
        if got != m {
            return Err(WitnessError::Dimension { what, expected: m, got });
        }
    }
    if let Some(i) = constants.iter().position(|c| !c.is_finite()) {
        return Err(WitnessError::Infeasible(format!("constant {i} is not finite")));
    }
    let (a, b) = (w.a, w.b);
    let ta = candidate[a].finite().ok_or(WitnessError::InfiniteCandidate(a))?;
    let tb = candidate[b].finite().ok_or(WitnessError::InfiniteCandidate(b))?;
    let d = tb - ta;
    let spec = AffineMaximizerSpec::new(vec![k1, k2], constants.to_vec());
    let s = Setup { w, k1, k2, c: constants };

    let gap = w.delta2 - w.delta1;
    let eps = if gap > 0.0 { gap / 4.0 } else { (-gap / 4.0).min(w.delta1 / 2.0) };
    let mid = (w.delta1 + w.delta2) / 2.0;
    let unrefuted = |status, construction| RefutationReport {
        status,
        violated: Property::AgentMaximizing,
        construction,
        candidate: Some(candidate.to_vec()),
        spec: spec.clone(),
        profiles: Vec::new(),
        slack: 0.0,
        reports: Vec::new(),
    };
    if eps <= tol {
        return Ok(unrefuted(RefutationStatus::Inconclusive, Construction::PivotB));
    }
    let high = d > s.g(mid);
    let (construction, p1) = match (gap > 0.0, high) {
        (true, true) => (Construction::PivotB, s.pivot_b(w.delta1 + eps / 2.0)),
        (true, false) => (Construction::PivotLeast, s.pivot_least(w.delta2 - eps / 2.0)),
        (false, false) => (Construction::PivotB, s.pivot_b(w.delta1 - eps / 2.0)),
        (false, true) => (Construction::PivotLeast, s.pivot_least(w.delta2 + eps / 2.0)),
    };

    let names = crate::utility::default_names(m);
    let profile = TypeProfile::new(names, vec![AgentType::quasi_linear(p1)?, w.u2_star.clone()])?;
    let t2 = gwvcg_prices(&spec, &profile, 1)?;
    let schedule = PriceSchedule {
        rows: vec![candidate.to_vec(), t2],
    };
    let reports: Vec<_> = (0..m).map(|x| check_agent_maximizing(&profile, &schedule, x, tol)).collect();
    if reports.iter().any(|r| !r.failed()) {
        return Ok(unrefuted(RefutationStatus::Survived, construction));
    }
    let slack = (0..m)
        .filter_map(|x| agent_maximizing_shortfall(&profile, &schedule, x))
        .map(|s| s.amount)
        .fold(f64::INFINITY, f64::min);
    Ok(RefutationReport {
        status: RefutationStatus::Refuted,
        violated: Property::AgentMaximizing,
        construction,
        candidate: Some(candidate.to_vec()),
        spec,
        profiles: vec![profile],
        slack,
        reports,
    })
}

use rand::Rng;

use crate::utility::sample::{random_parallel, rng_from_seed};
use crate::utility::{AgentType, ParallelAgentType, TypeProfile};

/// Misreports to try, per agent. Every agent has at least one entry.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationSet {
    per_agent: Vec<Vec<AgentType>>,
}

/// Knobs for [`DeviationSet::generate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationConfig {
    /// Random parallel types per agent.
    pub random: usize,
    /// Draw the random types strictly parallel.
    pub strict: bool,
}

impl Default for DeviationConfig {
    fn default() -> Self {
        Self {
            random: 32,
            strict: false,
        }
    }
}

/// `t` with its willingness to pay scaled by `factor`: same base curve when
/// `t` is a parallel type, a quasi-linear type otherwise.
fn scaled(t: &AgentType, factor: f64) -> AgentType {
    let wtp: Vec<f64> = t.wtp().iter().map(|p| p * factor).collect();
    if let Some(p) = t.as_parallel() {
        let q = ParallelAgentType {
            base: p.base.clone(),
            wtp: wtp.clone(),
            tails: p.tails.clone(),
        };
        if let Ok(s) = AgentType::parallel(q) {
            return s;
        }
    }
    AgentType::quasi_linear(wtp).expect("finite wtp")
}

/// Quasi-linear type valuing only `a`, at `height`.
pub fn spike(m: usize, a: usize, height: f64) -> AgentType {
    let mut values = vec![0.0; m];
    values[a] = height;
    AgentType::quasi_linear(values).expect("finite spike")
}

impl DeviationSet {
    /// Explicit deviations. Agents given an empty list fall back to truth.
    pub fn new(profile: &TypeProfile, mut per_agent: Vec<Vec<AgentType>>) -> Self {
        per_agent.resize(profile.num_agents(), Vec::new());
        for (i, list) in per_agent.iter_mut().enumerate() {
            if list.is_empty() {
                list.push(profile.agent(i).clone());
            }
        }
        Self { per_agent }
    }

    /// Only the truthful report; DSIC holds vacuously.
    pub fn truth_only(profile: &TypeProfile) -> Self {
        Self::new(profile, Vec::new())
    }

    /// The default generator: truth, wtp scaled by one half and by two,
    /// a spike on each alternative at `2 * max wtp + 1`, the all-zero type,
    /// and `config.random` random parallel types.
    pub fn generate(profile: &TypeProfile, seed: u64, config: DeviationConfig) -> Self {
        let mut rng = rng_from_seed(seed);
        let m = profile.num_alternatives();
        let top = profile
            .agents()
            .iter()
            .flat_map(|t| t.wtp().iter().copied())
            .fold(0.0, f64::max);
        let height = 2.0 * top + 1.0;
        let per_agent = profile
            .agents()
            .iter()
            .map(|t| {
                let mut list = vec![t.clone(), scaled(t, 0.5), scaled(t, 2.0)];
                if m >= 2 {
                    list.extend((0..m).map(|a| spike(m, a, height)));
                }
                list.push(AgentType::quasi_linear(vec![0.0; m]).expect("zero type"));
                for _ in 0..config.random {
                    let range = rng.gen_range(0.5..=height);
                    let p = random_parallel(&mut rng, m, range, config.strict);
                    list.push(AgentType::parallel(p).expect("sampled type is valid"));
                }
                list
            })
            .collect();
        Self { per_agent }
    }

    pub fn for_agent(&self, i: usize) -> &[AgentType] {
        &self.per_agent[i]
    }

    pub fn num_agents(&self) -> usize {
        self.per_agent.len()
    }

    pub fn len(&self) -> usize {
        self.per_agent.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_generator_contents() {
        let profile = TypeProfile::from_wtp(&[vec![2.0, 0.0, 1.0], vec![0.0, 0.5, 0.0]]).unwrap();
        let d = DeviationSet::generate(&profile, 1, DeviationConfig::default());
        assert_eq!(d.for_agent(0).len(), 3 + 3 + 1 + 32);
        assert_eq!(d.for_agent(0)[0], *profile.agent(0));
        assert_eq!(d.for_agent(0)[1].wtp(), &[1.0, 0.0, 0.5]);
        assert_eq!(d.for_agent(0)[2].wtp(), &[4.0, 0.0, 2.0]);
        assert_eq!(d.for_agent(1)[4].wtp(), &[0.0, 5.0, 0.0]);
        assert_eq!(d, DeviationSet::generate(&profile, 1, DeviationConfig::default()));
    }

    #[test]
    fn every_agent_has_a_deviation() {
        let profile = TypeProfile::from_wtp(&[vec![0.0], vec![0.0]]).unwrap();
        let d = DeviationSet::new(&profile, vec![]);
        assert_eq!(d.num_agents(), 2);
        assert!(d.for_agent(1).len() == 1);
    }
}

//! Seeded samplers for random types and profiles.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::agent::{AgentType, ParallelAgentType, Tail, TypeProfile};
use super::curve::{Point, UtilityCurve};

/// The generator used everywhere a seed is accepted.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_slope<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    -rng.gen_range(0.25..=4.0)
}

/// Random strictly decreasing curve with 1 to 4 breakpoints spread over
/// `[-span, span]`.
pub fn random_curve<R: Rng + ?Sized>(rng: &mut R, span: f64) -> UtilityCurve {
    let k = rng.gen_range(1..=4);
    let mut xs: Vec<f64> = (0..k).map(|_| rng.gen_range(-span..=span)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|x, y| (*x - *y).abs() < 1e-6);
    let mut u = rng.gen_range(-1.0..=1.0);
    let mut points = vec![Point::new(xs[0], u)];
    for w in xs.windows(2) {
        u += random_slope(rng) * (w[1] - w[0]);
        points.push(Point::new(w[1], u));
    }
    let left = random_slope(rng);
    let right = random_slope(rng);
    UtilityCurve::new(points, left, right).expect("sampled curve is strictly decreasing")
}

/// wtp vector with entries in `[0, range]`, one forced zero and
/// occasionally more.
pub fn random_wtp<R: Rng + ?Sized>(rng: &mut R, m: usize, range: f64) -> Vec<f64> {
    let mut wtp: Vec<f64> = (0..m)
        .map(|_| {
            if rng.gen_bool(0.1) {
                0.0
            } else {
                rng.gen_range(0.0..=range)
            }
        })
        .collect();
    let zero = rng.gen_range(0..m);
    wtp[zero] = 0.0;
    wtp
}

/// Random parallel type. Tails (and so loss of strict parallelism) are
/// added with probability one half unless `strict` is set.
pub fn random_parallel<R: Rng + ?Sized>(rng: &mut R, m: usize, range: f64, strict: bool) -> ParallelAgentType {
    let base = random_curve(rng, range.max(1.0));
    let wtp = random_wtp(rng, m, range);
    let tails = if !strict && rng.gen_bool(0.5) {
        Some(
            (0..m)
                .map(|_| Tail {
                    left: random_slope(rng),
                    right: random_slope(rng),
                })
                .collect(),
        )
    } else {
        None
    };
    ParallelAgentType { base, wtp, tails }
}

/// A random parallel type with unrestricted willingness to pay in
/// `[0, wtp_range]`. Deterministic per seed.
pub fn sample_unrestricted_parallel(seed: u64, m: usize, wtp_range: f64) -> ParallelAgentType {
    assert!(m >= 1, "need at least one alternative");
    random_parallel(&mut rng_from_seed(seed), m, wtp_range, false)
}

/// Like [`sample_unrestricted_parallel`] but curves are pure shifts of each
/// other everywhere.
pub fn sample_strictly_parallel(seed: u64, m: usize, wtp_range: f64) -> ParallelAgentType {
    assert!(m >= 1, "need at least one alternative");
    random_parallel(&mut rng_from_seed(seed), m, wtp_range, true)
}

/// Profile of `n` random parallel types over `m` alternatives.
pub fn random_parallel_profile<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize, range: f64, strict: bool) -> TypeProfile {
    let agents = (0..n)
        .map(|_| AgentType::parallel(random_parallel(rng, m, range, strict)).expect("sampled parallel type is valid"))
        .collect();
    TypeProfile::new(super::agent::default_names(m), agents).expect("dimensions agree")
}

pub fn sample_parallel_profile(seed: u64, n: usize, m: usize, range: f64) -> TypeProfile {
    random_parallel_profile(&mut rng_from_seed(seed), n, m, range, false)
}

/// Quasi-linear profile with values on the grid `k / 16`, `k` in `0..=64`.
/// Dyadic values keep every sum and difference exact in binary64, so
/// mechanisms that should agree can be compared with `==`.
pub fn random_quasi_linear_profile<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> TypeProfile {
    let agents = (0..n)
        .map(|_| {
            let values = (0..m).map(|_| rng.gen_range(0..=64) as f64 / 16.0).collect();
            AgentType::quasi_linear(values).expect("finite values")
        })
        .collect();
    TypeProfile::new(super::agent::default_names(m), agents).expect("dimensions agree")
}

pub fn sample_quasi_linear_profile(seed: u64, n: usize, m: usize) -> TypeProfile {
    random_quasi_linear_profile(&mut rng_from_seed(seed), n, m)
}

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::WitnessError;
use crate::hexfloat;
use crate::utility::{AgentType, Point, UtilityCurve, UtilityError};

/// Shape of the non-parallel type: `u_a = v_a - z`, `u_c = v_c - z`, and
/// `u_b` with slope `-(1 + gap / z*)` on `[0, 2 z*]` and `-1` afterwards.
/// Extra alternatives get quasi-linear curves with the listed values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonParallelParams {
    #[serde(with = "hexfloat")]
    pub v_a: f64,
    #[serde(with = "hexfloat")]
    pub v_b: f64,
    #[serde(with = "hexfloat")]
    pub v_c: f64,
    #[serde(with = "hexfloat")]
    pub z_star: f64,
    /// Requested `delta2 - delta1`. Negative values give the reverse
    /// orientation.
    #[serde(with = "hexfloat")]
    pub gap: f64,
    #[serde(default, with = "hexfloat::vec")]
    pub extra: Vec<f64>,
}

impl Default for NonParallelParams {
    fn default() -> Self {
        Self {
            v_a: 3.0,
            v_b: 2.0,
            v_c: 1.0,
            z_star: 0.25,
            gap: 0.25,
            extra: Vec::new(),
        }
    }
}

impl NonParallelParams {
    pub fn with_gap(gap: f64) -> Self {
        Self {
            gap,
            ..Self::default()
        }
    }

    /// Random feasible parameters with `|gap| >= 0.05`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let v_c: f64 = rng.gen_range(-1.0..1.0);
        let v_b = v_c + rng.gen_range(0.5..3.0);
        let v_a = v_b + rng.gen_range(0.1..3.0);
        let room: f64 = v_b - v_c;
        let z_star = rng.gen_range(0.05..room / 2.0);
        let magnitude: f64 = rng.gen_range(0.05..(room - z_star).max(0.06));
        let gap = if rng.gen_bool(0.5) {
            magnitude.min(room - z_star)
        } else {
            -magnitude.min(z_star * 0.9)
        };
        let extra = (0..rng.gen_range(0..3)).map(|_| rng.gen_range(v_c..v_a)).collect();
        Self {
            v_a,
            v_b,
            v_c,
            z_star,
            gap,
            extra,
        }
    }
}

/// A non-parallel type together with the quantities that certify it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonParallelWitness {
    pub params: NonParallelParams,
    pub u2_star: AgentType,
    /// Favourite alternative at zero payment.
    pub a: usize,
    pub b: usize,
    /// A least-preferred alternative at zero payment.
    pub least: usize,
    #[serde(with = "hexfloat")]
    pub z_star: f64,
    /// `u_a^{-1}(v_b)`.
    #[serde(with = "hexfloat")]
    pub delta1: f64,
    /// `u_a^{-1}(w) - z*`.
    #[serde(with = "hexfloat")]
    pub delta2: f64,
    /// `u_b(z*)`.
    #[serde(with = "hexfloat")]
    pub w: f64,
}

impl NonParallelWitness {
    /// `true` when `delta2 > delta1`.
    pub fn forward(&self) -> bool {
        self.delta2 > self.delta1
    }
}

/// Builds the kinked non-parallel type described by `params`.
pub fn build_nonparallel_type(params: &NonParallelParams) -> Result<NonParallelWitness, WitnessError> {
    let NonParallelParams {
        v_a,
        v_b,
        v_c,
        z_star,
        gap,
        ..
    } = *params;
    let infeasible = |why: &str| Err(WitnessError::Infeasible(why.to_string()));
    if [v_a, v_b, v_c, z_star, gap].iter().any(|x| !x.is_finite()) {
        return infeasible("parameters must be finite");
    }
    if gap == 0.0 {
        return infeasible("a zero gap gives a parallel type");
    }
    if z_star <= 0.0 {
        return infeasible("z* must be positive");
    }
    if !(v_a >= v_b && v_b > v_c) {
        return infeasible("values must satisfy v_a >= v_b > v_c");
    }
    if params.extra.iter().any(|&v| !(v >= v_c && v <= v_a)) {
        return infeasible("extra values must lie in [v_c, v_a]");
    }
    let slope = 1.0 + gap / z_star;
    if slope <= 0.0 {
        return infeasible("gap must exceed -z*");
    }
    let w = v_b - slope * z_star;
    // z* has to lie within [0, p_b], strictly inside when the gap is negative
    if w < v_c || (gap < 0.0 && w <= v_c) {
        return infeasible("gap too large: u_b(z*) falls below the least value");
    }
    let kink = 2.0 * z_star;
    let ub = UtilityCurve::new(vec![Point::new(0.0, v_b), Point::new(kink, v_b - slope * kink)], -slope, -1.0).map_err(UtilityError::from)?;
    let mut curves = vec![UtilityCurve::quasi_linear(v_a), ub, UtilityCurve::quasi_linear(v_c)];
    curves.extend(params.extra.iter().map(|&v| UtilityCurve::quasi_linear(v)));
    let u2_star = AgentType::piecewise(curves)?;
    let ua = u2_star.curve(0);
    let delta1 = ua.invert(v_b);
    let w = u2_star.curve(1).evaluate(z_star);
    let delta2 = ua.invert(w) - z_star;
    Ok(NonParallelWitness {
        params: params.clone(),
        u2_star,
        a: 0,
        b: 1,
        least: 2,
        z_star,
        delta1,
        delta2,
        w,
    })
}

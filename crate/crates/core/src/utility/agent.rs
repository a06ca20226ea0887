use serde::{Deserialize, Serialize};

use super::curve::{Point, UtilityCurve};
use super::UtilityError;
use crate::hexfloat;

/// Which of the two slopes a two-slope curve uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeChoice {
    Alpha,
    Beta,
}

/// Globally linear curves `u_a(z) = v_a - s_a z` with `s_a` one of two
/// fixed slopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoSlopeAgentType {
    #[serde(with = "hexfloat")]
    pub alpha: f64,
    #[serde(with = "hexfloat")]
    pub beta: f64,
    #[serde(with = "hexfloat::vec")]
    pub values: Vec<f64>,
    pub slopes: Vec<SlopeChoice>,
}

impl TwoSlopeAgentType {
    pub fn slope(&self, a: usize) -> f64 {
        match self.slopes[a] {
            SlopeChoice::Alpha => self.alpha,
            SlopeChoice::Beta => self.beta,
        }
    }
}

/// Per-alternative extrapolation slopes (negative) used outside `[0, p_a]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tail {
    #[serde(with = "hexfloat")]
    pub left: f64,
    #[serde(with = "hexfloat")]
    pub right: f64,
}

/// A parallel type given by the least-preferred curve and a wtp vector.
///
/// Alternative `a` gets `base` shifted right by `p_a`. Without tails the
/// shift holds everywhere (strictly parallel). With tails, each curve is
/// kept only on `[0, p_a]` and extrapolated with its own slopes outside,
/// which preserves parallelism but usually not strict parallelism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelAgentType {
    pub base: UtilityCurve,
    #[serde(with = "hexfloat::vec")]
    pub wtp: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tails: Option<Vec<Tail>>,
}

impl ParallelAgentType {
    pub fn new(base: UtilityCurve, wtp: Vec<f64>) -> Self {
        Self {
            base,
            wtp,
            tails: None,
        }
    }

    /// Quasi-linear-shaped parallel type with the given wtp vector.
    pub fn with_wtp(wtp: Vec<f64>) -> Self {
        Self::new(UtilityCurve::quasi_linear(0.0), wtp)
    }

    fn curves(&self) -> Result<Vec<UtilityCurve>, UtilityError> {
        if self.wtp.is_empty() {
            return Err(UtilityError::NoAlternatives);
        }
        for (a, &p) in self.wtp.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(UtilityError::BadWtp { alternative: a, wtp: p });
            }
        }
        if !self.wtp.contains(&0.0) {
            return Err(UtilityError::NoZeroWtp);
        }
        if let Some(tails) = &self.tails {
            if tails.len() != self.wtp.len() {
                return Err(UtilityError::Dimension {
                    what: "tails",
                    expected: self.wtp.len(),
                    got: tails.len(),
                });
            }
        }
        let mut out = Vec::with_capacity(self.wtp.len());
        for (a, &p) in self.wtp.iter().enumerate() {
            let shifted = shift_curve(&self.base, p)?;
            let curve = match &self.tails {
                None => shifted,
                Some(tails) => shifted.clipped(0.0, p, tails[a].left, tails[a].right)?,
            };
            out.push(curve);
        }
        Ok(out)
    }
}

/// `base` translated right by `p`, with exact breakpoints at payment 0
/// and at `p` so that values and wtp come out exactly.
fn shift_curve(base: &UtilityCurve, p: f64) -> Result<UtilityCurve, UtilityError> {
    let anchors = if p == 0.0 {
        vec![Point::new(0.0, base.evaluate(0.0))]
    } else {
        vec![Point::new(0.0, base.evaluate(-p)), Point::new(p, base.evaluate(0.0))]
    };
    let near = |x: f64| {
        anchors
            .iter()
            .any(|q| (q.payment - x).abs() <= 1e-9 * q.payment.abs().max(1.0))
    };
    let mut points: Vec<Point> = base
        .points()
        .iter()
        .map(|q| Point::new(q.payment + p, q.utility))
        .filter(|q| !near(q.payment))
        .collect();
    points.extend(anchors.iter().copied());
    points.sort_by(|x, y| x.payment.total_cmp(&y.payment));
    Ok(UtilityCurve::new(points, base.left_slope(), base.right_slope())?)
}

/// How an [`AgentType`] was described; this is what gets serialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TypeKind {
    Quasilinear {
        #[serde(with = "hexfloat::vec")]
        values: Vec<f64>,
    },
    Linear {
        #[serde(with = "hexfloat")]
        alpha: f64,
        #[serde(with = "hexfloat::vec")]
        values: Vec<f64>,
    },
    Parallel(ParallelAgentType),
    TwoSlope(TwoSlopeAgentType),
    Piecewise {
        curves: Vec<UtilityCurve>,
    },
}

/// One utility curve per alternative, with values and wtp precomputed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TypeKind", into = "TypeKind")]
pub struct AgentType {
    kind: TypeKind,
    curves: Vec<UtilityCurve>,
    values: Vec<f64>,
    wtp: Vec<f64>,
}

impl TryFrom<TypeKind> for AgentType {
    type Error = UtilityError;
    fn try_from(kind: TypeKind) -> Result<Self, UtilityError> {
        AgentType::from_kind(kind)
    }
}

impl From<AgentType> for TypeKind {
    fn from(t: AgentType) -> Self {
        t.kind
    }
}

fn linear_curves(values: &[f64], slopes: impl Fn(usize) -> f64) -> Result<Vec<UtilityCurve>, UtilityError> {
    values
        .iter()
        .enumerate()
        .map(|(a, &v)| {
            if !v.is_finite() {
                return Err(UtilityError::NonFiniteValue { alternative: a });
            }
            Ok(UtilityCurve::linear(v, slopes(a))?)
        })
        .collect()
}

impl AgentType {
    pub fn from_kind(kind: TypeKind) -> Result<Self, UtilityError> {
        let curves = match &kind {
            TypeKind::Quasilinear { values } => linear_curves(values, |_| 1.0)?,
            TypeKind::Linear { alpha, values } => linear_curves(values, |_| *alpha)?,
            TypeKind::TwoSlope(t) => {
                if t.slopes.len() != t.values.len() {
                    return Err(UtilityError::Dimension {
                        what: "slopes",
                        expected: t.values.len(),
                        got: t.slopes.len(),
                    });
                }
                if !(t.alpha > 0.0 && t.beta > 0.0 && t.alpha.is_finite() && t.beta.is_finite()) {
                    return Err(UtilityError::BadTwoSlope { alpha: t.alpha, beta: t.beta });
                }
                if t.alpha == t.beta {
                    return Err(UtilityError::EqualSlopes(t.alpha));
                }
                linear_curves(&t.values, |a| t.slope(a))?
            }
            TypeKind::Parallel(p) => p.curves()?,
            TypeKind::Piecewise { curves } => curves.clone(),
        };
        if curves.is_empty() {
            return Err(UtilityError::NoAlternatives);
        }
        let values: Vec<f64> = curves.iter().map(UtilityCurve::value).collect();
        let wtp = wtp_at_level(&curves, &values, 0.0);
        debug_assert!(wtp.iter().all(|&p| p >= 0.0));
        debug_assert!(wtp.contains(&0.0));
        Ok(Self {
            kind,
            curves,
            values,
            wtp,
        })
    }

    pub fn quasi_linear(values: Vec<f64>) -> Result<Self, UtilityError> {
        Self::from_kind(TypeKind::Quasilinear { values })
    }

    /// Linear curves `v_a - alpha z` sharing one slope.
    pub fn linear(alpha: f64, values: Vec<f64>) -> Result<Self, UtilityError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(UtilityError::Curve(super::CurveError::BadSlope(-alpha)));
        }
        Self::from_kind(TypeKind::Linear { alpha, values })
    }

    pub fn parallel(p: ParallelAgentType) -> Result<Self, UtilityError> {
        Self::from_kind(TypeKind::Parallel(p))
    }

    pub fn two_slope(t: TwoSlopeAgentType) -> Result<Self, UtilityError> {
        Self::from_kind(TypeKind::TwoSlope(t))
    }

    pub fn piecewise(curves: Vec<UtilityCurve>) -> Result<Self, UtilityError> {
        Self::from_kind(TypeKind::Piecewise { curves })
    }

    /// Parallel type whose willingness to pay is exactly `wtp`.
    pub fn with_wtp(wtp: Vec<f64>) -> Result<Self, UtilityError> {
        Self::parallel(ParallelAgentType::with_wtp(wtp))
    }

    pub fn kind(&self) -> &TypeKind {
        &self.kind
    }

    pub fn num_alternatives(&self) -> usize {
        self.curves.len()
    }

    pub fn curves(&self) -> &[UtilityCurve] {
        &self.curves
    }

    pub fn curve(&self, a: usize) -> &UtilityCurve {
        &self.curves[a]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn wtp(&self) -> &[f64] {
        &self.wtp
    }

    /// `u_a(z)`.
    pub fn utility(&self, a: usize, z: f64) -> f64 {
        self.curves[a].evaluate(z)
    }

    /// Willingness to pay measured from payment level `z_star`:
    /// `p_a(z*) = u_a^{-1}(min_b u_b(z*))`. At `z_star = 0` this is
    /// bit-identical to [`wtp`](Self::wtp).
    pub fn wtp_wrt(&self, z_star: f64) -> Vec<f64> {
        let levels: Vec<f64> = self.curves.iter().map(|c| c.evaluate(z_star)).collect();
        wtp_at_level(&self.curves, &levels, z_star)
    }

    /// The underlying base curve and shift vector when the type was built
    /// as a parallel type.
    pub fn as_parallel(&self) -> Option<&ParallelAgentType> {
        match &self.kind {
            TypeKind::Parallel(p) => Some(p),
            _ => None,
        }
    }
}

fn wtp_at_level(curves: &[UtilityCurve], levels: &[f64], z_star: f64) -> Vec<f64> {
    let floor = levels.iter().copied().fold(f64::INFINITY, f64::min);
    curves
        .iter()
        .zip(levels)
        .map(|(c, &l)| {
            if l == floor {
                z_star
            } else {
                c.invert(floor).max(z_star)
            }
        })
        .collect()
}

/// Types of all agents over a shared, named set of alternatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProfileDoc", into = "ProfileDoc")]
pub struct TypeProfile {
    alternatives: Vec<String>,
    agents: Vec<AgentType>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    alternatives: Vec<String>,
    agents: Vec<AgentType>,
}

impl TryFrom<ProfileDoc> for TypeProfile {
    type Error = UtilityError;
    fn try_from(d: ProfileDoc) -> Result<Self, UtilityError> {
        TypeProfile::new(d.alternatives, d.agents)
    }
}

impl From<TypeProfile> for ProfileDoc {
    fn from(p: TypeProfile) -> Self {
        ProfileDoc {
            alternatives: p.alternatives,
            agents: p.agents,
        }
    }
}

/// Default alternative names: `a`, `b`, ..., `z`, then `x26`, `x27`, ...
pub fn default_names(m: usize) -> Vec<String> {
    (0..m)
        .map(|i| {
            if i < 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("x{i}")
            }
        })
        .collect()
}

impl TypeProfile {
    pub fn new(alternatives: Vec<String>, agents: Vec<AgentType>) -> Result<Self, UtilityError> {
        if alternatives.is_empty() {
            return Err(UtilityError::NoAlternatives);
        }
        for (i, name) in alternatives.iter().enumerate() {
            if alternatives[..i].contains(name) {
                return Err(UtilityError::DuplicateAlternative(name.clone()));
            }
        }
        for t in &agents {
            if t.num_alternatives() != alternatives.len() {
                return Err(UtilityError::Dimension {
                    what: "agent curves",
                    expected: alternatives.len(),
                    got: t.num_alternatives(),
                });
            }
        }
        Ok(Self { alternatives, agents })
    }

    /// Profile with alternatives named `a`, `b`, `c`, ...
    pub fn unnamed(agents: Vec<AgentType>) -> Result<Self, UtilityError> {
        let m = agents.first().map_or(0, AgentType::num_alternatives);
        Self::new(default_names(m), agents)
    }

    /// Profile of parallel types with the given wtp rows.
    pub fn from_wtp(rows: &[Vec<f64>]) -> Result<Self, UtilityError> {
        let agents = rows
            .iter()
            .map(|r| AgentType::with_wtp(r.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::unnamed(agents)
    }

    pub fn alternatives(&self) -> &[String] {
        &self.alternatives
    }

    pub fn num_alternatives(&self) -> usize {
        self.alternatives.len()
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn agents(&self) -> &[AgentType] {
        &self.agents
    }

    pub fn agent(&self, i: usize) -> &AgentType {
        &self.agents[i]
    }

    pub fn alternative_index(&self, name: &str) -> Option<usize> {
        self.alternatives.iter().position(|n| n == name)
    }

    /// Copy of the profile with agent `i` reporting `t` instead.
    pub fn with_agent(&self, i: usize, t: AgentType) -> Result<Self, UtilityError> {
        if t.num_alternatives() != self.num_alternatives() {
            return Err(UtilityError::Dimension {
                what: "agent curves",
                expected: self.num_alternatives(),
                got: t.num_alternatives(),
            });
        }
        let mut agents = self.agents.clone();
        agents[i] = t;
        Ok(Self {
            alternatives: self.alternatives.clone(),
            agents,
        })
    }

    /// wtp matrix, one row per agent.
    pub fn wtp_matrix(&self) -> Vec<Vec<f64>> {
        self.agents.iter().map(|t| t.wtp().to_vec()).collect()
    }
}

//! Deciding whether a type is parallel, strictly parallel, or parallel with
//! respect to a payment level.
//!
//! All curves are piecewise linear, so the translation identity
//! `u_a(z + p_a - p_b) = u_b(z)` holds on an interval iff it holds at every
//! breakpoint of both sides that falls in the interval (plus the endpoints).
//! The checks evaluate exactly those points and additionally a uniform grid.

use serde::{Deserialize, Serialize};

use super::agent::AgentType;
use super::UtilityError;
use crate::hexfloat;

/// Absolute tolerance for the translation identity.
pub const PARALLEL_TOL: f64 = 1e-9;

/// Number of grid cells per checked interval when no explicit step is given.
pub const DEFAULT_GRID_CELLS: usize = 64;

/// First point where the translation identity fails: `lhs = u_a(z + p_a - p_b)`,
/// `rhs = u_b(z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParallelViolation {
    pub a: usize,
    pub b: usize,
    #[serde(with = "hexfloat")]
    pub z: f64,
    #[serde(with = "hexfloat")]
    pub lhs: f64,
    #[serde(with = "hexfloat")]
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParallelVerdict {
    pub violation: Option<ParallelViolation>,
    /// Number of `(a, b, z)` triples evaluated.
    pub points_checked: usize,
}

impl ParallelVerdict {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

fn check_step(step: Option<f64>) -> Result<(), UtilityError> {
    match step {
        Some(s) if !(s > 0.0 && s.is_finite()) => Err(UtilityError::BadGridStep(s)),
        _ => Ok(()),
    }
}

/// Grid over `[lo, hi]` with the given step, or `DEFAULT_GRID_CELLS` cells.
fn grid(lo: f64, hi: f64, step: Option<f64>) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    let cells = match step {
        Some(s) => ((hi - lo) / s).ceil().min(1e6) as usize,
        None => DEFAULT_GRID_CELLS,
    }
    .max(1);
    (0..=cells)
        .map(|k| if k == cells { hi } else { lo + (hi - lo) * k as f64 / cells as f64 })
        .collect()
}

fn first_violation(
    t: &AgentType,
    a: usize,
    b: usize,
    shift: f64,
    mut zs: Vec<f64>,
    checked: &mut usize,
) -> Option<ParallelViolation> {
    zs.sort_by(f64::total_cmp);
    zs.dedup();
    let (ca, cb) = (t.curve(a), t.curve(b));
    for z in zs {
        *checked += 1;
        let lhs = ca.evaluate(z + shift);
        let rhs = cb.evaluate(z);
        if (lhs - rhs).abs() > PARALLEL_TOL {
            return Some(ParallelViolation { a, b, z, lhs, rhs });
        }
    }
    None
}

fn breakpoints_in(t: &AgentType, a: usize, b: usize, shift: f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut zs: Vec<f64> = t.curve(b).points().iter().map(|p| p.payment).collect();
    zs.extend(t.curve(a).points().iter().map(|p| p.payment - shift));
    zs.retain(|&z| z >= lo && z <= hi);
    zs
}

/// Parallel with respect to `z_star`: for every ordered pair with
/// `u_a(z*) >= u_b(z*)`, the identity holds on `[z*, p_b(z*)]` with shifts
/// taken from [`AgentType::wtp_wrt`].
pub fn is_parallel_wrt(t: &AgentType, z_star: f64, grid_step: Option<f64>) -> Result<ParallelVerdict, UtilityError> {
    check_step(grid_step)?;
    let m = t.num_alternatives();
    let mut checked = 0;
    // With one or two alternatives the pair set reduces to the wtp
    // definition itself.
    if m <= 2 {
        return Ok(ParallelVerdict {
            violation: None,
            points_checked: 0,
        });
    }
    let p = t.wtp_wrt(z_star);
    let levels: Vec<f64> = t.curves().iter().map(|c| c.evaluate(z_star)).collect();
    for a in 0..m {
        for b in 0..m {
            if a == b || levels[a] < levels[b] {
                continue;
            }
            let shift = p[a] - p[b];
            let (lo, hi) = (z_star, p[b]);
            let mut zs = breakpoints_in(t, a, b, shift, lo, hi);
            zs.extend(grid(lo, hi, grid_step));
            if let Some(v) = first_violation(t, a, b, shift, zs, &mut checked) {
                return Ok(ParallelVerdict {
                    violation: Some(v),
                    points_checked: checked,
                });
            }
        }
    }
    Ok(ParallelVerdict {
        violation: None,
        points_checked: checked,
    })
}

/// Parallel on the IR-relevant range `[0, p_b]`.
pub fn is_parallel(t: &AgentType, grid_step: Option<f64>) -> Result<ParallelVerdict, UtilityError> {
    is_parallel_wrt(t, 0.0, grid_step)
}

/// Translation identity for all payments. Beyond the outermost breakpoints
/// both sides are linear, so equal end slopes finish the argument.
pub fn is_strictly_parallel(t: &AgentType, grid_step: Option<f64>) -> Result<ParallelVerdict, UtilityError> {
    check_step(grid_step)?;
    let m = t.num_alternatives();
    let p = t.wtp();
    let mut checked = 0;
    for a in 0..m {
        for b in 0..m {
            if a == b || t.values()[a] < t.values()[b] {
                continue;
            }
            let shift = p[a] - p[b];
            let (ca, cb) = (t.curve(a), t.curve(b));
            let mut zs = breakpoints_in(t, a, b, shift, f64::NEG_INFINITY, f64::INFINITY);
            zs.push(0.0);
            let lo = zs.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
            let hi = zs.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1.0;
            zs.extend(grid(lo, hi, grid_step));
            if let Some(v) = first_violation(t, a, b, shift, zs, &mut checked) {
                return Ok(ParallelVerdict {
                    violation: Some(v),
                    points_checked: checked,
                });
            }
            let slope_gap = (ca.left_slope() - cb.left_slope())
                .abs()
                .max((ca.right_slope() - cb.right_slope()).abs());
            if slope_gap > PARALLEL_TOL {
                // report the disagreement one unit past the grid
                let z = if (ca.left_slope() - cb.left_slope()).abs() > PARALLEL_TOL { lo - 1.0 } else { hi + 1.0 };
                checked += 1;
                return Ok(ParallelVerdict {
                    violation: Some(ParallelViolation {
                        a,
                        b,
                        z,
                        lhs: ca.evaluate(z + shift),
                        rhs: cb.evaluate(z),
                    }),
                    points_checked: checked,
                });
            }
        }
    }
    Ok(ParallelVerdict {
        violation: None,
        points_checked: checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::utility::curve::{Point, UtilityCurve};

    fn fig2_type() -> AgentType {
        let ub = UtilityCurve::new(vec![Point::new(0.0, 2.0), Point::new(0.5, 1.0)], -2.0, -1.0).unwrap();
        AgentType::piecewise(vec![UtilityCurve::quasi_linear(3.0), ub, UtilityCurve::quasi_linear(1.0)]).unwrap()
    }

    #[test]
    fn quasi_linear_is_parallel_and_strictly_parallel() {
        let t = AgentType::quasi_linear(vec![4.0, 1.0, 0.0, 2.5]).unwrap();
        assert!(is_parallel(&t, None).unwrap().holds());
        assert!(is_strictly_parallel(&t, None).unwrap().holds());
    }

    #[test]
    fn kinked_middle_curve_is_not_parallel() {
        let t = fig2_type();
        assert_eq!(t.wtp(), &[2.0, 0.5, 0.0]);
        // at utility 1.5 the horizontal gap is 1.25, but p_a - p_b = 1.5
        assert_eq!(t.curve(0).invert(1.5) - t.curve(1).invert(1.5), 1.25);
        let v = is_parallel(&t, None).unwrap().violation.unwrap();
        assert_eq!((v.a, v.b), (0, 1));
        assert_eq!(v.z, 0.0);
        assert_eq!(v.lhs, 1.5);
        assert_eq!(v.rhs, 2.0);
    }

    #[test]
    fn two_alternatives_are_always_parallel() {
        let ub = UtilityCurve::new(vec![Point::new(0.0, 2.0), Point::new(0.3, 1.0)], -4.0, -0.1).unwrap();
        let t = AgentType::piecewise(vec![UtilityCurve::quasi_linear(0.0), ub]).unwrap();
        assert!(is_parallel(&t, Some(0.01)).unwrap().holds());
    }

    #[test]
    fn perturbed_left_slope_is_parallel_but_not_strictly() {
        let ua = UtilityCurve::new(vec![Point::new(0.0, 4.0)], -2.0, -1.0).unwrap();
        let t = AgentType::piecewise(vec![ua, UtilityCurve::quasi_linear(1.0), UtilityCurve::quasi_linear(0.0)]).unwrap();
        assert!(is_parallel(&t, None).unwrap().holds());
        let v = is_strictly_parallel(&t, None).unwrap().violation.unwrap();
        assert_eq!(v.a, 0);
        assert!(v.z < 0.0);
    }

    #[test]
    fn single_alternative_is_vacuous() {
        let t = AgentType::quasi_linear(vec![1.0]).unwrap();
        assert!(is_parallel(&t, None).unwrap().holds());
        assert!(is_strictly_parallel(&t, None).unwrap().holds());
    }

    #[test]
    fn parallel_only_above_a_payment_level() {
        let ub = UtilityCurve::new(vec![Point::new(0.0, 1.5), Point::new(1.0, 0.0)], -1.5, -1.0).unwrap();
        let t = AgentType::piecewise(vec![UtilityCurve::quasi_linear(4.0), ub, UtilityCurve::quasi_linear(0.0)]).unwrap();
        assert_eq!(t.wtp_wrt(1.0), vec![5.0, 2.0, 1.0]);
        assert!(!is_parallel(&t, None).unwrap().holds());
        assert!(is_parallel_wrt(&t, 1.0, None).unwrap().holds());
    }

    #[test]
    fn rejects_non_positive_grid_step() {
        let t = AgentType::quasi_linear(vec![1.0, 0.0, 2.0]).unwrap();
        assert!(matches!(is_parallel(&t, Some(0.0)), Err(UtilityError::BadGridStep(_))));
    }
}

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hexfloat;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("a utility curve needs at least one breakpoint")]
    Empty,
    #[error("breakpoint {index} is not finite")]
    NonFinite { index: usize },
    #[error("breakpoints must be strictly increasing in payment and strictly decreasing in utility (at index {index})")]
    NotStrictlyDecreasing { index: usize },
    #[error("extrapolation slope {0} must be finite and strictly negative")]
    BadSlope(f64),
}

/// A `(payment, utility)` breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    #[serde(with = "hexfloat")]
    pub payment: f64,
    #[serde(with = "hexfloat")]
    pub utility: f64,
}

impl Point {
    pub fn new(payment: f64, utility: f64) -> Self {
        Self { payment, utility }
    }
}

/// Strictly decreasing, continuous, piecewise-linear map from payment to
/// utility.
///
/// Between breakpoints the curve interpolates linearly; before the first and
/// after the last breakpoint it extrapolates with `left_slope` and
/// `right_slope`, both strictly negative. That makes the curve a bijection on
/// the reals, so [`invert`](Self::invert) is total, and it guarantees utility
/// tends to `-inf` as payment grows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveDoc", into = "CurveDoc")]
pub struct UtilityCurve {
    points: Vec<Point>,
    left_slope: f64,
    right_slope: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveDoc {
    points: Vec<Point>,
    #[serde(with = "hexfloat")]
    left_slope: f64,
    #[serde(with = "hexfloat")]
    right_slope: f64,
}

impl TryFrom<CurveDoc> for UtilityCurve {
    type Error = CurveError;
    fn try_from(doc: CurveDoc) -> Result<Self, CurveError> {
        UtilityCurve::new(doc.points, doc.left_slope, doc.right_slope)
    }
}

impl From<UtilityCurve> for CurveDoc {
    fn from(c: UtilityCurve) -> Self {
        CurveDoc {
            points: c.points,
            left_slope: c.left_slope,
            right_slope: c.right_slope,
        }
    }
}

fn check_slope(s: f64) -> Result<(), CurveError> {
    if s.is_finite() && s < 0.0 {
        Ok(())
    } else {
        Err(CurveError::BadSlope(s))
    }
}

impl UtilityCurve {
    pub fn new(points: Vec<Point>, left_slope: f64, right_slope: f64) -> Result<Self, CurveError> {
        if points.is_empty() {
            return Err(CurveError::Empty);
        }
        for (index, p) in points.iter().enumerate() {
            if !p.payment.is_finite() || !p.utility.is_finite() {
                return Err(CurveError::NonFinite { index });
            }
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(w[1].payment > w[0].payment && w[1].utility < w[0].utility) {
                return Err(CurveError::NotStrictlyDecreasing { index: i + 1 });
            }
        }
        check_slope(left_slope)?;
        check_slope(right_slope)?;
        Ok(Self {
            points,
            left_slope,
            right_slope,
        })
    }

    /// `u(z) = value - slope * z` everywhere. `slope` is the (positive)
    /// marginal disutility of money.
    pub fn linear(value: f64, slope: f64) -> Result<Self, CurveError> {
        Self::new(vec![Point::new(0.0, value)], -slope, -slope)
    }

    /// `u(z) = value - z`.
    pub fn quasi_linear(value: f64) -> Self {
        Self::linear(value, 1.0).expect("unit slope is valid")
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn left_slope(&self) -> f64 {
        self.left_slope
    }

    pub fn right_slope(&self) -> f64 {
        self.right_slope
    }

    /// Utility at zero payment.
    pub fn value(&self) -> f64 {
        self.evaluate(0.0)
    }

    pub fn evaluate(&self, z: f64) -> f64 {
        let pts = &self.points;
        let first = pts[0];
        let last = pts[pts.len() - 1];
        if z <= first.payment {
            if z == first.payment {
                return first.utility;
            }
            return first.utility + self.left_slope * (z - first.payment);
        }
        if z >= last.payment {
            if z == last.payment {
                return last.utility;
            }
            return last.utility + self.right_slope * (z - last.payment);
        }
        // first.payment < z < last.payment, so 1 <= idx <= len-1
        let idx = pts.partition_point(|p| p.payment <= z);
        let (p0, p1) = (pts[idx - 1], pts[idx]);
        if z == p0.payment {
            return p0.utility;
        }
        let t = (z - p0.payment) / (p1.payment - p0.payment);
        p0.utility + t * (p1.utility - p0.utility)
    }

    /// The payment at which the curve reaches utility `w`.
    pub fn invert(&self, w: f64) -> f64 {
        let pts = &self.points;
        let first = pts[0];
        let last = pts[pts.len() - 1];
        if w >= first.utility {
            if w == first.utility {
                return first.payment;
            }
            return first.payment + (w - first.utility) / self.left_slope;
        }
        if w <= last.utility {
            if w == last.utility {
                return last.payment;
            }
            return last.payment + (w - last.utility) / self.right_slope;
        }
        // utilities are decreasing: find first point with utility < w
        let idx = pts.partition_point(|p| p.utility >= w);
        let (p0, p1) = (pts[idx - 1], pts[idx]);
        if w == p0.utility {
            return p0.payment;
        }
        let t = (w - p0.utility) / (p1.utility - p0.utility);
        p0.payment + t * (p1.payment - p0.payment)
    }

    /// Slope of the segment immediately left of `z`.
    pub fn slope_left_of(&self, z: f64) -> f64 {
        let pts = &self.points;
        let idx = pts.partition_point(|p| p.payment < z);
        if idx == 0 {
            self.left_slope
        } else if idx == pts.len() && z > pts[idx - 1].payment {
            self.right_slope
        } else if idx == pts.len() {
            // z equals the last breakpoint
            if idx >= 2 {
                segment_slope(pts[idx - 2], pts[idx - 1])
            } else {
                self.left_slope
            }
        } else if idx == 0 || pts[idx - 1].payment >= z {
            self.left_slope
        } else {
            segment_slope(pts[idx - 1], pts[idx])
        }
    }

    /// Slope of the segment immediately right of `z`.
    pub fn slope_right_of(&self, z: f64) -> f64 {
        let pts = &self.points;
        let idx = pts.partition_point(|p| p.payment <= z);
        if idx == pts.len() {
            self.right_slope
        } else if idx == 0 {
            self.left_slope
        } else {
            segment_slope(pts[idx - 1], pts[idx])
        }
    }

    /// Curve on `[lo, hi]` taken from `self`, re-anchored with exact
    /// breakpoints at both ends and the given extrapolation slopes outside.
    pub(crate) fn clipped(&self, lo: f64, hi: f64, left: f64, right: f64) -> Result<Self, CurveError> {
        let mut points = vec![Point::new(lo, self.evaluate(lo))];
        for p in &self.points {
            if p.payment > lo && p.payment < hi {
                points.push(*p);
            }
        }
        if hi > lo {
            points.push(Point::new(hi, self.evaluate(hi)));
        }
        Self::new(points, left, right)
    }
}

fn segment_slope(p0: Point, p1: Point) -> f64 {
    (p1.utility - p0.utility) / (p1.payment - p0.payment)
}

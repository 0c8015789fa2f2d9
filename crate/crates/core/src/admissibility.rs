//! Exact Gauss-Bonnet bookkeeping for nets on doubled polygons.
//!
//! A face of a net on the doubled regular n-gon with `y` balanced degree-3
//! corners (turning angle π/3 each) and `x` enclosed cone points (4π/n
//! each) closes up iff `n(6 − y) = 12x`. Everything here is integer or
//! rational arithmetic; angles are rational multiples of π.

use std::f64::consts::PI;

use num_rational::Ratio;
use serde::{Serialize, Serializer};

use crate::error::{NetlabError, Result};

pub type Rational = Ratio<i64>;

fn ser_ratio<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Constraint3Regular {
    pub n: u32,
    /// `(x, y)` pairs with `x ≥ 1`, `1 ≤ y ≤ 5`.
    pub solutions: Vec<(u32, u32)>,
    /// A hexagonal face (`y = 6`) enclosing no cone point is always allowed.
    pub degenerate_allowed: bool,
}

impl Constraint3Regular {
    pub fn contains(&self, x: u32, y: u32) -> bool {
        (y == 6 && x == 0 && self.degenerate_allowed) || self.solutions.contains(&(x, y))
    }
}

pub fn solve_3regular(n: u32) -> Constraint3Regular {
    let solutions = (1..=5u32)
        .filter_map(|y| {
            let num = n as u64 * (6 - y) as u64;
            num.is_multiple_of(12).then_some(((num / 12) as u32, y))
        })
        .filter(|&(x, _)| x >= 1)
        .collect();
    Constraint3Regular {
        n,
        solutions,
        degenerate_allowed: true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ThetaAdmissibility {
    pub admissible: bool,
    pub x: Option<u32>,
}

pub fn theta_admissible(n: u32) -> ThetaAdmissibility {
    let admissible = n.is_multiple_of(3);
    ThetaAdmissibility {
        admissible,
        x: admissible.then_some(n / 3),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BifocalAdmissibility {
    pub admissible: bool,
    pub loop_x: Option<u32>,
    pub outer_x: Option<u32>,
}

pub fn bifocal_admissible(n: u32) -> BifocalAdmissibility {
    let admissible = n.is_multiple_of(12);
    BifocalAdmissibility {
        admissible,
        loop_x: admissible.then_some(5 * n / 12),
        outer_x: admissible.then_some(2 * n / 12),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LoopAngle {
    pub x: u32,
    #[serde(serialize_with = "ser_ratio")]
    pub alpha_over_pi: Rational,
}

impl LoopAngle {
    pub fn radians(&self) -> f64 {
        PI * *self.alpha_over_pi.numer() as f64 / *self.alpha_over_pi.denom() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LoopAngleSet {
    pub n: u32,
    pub entries: Vec<LoopAngle>,
}

/// Turning angle of a one-corner face enclosing `x` cone points.
pub fn loop_turning(n: u32, x: u32) -> Rational {
    Rational::from_integer(2) - Rational::new(4 * x as i64, n as i64)
}

/// Every turning angle in `[0, 2π]` a loop face can have, degenerate
/// values included, largest first.
pub fn figure8_candidate_angles(n: u32) -> Vec<LoopAngle> {
    (0..=n / 2)
        .map(|x| LoopAngle {
            x,
            alpha_over_pi: loop_turning(n, x),
        })
        .collect()
}

/// Loop turning angles strictly between 0 and π.
pub fn figure8_loop_angles(n: u32) -> LoopAngleSet {
    let zero = Rational::from_integer(0);
    let one = Rational::from_integer(1);
    LoopAngleSet {
        n,
        entries: figure8_candidate_angles(n)
            .into_iter()
            .filter(|a| a.alpha_over_pi > zero && a.alpha_over_pi < one)
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TriangleClass {
    pub theta: bool,
    pub bifocal: bool,
    pub figure8: bool,
}

pub const TRIANGLE_TOL: f64 = 1e-10;

fn check_triangle(angles: [f64; 3]) -> Result<()> {
    if angles.iter().any(|a| !(a.is_finite() && *a > 0.0 && *a < PI)) {
        return Err(NetlabError::InvalidTriangle(format!("angles {angles:?} out of range")));
    }
    let sum: f64 = angles.iter().sum();
    if (sum - PI).abs() > 1e-12 {
        return Err(NetlabError::InvalidTriangle(format!("angles sum to {sum}, not π")));
    }
    Ok(())
}

/// Which of the three-face nets a doubled triangle can carry, from its
/// angles in radians.
pub fn classify_triangle(angles: [f64; 3]) -> Result<TriangleClass> {
    check_triangle(angles)?;
    let eq = |a: f64, b: f64| (a - b).abs() <= TRIANGLE_TOL;
    let mut sorted = angles;
    sorted.sort_by(f64::total_cmp);
    Ok(TriangleClass {
        theta: angles.iter().all(|&a| eq(a, PI / 3.0)),
        bifocal: eq(sorted[0], PI / 6.0) && eq(sorted[1], PI / 6.0) && eq(sorted[2], 2.0 * PI / 3.0),
        figure8: eq(angles[0], angles[1]) || eq(angles[1], angles[2]) || eq(angles[0], angles[2]),
    })
}

/// Exact classification for angles given in whole degrees.
pub fn classify_triangle_degrees(deg: [u32; 3]) -> Result<TriangleClass> {
    if deg.contains(&0) || deg.iter().sum::<u32>() != 180 {
        return Err(NetlabError::InvalidTriangle(format!("angles {deg:?} do not form a triangle")));
    }
    let mut sorted = deg;
    sorted.sort_unstable();
    Ok(TriangleClass {
        theta: deg == [60, 60, 60],
        bifocal: sorted == [30, 30, 120],
        figure8: deg[0] == deg[1] || deg[1] == deg[2] || deg[0] == deg[2],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFilter {
    ThreeRegular,
    Theta,
    Bifocal,
    Figure8,
}

/// Admissibility summary for the doubled regular n-gon.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibilityReport {
    pub n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub three_regular: Option<Vec<(u32, u32)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaAdmissibility>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bifocal: Option<BifocalAdmissibility>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure8_angles: Option<Vec<LoopAngle>>,
}

pub fn report(n: u32, filter: Option<GraphFilter>) -> Result<AdmissibilityReport> {
    if n < 3 {
        return Err(NetlabError::InvalidSpec(format!("n = {n} < 3")));
    }
    let want = |g| filter.is_none_or(|f| f == g);
    Ok(AdmissibilityReport {
        n,
        three_regular: want(GraphFilter::ThreeRegular).then(|| solve_3regular(n).solutions),
        theta: want(GraphFilter::Theta).then(|| theta_admissible(n)),
        bifocal: want(GraphFilter::Bifocal).then(|| bifocal_admissible(n)),
        figure8_angles: want(GraphFilter::Figure8).then(|| figure8_loop_angles(n).entries),
    })
}

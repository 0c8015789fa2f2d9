//! Planar primitives shared by the surface model and the tracer.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self { x: c, y: s }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3d cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Counter-clockwise quarter turn.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    pub fn lerp(self, o: Vec2, t: f64) -> Vec2 {
        self + (o - self) * t
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Wrap an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(std::f64::consts::TAU);
    if t >= std::f64::consts::TAU {
        0.0
    } else {
        t
    }
}

/// Smallest absolute difference between two angles, in `[0, π]`.
pub fn angle_between(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(std::f64::consts::TAU - d)
}

/// Affine isometry of the plane: `p ↦ linear · p + offset`, with the linear
/// part stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isometry {
    pub m: [[f64; 2]; 2],
    pub t: Vec2,
}

/// What kind of motion an isometry is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsometryKind {
    Identity,
    Translation,
    Rotation,
    Reflection,
    GlideReflection,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        m: [[1.0, 0.0], [0.0, 1.0]],
        t: Vec2::ZERO,
    };

    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            m: [[c, -s], [s, c]],
            t: Vec2::ZERO,
        }
    }

    pub fn translation(t: Vec2) -> Self {
        Self {
            m: Self::IDENTITY.m,
            t,
        }
    }

    pub fn scaling(s: f64) -> Self {
        Self {
            m: [[s, 0.0], [0.0, s]],
            t: Vec2::ZERO,
        }
    }

    /// Reflection across the line through `a` and `b`.
    pub fn reflection(a: Vec2, b: Vec2) -> Self {
        let u = (b - a).normalized();
        let m = [
            [2.0 * u.x * u.x - 1.0, 2.0 * u.x * u.y],
            [2.0 * u.x * u.y, 2.0 * u.y * u.y - 1.0],
        ];
        let lin = Isometry { m, t: Vec2::ZERO };
        let t = a - lin.apply_vec(a);
        Isometry { m, t }
    }

    pub fn apply(&self, p: Vec2) -> Vec2 {
        self.apply_vec(p) + self.t
    }

    pub fn apply_vec(&self, v: Vec2) -> Vec2 {
        Vec2::new(
            self.m[0][0] * v.x + self.m[0][1] * v.y,
            self.m[1][0] * v.x + self.m[1][1] * v.y,
        )
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let a = self.m;
        let b = other.m;
        let m = [
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ];
        Isometry {
            m,
            t: self.apply(other.t),
        }
    }

    pub fn inverse(&self) -> Isometry {
        // orthogonal linear part: inverse is the transpose
        let m = [[self.m[0][0], self.m[1][0]], [self.m[0][1], self.m[1][1]]];
        let lin = Isometry { m, t: Vec2::ZERO };
        Isometry {
            m,
            t: -lin.apply_vec(self.t),
        }
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn is_orientation_preserving(&self) -> bool {
        self.det() > 0.0
    }

    /// Rotation angle of the linear part (only meaningful when orientation
    /// preserving).
    pub fn rotation_angle(&self) -> f64 {
        self.m[1][0].atan2(self.m[0][0])
    }

    pub fn kind(&self, tol: f64) -> IsometryKind {
        if self.is_orientation_preserving() {
            let ang = angle_between(self.rotation_angle(), 0.0);
            if ang > tol {
                IsometryKind::Rotation
            } else if self.t.norm() > tol {
                IsometryKind::Translation
            } else {
                IsometryKind::Identity
            }
        } else {
            // axis direction u satisfies M u = u; glide component is t·u
            let axis = Vec2::new(self.m[0][0] + 1.0, self.m[1][0]);
            let axis = if axis.norm() < 1e-12 {
                Vec2::new(0.0, 1.0)
            } else {
                axis.normalized()
            };
            if self.t.dot(axis).abs() > tol {
                IsometryKind::GlideReflection
            } else {
                IsometryKind::Reflection
            }
        }
    }
}

/// Closest points between segments `[p0,p1]` and `[q0,q1]`; returns
/// `(distance, s, t)` with the parameters along each segment.
pub fn segment_distance(p0: Vec2, p1: Vec2, q0: Vec2, q1: Vec2) -> (f64, f64, f64) {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let a = d1.dot(d1);
    let e = d2.dot(d2);
    let f = d2.dot(r);
    let eps = 1e-300;
    let (mut s, mut t);
    if a <= eps && e <= eps {
        return (p0.dist(q0), 0.0, 0.0);
    }
    if a <= eps {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(r);
        if e <= eps {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(d2);
            let denom = a * e - b * b;
            s = if denom > 1e-18 * a * e {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            t = (b * s + f) / e;
            if t < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            }
        }
    }
    let cp = p0 + d1 * s;
    let cq = q0 + d2 * t;
    // parallel overlapping segments: also test the endpoints explicitly so the
    // reported distance is the true minimum
    let mut best = (cp.dist(cq), s, t);
    for (pt, ps) in [(p0, 0.0), (p1, 1.0)] {
        let tt = if e > eps { ((pt - q0).dot(d2) / e).clamp(0.0, 1.0) } else { 0.0 };
        let d = pt.dist(q0 + d2 * tt);
        if d < best.0 {
            best = (d, ps, tt);
        }
    }
    for (qt, qs) in [(q0, 0.0), (q1, 1.0)] {
        let ss = if a > eps { ((qt - p0).dot(d1) / a).clamp(0.0, 1.0) } else { 0.0 };
        let d = qt.dist(p0 + d1 * ss);
        if d < best.0 {
            best = (d, ss, qs);
        }
    }
    best
}

/// Distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    let l2 = d.dot(d);
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    p.dist(a + d * t)
}

//! Doubled polygons: two congruent copies of a convex polygon glued along
//! their common boundary. The result is a flat sphere whose curvature sits
//! at the images of the polygon vertices.
//!
//! Both sheets share the planar coordinates of the base polygon. The bottom
//! sheet carries the opposite orientation, so a geodesic crossing edge `e`
//! continues on the other sheet with its planar direction reflected across
//! the line of `e` (the billiard rule).

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{NetlabError, Result};
use crate::geom::{wrap_angle, Isometry, Vec2};

/// Relative tolerance for snapping points onto edges and cone points.
pub const SNAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolygonKind {
    Regular { n: u32 },
    /// Interior angles in radians, listed in counter-clockwise vertex order.
    Triangle { angles: [f64; 3] },
}

/// The base polygon of a doubled surface.
///
/// `scale` is the circumradius for regular polygons and the length of the
/// longest side for triangles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct PolygonSpec {
    pub kind: PolygonKind,
    pub scale: f64,
}

impl PolygonSpec {
    pub fn regular(n: u32, scale: f64) -> Self {
        Self {
            kind: PolygonKind::Regular { n },
            scale,
        }
    }

    pub fn triangle(angles: [f64; 3], scale: f64) -> Self {
        Self {
            kind: PolygonKind::Triangle { angles },
            scale,
        }
    }

    pub fn triangle_degrees(deg: [f64; 3], scale: f64) -> Self {
        Self::triangle(deg.map(f64::to_radians), scale)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(NetlabError::InvalidSpec(format!("scale {} must be positive", self.scale)));
        }
        match self.kind {
            PolygonKind::Regular { n } if n < 3 => {
                Err(NetlabError::InvalidSpec(format!("regular polygon needs n >= 3, got {n}")))
            }
            PolygonKind::Regular { .. } => Ok(()),
            PolygonKind::Triangle { angles } => {
                if angles.iter().any(|a| !(a.is_finite() && *a > 0.0 && *a < PI)) {
                    return Err(NetlabError::InvalidSpec(format!(
                        "triangle angles must lie in (0, π): {angles:?}"
                    )));
                }
                let sum: f64 = angles.iter().sum();
                if (sum - PI).abs() > 1e-12 {
                    return Err(NetlabError::InvalidSpec(format!(
                        "triangle angles sum to {sum}, not π"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn with_scale(&self, scale: f64) -> Self {
        Self { scale, ..*self }
    }

    /// Number of polygon vertices.
    pub fn vertex_count(&self) -> usize {
        match self.kind {
            PolygonKind::Regular { n } => n as usize,
            PolygonKind::Triangle { .. } => 3,
        }
    }

    /// `n` when the base polygon is regular (an equilateral triangle given by
    /// angles is not reported as regular).
    pub fn regular_n(&self) -> Option<u32> {
        match self.kind {
            PolygonKind::Regular { n } => Some(n),
            PolygonKind::Triangle { .. } => None,
        }
    }
}

impl fmt::Display for PolygonSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PolygonKind::Regular { n } => write!(f, "regular {n}-gon (R = {})", self.scale),
            PolygonKind::Triangle { angles } => {
                let d = angles.map(degrees_for_output);
                write!(f, "triangle {}-{}-{} (L = {})", d[0], d[1], d[2], self.scale)
            }
        }
    }
}

fn degrees_for_output(rad: f64) -> f64 {
    let d = rad.to_degrees();
    if (d - d.round()).abs() < 1e-9 {
        d.round()
    } else {
        d
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum SpecRepr {
    Regular {
        n: u32,
        #[serde(default = "one")]
        scale: f64,
    },
    Triangle {
        angles_deg: [f64; 3],
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl TryFrom<SpecRepr> for PolygonSpec {
    type Error = NetlabError;
    fn try_from(r: SpecRepr) -> Result<Self> {
        let spec = match r {
            SpecRepr::Regular { n, scale } => PolygonSpec::regular(n, scale),
            SpecRepr::Triangle { angles_deg, scale } => {
                PolygonSpec::triangle_degrees(angles_deg, scale)
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<PolygonSpec> for SpecRepr {
    fn from(s: PolygonSpec) -> Self {
        match s.kind {
            PolygonKind::Regular { n } => SpecRepr::Regular { n, scale: s.scale },
            PolygonKind::Triangle { angles } => SpecRepr::Triangle {
                angles_deg: angles.map(degrees_for_output),
                scale: s.scale,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sheet {
    Top,
    Bottom,
}

impl Sheet {
    pub fn flip(self) -> Sheet {
        match self {
            Sheet::Top => Sheet::Bottom,
            Sheet::Bottom => Sheet::Top,
        }
    }

    pub fn flipped_times(self, k: usize) -> Sheet {
        if k.is_multiple_of(2) {
            self
        } else {
            self.flip()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Locus {
    Interior,
    OnEdge { edge: usize, t: f64 },
    AtCone { index: usize },
}

/// A point of the doubled surface. Boundary points carry the canonical
/// sheet `Top`: they belong to both sheets at once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub sheet: Sheet,
    pub coords: Vec2,
    pub locus: Locus,
}

impl SurfacePoint {
    pub fn is_on_boundary(&self) -> bool {
        !matches!(self.locus, Locus::Interior)
    }

    /// Identity on the doubled surface (boundary points ignore the sheet).
    pub fn same_point(&self, other: &SurfacePoint, tol: f64) -> bool {
        if self.coords.dist(other.coords) > tol {
            return false;
        }
        match (self.is_on_boundary(), other.is_on_boundary()) {
            (true, true) => true,
            (false, false) => self.sheet == other.sheet,
            _ => false,
        }
    }

    /// The same point seen from the other sheet; boundary points are fixed.
    pub fn other_sheet(&self) -> SurfacePoint {
        if self.is_on_boundary() {
            *self
        } else {
            SurfacePoint {
                sheet: self.sheet.flip(),
                ..*self
            }
        }
    }
}

/// Planar direction in a sheet's chart, stored as an angle in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Direction(f64);

impl Direction {
    pub fn new(angle: f64) -> Self {
        Direction(wrap_angle(angle))
    }

    pub fn from_vec(v: Vec2) -> Self {
        Direction::new(v.angle())
    }

    pub fn angle(self) -> f64 {
        self.0
    }

    pub fn vec(self) -> Vec2 {
        Vec2::from_angle(self.0)
    }

    pub fn reversed(self) -> Direction {
        Direction::new(self.0 + PI)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub index: usize,
    pub position: Vec2,
    pub interior_angle: f64,
    pub curvature: f64,
}

/// An immutable doubled polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    spec: PolygonSpec,
    vertices: Vec<Vec2>,
    cones: Vec<ConePoint>,
}

impl Surface {
    pub fn new(spec: PolygonSpec) -> Result<Self> {
        spec.validate()?;
        let (vertices, cones) = match spec.kind {
            PolygonKind::Regular { n } => {
                let nf = n as f64;
                let interior = PI * (nf - 2.0) / nf;
                let curvature = 4.0 * PI / nf;
                let vertices: Vec<Vec2> = (0..n)
                    .map(|k| Vec2::from_angle(TAU * k as f64 / nf) * spec.scale)
                    .collect();
                let cones = vertices
                    .iter()
                    .enumerate()
                    .map(|(index, &position)| ConePoint {
                        index,
                        position,
                        interior_angle: interior,
                        curvature,
                    })
                    .collect();
                (vertices, cones)
            }
            PolygonKind::Triangle { angles } => {
                let m = (0..3)
                    .fold(0, |best, i| if angles[i] > angles[best] + 1e-15 { i } else { best });
                let (i, j) = ((m + 1) % 3, (m + 2) % 3);
                let mut v = [Vec2::ZERO; 3];
                v[i] = Vec2::ZERO;
                v[j] = Vec2::new(spec.scale, 0.0);
                let side = spec.scale * angles[j].sin() / angles[m].sin();
                v[m] = Vec2::from_angle(angles[i]) * side;
                let cones = (0..3)
                    .map(|k| ConePoint {
                        index: k,
                        position: v[k],
                        interior_angle: angles[k],
                        curvature: TAU - 2.0 * angles[k],
                    })
                    .collect();
                (v.to_vec(), cones)
            }
        };
        Ok(Surface {
            spec,
            vertices,
            cones,
        })
    }

    pub fn spec(&self) -> &PolygonSpec {
        &self.spec
    }

    pub fn scale(&self) -> f64 {
        self.spec.scale
    }

    pub fn tol(&self) -> f64 {
        SNAP_TOL * self.spec.scale
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn cones(&self) -> &[ConePoint] {
        &self.cones
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len()
    }

    /// Edge `e` runs from vertex `e` to vertex `e + 1`.
    pub fn edge(&self, e: usize) -> (Vec2, Vec2) {
        let n = self.vertices.len();
        (self.vertices[e % n], self.vertices[(e + 1) % n])
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let (a, b) = self.edge(e);
        a.dist(b)
    }

    pub fn edge_tangent(&self, e: usize) -> Vec2 {
        let (a, b) = self.edge(e);
        (b - a).normalized()
    }

    pub fn inward_normal(&self, e: usize) -> Vec2 {
        self.edge_tangent(e).perp()
    }

    pub fn edge_point(&self, e: usize, t: f64) -> Vec2 {
        let (a, b) = self.edge(e);
        a.lerp(b, t)
    }

    pub fn edge_reflection(&self, e: usize) -> Isometry {
        let (a, b) = self.edge(e);
        Isometry::reflection(a, b)
    }

    /// Reflect a planar direction across the line of edge `e`.
    pub fn reflect_dir(&self, e: usize, v: Vec2) -> Vec2 {
        let u = self.edge_tangent(e);
        u * (2.0 * v.dot(u)) - v
    }

    pub fn centroid(&self) -> Vec2 {
        let n = self.vertices.len() as f64;
        self.vertices.iter().fold(Vec2::ZERO, |acc, v| acc + *v) * (1.0 / n)
    }

    /// Apothem of a regular polygon.
    pub fn apothem(&self) -> Option<f64> {
        self.spec
            .regular_n()
            .map(|n| self.spec.scale * (PI / n as f64).cos())
    }

    pub fn total_curvature(&self) -> f64 {
        self.cones.iter().map(|c| c.curvature).sum()
    }

    pub fn scaled(&self, s: f64) -> Result<Surface> {
        Surface::new(self.spec.with_scale(self.spec.scale * s))
    }

    pub fn classify_point(&self, p: Vec2) -> Result<Locus> {
        let tol = self.tol();
        for (i, v) in self.vertices.iter().enumerate() {
            if p.dist(*v) <= tol {
                return Ok(Locus::AtCone { index: i });
            }
        }
        let mut on_edge = None;
        for e in 0..self.edge_count() {
            let (a, _) = self.edge(e);
            let depth = (p - a).dot(self.inward_normal(e));
            if depth < -tol {
                return Err(NetlabError::OutsidePolygon { x: p.x, y: p.y });
            }
            if depth <= tol && on_edge.is_none() {
                let t = (p - a).dot(self.edge_tangent(e)) / self.edge_length(e);
                on_edge = Some(Locus::OnEdge {
                    edge: e,
                    t: t.clamp(0.0, 1.0),
                });
            }
        }
        Ok(on_edge.unwrap_or(Locus::Interior))
    }

    /// Build a surface point, classifying its locus.
    pub fn point(&self, sheet: Sheet, coords: Vec2) -> Result<SurfacePoint> {
        let locus = self.classify_point(coords)?;
        let sheet = if matches!(locus, Locus::Interior) { sheet } else { Sheet::Top };
        Ok(SurfacePoint {
            sheet,
            coords,
            locus,
        })
    }

    pub fn edge_midpoint(&self, e: usize) -> Result<SurfacePoint> {
        if e >= self.edge_count() {
            return Err(NetlabError::NoSuchEdge(e));
        }
        Ok(SurfacePoint {
            sheet: Sheet::Top,
            coords: self.edge_point(e, 0.5),
            locus: Locus::OnEdge { edge: e, t: 0.5 },
        })
    }

    /// Express a planar direction on `sheet` in the oriented local chart at
    /// `at`. Interior bottom points use the mirror `y ↦ -y`; edge points use
    /// the reflection across the edge for bottom-sheet directions. Every
    /// chart is orientation-compatible, so counter-clockwise order in the
    /// chart is the surface's counter-clockwise order.
    pub fn to_local(&self, at: &SurfacePoint, sheet: Sheet, planar: Vec2) -> Vec2 {
        match (at.locus, sheet) {
            (_, Sheet::Top) => planar,
            (Locus::OnEdge { edge, .. }, Sheet::Bottom) => self.reflect_dir(edge, planar),
            (_, Sheet::Bottom) => Vec2::new(planar.x, -planar.y),
        }
    }

    /// Inverse of [`Surface::to_local`]: which sheet a local direction
    /// departs into, and its planar direction there.
    pub fn from_local(&self, at: &SurfacePoint, local: Vec2) -> Result<(Sheet, Vec2)> {
        match at.locus {
            Locus::OnEdge { edge, .. } => {
                let inward = local.dot(self.inward_normal(edge));
                if inward.abs() <= 1e-14 * local.norm() {
                    Err(NetlabError::DirectionLeavesPolygon)
                } else if inward > 0.0 {
                    Ok((Sheet::Top, local))
                } else {
                    Ok((Sheet::Bottom, self.reflect_dir(edge, local)))
                }
            }
            Locus::AtCone { index } => Err(NetlabError::StartAtCone(index)),
            Locus::Interior => match at.sheet {
                Sheet::Top => Ok((Sheet::Top, local)),
                Sheet::Bottom => Ok((Sheet::Bottom, Vec2::new(local.x, -local.y))),
            },
        }
    }
}

//! Geodesics on a doubled polygon, traced as billiard trajectories in the
//! base polygon with a sheet flip at every edge crossing.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{NetlabError, Result};
use crate::geom::{angle_between, Isometry, IsometryKind, Vec2};
use crate::surface::{Direction, Locus, Sheet, Surface, SurfacePoint};

/// Angular tolerance for flagging perpendicular crossings.
pub const PERPENDICULAR_TOL: f64 = 1e-10;
/// Relative straightness tolerance for developed paths.
pub const DEVELOP_TOL: f64 = 1e-9;
/// Directions from an edge point this close to the edge (sine of the angle)
/// run along the seam.
pub const SEAM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub max_length: f64,
    pub max_crossings: usize,
}

impl Limits {
    pub fn new(max_length: f64, max_crossings: usize) -> Self {
        Self {
            max_length,
            max_crossings,
        }
    }

    pub fn length(max_length: f64) -> Self {
        Self::new(max_length, usize::MAX)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CrossingWord {
    pub start_sheet: Sheet,
    pub edges: Vec<usize>,
}

impl CrossingWord {
    pub fn new(start_sheet: Sheet, edges: Vec<usize>) -> Self {
        Self { start_sheet, edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Sheet occupied after `k` crossings.
    pub fn sheet_after(&self, k: usize) -> Sheet {
        self.start_sheet.flipped_times(k)
    }

    pub fn end_sheet(&self) -> Sheet {
        self.sheet_after(self.edges.len())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSegment {
    pub sheet: Sheet,
    pub from: Vec2,
    pub to: Vec2,
}

impl PathSegment {
    pub fn length(&self) -> f64 {
        self.from.dist(self.to)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub edge: usize,
    pub point: Vec2,
    /// Parameter along the edge.
    pub t: f64,
    pub perpendicular: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPath {
    pub start: SurfacePoint,
    /// Sheet the path departs into (differs from `start.sheet` only for
    /// boundary starts).
    pub start_sheet: Sheet,
    pub direction: Direction,
    pub word: CrossingWord,
    pub crossings: Vec<Crossing>,
    pub length: f64,
    pub end: SurfacePoint,
    /// Sheet the path arrives on.
    pub end_sheet: Sheet,
    pub end_direction: Direction,
    pub segments: Vec<PathSegment>,
    pub scale: f64,
}

impl GeodesicPath {
    pub fn perpendicular_crossings(&self) -> Vec<usize> {
        self.crossings
            .iter()
            .enumerate()
            .filter(|(_, c)| c.perpendicular)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn record(&self) -> PathRecord {
        PathRecord {
            start: self.start,
            sheet: self.start_sheet,
            direction: self.direction.angle(),
            word: self.word.edges.clone(),
            length: self.length,
            perpendicular_crossings: self.perpendicular_crossings(),
        }
    }

    /// Tangent at the start, in the oriented local chart at `start`.
    pub fn start_tangent(&self, surface: &Surface) -> Vec2 {
        surface.to_local(&self.start, self.start_sheet, self.direction.vec())
    }

    /// Tangent at the end pointing back along the path, in the local chart at
    /// `end`.
    pub fn end_tangent(&self, surface: &Surface) -> Vec2 {
        surface.to_local(&self.end, self.end_sheet, -self.end_direction.vec())
    }
}

/// Serialized form of a traced path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub start: SurfacePoint,
    pub sheet: Sheet,
    pub direction: f64,
    pub word: Vec<usize>,
    pub length: f64,
    pub perpendicular_crossings: Vec<usize>,
}

/// First edge hit by the ray `p + s·d`, ignoring `skip`. Returns the ray
/// parameter and the edge.
pub(crate) fn exit_edge(surface: &Surface, p: Vec2, d: Vec2, skip: &[usize]) -> Option<(f64, usize)> {
    let mut best: Option<(f64, usize)> = None;
    for e in 0..surface.edge_count() {
        if skip.contains(&e) {
            continue;
        }
        let out = -surface.inward_normal(e);
        let den = d.dot(out);
        if den <= 0.0 {
            continue;
        }
        let (a, _) = surface.edge(e);
        let s = ((a - p).dot(out) / den).max(0.0);
        if best.is_none_or(|(bs, _)| s < bs) {
            best = Some((s, e));
        }
    }
    best
}

fn nearest_cone(surface: &Surface, q: Vec2) -> Option<usize> {
    let tol = surface.tol();
    surface
        .vertices()
        .iter()
        .position(|v| v.dist(q) <= tol)
}

/// Trace a geodesic from `start` departing into `sheet` with planar
/// direction `direction`.
pub fn trace(
    surface: &Surface,
    start: &SurfacePoint,
    sheet: Sheet,
    direction: Direction,
    limits: Limits,
) -> Result<GeodesicPath> {
    let mut skip: Vec<usize> = Vec::new();
    let mut sheet = sheet;
    let mut direction = direction;
    match start.locus {
        Locus::AtCone { index } => return Err(NetlabError::StartAtCone(index)),
        Locus::OnEdge { edge, .. } => {
            let inward = direction.vec().dot(surface.inward_normal(edge));
            if inward.abs() <= SEAM_TOL {
                // runs along the seam, which belongs to both sheets
                let u = surface.edge_tangent(edge);
                let u = if direction.vec().dot(u) > 0.0 { u } else { -u };
                direction = Direction::from_vec(u);
                sheet = Sheet::Top;
            } else if inward < 0.0 {
                return Err(NetlabError::DirectionLeavesPolygon);
            }
            skip.push(edge);
        }
        Locus::Interior => sheet = start.sheet,
    }
    let start_sheet = sheet;
    let mut p = start.coords;
    let mut d = direction.vec();
    let mut length = 0.0;
    let mut crossings: Vec<Crossing> = Vec::new();
    let mut edges = Vec::new();
    let mut segments = Vec::new();
    let perp_sin = PERPENDICULAR_TOL.sin();

    let end_coords = loop {
        let remaining = (limits.max_length - length).max(0.0);
        let (s, e) = exit_edge(surface, p, d, &skip).ok_or_else(|| {
            NetlabError::MalformedNet("ray does not leave the polygon".into())
        })?;
        if s >= remaining {
            let q = p + d * remaining;
            if remaining > 0.0 {
                segments.push(PathSegment { sheet, from: p, to: q });
            }
            length += remaining;
            break q;
        }
        let q = p + d * s;
        if let Some(cone) = nearest_cone(surface, q) {
            return Err(NetlabError::SingularHit {
                cone,
                crossings: crossings.len(),
            });
        }
        segments.push(PathSegment { sheet, from: p, to: q });
        length += s;
        if crossings.len() >= limits.max_crossings {
            break q;
        }
        let (a, _) = surface.edge(e);
        let t = (q - a).dot(surface.edge_tangent(e)) / surface.edge_length(e);
        crossings.push(Crossing {
            edge: e,
            point: q,
            t,
            perpendicular: d.dot(surface.edge_tangent(e)).abs() <= perp_sin,
        });
        edges.push(e);
        d = surface.reflect_dir(e, d);
        sheet = sheet.flip();
        p = q;
        skip.clear();
        skip.push(e);
    };

    let end = surface
        .point(sheet, end_coords)
        .unwrap_or(SurfacePoint {
            sheet,
            coords: end_coords,
            locus: Locus::Interior,
        });
    Ok(GeodesicPath {
        start: *start,
        start_sheet,
        direction,
        word: CrossingWord::new(start_sheet, edges),
        crossings,
        length,
        end,
        end_sheet: sheet,
        end_direction: Direction::from_vec(d),
        segments,
        scale: surface.scale(),
    })
}

/// Trace from an interior point on its own sheet.
pub fn trace_from(
    surface: &Surface,
    start: &SurfacePoint,
    direction: Direction,
    limits: Limits,
) -> Result<GeodesicPath> {
    trace(surface, start, start.sheet, direction, limits)
}

/// Trace back from the end of `path` with the reversed arrival direction.
pub fn trace_reverse(surface: &Surface, path: &GeodesicPath, limits: Limits) -> Result<GeodesicPath> {
    trace(
        surface,
        &path.end,
        path.end_sheet,
        path.end_direction.reversed(),
        limits,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct Development {
    /// One isometry per polygon copy; copy `k` is the image of the base
    /// polygon under `isometries[k]`.
    pub isometries: Vec<Isometry>,
    pub start: Vec2,
    pub end: Vec2,
    /// Developed segment endpoints, in path order.
    pub points: Vec<Vec2>,
    pub max_deviation: f64,
}

impl Development {
    pub fn chord_length(&self) -> f64 {
        self.start.dist(self.end)
    }

    /// Composition of all crossing reflections.
    pub fn holonomy(&self) -> Isometry {
        *self.isometries.last().expect("development has at least one copy")
    }
}

pub(crate) fn unfold(surface: &Surface, edges: &[usize]) -> Vec<Isometry> {
    let mut isos = Vec::with_capacity(edges.len() + 1);
    let mut g = Isometry::IDENTITY;
    isos.push(g);
    for &e in edges {
        g = g.compose(&surface.edge_reflection(e));
        isos.push(g);
    }
    isos
}

/// Straighten `path` by reflecting polygon copies across its crossed edges.
pub fn develop(surface: &Surface, path: &GeodesicPath) -> Result<Development> {
    let isometries = unfold(surface, &path.word.edges);
    let mut points = vec![path.start.coords];
    for (k, seg) in path.segments.iter().enumerate() {
        let g = isometries[k.min(isometries.len() - 1)];
        points.push(g.apply(seg.to));
    }
    let start = path.start.coords;
    let end = *points.last().unwrap();
    let chord = end - start;
    let len = chord.norm();
    let max_deviation = if len > 0.0 {
        let u = chord * (1.0 / len);
        points
            .iter()
            .map(|q| (*q - start).cross(u).abs())
            .fold(0.0, f64::max)
    } else {
        points.iter().map(|q| q.dist(start)).fold(0.0, f64::max)
    };
    if max_deviation > DEVELOP_TOL * surface.scale() {
        return Err(NetlabError::NotGeodesic {
            deviation: max_deviation,
        });
    }
    Ok(Development {
        isometries,
        start,
        end,
        points,
        max_deviation,
    })
}

/// An open arc of directions `(lo, hi)` in absolute angle, `hi - lo ≤ 2π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub lo: f64,
    pub hi: f64,
}

impl Arc {
    pub fn full() -> Self {
        Arc { lo: 0.0, hi: TAU }
    }

    pub fn is_empty(&self) -> bool {
        self.hi <= self.lo
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo).max(0.0)
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Whether `theta` lies strictly inside, modulo 2π.
    pub fn contains(&self, theta: f64) -> bool {
        let t = self.lo + (theta - self.lo).rem_euclid(TAU);
        t > self.lo && t < self.hi
    }

    /// Bring `theta` into the representative range starting at `lo`.
    pub fn unwrap(&self, theta: f64) -> f64 {
        self.lo + (theta - self.lo).rem_euclid(TAU)
    }

    /// The directions from `origin` that hit the segment `[a, b]`.
    pub fn window(origin: Vec2, a: Vec2, b: Vec2) -> Arc {
        let (va, vb) = (a - origin, b - origin);
        let (first, second) = if va.cross(vb) >= 0.0 { (va, vb) } else { (vb, va) };
        let lo = first.angle();
        let width = angle_between(first.angle(), second.angle());
        Arc { lo, hi: lo + width }
    }

    pub fn intersect(&self, other: &Arc) -> Arc {
        if self.width() >= TAU {
            return *other;
        }
        if other.width() >= TAU {
            return *self;
        }
        // shift `other` so its start lies within π of our start
        let shift = ((other.lo - self.lo + PI).rem_euclid(TAU)) - PI;
        let olo = self.lo + shift;
        let ohi = olo + other.width();
        Arc {
            lo: self.lo.max(olo),
            hi: self.hi.min(ohi),
        }
    }
}

/// Unfolded polygon copies along a crossing word, seen from an anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct Corridor {
    pub isometries: Vec<Isometry>,
    /// Image of the crossed edge for each crossing.
    pub edge_images: Vec<(Vec2, Vec2)>,
    /// Directions (absolute planar angles at the anchor, on the anchor's
    /// departure sheet) whose ray crosses every edge image in order.
    pub feasible: Arc,
}

impl Corridor {
    pub fn is_feasible(&self) -> bool {
        !self.feasible.is_empty()
    }
}

/// Initial direction arc at an anchor: the inward half-plane for edge points,
/// everything for interior points.
pub fn anchor_arc(surface: &Surface, anchor: &SurfacePoint) -> Arc {
    match anchor.locus {
        Locus::OnEdge { edge, .. } => {
            let lo = surface.edge_tangent(edge).angle();
            Arc { lo, hi: lo + PI }
        }
        _ => Arc::full(),
    }
}

/// Unfold `word` and intersect the angular windows of its crossed-edge
/// images as seen from `anchor`.
pub fn develop_word(surface: &Surface, word: &[usize], anchor: &SurfacePoint) -> Corridor {
    let isometries = unfold(surface, word);
    let mut feasible = anchor_arc(surface, anchor);
    let mut edge_images = Vec::with_capacity(word.len());
    let mut prev: Option<usize> = match anchor.locus {
        Locus::OnEdge { edge, .. } => Some(edge),
        _ => None,
    };
    for (k, &e) in word.iter().enumerate() {
        let g = isometries[k];
        let (a, b) = surface.edge(e);
        let (ga, gb) = (g.apply(a), g.apply(b));
        edge_images.push((ga, gb));
        if prev == Some(e) || e >= surface.edge_count() {
            feasible = Arc { lo: 0.0, hi: 0.0 };
        } else if !feasible.is_empty() {
            feasible = feasible.intersect(&Arc::window(anchor.coords, ga, gb));
        }
        prev = Some(e);
    }
    Corridor {
        isometries,
        edge_images,
        feasible,
    }
}

/// A geodesic that leaves the midpoint of an edge and comes back to it.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoop {
    pub path: GeodesicPath,
    pub holonomy: IsometryKind,
    /// Departure tangent in the local chart at the midpoint.
    pub departure: Vec2,
    /// Arrival direction of motion in the local chart at the midpoint.
    pub arrival: Vec2,
    /// Angle between the departure tangent and the reversed arrival, in
    /// `[0, π]`; π means the loop closes smoothly.
    pub corner_angle: f64,
}

impl ClosedLoop {
    pub fn closes_smoothly(&self, tol: f64) -> bool {
        (self.corner_angle - PI).abs() <= tol
    }
}

pub(crate) fn loop_from_path(surface: &Surface, path: GeodesicPath, holonomy: IsometryKind) -> ClosedLoop {
    let departure = path.start_tangent(surface);
    let arrival = -path.end_tangent(surface);
    let corner_angle = angle_between(departure.angle(), (-arrival).angle());
    ClosedLoop {
        path,
        holonomy,
        departure,
        arrival,
        corner_angle,
    }
}

/// Geodesic loops based at the midpoint of `start_edge`, departing into the
/// top sheet, that realize `word` and come back to the midpoint.
///
/// The developed loop is the segment from the midpoint to its image under
/// the composed reflections, so the direction is read off in closed form;
/// tracing then confirms corridor feasibility and cone avoidance.
pub fn solve_closed(surface: &Surface, word: &[usize], start_edge: usize) -> Result<Vec<ClosedLoop>> {
    let m = surface.edge_midpoint(start_edge)?;
    if word.is_empty() {
        return Ok(Vec::new());
    }
    let corridor = develop_word(surface, word, &m);
    let g = *corridor.isometries.last().unwrap();
    let target = g.apply(m.coords);
    let chord = target - m.coords;
    let tol = DEVELOP_TOL * surface.scale();
    if chord.norm() <= tol || !corridor.feasible.contains(chord.angle()) {
        return Ok(Vec::new());
    }
    let limits = Limits::new(chord.norm() * (1.0 + 1e-12), word.len());
    let path = match trace(surface, &m, Sheet::Top, Direction::from_vec(chord), limits) {
        Ok(p) => p,
        Err(NetlabError::SingularHit { .. }) => return Ok(Vec::new()),
        Err(e) => return Err(e),
    };
    if path.word.edges != word || !path.end.same_point(&m, tol) {
        return Ok(Vec::new());
    }
    Ok(vec![loop_from_path(surface, path, g.kind(1e-12))])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::PolygonSpec;

    fn tri() -> Surface {
        Surface::new(PolygonSpec::regular(3, 1.0)).unwrap()
    }

    #[test]
    fn theta_edge_on_equilateral() {
        let s = tri();
        let c = s.point(Sheet::Top, s.centroid()).unwrap();
        let m = s.edge_point(0, 0.5);
        // closed form: apothem of the unit-circumradius triangle is 1/2
        let apothem = 0.5;
        assert!((s.apothem().unwrap() - apothem).abs() < 1e-15);
        let p = trace_from(&s, &c, Direction::from_vec(m - c.coords), Limits::length(2.0 * apothem)).unwrap();
        assert_eq!(p.word.edges, vec![0]);
        assert!((p.crossings[0].t - 0.5).abs() < 1e-12);
        assert!(p.crossings[0].perpendicular);
        assert_eq!(p.end.sheet, Sheet::Bottom);
        assert!(p.end.coords.dist(s.centroid()) < 1e-12);
        let dev = develop(&s, &p).unwrap();
        assert_eq!(dev.isometries.len(), 2);
        assert!((dev.chord_length() - 2.0 * apothem).abs() < 1e-12);
    }

    #[test]
    fn zero_crossings_is_a_chord() {
        let s = Surface::new(PolygonSpec::regular(5, 2.0)).unwrap();
        let c = s.point(Sheet::Top, Vec2::new(0.1, 0.2)).unwrap();
        let p = trace_from(&s, &c, Direction::new(1.0), Limits::new(100.0, 0)).unwrap();
        assert!(p.word.is_empty());
        assert_eq!(p.segments.len(), 1);
        assert!(p.end.is_on_boundary());
        let dev = develop(&s, &p).unwrap();
        assert_eq!(dev.isometries, vec![Isometry::IDENTITY]);
    }

    #[test]
    fn trace_back_returns_to_start() {
        let s = Surface::new(PolygonSpec::regular(7, 1.0)).unwrap();
        let c = s.point(Sheet::Top, Vec2::new(0.13, -0.21)).unwrap();
        let p = trace_from(&s, &c, Direction::new(0.917), Limits::length(9.0)).unwrap();
        let back = trace_reverse(&s, &p, Limits::length(p.length)).unwrap();
        assert!(back.end.same_point(&c, 1e-9));
        let mut rev = p.word.edges.clone();
        rev.reverse();
        assert_eq!(back.word.edges, rev);
    }

    #[test]
    fn crossing_an_edge_and_coming_back() {
        // word [e, e] is impossible for a straight ray in a convex polygon, but
        // its development is the identity
        let s = tri();
        let isos = unfold(&s, &[0, 0]);
        let p = Vec2::new(0.3, 0.1);
        assert!(isos[2].apply(p).dist(p) < 1e-12);
        let c = s.point(Sheet::Top, s.centroid()).unwrap();
        assert!(!develop_word(&s, &[0, 0], &c).is_feasible());
    }

    #[test]
    fn cone_hit_is_reported() {
        let s = Surface::new(PolygonSpec::regular(4, 1.0)).unwrap();
        let o = s.point(Sheet::Top, Vec2::ZERO).unwrap();
        let err = trace_from(&s, &o, Direction::new(0.0), Limits::length(5.0)).unwrap_err();
        assert!(matches!(err, NetlabError::SingularHit { cone: 0, .. }));
        let v = SurfacePoint {
            sheet: Sheet::Top,
            coords: s.vertices()[1],
            locus: Locus::AtCone { index: 1 },
        };
        assert!(matches!(
            trace_from(&s, &v, Direction::new(0.0), Limits::length(1.0)),
            Err(NetlabError::StartAtCone(1))
        ));
    }

    #[test]
    fn square_corridors() {
        let s = Surface::new(PolygonSpec::regular(4, 1.0)).unwrap();
        let m = s.edge_midpoint(0).unwrap();
        assert!(develop_word(&s, &[2], &m).is_feasible());
        for k in 1..12 {
            let word: Vec<usize> = (0..k).map(|i| if i % 2 == 0 { 2 } else { 0 }).collect();
            let c = develop_word(&s, &word, &m);
            assert!(c.is_feasible(), "k = {k}");
            // the perpendicular chord realizes every strip
            let perp = s.inward_normal(0).angle();
            assert!(c.feasible.contains(perp));
        }
        let c = s.point(Sheet::Top, Vec2::new(0.1, 0.05)).unwrap();
        assert!(develop_word(&s, &[0], &c).is_feasible());
    }

    #[test]
    fn figure_eight_loop_on_equilateral() {
        let s = tri();
        let loops = solve_closed(&s, &[1], 0).unwrap();
        assert_eq!(loops.len(), 1);
        let l = &loops[0];
        assert_eq!(l.path.perpendicular_crossings(), vec![0]);
        assert_eq!(l.path.end_sheet, Sheet::Bottom);
        // departure and reversed arrival are mirror images across edge 0:
        // corner angle 2·30°
        assert!((l.corner_angle - PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn closure_without_a_direction_is_empty() {
        let s = tri();
        // reflecting across the start edge fixes the midpoint
        assert!(solve_closed(&s, &[0], 0).unwrap().is_empty());
        assert!(solve_closed(&s, &[], 0).unwrap().is_empty());
    }

    #[test]
    fn arc_window_and_intersection() {
        let w = Arc::window(Vec2::ZERO, Vec2::new(1.0, -1.0), Vec2::new(1.0, 1.0));
        assert!(w.contains(0.0));
        assert!((w.width() - PI / 2.0).abs() < 1e-12);
        let v = Arc::window(Vec2::ZERO, Vec2::new(1.0, 0.5), Vec2::new(-1.0, 0.5));
        let i = w.intersect(&v);
        assert!((i.width() - (PI / 4.0 - 0.5f64.atan())).abs() < 1e-12);
        let far = Arc::window(Vec2::ZERO, Vec2::new(-1.0, 1.0), Vec2::new(-1.0, -1.0));
        assert!(w.intersect(&far).is_empty());
    }
}

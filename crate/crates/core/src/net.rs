//! Embedded graphs on a doubled polygon and verification of the geodesic
//! net conditions.
//!
//! Faces are recovered from the rotation system: at every vertex the
//! outgoing tangents are ordered counter-clockwise in the vertex's oriented
//! local chart, and each face is a cycle of half-edges. Cone points are
//! assigned to faces by shooting a probe geodesic out of each cone until it
//! meets the net.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{NetlabError, Result};
use crate::geom::{segment_distance, Vec2};
use crate::surface::{Direction, Locus, Sheet, Surface, SurfacePoint};
use crate::tracer::{develop, exit_edge, trace, GeodesicPath, Limits};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphType {
    Theta,
    #[serde(rename = "figure8")]
    FigureEight,
    Bifocal,
    #[serde(rename = "3regular")]
    General3Regular,
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetEdge {
    pub a: usize,
    pub b: usize,
    pub path: GeodesicPath,
}

impl NetEdge {
    pub fn is_loop(&self) -> bool {
        self.a == self.b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Net {
    pub surface: Surface,
    pub vertices: Vec<SurfacePoint>,
    pub edges: Vec<NetEdge>,
    pub graph_type: GraphType,
}

/// Verification thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Absolute geometric tolerance (balancing defect, straightness,
    /// endpoint mismatch, embeddedness clearance).
    pub geometry: f64,
    /// Absolute tolerance on per-face Gauss-Bonnet residuals.
    pub residual: f64,
}

impl Tolerance {
    pub fn for_scale(scale: f64) -> Self {
        Tolerance {
            geometry: 1e-9 * scale,
            residual: 1e-8,
        }
    }
}

impl Net {
    pub fn new(
        surface: Surface,
        vertices: Vec<SurfacePoint>,
        edges: Vec<NetEdge>,
        graph_type: GraphType,
    ) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            if e.a >= vertices.len() || e.b >= vertices.len() {
                return Err(NetlabError::MalformedNet(format!(
                    "edge {i} references a missing vertex"
                )));
            }
        }
        Ok(Net {
            surface,
            vertices,
            edges,
            graph_type,
        })
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertices.len()];
        for e in &self.edges {
            deg[e.a] += 1;
            deg[e.b] += 1;
        }
        deg
    }

    /// Trace an edge out of vertex `a` for `length`, crossing at most
    /// `max_crossings` times, and attach it to `b`.
    #[allow(clippy::too_many_arguments)]
    pub fn trace_edge(
        surface: &Surface,
        vertices: &[SurfacePoint],
        a: usize,
        b: usize,
        sheet: Sheet,
        direction: Direction,
        length: f64,
        max_crossings: usize,
    ) -> Result<NetEdge> {
        let path = trace(
            surface,
            &vertices[a],
            sheet,
            direction,
            Limits::new(length, max_crossings),
        )?;
        Ok(NetEdge { a, b, path })
    }

    /// Uniformly scale the net and its surface.
    pub fn scaled(&self, s: f64) -> Result<Net> {
        let surface = self.surface.scaled(s)?;
        let vertices: Vec<SurfacePoint> = self
            .vertices
            .iter()
            .map(|v| SurfacePoint {
                coords: v.coords * s,
                ..*v
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| {
                Net::trace_edge(
                    &surface,
                    &vertices,
                    e.a,
                    e.b,
                    e.path.start_sheet,
                    e.path.direction,
                    e.path.length * s,
                    e.path.word.len(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Net::new(surface, vertices, edges, self.graph_type)
    }
}

/// Norm of the sum of unit tangents.
pub fn balancing_defect(tangents: &[Vec2]) -> Result<f64> {
    if tangents.len() < 3 {
        return Err(NetlabError::FewerThanThree(tangents.len()));
    }
    Ok(tangents
        .iter()
        .fold(Vec2::ZERO, |acc, t| acc + t.normalized())
        .norm())
}

/// Gauss-Bonnet bookkeeping for one face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceBudget {
    pub face: usize,
    /// Corners on the face boundary, with multiplicity.
    pub y: usize,
    /// Number of enclosed cone points.
    pub x: usize,
    pub enclosed: Vec<usize>,
    pub curvature: f64,
    pub turning_angles: Vec<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub balanced: Vec<f64>,
    pub geodesic: Vec<f64>,
    pub embedded: bool,
    pub faces: Vec<FaceBudget>,
    pub vertices: usize,
    pub edges: usize,
    pub euler_ok: bool,
    pub partition: GraphType,
    pub max_defect: f64,
    pub max_residual: f64,
    pub tolerance: Tolerance,
    pub passed: bool,
}

struct HalfEdges {
    origin: Vec<usize>,
    angle: Vec<f64>,
    next: Vec<usize>,
    corner: Vec<f64>,
}

fn half_edge_tangent(net: &Net, h: usize) -> (usize, Vec2) {
    let e = &net.edges[h / 2];
    let s = &net.surface;
    if h.is_multiple_of(2) {
        (e.a, s.to_local(&net.vertices[e.a], e.path.start_sheet, e.path.direction.vec()))
    } else {
        (
            e.b,
            s.to_local(&net.vertices[e.b], e.path.end_sheet, -e.path.end_direction.vec()),
        )
    }
}

fn rotation_system(net: &Net) -> HalfEdges {
    let nh = net.edges.len() * 2;
    let mut origin = vec![0; nh];
    let mut angle = vec![0.0; nh];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); net.vertices.len()];
    for h in 0..nh {
        let (v, t) = half_edge_tangent(net, h);
        origin[h] = v;
        angle[h] = t.angle().rem_euclid(TAU);
        out[v].push(h);
    }
    for list in &mut out {
        list.sort_by(|&x, &y| angle[x].total_cmp(&angle[y]).then(x.cmp(&y)));
    }
    let mut next = vec![0; nh];
    let mut corner = vec![0.0; nh];
    for h in 0..nh {
        let twin = h ^ 1;
        let v = origin[twin];
        let list = &out[v];
        let pos = list.iter().position(|&x| x == twin).unwrap();
        let nxt = list[(pos + list.len() - 1) % list.len()];
        next[h] = nxt;
        let mut interior = (angle[twin] - angle[nxt]).rem_euclid(TAU);
        if interior <= 0.0 {
            interior = TAU;
        }
        corner[h] = interior;
    }
    HalfEdges {
        origin,
        angle,
        next,
        corner,
    }
}

fn trace_faces(he: &HalfEdges) -> (Vec<Vec<usize>>, Vec<usize>) {
    let nh = he.next.len();
    let mut face_of = vec![usize::MAX; nh];
    let mut faces = Vec::new();
    for start in 0..nh {
        if face_of[start] != usize::MAX {
            continue;
        }
        let id = faces.len();
        let mut cycle = Vec::new();
        let mut h = start;
        while face_of[h] == usize::MAX {
            face_of[h] = id;
            cycle.push(h);
            h = he.next[h];
        }
        faces.push(cycle);
    }
    (faces, face_of)
}

/// Net segments indexed by sheet: (half-edge of the forward traversal,
/// segment).
fn sheet_segments(net: &Net) -> Vec<(usize, Sheet, Vec2, Vec2)> {
    indexed_segments(net)
        .into_iter()
        .map(|(i, _, sh, a, b)| (i, sh, a, b))
        .collect()
}

fn indexed_segments(net: &Net) -> Vec<(usize, usize, Sheet, Vec2, Vec2)> {
    let mut out = Vec::new();
    for (i, e) in net.edges.iter().enumerate() {
        for (k, seg) in e.path.segments.iter().enumerate() {
            out.push((i, k, seg.sheet, seg.from, seg.to));
        }
    }
    out
}

fn vertex_on_sheet(v: &SurfacePoint, sheet: Sheet) -> bool {
    v.is_on_boundary() || v.sheet == sheet
}

fn check_embedded(net: &Net, eps: f64) -> bool {
    let surf = &net.surface;
    let segs = indexed_segments(net);
    let on_boundary = |p: Vec2| {
        (0..surf.edge_count()).any(|e| {
            let (a, _) = surf.edge(e);
            (p - a).dot(surf.inward_normal(e)) <= eps
        })
    };
    for i in 0..segs.len() {
        for j in (i + 1)..segs.len() {
            let (ei, ki, si, p0, p1) = segs[i];
            let (ej, kj, sj, q0, q1) = segs[j];
            let (d, s, _) = segment_distance(p0, p1, q0, q1);
            if d > eps {
                continue;
            }
            let cp = p0.lerp(p1, s);
            // consecutive pieces of one edge meet at their crossing point
            if ei == ej && kj == ki + 1 && cp.dist(p1) <= eps {
                continue;
            }
            // different sheets only meet along the boundary
            if si != sj && !on_boundary(cp) {
                continue;
            }
            let Some(v) = net
                .vertices
                .iter()
                .find(|v| (si == sj && vertex_on_sheet(v, si) || v.is_on_boundary()) && v.coords.dist(cp) <= eps)
            else {
                return false;
            };
            let vc = v.coords;
            let ends_i = p0.dist(vc) <= eps || p1.dist(vc) <= eps;
            let ends_j = q0.dist(vc) <= eps || q1.dist(vc) <= eps;
            if !(ends_i && ends_j) {
                return false;
            }
            if si == sj {
                let di = (p1 - p0).normalized();
                let dj = (q1 - q0).normalized();
                let away_i = if p0.dist(vc) <= eps { di } else { -di };
                let away_j = if q0.dist(vc) <= eps { dj } else { -dj };
                if away_i.dist(away_j) < 1e-9 {
                    return false;
                }
            }
        }
    }
    true
}

/// Whether a segment runs along a polygon edge.
fn on_seam(s: &Surface, a: Vec2, b: Vec2, eps: f64) -> bool {
    (0..s.edge_count()).any(|e| {
        let (p, _) = s.edge(e);
        let n = s.inward_normal(e);
        (a - p).dot(n).abs() <= eps && (b - p).dot(n).abs() <= eps
    })
}

/// Golden-ratio spread of trial fractions across a cone's interior angle.
const PROBE_FRACTIONS: [f64; 8] = [
    0.381_966_011_250_105,
    0.618_033_988_749_895,
    0.236_067_977_499_790,
    0.763_932_022_500_210,
    0.145_898_033_750_315,
    0.854_101_966_249_685,
    0.472_135_954_999_579,
    0.527_864_045_000_421,
];

const PROBE_MAX_SEGMENTS: usize = 20_000;

/// Shoot a geodesic from cone `k` and return the face it first meets.
fn probe_face(net: &Net, k: usize, face_of: &[usize], eps: f64) -> Option<usize> {
    let s = &net.surface;
    let n = s.edge_count();
    let v = s.vertices()[k];
    let u1 = s.edge_tangent(k);
    let segs: Vec<(usize, Sheet, Vec2, Vec2, bool)> = sheet_segments(net)
        .into_iter()
        .map(|(i, sh, a, b)| (i, sh, a, b, on_seam(s, a, b, eps)))
        .collect();
    'fractions: for f in PROBE_FRACTIONS {
        let interior = s.cones()[k].interior_angle;
        let mut d = Vec2::from_angle(u1.angle() + f * interior);
        let mut p = v;
        let mut sheet = Sheet::Top;
        let mut skip = vec![k, (k + n - 1) % n];
        for _ in 0..PROBE_MAX_SEGMENTS {
            let (len, e) = exit_edge(s, p, d, &skip)?;
            let q = p + d * len;
            // first net segment hit on this sheet
            let mut best: Option<(f64, usize, f64, Vec2, Vec2)> = None;
            for &(ei, sh, a, b, seam) in &segs {
                if sh != sheet && !seam {
                    continue;
                }
                let r = b - a;
                let den = d.cross(r);
                if den.abs() < 1e-15 {
                    continue;
                }
                let w = a - p;
                let u = w.cross(r) / den;
                let t = w.cross(d) / den;
                if u > eps && u <= len + eps && (-1e-12..=1.0 + 1e-12).contains(&t)
                    && best.is_none_or(|b| u < b.0)
                {
                    best = Some((u, ei, t, a, b));
                }
            }
            if let Some((_, ei, t, a, b)) = best {
                let hit = a.lerp(b, t);
                // passing through a vertex or a segment end is ambiguous
                if hit.dist(a) <= eps || hit.dist(b) <= eps {
                    continue 'fractions;
                }
                let planar_left = (b - a).cross(-d) > 0.0;
                let surface_left = planar_left ^ (sheet == Sheet::Bottom);
                let h = 2 * ei + usize::from(!surface_left);
                return Some(face_of[h]);
            }
            if s.vertices().iter().any(|c| c.dist(q) <= eps) {
                continue 'fractions;
            }
            d = s.reflect_dir(e, d);
            sheet = sheet.flip();
            p = q;
            skip.clear();
            skip.push(e);
        }
    }
    None
}

/// Check the geodesic net conditions and account for every face.
pub fn verify(net: &Net, tol: Tolerance) -> Result<VerificationReport> {
    let s = &net.surface;
    let eps = tol.geometry;
    for i in 0..net.vertices.len() {
        for j in (i + 1)..net.vertices.len() {
            if net.vertices[i].same_point(&net.vertices[j], eps) {
                return Err(NetlabError::MalformedNet(format!("vertices {i} and {j} coincide")));
            }
        }
        if let Locus::AtCone { index } = net.vertices[i].locus {
            return Err(NetlabError::MalformedNet(format!(
                "vertex {i} sits on cone point {index}"
            )));
        }
    }
    let degrees = net.degrees();
    if let Some(v) = degrees.iter().position(|&d| d < 3) {
        return Err(NetlabError::MalformedNet(format!(
            "vertex {v} has degree {} (at least 3 required)",
            degrees[v]
        )));
    }

    let he = rotation_system(net);
    let mut tangents: Vec<Vec<Vec2>> = vec![Vec::new(); net.vertices.len()];
    for h in 0..he.origin.len() {
        tangents[he.origin[h]].push(Vec2::from_angle(he.angle[h]));
    }
    let balanced = tangents
        .iter()
        .map(|t| balancing_defect(t))
        .collect::<Result<Vec<_>>>()?;

    let geodesic: Vec<f64> = net
        .edges
        .iter()
        .map(|e| {
            let straight = match develop(s, &e.path) {
                Ok(d) => d.max_deviation,
                Err(NetlabError::NotGeodesic { deviation }) => deviation,
                Err(_) => f64::INFINITY,
            };
            let start_err = e.path.start.coords.dist(net.vertices[e.a].coords);
            let vb = &net.vertices[e.b];
            let end_err = if vb.is_on_boundary() || e.path.end_sheet == vb.sheet {
                e.path.end.coords.dist(vb.coords)
            } else {
                f64::INFINITY
            };
            straight.max(start_err).max(end_err)
        })
        .collect();

    let embedded = check_embedded(net, eps);
    let (cycles, face_of) = trace_faces(&he);

    let mut enclosed: Vec<Vec<usize>> = vec![Vec::new(); cycles.len()];
    let mut unassigned = false;
    for k in 0..s.cones().len() {
        match probe_face(net, k, &face_of, eps) {
            Some(f) => enclosed[f].push(k),
            None => unassigned = true,
        }
    }

    let faces: Vec<FaceBudget> = cycles
        .iter()
        .enumerate()
        .map(|(id, cycle)| {
            let turning_angles: Vec<f64> = cycle.iter().map(|&h| PI - he.corner[h]).collect();
            let curvature: f64 = enclosed[id].iter().map(|&k| s.cones()[k].curvature).sum();
            let residual = curvature + turning_angles.iter().sum::<f64>() - TAU;
            FaceBudget {
                face: id,
                y: cycle.len(),
                x: enclosed[id].len(),
                enclosed: enclosed[id].clone(),
                curvature,
                turning_angles,
                residual,
            }
        })
        .collect();

    let v = net.vertices.len() as i64;
    let e = net.edges.len() as i64;
    let f = faces.len() as i64;
    let euler_ok = v - e + f == 2;
    let max_defect = balanced.iter().chain(geodesic.iter()).fold(0.0, |a: f64, b| a.max(*b));
    let max_residual = faces.iter().map(|f| f.residual.abs()).fold(0.0, f64::max);
    let passed = max_defect <= eps
        && embedded
        && euler_ok
        && !unassigned
        && max_residual <= tol.residual;
    let partition = classify_counts(net, faces.len());
    Ok(VerificationReport {
        balanced,
        geodesic,
        embedded,
        faces,
        vertices: net.vertices.len(),
        edges: net.edges.len(),
        euler_ok,
        partition,
        max_defect,
        max_residual,
        tolerance: tol,
        passed,
    })
}

fn classify_counts(net: &Net, faces: usize) -> GraphType {
    if faces != 3 {
        return GraphType::Other;
    }
    let loops = net.edges.iter().filter(|e| e.is_loop()).count();
    match (net.vertices.len(), net.edges.len(), loops) {
        (1, 2, 2) => GraphType::FigureEight,
        (2, 3, 0) => GraphType::Theta,
        (2, 3, 2) => {
            let mut at: Vec<usize> = net.edges.iter().filter(|e| e.is_loop()).map(|e| e.a).collect();
            at.dedup();
            if at.len() == 2 {
                GraphType::Bifocal
            } else {
                GraphType::Other
            }
        }
        _ => GraphType::Other,
    }
}

/// Which three-face graph a verified net is modeled on.
pub fn classify_partition(net: &Net, report: &VerificationReport) -> GraphType {
    classify_counts(net, report.faces.len())
}

/// A loopy multigraph as a sorted list of `(u, v)` pairs with `u <= v`.
pub type Multigraph = Vec<(usize, usize)>;

fn canonical(v: usize, edges: &[(usize, usize)]) -> Multigraph {
    let mut perm: Vec<usize> = (0..v).collect();
    let mut best: Option<Multigraph> = None;
    loop {
        let mut img: Multigraph = edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (perm[a], perm[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        img.sort_unstable();
        if best.as_ref().is_none_or(|b| img < *b) {
            best = Some(img);
        }
        // next permutation
        let Some(i) = (1..v).rev().find(|&i| perm[i - 1] < perm[i]) else {
            break;
        };
        let j = (i..v).rev().find(|&j| perm[j] > perm[i - 1]).unwrap();
        perm.swap(i - 1, j);
        perm[i..].reverse();
    }
    best.unwrap_or_default()
}

fn connected(v: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..v).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let root = find(&mut parent, 0);
    (0..v).all(|x| find(&mut parent, x) == root)
}

/// Enumerate, up to isomorphism, every connected multigraph (loops allowed)
/// with `1..=max_vertices` vertices, minimum degree 3 and `E = V + 1`;
/// the graphs whose sphere embeddings have exactly three faces.
pub fn enumerate_three_face_graphs(max_vertices: usize) -> Vec<(GraphType, usize, Multigraph)> {
    let mut found = std::collections::BTreeSet::new();
    for v in 1..=max_vertices {
        let pairs: Vec<(usize, usize)> =
            (0..v).flat_map(|a| (a..v).map(move |b| (a, b))).collect();
        let e = v + 1;
        // multisets of size e over pairs, as non-decreasing index sequences
        let mut idx = vec![0usize; e];
        loop {
            let edges: Vec<(usize, usize)> = idx.iter().map(|&i| pairs[i]).collect();
            let mut deg = vec![0; v];
            for &(a, b) in &edges {
                deg[a] += 1;
                deg[b] += 1;
            }
            if deg.iter().all(|&d| d >= 3) && connected(v, &edges) {
                found.insert((v, canonical(v, &edges)));
            }
            let Some(i) = (0..e).rev().find(|&i| idx[i] + 1 < pairs.len()) else {
                break;
            };
            idx[i] += 1;
            for j in (i + 1)..e {
                idx[j] = idx[i];
            }
        }
    }
    found
        .into_iter()
        .map(|(v, g)| {
            let loops = g.iter().filter(|(a, b)| a == b).count();
            let kind = match (v, loops) {
                (1, 2) => GraphType::FigureEight,
                (2, 0) => GraphType::Theta,
                (2, 2) => GraphType::Bifocal,
                _ => GraphType::Other,
            };
            (kind, v, g)
        })
        .collect()
}

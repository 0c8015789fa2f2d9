//! Builders for the explicit net families on doubled triangles and
//! regular polygons.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{NetlabError, Result};
use crate::geom::{Isometry, Vec2};
use crate::io::net_from_json;
use crate::net::{GraphType, Net, NetEdge};
use crate::surface::{Direction, PolygonSpec, Sheet, Surface, SurfacePoint};
use crate::tracer::GeodesicPath;

/// Relative tolerance for "this crossing is at an edge midpoint".
pub const MIDPOINT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Theta { n: u32 },
    Tetra { n: u32 },
    Figure8Odd { n: u32 },
    Figure8Isosceles { angles_deg: [f64; 3] },
    Figure8Hexagon,
    BifocalTriangle,
}

pub fn build(family: Family) -> Result<Net> {
    match family {
        Family::Theta { n } => theta_regular(n),
        Family::Tetra { n } => three_regular_4n(n),
        Family::Figure8Odd { n } => figure8_odd(n),
        Family::Figure8Isosceles { angles_deg } => figure8_isosceles(angles_deg),
        Family::Figure8Hexagon => figure8_hexagon(),
        Family::BifocalTriangle => bifocal_30_30_120(),
    }
}

/// Theta net on the doubled regular n-gon: both sheet centers joined along
/// the three apothems to the midpoints of edges 0, n/3 and 2n/3.
pub fn theta_regular(n: u32) -> Result<Net> {
    if n < 3 || !n.is_multiple_of(3) {
        return Err(NetlabError::NotMultipleOf3(n));
    }
    let s = Surface::new(PolygonSpec::regular(n, 1.0))?;
    let a = s.apothem().expect("regular");
    let vs = vec![
        s.point(Sheet::Top, Vec2::ZERO)?,
        s.point(Sheet::Bottom, Vec2::ZERO)?,
    ];
    let k = (n / 3) as usize;
    let edges = (0..3)
        .map(|j| {
            let dir = Direction::from_vec(s.edge_point(j * k, 0.5));
            Net::trace_edge(&s, &vs, 0, 1, Sheet::Top, dir, 2.0 * a, 1)
        })
        .collect::<Result<Vec<_>>>()?;
    Net::new(s, vs, edges, GraphType::Theta)
}

/// Offset of the tetrahedral vertices from the square's center along the
/// diagonals, in units of the side length.
pub fn tetra_offset() -> f64 {
    0.25 - 0.25 / 3f64.sqrt()
}

/// Tetrahedral net on the doubled square.
fn tetra_square() -> Result<Net> {
    let s = Surface::new(PolygonSpec::regular(4, 1.0))?;
    let side = SQRT_2;
    // unit-square coordinates → canonical diamond
    let place = Isometry::rotation(PI / 4.0)
        .compose(&Isometry::scaling(side))
        .compose(&Isometry::translation(Vec2::new(-0.5, -0.5)));
    let t = tetra_offset();
    let unit = [
        (Sheet::Top, Vec2::new(0.5 + t, 0.5 - t)),
        (Sheet::Top, Vec2::new(0.5 - t, 0.5 + t)),
        (Sheet::Bottom, Vec2::new(0.5 - t, 0.5 - t)),
        (Sheet::Bottom, Vec2::new(0.5 + t, 0.5 + t)),
    ];
    let vs = unit
        .iter()
        .map(|&(sh, p)| s.point(sh, place.apply(p)))
        .collect::<Result<Vec<_>>>()?;
    // (a, b, sheet of a, midpoint crossed in unit coordinates)
    let plan: [(usize, usize, Sheet, Option<Vec2>); 6] = [
        (0, 1, Sheet::Top, None),
        (2, 3, Sheet::Bottom, None),
        (0, 3, Sheet::Top, Some(Vec2::new(1.0, 0.5))),
        (0, 2, Sheet::Top, Some(Vec2::new(0.5, 0.0))),
        (1, 2, Sheet::Top, Some(Vec2::new(0.0, 0.5))),
        (1, 3, Sheet::Top, Some(Vec2::new(0.5, 1.0))),
    ];
    let edges = plan
        .iter()
        .map(|&(a, b, sheet, via)| {
            let pa = vs[a].coords;
            let pb = vs[b].coords;
            let (dir, length, crossings) = match via {
                Some(m) => {
                    let m = place.apply(m);
                    (m - pa, pa.dist(m) + m.dist(pb), 1)
                }
                None => (pb - pa, pa.dist(pb), 0),
            };
            Net::trace_edge(&s, &vs, a, b, sheet, Direction::from_vec(dir), length, crossings)
        })
        .collect::<Result<Vec<_>>>()?;
    Net::new(s, vs, edges, GraphType::General3Regular)
}

/// Tetrahedral net on the doubled regular n-gon, 4 | n.
pub fn three_regular_4n(n: u32) -> Result<Net> {
    if n < 4 || !n.is_multiple_of(4) {
        return Err(NetlabError::NotMultipleOf4(n));
    }
    let base = tetra_square()?;
    if n == 4 {
        Ok(base)
    } else {
        corner_cut_extend(&base, 4, n)
    }
}

/// Re-embed a net whose boundary crossings all sit at edge midpoints into
/// the doubled regular `to_n`-gon with the same apothem, edge `j` of the
/// source going to edge `j·to_n/from_n`.
pub fn corner_cut_extend(net: &Net, from_n: u32, to_n: u32) -> Result<Net> {
    if net.surface.spec().regular_n() != Some(from_n) {
        return Err(NetlabError::InvalidSpec(format!(
            "net does not live on the regular {from_n}-gon"
        )));
    }
    if to_n < from_n || !to_n.is_multiple_of(from_n) {
        return Err(NetlabError::InvalidSpec(format!(
            "{to_n} is not a multiple of {from_n}"
        )));
    }
    for (i, e) in net.edges.iter().enumerate() {
        if let Some(c) = e.path.crossings.iter().find(|c| (c.t - 0.5).abs() > MIDPOINT_TOL) {
            return Err(NetlabError::NotMidpointPerpendicular(format!(
                "edge {i} crosses polygon edge {} at parameter {:.6}",
                c.edge, c.t
            )));
        }
    }
    let r = (to_n / from_n) as usize;
    let src = &net.surface;
    let scale = src.scale() * (PI / from_n as f64).cos() / (PI / to_n as f64).cos();
    let dst = Surface::new(PolygonSpec::regular(to_n, scale))?;
    let rho = PI / to_n as f64 - PI / from_n as f64;
    let rot = Isometry::rotation(rho);
    let vs = net
        .vertices
        .iter()
        .map(|v| dst.point(v.sheet, rot.apply(v.coords)))
        .collect::<Result<Vec<_>>>()?;
    let edges = net
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let p = &e.path;
            let dir = Direction::from_vec(rot.apply_vec(p.direction.vec()));
            let edge = Net::trace_edge(&dst, &vs, e.a, e.b, p.start_sheet, dir, p.length, p.word.len())?;
            let expect: Vec<usize> = p.word.edges.iter().map(|&j| j * r).collect();
            if edge.path.word.edges != expect {
                return Err(NetlabError::NotMidpointPerpendicular(format!(
                    "edge {i} crosses {:?} after cutting, expected {expect:?}",
                    edge.path.word.edges
                )));
            }
            Ok(edge)
        })
        .collect::<Result<Vec<_>>>()?;
    Net::new(dst, vs, edges, net.graph_type)
}

/// Complete a geodesic loop based at an edge point into a figure-eight by
/// continuing straight through the base point until it returns.
pub fn figure8_from_loop(s: &Surface, first: GeodesicPath) -> Result<Net> {
    let m = first.start;
    let arrival = s.to_local(&m, first.end_sheet, first.end_direction.vec());
    let (sheet, planar) = s.from_local(&m, arrival)?;
    let vs = vec![m];
    let second = Net::trace_edge(
        s,
        &vs,
        0,
        0,
        sheet,
        Direction::from_vec(planar),
        first.length,
        first.word.len(),
    )?;
    let first = NetEdge { a: 0, b: 0, path: first };
    Net::new(s.clone(), vs, vec![first, second], GraphType::FigureEight)
}

/// Figure-eight with its vertex at the midpoint of `base`: the first loop
/// hits `leg` perpendicularly and retraces itself on the other sheet; the
/// second continues straight through the vertex.
fn perpendicular_figure8(s: Surface, base: usize, leg: usize) -> Result<Net> {
    let vs = vec![s.edge_midpoint(base)?];
    let first = perpendicular_loop(&s, &vs, 0, leg)?;
    figure8_from_loop(&s, first.path)
}

/// Figure-eight on the doubled regular n-gon, n odd, crossing the two
/// edges opposite edge 0 perpendicularly.
pub fn figure8_odd(n: u32) -> Result<Net> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(NetlabError::NotOdd(n));
    }
    let s = Surface::new(PolygonSpec::regular(n, 1.0))?;
    perpendicular_figure8(s, 0, ((n - 1) / 2) as usize)
}

/// Figure-eight on a doubled isosceles triangle, vertex at the midpoint of
/// the edge joining the two equal angles.
pub fn figure8_isosceles(angles_deg: [f64; 3]) -> Result<Net> {
    let s = Surface::new(PolygonSpec::triangle_degrees(angles_deg, 1.0))
        .map_err(|e| NetlabError::InvalidTriangle(e.to_string()))?;
    let ang: Vec<f64> = s.cones().iter().map(|c| c.interior_angle).collect();
    // edge i joins vertices i and i+1; prefer the horizontal one
    let equal = |i: usize| (ang[i] - ang[(i + 1) % 3]).abs() <= 1e-10;
    let base = (0..3)
        .filter(|&i| equal(i))
        .max_by(|&i, &j| {
            let flat = |e: usize| -(s.edge_tangent(e).y.abs());
            flat(i).total_cmp(&flat(j)).then(j.cmp(&i))
        })
        .ok_or(NetlabError::NotIsosceles)?;
    perpendicular_figure8(s, base, (base + 1) % 3)
}

/// Distance of the bifocal vertices from their 30° cones, in units of the
/// base length. Any value in (0, 1/2) gives a net.
pub const BIFOCAL_OFFSET: f64 = 0.25;

/// Loop from the boundary vertex `v` that meets `leg` perpendicularly and
/// retraces itself on the other sheet.
fn perpendicular_loop(s: &Surface, vs: &[SurfacePoint], v: usize, leg: usize) -> Result<NetEdge> {
    let (a, _) = s.edge(leg);
    let depth = (vs[v].coords - a).dot(s.inward_normal(leg));
    let out = Direction::from_vec(-s.inward_normal(leg));
    Net::trace_edge(s, vs, v, v, Sheet::Top, out, 2.0 * depth, 1)
}

/// Bifocal net on the doubled 30-30-120 triangle. Both vertices sit on the
/// base, symmetric about its midpoint, and are joined along the seam; each
/// loop bounces perpendicularly off the adjacent leg and encloses one 30°
/// cone.
pub fn bifocal_30_30_120() -> Result<Net> {
    let s = Surface::new(PolygonSpec::triangle_degrees([30.0, 30.0, 120.0], 1.0))?;
    let (ca, cb) = s.edge(0);
    let r = BIFOCAL_OFFSET;
    let vs = vec![
        s.point(Sheet::Top, ca.lerp(cb, r))?,
        s.point(Sheet::Top, ca.lerp(cb, 1.0 - r))?,
    ];
    let edges = vec![
        perpendicular_loop(&s, &vs, 0, 2)?,
        perpendicular_loop(&s, &vs, 1, 1)?,
        Net::trace_edge(
            &s,
            &vs,
            0,
            1,
            Sheet::Top,
            Direction::from_vec(cb - ca),
            (1.0 - 2.0 * r) * ca.dist(cb),
            0,
        )?,
    ];
    Net::new(s, vs, edges, GraphType::Bifocal)
}

const HEXAGON_FIXTURE: &str = include_str!("../fixtures/figure8_hexagon.json");

/// Figure-eight on the doubled regular hexagon, frozen from
/// `netlab construct --family figure8-hexagon --from-search`.
pub fn figure8_hexagon() -> Result<Net> {
    net_from_json(HEXAGON_FIXTURE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissibility::solve_3regular;
    use crate::net::{verify, Tolerance};

    fn passes(net: &Net) -> crate::net::VerificationReport {
        let r = verify(net, Tolerance::for_scale(net.surface.scale())).unwrap();
        assert!(r.passed, "{r:#?}");
        r
    }

    #[test]
    fn theta_family() {
        for k in 1..=4u32 {
            let net = theta_regular(3 * k).unwrap();
            let r = passes(&net);
            assert_eq!(r.faces.len(), 3);
            assert!(r.faces.iter().all(|f| f.x == k as usize && f.y == 2));
            let a = net.surface.apothem().unwrap();
            assert!(net.edges.iter().all(|e| (e.path.length - 2.0 * a).abs() < 1e-12));
        }
        assert_eq!(theta_regular(4).unwrap_err(), NetlabError::NotMultipleOf3(4));
    }

    #[test]
    fn tetra_offset_by_bisection() {
        // balance at v = (1/2 + t, 1/2 - t): the edge to the midpoint of the
        // side x = 1 must make 120° with the diagonal direction 135°
        let gap = |t: f64| {
            let d = Vec2::new(0.5 - t, t).angle().to_degrees();
            (135.0 - d) - 120.0
        };
        let (mut lo, mut hi) = (1e-6, 0.25);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gap(lo).signum() == gap(mid).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((0.5 * (lo + hi) - tetra_offset()).abs() < 1e-12);
    }

    #[test]
    fn tetra_family() {
        for n in [4u32, 8, 12] {
            let net = three_regular_4n(n).unwrap();
            let r = passes(&net);
            assert_eq!((r.vertices, r.edges, r.faces.len()), (4, 6, 4));
            let c = solve_3regular(n);
            for f in &r.faces {
                assert_eq!((f.x, f.y), (n as usize / 4, 3));
                assert!(c.contains(f.x as u32, f.y as u32));
            }
        }
        assert_eq!(three_regular_4n(6).unwrap_err(), NetlabError::NotMultipleOf4(6));
    }

    #[test]
    fn corner_cut_theta_matches_direct() {
        let cut = corner_cut_extend(&theta_regular(3).unwrap(), 3, 6).unwrap();
        let r = passes(&cut);
        assert!(r.faces.iter().all(|f| f.x == 2 && f.y == 2));
        let direct = theta_regular(6).unwrap();
        // same apothem up to the scale of the source
        let ratio = cut.surface.apothem().unwrap() / direct.surface.apothem().unwrap();
        for (e, f) in cut.edges.iter().zip(&direct.edges) {
            assert!((e.path.length - f.path.length * ratio).abs() < 1e-12);
        }
        let mut words: Vec<usize> = cut.edges.iter().map(|e| e.path.word.edges[0]).collect();
        words.sort_unstable();
        assert_eq!(words, vec![0, 2, 4]);
    }

    #[test]
    fn odd_figure_eights() {
        for n in [3u32, 5, 7, 9] {
            let net = figure8_odd(n).unwrap();
            let r = passes(&net);
            assert_eq!(r.faces.len(), 3);
            let loops: Vec<_> = r.faces.iter().filter(|f| f.y == 1).collect();
            assert_eq!(loops.len(), 2);
            for f in loops {
                assert_eq!(f.x, (n as usize - 1) / 2);
                assert!((f.turning_angles[0] - 2.0 * PI / n as f64).abs() < 1e-12);
            }
            for e in &net.edges {
                assert_eq!(e.path.perpendicular_crossings(), vec![0]);
            }
        }
        assert_eq!(figure8_odd(4).unwrap_err(), NetlabError::NotOdd(4));
    }

    #[test]
    fn isosceles_figure_eights() {
        for deg in [[60.0, 60.0, 60.0], [30.0, 30.0, 120.0], [70.0, 70.0, 40.0]] {
            let net = figure8_isosceles(deg).unwrap();
            let r = passes(&net);
            let loops: Vec<f64> = r.faces.iter().filter(|f| f.y == 1).map(|f| f.curvature).collect();
            assert_eq!(loops.len(), 2);
            assert!((loops[0] - loops[1]).abs() < 1e-12);
        }
        assert_eq!(
            figure8_isosceles([50.0, 60.0, 70.0]).unwrap_err(),
            NetlabError::NotIsosceles
        );
    }

    #[test]
    fn equilateral_isosceles_is_odd_three() {
        let a = figure8_isosceles([60.0, 60.0, 60.0]).unwrap();
        let b = figure8_odd(3).unwrap();
        let ra = passes(&a);
        let rb = passes(&b);
        let xy = |r: &crate::net::VerificationReport| {
            let mut v: Vec<_> = r.faces.iter().map(|f| (f.x, f.y)).collect();
            v.sort_unstable();
            v
        };
        assert_eq!(xy(&ra), xy(&rb));
        let ratio = b.surface.edge_length(0) / a.surface.edge_length(0);
        assert!((a.edges[0].path.length * ratio - b.edges[0].path.length).abs() < 1e-12);
    }

    #[test]
    fn bifocal_loop_launch_by_shooting() {
        let s = Surface::new(PolygonSpec::triangle_degrees([30.0, 30.0, 120.0], 1.0)).unwrap();
        let p = Vec2::new(BIFOCAL_OFFSET, 0.0);
        // launch from p, bounce off the left leg, and report where the ray
        // comes back to the base
        let back = |psi: f64| -> f64 {
            let d = Vec2::from_angle(psi);
            let (len, e) = crate::tracer::exit_edge(&s, p, d, &[0]).unwrap();
            assert_eq!(e, 2);
            let q = p + d * len;
            let d2 = s.reflect_dir(e, d);
            let (len2, e2) = crate::tracer::exit_edge(&s, q, d2, &[e]).unwrap();
            assert_eq!(e2, 0);
            (q + d2 * len2).x - p.x
        };
        let (mut lo, mut hi) = (1.8, 2.4);
        assert!(back(lo).signum() != back(hi).signum());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if back(lo).signum() == back(mid).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let psi = 0.5 * (lo + hi);
        let net = bifocal_30_30_120().unwrap();
        assert!((net.edges[0].path.direction.angle() - psi).abs() < 1e-12);
        // and the three tangents at the vertex are then 120° apart
        assert!((psi - 2.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn bifocal_net() {
        let net = bifocal_30_30_120().unwrap();
        let r = passes(&net);
        assert_eq!(r.partition, GraphType::Bifocal);
        let mut loop_faces = 0;
        for f in &r.faces {
            if f.y == 1 {
                loop_faces += 1;
                assert!((f.curvature - 5.0 * PI / 3.0).abs() < 1e-12);
                assert!((f.turning_angles[0] - PI / 3.0).abs() < 1e-9);
            } else {
                assert_eq!(f.y, 4);
                assert!((f.curvature - 2.0 * PI / 3.0).abs() < 1e-12);
            }
            assert!(f.residual.abs() < 1e-8);
        }
        assert_eq!(loop_faces, 2);
    }

    #[test]
    fn hexagon_figure_eight() {
        let net = figure8_hexagon().unwrap();
        let r = passes(&net);
        let loops: Vec<_> = r.faces.iter().filter(|f| f.y == 1).collect();
        assert_eq!(loops.len(), 2);
        for f in loops {
            assert_eq!(f.x, 2);
            assert!((f.turning_angles[0] - 2.0 * PI / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn hexagon_figure_eight_cannot_be_corner_cut() {
        let net = figure8_hexagon().unwrap();
        assert!(matches!(
            corner_cut_extend(&net, 6, 12),
            Err(NetlabError::NotMidpointPerpendicular(_))
        ));
    }
}

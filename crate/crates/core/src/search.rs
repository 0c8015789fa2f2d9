//! Bounded searches for figure-eight and bifocal nets on doubled regular
//! polygons.
//!
//! Figure-eights are anchored at the midpoint M of edge 0. A geodesic loop
//! L at M extends to a closed geodesic through M whose second loop is the
//! image of L under the half-turn about M (reflection in the bisector of
//! edge 0 composed with the sheet swap), traversed backwards; the four
//! tangents at M then come in opposite pairs, so balancing is automatic.
//! The search therefore enumerates single loops at M by depth-first
//! unfolding along crossing words, pruned by angular windows.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::admissibility::{bifocal_admissible, figure8_loop_angles, LoopAngle};
use crate::construct::figure8_from_loop;
use crate::error::{NetlabError, Result};
use crate::geom::{point_segment_distance, Isometry, Vec2};
use crate::io::NetRecord;
use crate::net::{verify, GraphType, Net, NetEdge, Tolerance};
use crate::surface::{Direction, Locus, PolygonSpec, Sheet, Surface, SurfacePoint};
use crate::tracer::{
    exit_edge, solve_closed, trace, unfold, Arc, GeodesicPath, Limits, DEVELOP_TOL,
};

/// Loop turning angles must match an admissible value this closely.
pub const ANGLE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchTarget {
    #[serde(rename = "figure8")]
    Figure8,
    Bifocal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: u32,
    pub target: SearchTarget,
    pub max_word_length: usize,
    /// Absolute bound on loop length.
    pub max_length: f64,
    pub report_near_misses: bool,
    pub near_miss_tolerance: f64,
    /// Worker threads; `None` uses the global pool.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl SearchConfig {
    pub fn new(n: u32, target: SearchTarget) -> Self {
        SearchConfig {
            n,
            target,
            max_word_length: 24,
            max_length: 20.0,
            report_near_misses: true,
            near_miss_tolerance: 1e-3,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(NetlabError::InvalidSpec(format!("n = {} < 3", self.n)));
        }
        if self.max_word_length < 1 {
            return Err(NetlabError::InvalidSpec("max_word_length must be at least 1".into()));
        }
        if !(self.max_length > 0.0 && self.near_miss_tolerance > 0.0) {
            return Err(NetlabError::InvalidSpec("tolerances and lengths must be positive".into()));
        }
        Ok(())
    }
}

/// A geodesic loop found by the word enumeration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopCandidate {
    pub word: Vec<usize>,
    /// Departure direction (planar angle on the departure sheet).
    pub direction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearMiss {
    pub word: Vec<usize>,
    pub direction: f64,
    pub angle_defect: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Edge words as returned by `net_words`.
    pub words: Vec<Vec<usize>>,
    pub direction: f64,
    /// Turning angle of the loop faces.
    pub alpha: f64,
    /// Cone points enclosed by each loop face.
    pub x: Vec<usize>,
    pub net: Net,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub config: SearchConfig,
    pub candidates_examined: usize,
    pub solutions: Vec<Solution>,
    pub near_misses: Vec<NearMiss>,
    pub exhaustive_up_to: usize,
    pub note: String,
}

impl SearchReport {
    fn empty(config: &SearchConfig, note: &str) -> Self {
        SearchReport {
            config: config.clone(),
            candidates_examined: 0,
            solutions: Vec::new(),
            near_misses: Vec::new(),
            exhaustive_up_to: config.max_word_length,
            note: note.to_string(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "config": self.config,
            "candidates_examined": self.candidates_examined,
            "exhaustive_up_to": self.exhaustive_up_to,
            "note": self.note,
            "solutions": self.solutions.iter().map(|s| json!({
                "words": s.words,
                "direction": s.direction,
                "alpha": s.alpha,
                "x": s.x,
                "net": NetRecord::from(&s.net),
            })).collect::<Vec<_>>(),
            "near_misses": self.near_misses,
        })
    }
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| NetlabError::InvalidSpec(e.to_string())),
    }
}

struct Node {
    word: Vec<usize>,
    g: Isometry,
    arc: Arc,
    last: Option<usize>,
}

/// All loops at `anchor` departing into `sheet` with direction in
/// `root_arc`, with at most `max_word` crossings and length at most
/// `max_length`, sorted by (length of word, word).
pub fn enumerate_loops(
    s: &Surface,
    anchor: &SurfacePoint,
    root_arc: Arc,
    max_word: usize,
    max_length: f64,
) -> Vec<LoopCandidate> {
    let root = Node {
        word: Vec::new(),
        g: Isometry::IDENTITY,
        arc: root_arc,
        last: match anchor.locus {
            Locus::OnEdge { edge, .. } => Some(edge),
            _ => None,
        },
    };
    let children = expand(s, anchor, &root, max_length, &mut Vec::new());
    let mut found: Vec<LoopCandidate> = children
        .into_par_iter()
        .flat_map_iter(|child| {
            let mut out = Vec::new();
            dfs(s, anchor, child, max_word, max_length, &mut out);
            out
        })
        // closures on a window boundary run into a cone
        .filter(|c| loop_at(s, anchor, &c.word).is_some_and(|l| is_primitive(s, anchor, &l)))
        .collect();
    found.sort_by(|a, b| {
        (a.word.len(), &a.word)
            .cmp(&(b.word.len(), &b.word))
            .then(a.direction.total_cmp(&b.direction))
    });
    found
}

fn dfs(s: &Surface, anchor: &SurfacePoint, node: Node, max_word: usize, max_length: f64, out: &mut Vec<LoopCandidate>) {
    if node.word.len() > max_word {
        return;
    }
    let children = expand(s, anchor, &node, max_length, out);
    if node.word.len() == max_word {
        // closures were recorded by `expand`; deeper nodes are out of range
        return;
    }
    for c in children {
        dfs(s, anchor, c, max_word, max_length, out);
    }
}

/// Children of `node` (one per exit edge with a nonempty window) and the
/// loops closing inside the node's polygon copy.
fn expand(s: &Surface, anchor: &SurfacePoint, node: &Node, max_length: f64, out: &mut Vec<LoopCandidate>) -> Vec<Node> {
    let p = anchor.coords;
    let target = node.g.apply(p);
    let closing = (target - p).angle();
    let within = target.dist(p) <= max_length;
    let mut children = Vec::new();
    if let Locus::Interior = anchor.locus {
        if !node.word.is_empty() && node.word.len().is_multiple_of(2) && within && node.arc.contains(closing) {
            out.push(LoopCandidate {
                word: node.word.clone(),
                direction: closing.rem_euclid(TAU),
            });
        }
    }
    for e in 0..s.edge_count() {
        if Some(e) == node.last {
            continue;
        }
        let (a, b) = s.edge(e);
        let (ga, gb) = (node.g.apply(a), node.g.apply(b));
        if point_segment_distance(p, ga, gb) > max_length {
            continue;
        }
        let arc = node.arc.intersect(&Arc::window(p, ga, gb));
        if arc.is_empty() {
            continue;
        }
        let g = node.g.compose(&s.edge_reflection(e));
        let mut word = node.word.clone();
        word.push(e);
        let closes_here = matches!(anchor.locus, Locus::OnEdge { edge, .. } if edge == e)
            && !node.word.is_empty()
            && within
            && arc.contains(closing);
        if closes_here {
            out.push(LoopCandidate {
                word: node.word.clone(),
                direction: closing.rem_euclid(TAU),
            });
            let t = arc.unwrap(closing);
            for part in [Arc { lo: arc.lo, hi: t }, Arc { lo: t, hi: arc.hi }] {
                if !part.is_empty() {
                    children.push(Node { word: word.clone(), g, arc: part, last: Some(e) });
                }
            }
        } else {
            children.push(Node { word, g, arc, last: Some(e) });
        }
    }
    children
}

/// Departure arc at the midpoint of edge 0 modulo the reflection in the
/// edge's perpendicular bisector: from the edge direction up to the normal.
pub fn figure8_root_arc(s: &Surface) -> Arc {
    let lo = s.edge_tangent(0).angle();
    Arc { lo, hi: lo + FRAC_PI_2 + 1e-9 }
}

/// Loops at the midpoint of edge 0 explored by the figure-eight search.
pub fn figure8_loops(s: &Surface, max_word: usize, max_length: f64) -> Result<Vec<LoopCandidate>> {
    let m = s.edge_midpoint(0)?;
    Ok(enumerate_loops(s, &m, figure8_root_arc(s), max_word, max_length))
}

fn angle_defect(alpha: f64, admissible: &[LoopAngle]) -> (f64, Option<LoopAngle>) {
    admissible
        .iter()
        .map(|a| ((alpha - a.radians()).abs(), Some(*a)))
        .fold((f64::INFINITY, None), |best, c| if c.0 < best.0 { c } else { best })
}

fn loop_faces(net: &Net, tol: Tolerance) -> Option<(Vec<usize>, f64)> {
    let r = verify(net, tol).ok()?;
    if !r.passed {
        return None;
    }
    let loops: Vec<_> = r.faces.iter().filter(|f| f.y == 1).collect();
    let alpha = loops.first()?.turning_angles[0];
    Some((loops.iter().map(|f| f.x).collect(), alpha))
}

enum Verdict {
    Solution(Solution),
    Near(NearMiss),
    Reject,
}

fn judge_figure8(s: &Surface, cand: &LoopCandidate, admissible: &[LoopAngle], cfg: &SearchConfig) -> Verdict {
    let Ok(loops) = solve_closed(s, &cand.word, 0) else {
        return Verdict::Reject;
    };
    let Some(l) = loops.into_iter().next() else {
        return Verdict::Reject;
    };
    let alpha = PI - l.corner_angle;
    let (defect, entry) = angle_defect(alpha, admissible);
    let near = |reason: &str| {
        if cfg.report_near_misses && defect < cfg.near_miss_tolerance {
            Verdict::Near(NearMiss {
                word: cand.word.clone(),
                direction: cand.direction,
                angle_defect: defect,
                reason: reason.to_string(),
            })
        } else {
            Verdict::Reject
        }
    };
    if defect > ANGLE_TOL {
        return near("turning angle not admissible");
    }
    let entry = entry.expect("finite defect has an entry");
    let Ok(net) = figure8_from_loop(s, l.path) else {
        return near("second loop does not close");
    };
    match loop_faces(&net, Tolerance::for_scale(s.scale())) {
        Some((xs, a)) if xs.len() == 2 && xs.iter().all(|&x| x == entry.x as usize) => {
            let words = net_words(&net);
            Verdict::Solution(Solution {
                words,
                direction: cand.direction,
                alpha: a,
                x: xs,
                net,
            })
        }
        Some(_) => near("enclosed cone count differs from the admissible value"),
        None => near("verification failed (not embedded)"),
    }
}

/// Edge words of a net, each read in its lexicographically smaller
/// direction, sorted. Equal for a net and its reversal.
pub fn net_words(net: &Net) -> Vec<Vec<usize>> {
    let mut words: Vec<Vec<usize>> = net
        .edges
        .iter()
        .map(|e| {
            let w = e.path.word.edges.clone();
            let r: Vec<usize> = w.iter().rev().copied().collect();
            w.min(r)
        })
        .collect();
    words.sort();
    words
}

fn finish(mut solutions: Vec<Solution>) -> Vec<Solution> {
    let mut seen = BTreeMap::new();
    solutions.sort_by(|a, b| a.words.cmp(&b.words).then(a.direction.total_cmp(&b.direction)));
    solutions.retain(|s| seen.insert(s.words.clone(), ()).is_none());
    solutions
}

/// Search for figure-eights on the doubled regular n-gon.
pub fn search_figure8(cfg: &SearchConfig) -> Result<SearchReport> {
    cfg.validate()?;
    let admissible = figure8_loop_angles(cfg.n).entries;
    if admissible.is_empty() {
        return Ok(SearchReport::empty(cfg, "no admissible loop turning angle"));
    }
    let s = Surface::new(PolygonSpec::regular(cfg.n, 1.0))?;
    with_threads(cfg.threads, || {
        let loops = figure8_loops(&s, cfg.max_word_length, cfg.max_length)?;
        let verdicts: Vec<Verdict> = loops
            .par_iter()
            .map(|c| judge_figure8(&s, c, &admissible, cfg))
            .collect();
        let mut solutions = Vec::new();
        let mut near_misses = Vec::new();
        for v in verdicts {
            match v {
                Verdict::Solution(x) => solutions.push(x),
                Verdict::Near(x) => near_misses.push(x),
                Verdict::Reject => {}
            }
        }
        Ok(SearchReport {
            config: cfg.clone(),
            candidates_examined: loops.len(),
            solutions: finish(solutions),
            near_misses,
            exhaustive_up_to: cfg.max_word_length,
            note: format!(
                "loops at the midpoint of edge 0 with at most {} crossings and length at most {}; \
                 no claim is made beyond this bound",
                cfg.max_word_length, cfg.max_length
            ),
        })
    })?
}

/// Symmetries of the doubled regular n-gon: rotations and reflections of
/// the polygon, each with or without the sheet swap.
fn dihedral(n: u32) -> Vec<(Isometry, bool)> {
    let mut out = Vec::new();
    for k in 0..n {
        let rot = Isometry::rotation(TAU * k as f64 / n as f64);
        let refl = rot.compose(&Isometry::reflection(Vec2::ZERO, Vec2::new(1.0, 0.0)));
        for swap in [false, true] {
            out.push((rot, swap));
            out.push((refl, swap));
        }
    }
    out
}

fn apply_sym(s: &Surface, sym: &(Isometry, bool), p: &SurfacePoint) -> Option<SurfacePoint> {
    let sheet = if sym.1 { p.sheet.flip() } else { p.sheet };
    s.point(sheet, sym.0.apply(p.coords)).ok()
}

/// Corner angle of the loop with `word` at `p`, when it exists.
fn loop_at(s: &Surface, p: &SurfacePoint, word: &[usize]) -> Option<GeodesicPath> {
    let g = *unfold(s, word).last()?;
    let chord = g.apply(p.coords) - p.coords;
    if chord.norm() <= DEVELOP_TOL * s.scale() {
        return None;
    }
    let path = trace(s, p, p.sheet, Direction::from_vec(chord), Limits::new(chord.norm(), word.len())).ok()?;
    (path.word.edges == word && path.end.same_point(p, 1e-9 * s.scale())).then_some(path)
}

/// False for a loop that passes through its base point before closing,
/// i.e. an iterate of a shorter loop.
fn is_primitive(s: &Surface, p: &SurfacePoint, l: &GeodesicPath) -> bool {
    let tol = 1e-9 * s.scale();
    let last = l.segments.len().saturating_sub(1);
    let through_crossing = l.crossings.iter().any(|c| c.point.dist(p.coords) <= tol);
    let through_interior = l.segments.iter().enumerate().any(|(k, seg)| {
        k != 0 && k != last && seg.sheet == p.sheet && point_segment_distance(p.coords, seg.from, seg.to) <= tol
    });
    !(through_crossing || through_interior)
}

fn corner(s: &Surface, path: &GeodesicPath) -> f64 {
    let d = path.start_tangent(s);
    let e = path.end_tangent(s);
    crate::geom::angle_between(d.angle(), e.angle())
}

/// Try to join a loop at `p` to a symmetric copy of itself by a geodesic
/// leaving along the third balanced direction.
fn connect(s: &Surface, p: &SurfacePoint, l: &GeodesicPath, cfg: &SearchConfig) -> Option<Net> {
    let t = -(l.start_tangent(s).normalized() + l.end_tangent(s).normalized());
    let (sheet, planar) = s.from_local(p, t.normalized()).ok()?;
    let ray = trace(s, p, sheet, Direction::from_vec(planar), Limits::new(cfg.max_length, cfg.max_word_length)).ok()?;
    let tol = 1e-9 * s.scale();
    let mut walked = 0.0;
    for (k, seg) in ray.segments.iter().enumerate() {
        for sym in dihedral(s.edge_count() as u32) {
            let Some(q) = apply_sym(s, &sym, p) else { continue };
            if !(q.is_on_boundary() || q.sheet == seg.sheet) || q.same_point(p, tol) {
                continue;
            }
            let d = seg.to - seg.from;
            let u = (q.coords - seg.from).dot(d) / d.dot(d);
            if !(0.0..=1.0).contains(&u) || seg.from.lerp(seg.to, u).dist(q.coords) > tol {
                continue;
            }
            let vs = vec![*p, q];
            let length = walked + seg.from.dist(q.coords);
            let bridge = Net::trace_edge(s, &vs, 0, 1, sheet, Direction::from_vec(planar), length, k).ok()?;
            let q_loop = trace(
                s,
                &q,
                if sym.1 { l.start_sheet.flip() } else { l.start_sheet },
                Direction::from_vec(sym.0.apply_vec(l.direction.vec())),
                Limits::new(l.length, l.word.len()),
            )
            .ok()?;
            let edges = vec![
                NetEdge { a: 0, b: 0, path: l.clone() },
                NetEdge { a: 1, b: 1, path: q_loop },
                bridge,
            ];
            if let Ok(net) = Net::new(s.clone(), vs, edges, GraphType::Bifocal) {
                if verify(&net, Tolerance::for_scale(s.scale())).is_ok_and(|r| r.passed) {
                    return Some(net);
                }
            }
        }
        walked += seg.length();
    }
    None
}

/// Number of anchors on the symmetry axis between the center and the
/// midpoint of edge 0.
pub const AXIS_ANCHORS: usize = 48;

/// Heuristic search for bifocal nets. Loops are anchored at the midpoint of
/// edge 0 and along the axis through it; loop corners of 2π/3 are located
/// by bisection along the axis, and each is tested for a connecting
/// geodesic to a symmetric copy. A zero result says nothing about existence.
pub fn search_bifocal(cfg: &SearchConfig) -> Result<SearchReport> {
    cfg.validate()?;
    let adm = bifocal_admissible(cfg.n);
    if !adm.admissible {
        return Ok(SearchReport::empty(cfg, "bifocal not admissible for this n"));
    }
    let s = Surface::new(PolygonSpec::regular(cfg.n, 1.0))?;
    let target = 2.0 * PI / 3.0;
    let m = s.edge_point(0, 0.5);
    let axis = m.normalized().angle();
    let anchor_at = |f: f64| s.point(Sheet::Top, m * f);
    with_threads(cfg.threads, || {
        let fractions: Vec<f64> = (1..=AXIS_ANCHORS).map(|i| i as f64 / (AXIS_ANCHORS + 1) as f64).collect();
        let per_anchor: Vec<Vec<LoopCandidate>> = fractions
            .par_iter()
            .map(|&f| {
                let p = anchor_at(f).expect("axis point inside");
                enumerate_loops(&s, &p, Arc { lo: axis, hi: axis + PI }, cfg.max_word_length, cfg.max_length)
            })
            .collect();
        let mid = s.edge_midpoint(0)?;
        let mid_loops = enumerate_loops(&s, &mid, crate::tracer::anchor_arc(&s, &mid), cfg.max_word_length, cfg.max_length);
        let examined = per_anchor.iter().map(Vec::len).sum::<usize>() + mid_loops.len();

        // corner(f) for each word along the axis; bracket 2π/3 and bisect
        let mut by_word: BTreeMap<Vec<usize>, Vec<(usize, f64)>> = BTreeMap::new();
        for (i, loops) in per_anchor.iter().enumerate() {
            for c in loops {
                let p = anchor_at(fractions[i])?;
                if let Some(path) = loop_at(&s, &p, &c.word) {
                    by_word.entry(c.word.clone()).or_default().push((i, corner(&s, &path)));
                }
            }
        }
        let mut hits: Vec<(Vec<usize>, f64)> = Vec::new();
        let mut near_misses = Vec::new();
        for (word, samples) in &by_word {
            for w in samples.windows(2) {
                let ((i, c0), (j, c1)) = (w[0], w[1]);
                if j != i + 1 || (c0 - target).signum() == (c1 - target).signum() {
                    continue;
                }
                let (mut lo, mut hi) = (fractions[i], fractions[j]);
                let mut ok = true;
                for _ in 0..80 {
                    let mid_f = 0.5 * (lo + hi);
                    let Some(path) = loop_at(&s, &anchor_at(mid_f)?, word) else {
                        ok = false;
                        break;
                    };
                    if (corner(&s, &path) - target).signum() == (c0 - target).signum() {
                        lo = mid_f;
                    } else {
                        hi = mid_f;
                    }
                }
                if ok {
                    hits.push((word.clone(), 0.5 * (lo + hi)));
                }
            }
        }
        for c in &mid_loops {
            if let Some(path) = loop_at(&s, &mid, &c.word) {
                let d = (corner(&s, &path) - target).abs();
                if d <= ANGLE_TOL {
                    hits.push((c.word.clone(), 1.0));
                } else if cfg.report_near_misses && d < cfg.near_miss_tolerance {
                    near_misses.push(NearMiss {
                        word: c.word.clone(),
                        direction: c.direction,
                        angle_defect: d,
                        reason: "loop corner differs from 2π/3".into(),
                    });
                }
            }
        }
        let loop_x = adm.loop_x.expect("admissible") as usize;
        let mut solutions = Vec::new();
        for (word, f) in &hits {
            let p = if *f >= 1.0 { mid } else { anchor_at(*f)? };
            let Some(path) = loop_at(&s, &p, word) else { continue };
            match connect(&s, &p, &path, cfg) {
                Some(net) => {
                    let r = verify(&net, Tolerance::for_scale(s.scale()))?;
                    let xs: Vec<usize> = r.faces.iter().filter(|f| f.y == 1).map(|f| f.x).collect();
                    if xs.iter().all(|&x| x == loop_x) {
                        let words = net_words(&net);
                        solutions.push(Solution {
                            words,
                            direction: path.direction.angle(),
                            alpha: PI / 3.0,
                            x: xs,
                            net,
                        });
                    }
                }
                None if cfg.report_near_misses => near_misses.push(NearMiss {
                    word: word.clone(),
                    direction: path.direction.angle(),
                    angle_defect: 0.0,
                    reason: "loop with 2π/3 corner has no connecting geodesic to a symmetric copy".into(),
                }),
                None => {}
            }
        }
        Ok(SearchReport {
            config: cfg.clone(),
            candidates_examined: examined,
            solutions: finish(solutions),
            near_misses,
            exhaustive_up_to: cfg.max_word_length,
            note: "heuristic: loops anchored at the midpoint of edge 0 and on its symmetry axis only; \
                   an empty result is inconclusive"
                .into(),
        })
    })?
}

pub fn search(cfg: &SearchConfig) -> Result<SearchReport> {
    match cfg.target {
        SearchTarget::Figure8 => search_figure8(cfg),
        SearchTarget::Bifocal => search_bifocal(cfg),
    }
}

/// A loop at an edge point found by direction sampling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledLoop {
    pub direction: f64,
    pub word: Vec<usize>,
    pub length: f64,
    /// Distance of the return point from the start.
    pub miss: f64,
}

/// Signed returns of a trajectory to the start edge: (crossings before the
/// return, offset along the edge from the start point, length so far).
fn returns(s: &Surface, start: &SurfacePoint, edge: usize, theta: f64, max_length: f64) -> (Vec<usize>, Vec<(usize, f64, f64)>) {
    let u = s.edge_tangent(edge);
    let mut p = start.coords;
    let mut d = Vec2::from_angle(theta);
    let mut skip = vec![edge];
    let mut word = Vec::new();
    let mut out = Vec::new();
    let mut len = 0.0;
    let tol = s.tol();
    while let Some((t, e)) = exit_edge(s, p, d, &skip) {
        let q = p + d * t;
        len += t;
        if len > max_length || s.vertices().iter().any(|v| v.dist(q) <= tol) {
            break;
        }
        if e == edge {
            out.push((word.len(), (q - start.coords).dot(u), len));
        }
        word.push(e);
        d = s.reflect_dir(e, d);
        p = q;
        skip.clear();
        skip.push(e);
    }
    (word, out)
}

/// Independent oracle for loops at an edge point: sample departure
/// directions uniformly over the open half-turn into the top sheet, track
/// sign changes of the return offset along the start edge between
/// neighbouring samples that share a crossing word, and refine each by
/// bisection on the traced trajectory alone.
pub fn brute_force_closed(
    s: &Surface,
    start: &SurfacePoint,
    direction_samples: usize,
    max_length: f64,
) -> Result<Vec<SampledLoop>> {
    let Locus::OnEdge { edge, .. } = start.locus else {
        return Err(NetlabError::InvalidSpec("direction sampling needs a start on an edge".into()));
    };
    if direction_samples == 0 || max_length <= 0.0 {
        return Ok(Vec::new());
    }
    let base = s.edge_tangent(edge).angle();
    let theta = |i: usize| base + PI * (i as f64 + 0.5) / direction_samples as f64;
    let accept = 1e-6 * s.scale();
    let found: Vec<SampledLoop> = (0..direction_samples.saturating_sub(1))
        .into_par_iter()
        .with_min_len(1024)
        .map_init(
            || None::<(usize, (Vec<usize>, Vec<(usize, f64, f64)>))>,
            |cache, i| {
                let left = match cache.take() {
                    Some((j, r)) if j == i => r,
                    _ => returns(s, start, edge, theta(i), max_length),
                };
                let right = returns(s, start, edge, theta(i + 1), max_length);
                let mut hits = Vec::new();
                for &(k, off0, _) in &left.1 {
                    let Some(&(_, off1, _)) = right.1.iter().find(|r| r.0 == k) else { continue };
                    if left.0.get(..k) != right.0.get(..k) || off0.signum() == off1.signum() {
                        continue;
                    }
                    let prefix = left.0[..k].to_vec();
                    let (mut lo, mut hi) = (theta(i), theta(i + 1));
                    let mut f_lo = off0;
                    let mut last = None;
                    for _ in 0..100 {
                        let mid = 0.5 * (lo + hi);
                        let (w, r) = returns(s, start, edge, mid, max_length);
                        let Some(&(_, off, l)) = r.iter().find(|r| r.0 == k) else { break };
                        if w.get(..k) != Some(&prefix[..]) {
                            break;
                        }
                        let through = r.iter().any(|e| e.0 < k && e.1.abs() <= accept);
                        last = Some((mid, off, l, through));
                        if off.signum() == f_lo.signum() {
                            lo = mid;
                            f_lo = off;
                        } else {
                            hi = mid;
                        }
                        if off.abs() <= 1e-3 * accept {
                            break;
                        }
                    }
                    if let Some((dir, off, l, through)) = last {
                        // loops that pass through the start earlier are iterates
                        if off.abs() <= accept && !through {
                            hits.push(SampledLoop {
                                direction: dir.rem_euclid(TAU),
                                word: prefix,
                                length: l,
                                miss: off.abs(),
                            });
                        }
                    }
                }
                *cache = Some((i + 1, right));
                hits
            },
        )
        .flatten()
        .collect();
    Ok(found)
}

/// Loops at the midpoint of edge 0 of the doubled regular n-gon, from the
/// word enumeration and from direction sampling, matched by word up to the
/// reflection in the bisector of edge 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingAgreement {
    pub enumerated: usize,
    pub sampled: usize,
    /// Sampled loops whose word (or mirror word) the enumeration lacks.
    pub missing_from_search: Vec<Vec<usize>>,
    /// Enumerated loops not hit by sampling.
    pub missing_from_sampling: Vec<Vec<usize>>,
}

impl SamplingAgreement {
    pub fn agrees(&self) -> bool {
        self.missing_from_search.is_empty() && self.missing_from_sampling.is_empty()
    }
}

pub fn compare_with_sampling(n: u32, max_word: usize, max_length: f64, samples: usize) -> Result<SamplingAgreement> {
    let s = Surface::new(PolygonSpec::regular(n, 1.0))?;
    let m = s.edge_midpoint(0)?;
    let enumerated = figure8_loops(&s, max_word, max_length)?;
    // keep clear of the length cutoff, where the two bounds differ in rounding
    let margin = 1e-6 * s.scale();
    let sampled: Vec<SampledLoop> = brute_force_closed(&s, &m, samples, max_length)?
        .into_iter()
        .filter(|l| l.word.len() <= max_word && l.length < max_length - margin)
        .collect();
    let mirror = |w: &[usize]| -> Vec<usize> { w.iter().map(|&j| (n as usize - j) % n as usize).collect() };
    let mut missing_from_search: Vec<Vec<usize>> = sampled
        .iter()
        .filter(|l| !enumerated.iter().any(|c| c.word == l.word || c.word == mirror(&l.word)))
        .map(|l| l.word.clone())
        .collect();
    missing_from_search.sort();
    missing_from_search.dedup();
    let missing_from_sampling = enumerated
        .iter()
        .filter(|c| {
            let l = unfold(&s, &c.word).last().map(|g| g.apply(m.coords).dist(m.coords)).unwrap_or(0.0);
            l < max_length - margin && !sampled.iter().any(|x| x.word == c.word)
        })
        .map(|c| c.word.clone())
        .collect();
    Ok(SamplingAgreement {
        enumerated: enumerated.len(),
        sampled: sampled.len(),
        missing_from_search,
        missing_from_sampling,
    })
}

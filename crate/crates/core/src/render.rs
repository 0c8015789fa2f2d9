//! SVG output: both sheets side by side, or the development of one edge.
//!
//! Output is a pure function of the input: elements are emitted in a fixed
//! order and every coordinate is printed with six decimals.

use std::f64::consts::PI;
use std::fmt::Write;

use crate::error::{NetlabError, Result};
use crate::geom::Vec2;
use crate::net::Net;
use crate::surface::{Sheet, Surface};
use crate::tracer::develop;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderMode {
    Sheets,
    /// Development of the given net edge.
    Development(usize),
}

const PX: f64 = 200.0;
const MARGIN: f64 = 30.0;
const EDGE_COLORS: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// `c/π` as a short fraction when one with denominator at most 360 fits.
pub fn pi_label(c: f64) -> String {
    let r = c / PI;
    for d in 1..=360i64 {
        let k = (r * d as f64).round();
        if (r * d as f64 - k).abs() < 1e-9 {
            let k = k as i64;
            return match (k, d) {
                (0, _) => "0".into(),
                (1, 1) => "π".into(),
                (k, 1) => format!("{k}π"),
                (1, d) => format!("π/{d}"),
                (k, d) => format!("{k}π/{d}"),
            };
        }
    }
    format!("{}π", num(r))
}

struct Canvas {
    body: String,
    min: Vec2,
    max: Vec2,
}

impl Canvas {
    fn new() -> Self {
        Canvas {
            body: String::new(),
            min: Vec2::new(f64::INFINITY, f64::INFINITY),
            max: Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, p: Vec2) {
        self.min = Vec2::new(self.min.x.min(p.x), self.min.y.min(p.y));
        self.max = Vec2::new(self.max.x.max(p.x), self.max.y.max(p.y));
    }

    fn pt(p: Vec2) -> String {
        format!("{},{}", num(p.x * PX), num(-p.y * PX))
    }

    fn polygon(&mut self, pts: &[Vec2], style: &str) {
        pts.iter().for_each(|&p| self.grow(p));
        let list: Vec<String> = pts.iter().map(|&p| Self::pt(p)).collect();
        let _ = writeln!(self.body, "<polygon points=\"{}\" {style}/>", list.join(" "));
    }

    fn line(&mut self, a: Vec2, b: Vec2, style: &str) {
        self.grow(a);
        self.grow(b);
        let _ = writeln!(
            self.body,
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" {style}/>",
            num(a.x * PX),
            num(-a.y * PX),
            num(b.x * PX),
            num(-b.y * PX)
        );
    }

    fn dot(&mut self, p: Vec2, r: f64, fill: &str) {
        self.grow(p);
        let _ = writeln!(
            self.body,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{fill}\"/>",
            num(p.x * PX),
            num(-p.y * PX),
            num(r)
        );
    }

    fn text(&mut self, p: Vec2, s: &str, size: f64) {
        let _ = writeln!(
            self.body,
            "<text x=\"{}\" y=\"{}\" font-size=\"{}\" font-family=\"sans-serif\">{s}</text>",
            num(p.x * PX),
            num(-p.y * PX),
            num(size)
        );
    }

    fn finish(self) -> String {
        let (min, max) = if self.min.x.is_finite() {
            (self.min, self.max)
        } else {
            (Vec2::ZERO, Vec2::ZERO)
        };
        let x0 = min.x * PX - MARGIN;
        let y0 = -max.y * PX - MARGIN;
        let w = (max.x - min.x) * PX + 2.0 * MARGIN;
        let h = (max.y - min.y) * PX + 2.0 * MARGIN;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"{}\" height=\"{}\">\n{}</svg>\n",
            num(x0),
            num(y0),
            num(w),
            num(h),
            num(w),
            num(h),
            self.body
        )
    }
}

fn color(i: usize) -> &'static str {
    EDGE_COLORS[i % EDGE_COLORS.len()]
}

const OUTLINE: &str = "fill=\"#f4f4f4\" stroke=\"#333333\" stroke-width=\"1\"";

fn sheets(net: &Net) -> String {
    let s = &net.surface;
    let vs = s.vertices();
    let width = vs.iter().map(|v| v.x).fold(f64::NEG_INFINITY, f64::max)
        - vs.iter().map(|v| v.x).fold(f64::INFINITY, f64::min);
    let gap = width + 0.3 * s.scale();
    let offset = |sheet: Sheet| match sheet {
        Sheet::Top => Vec2::ZERO,
        Sheet::Bottom => Vec2::new(gap, 0.0),
    };
    let mut c = Canvas::new();
    for (sheet, name) in [(Sheet::Top, "top"), (Sheet::Bottom, "bottom")] {
        let o = offset(sheet);
        let pts: Vec<Vec2> = vs.iter().map(|&v| v + o).collect();
        c.polygon(&pts, OUTLINE);
        let low = vs.iter().map(|v| v.y).fold(f64::INFINITY, f64::min);
        let centre = s.centroid();
        c.text(Vec2::new(centre.x + o.x, low - 0.1 * s.scale()), name, 12.0);
    }
    for (i, e) in net.edges.iter().enumerate() {
        let style = format!("stroke=\"{}\" stroke-width=\"2\" fill=\"none\"", color(i));
        for seg in &e.path.segments {
            c.line(seg.from + offset(seg.sheet), seg.to + offset(seg.sheet), &style);
        }
    }
    for (k, cone) in s.cones().iter().enumerate() {
        let label = pi_label(cone.curvature);
        for sheet in [Sheet::Top, Sheet::Bottom] {
            let p = vs[k] + offset(sheet);
            c.dot(p, 3.0, "#000000");
            let out = (vs[k] - s.centroid()).normalized() * (0.08 * s.scale());
            c.text(p + out, &label, 10.0);
        }
    }
    for v in &net.vertices {
        let sheets: &[Sheet] = if v.is_on_boundary() { &[Sheet::Top, Sheet::Bottom] } else { std::slice::from_ref(&v.sheet) };
        for &sh in sheets {
            c.dot(v.coords + offset(sh), 4.0, "#000000");
        }
    }
    c.finish()
}

fn development(net: &Net, edge: usize) -> Result<String> {
    let e = net
        .edges
        .get(edge)
        .ok_or_else(|| NetlabError::InvalidSpec(format!("net has no edge {edge}")))?;
    let s: &Surface = &net.surface;
    let dev = develop(s, &e.path)?;
    let mut c = Canvas::new();
    for (k, g) in dev.isometries.iter().enumerate() {
        let pts: Vec<Vec2> = s.vertices().iter().map(|&v| g.apply(v)).collect();
        c.polygon(&pts, OUTLINE);
        let centre = g.apply(s.centroid());
        c.text(centre, &k.to_string(), 10.0);
    }
    let style = format!("stroke=\"{}\" stroke-width=\"2\" fill=\"none\"", color(edge));
    c.line(dev.start, dev.end, &style);
    c.dot(dev.start, 4.0, "#000000");
    c.dot(dev.end, 4.0, "#000000");
    Ok(c.finish())
}

pub fn render(net: &Net, mode: RenderMode) -> Result<String> {
    match mode {
        RenderMode::Sheets => Ok(sheets(net)),
        RenderMode::Development(k) => development(net, k),
    }
}

//! JSON persistence for nets.

use serde::{Deserialize, Serialize};

use crate::error::{NetlabError, Result};
use crate::geom::Vec2;
use crate::net::{GraphType, Net};
use crate::surface::{Direction, PolygonSpec, Sheet, Surface, SurfacePoint};
use crate::tracer::unfold;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub sheet: Sheet,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub a: usize,
    pub b: usize,
    pub word: Vec<usize>,
    pub direction: f64,
    /// Departure sheet; defaults to the sheet of vertex `a`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sheet: Option<Sheet>,
    /// Defaults to the developed distance from `a` to `b` along the word.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetRecord {
    pub surface: PolygonSpec,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
    #[serde(rename = "type")]
    pub graph_type: GraphType,
}

impl From<&Net> for NetRecord {
    fn from(net: &Net) -> Self {
        NetRecord {
            surface: *net.surface.spec(),
            vertices: net
                .vertices
                .iter()
                .map(|v| VertexRecord {
                    sheet: v.sheet,
                    x: v.coords.x,
                    y: v.coords.y,
                })
                .collect(),
            edges: net
                .edges
                .iter()
                .map(|e| EdgeRecord {
                    a: e.a,
                    b: e.b,
                    word: e.path.word.edges.clone(),
                    direction: e.path.direction.angle(),
                    sheet: Some(e.path.start_sheet),
                    length: Some(e.path.length),
                })
                .collect(),
            graph_type: net.graph_type,
        }
    }
}

fn resolve_length(
    surface: &Surface,
    vertices: &[SurfacePoint],
    e: &EdgeRecord,
) -> Result<f64> {
    if let Some(l) = e.length {
        return Ok(l);
    }
    let iso = unfold(surface, &e.word);
    let developed_end = iso.last().map_or(vertices[e.b].coords, |g| g.apply(vertices[e.b].coords));
    Ok(developed_end.dist(vertices[e.a].coords))
}

impl NetRecord {
    pub fn into_net(self) -> Result<Net> {
        let surface = Surface::new(self.surface)?;
        let vertices = self
            .vertices
            .iter()
            .map(|v| surface.point(v.sheet, Vec2::new(v.x, v.y)))
            .collect::<Result<Vec<_>>>()?;
        let mut edges = Vec::with_capacity(self.edges.len());
        for (i, e) in self.edges.iter().enumerate() {
            if e.a >= vertices.len() || e.b >= vertices.len() {
                return Err(NetlabError::MalformedNet(format!(
                    "edge {i} references a missing vertex"
                )));
            }
            let sheet = e.sheet.unwrap_or(vertices[e.a].sheet);
            let length = resolve_length(&surface, &vertices, e)?;
            let edge = Net::trace_edge(
                &surface,
                &vertices,
                e.a,
                e.b,
                sheet,
                Direction::new(e.direction),
                length,
                e.word.len(),
            )?;
            if edge.path.word.edges != e.word {
                return Err(NetlabError::MalformedNet(format!(
                    "edge {i} crosses {:?}, file says {:?}",
                    edge.path.word.edges, e.word
                )));
            }
            edges.push(edge);
        }
        Net::new(surface, vertices, edges, self.graph_type)
    }
}

pub fn net_to_json(net: &Net) -> String {
    serde_json::to_string_pretty(&NetRecord::from(net)).expect("net records always serialize")
}

pub fn net_from_json(s: &str) -> Result<Net> {
    serde_json::from_str::<NetRecord>(s)?.into_net()
}

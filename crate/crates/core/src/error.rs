use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetlabError {
    #[error("invalid polygon spec: {0}")]
    InvalidSpec(String),
    #[error("point ({x}, {y}) lies outside the polygon")]
    OutsidePolygon { x: f64, y: f64 },
    #[error("edge index {0} out of range")]
    NoSuchEdge(usize),
    #[error("trajectory hits cone point {cone} after {crossings} crossings")]
    SingularHit { cone: usize, crossings: usize },
    #[error("geodesic cannot start at cone point {0}")]
    StartAtCone(usize),
    #[error("direction does not enter the polygon from an edge point")]
    DirectionLeavesPolygon,
    #[error("path is not a geodesic: development deviates by {deviation:e}")]
    NotGeodesic { deviation: f64 },
    #[error("malformed net: {0}")]
    MalformedNet(String),
    #[error("balancing needs at least three tangents, got {0}")]
    FewerThanThree(usize),
    #[error("invalid triangle: {0}")]
    InvalidTriangle(String),
    #[error("n = {0} is not a multiple of 3")]
    NotMultipleOf3(u32),
    #[error("n = {0} is not a multiple of 4")]
    NotMultipleOf4(u32),
    #[error("n = {0} is not odd")]
    NotOdd(u32),
    #[error("triangle is not isosceles")]
    NotIsosceles,
    #[error("net does not cross the boundary only at edge midpoints: {0}")]
    NotMidpointPerpendicular(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for NetlabError {
    fn from(e: serde_json::Error) -> Self {
        NetlabError::Json(e.to_string())
    }
}

pub type Result<T, E = NetlabError> = std::result::Result<T, E>;

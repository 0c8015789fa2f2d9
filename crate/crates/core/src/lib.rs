//! Geodesic nets on doubled polygons.

pub mod admissibility;
pub mod cli;
pub mod construct;
pub mod error;
pub mod geom;
pub mod io;
pub mod net;
pub mod render;
pub mod repro;
pub mod search;
pub mod surface;
pub mod tracer;

pub use error::{NetlabError, Result};

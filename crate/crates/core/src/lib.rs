pub mod deploy;
pub mod error;
pub mod geometry;
pub mod io;
pub mod orthogonal;
pub mod partition;
pub mod render;
pub mod serve;
pub mod simulate;
pub mod starzones;
pub mod triangulation;

pub use error::{Error, PolygonError, Result};

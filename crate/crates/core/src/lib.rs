//! Colored link diagrams, Reidemeister and saddle moves, and a reduction that
//! splits trefoils off a colored link.

pub mod catalog;
pub mod cli;
pub mod coloring;
pub mod diagram;
pub mod error;
pub mod group;
pub mod moves;
pub mod oracle;
mod planar;
pub mod reduce;

pub use diagram::{ArcId, Crossing, LinkDiagram};
pub use error::{Error, Result};
pub use group::{Elem, FiniteGroup, StabilizerSet};

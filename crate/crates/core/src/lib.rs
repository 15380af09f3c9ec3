pub mod canon;
pub mod constructions;
pub mod containment;
pub mod error;
pub mod family;
pub mod graph;
pub mod graph6;
pub mod invariants;
pub mod oracle;
pub mod predictor;

pub use error::{Error, Result};
pub use graph::{Graph, NamedGraph};

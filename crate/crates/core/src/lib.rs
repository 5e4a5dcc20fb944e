//! Combinatorial characteristic foliations on the 2-sphere: validation,
//! tightness via taming functions, elementary moves and ball extension.

pub mod ball;
pub mod canonical;
pub mod embedding;
pub mod enumerate;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod invariants;
pub mod model;
pub mod moves;
pub mod render;
pub mod taming;
pub mod tightness;
pub mod validate;

pub use error::{Error, Result};
pub use model::{End, FoliationGraph, PointKind, Separatrix, Sign, SingularPoint};
pub use validate::{validate, ValidationReport, Violation};

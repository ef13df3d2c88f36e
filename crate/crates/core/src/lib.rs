//! Knot Floer homology of the lift of a knot to its cyclic branched covers,
//! computed from grid diagrams, with the chain maps of the grid moves.

pub mod catalog;
pub mod complex;
pub mod cover;
pub mod error;
pub mod gf2;
pub mod grading;
pub mod grid;
pub mod homology;
pub mod maps;
pub mod pipeline;
pub mod signs;
pub mod snf;

pub use complex::{Generator, GradedComplex};
pub use cover::{build_lifted, LiftedDiagram};
pub use error::{Error, Result};
pub use grid::{parse_grid, Axis, GridDiagram, GridError, Half, Side, StabilizeVariant};
pub use homology::{BigradedHomology, HomologyReport, Ring};
pub use signs::{SignAssignment, VariableOrder};

//! Fixtures shared by the benchmarks.

use branchgrid::catalog::lookup;
use branchgrid::{build_lifted, GradedComplex, GridDiagram};

/// Benchmarked instances: catalog name and sheet count.
pub const CASES: &[(&str, usize)] = &[
    ("unknot3", 2),
    ("trefoil5", 1),
    ("trefoil5", 2),
    ("fig8_6", 1),
    ("fig8_6", 2),
];

pub fn grid(name: &str) -> GridDiagram {
    lookup(name).unwrap_or_else(|| panic!("no catalog entry {name}"))
}

pub fn complex(name: &str, m: usize) -> GradedComplex {
    GradedComplex::build(&build_lifted(&grid(name), m)).expect("catalog instances fit")
}

pub fn label(name: &str, m: usize) -> String {
    format!("{name}/m{m}")
}

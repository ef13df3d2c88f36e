//! Named grid diagrams.
//!
//! Each entry was checked before being frozen: the unknot and trefoil grids by
//! tracing the closed curve, the figure-eight grid (found by random search over
//! 6x6 grids) by its single-sheet homology, which has total rank 160 with
//! Alexander profile `[1, 3, 1]` times `(1 + t^-1)^5`. No other knot has grid
//! number at most 6 and that profile.

use crate::grid::{parse_grid, GridDiagram};

pub struct CatalogEntry {
    pub name: &'static str,
    pub knot: &'static str,
    pub grid: &'static str,
    pub note: &'static str,
}

pub const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        name: "unknot2",
        knot: "unknot",
        grid: "n=2; O: 0 1; X: 1 0",
        note: "smallest grid",
    },
    CatalogEntry {
        name: "unknot3",
        knot: "unknot",
        grid: "n=3; O: 0 1 2; X: 1 2 0",
        note: "one stabilization of unknot2",
    },
    CatalogEntry {
        name: "unknot4c",
        knot: "unknot",
        grid: "n=4; O: 0 2 1 3; X: 1 3 2 0",
        note: "columns 0 and 2 admit a commutation",
    },
    CatalogEntry {
        name: "trefoil5",
        knot: "trefoil",
        grid: "n=5; O: 4 0 1 2 3; X: 1 2 3 4 0",
        note: "minimal grid, no commutations",
    },
    CatalogEntry {
        name: "trefoil6",
        knot: "trefoil",
        grid: "n=6; O: 5 1 0 2 3 4; X: 1 2 3 4 5 0",
        note: "stabilization of trefoil5 at row 1; columns 1 and 2 admit a commutation",
    },
    CatalogEntry {
        name: "fig8_6",
        knot: "figure-eight",
        grid: "n=6; O: 1 5 0 3 4 2; X: 3 2 4 5 1 0",
        note: "minimal grid",
    },
];

pub fn lookup(name: &str) -> Option<GridDiagram> {
    CATALOG
        .iter()
        .find(|e| e.name == name)
        .map(|e| parse_grid(e.grid).expect("catalog grids are valid"))
}

pub fn names() -> impl Iterator<Item = &'static str> {
    CATALOG.iter().map(|e| e.name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::GradedComplex;
    use crate::cover::build_lifted;
    use crate::grid::{Half, Side, StabilizeVariant};
    use crate::homology::homology_f2;

    #[test]
    fn entries_parse() {
        for e in CATALOG {
            let g = lookup(e.name).unwrap();
            assert_eq!(g.canonical_form(), e.grid);
        }
        assert!(lookup("nope").is_none());
    }

    #[test]
    fn single_sheet_profiles() {
        let profile = |name: &str| {
            let c = GradedComplex::build(&build_lifted(&lookup(name).unwrap(), 1)).unwrap();
            homology_f2(&c)
                .unwrap()
                .rank_by_alexander()
                .into_values()
                .collect::<Vec<_>>()
        };
        assert_eq!(profile("unknot3"), vec![1, 2, 1]);
        assert_eq!(profile("unknot4c"), vec![1, 3, 3, 1]);
        assert_eq!(profile("trefoil6"), vec![1, 6, 16, 25, 25, 16, 6, 1]);
        assert_eq!(profile("fig8_6"), vec![1, 8, 26, 45, 45, 26, 8, 1]);
    }

    #[test]
    fn trefoil6_is_a_stabilization() {
        let t = lookup("trefoil5").unwrap();
        let s = t
            .stabilize(
                1,
                StabilizeVariant {
                    side: Side::Right,
                    x_half: Half::Lower,
                },
            )
            .unwrap();
        assert_eq!(s.result, lookup("trefoil6").unwrap());
        assert!(s.result.is_commutable(1));
        assert!((0..5).all(|j| !t.is_commutable(j)));
    }
}

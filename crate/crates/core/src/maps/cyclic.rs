//! Cyclic permutation of rows or columns.
//!
//! The torus is the same before and after, so the map on generators is a
//! bijection. Moving columns keeps every sheet; moving rows keeps the label of
//! each horizontal lift and recomputes the sheet on the vertical circle from
//! the new winding numbers.

use super::sparse::{compose, matrix_gauge, sum, Entries};
use crate::complex::{Generator, GradedComplex};
use crate::cover::{build_lifted, LiftedDiagram};
use crate::error::{Error, Result};
use crate::grid::{Axis, GridDiagram};
use crate::signs::{build_constraints, signed_differential, solve_signs, VariableOrder};

/// Image of one lifted point `(column, sheet, row)`.
pub fn move_point(
    src: &LiftedDiagram,
    dst: &LiftedDiagram,
    axis: Axis,
    shift: i64,
    p: (usize, usize, usize),
) -> (usize, usize, usize) {
    let n = src.n();
    let (c, k, r) = p;
    let s = shift.rem_euclid(n as i64) as usize;
    match axis {
        Axis::Column => ((c + s) % n, k, r),
        Axis::Row => {
            let r2 = (r + s) % n;
            let label = src.alpha_label(c, r, k);
            let k2 = (0..dst.m())
                .find(|&k2| dst.alpha_label(c, r2, k2) == label)
                .expect("labels are a bijection");
            (c, k2, r2)
        }
    }
}

/// `w(c, r + b) - w(c, r) == w'(c, r + b + s) - w'(c, r + s)` for the row
/// move by `s`, with indices taken cyclically.
pub fn winding_relation_holds(g: &GridDiagram, shift: i64) -> bool {
    let n = g.n();
    let h = g.cyclic_permute(Axis::Row, shift);
    let (w, w2) = (g.winding_table(), h.winding_table());
    let s = shift.rem_euclid(n as i64) as usize;
    (0..n).all(|c| {
        (0..n).all(|r| {
            (0..n).all(|b| {
                w.at_mod(c, r + b) - w.at_mod(c, r) == w2.at_mod(c, r + b + s) - w2.at_mod(c, r + s)
            })
        })
    })
}

/// The map on generators as indices into the complex of the moved grid.
pub fn cyclic_map(
    src: &GradedComplex,
    dst: &GradedComplex,
    axis: Axis,
    shift: i64,
) -> Result<Vec<u32>> {
    let (d, d2) = (src.lifted(), dst.lifted());
    let m = d.m();
    src.generators()
        .iter()
        .map(|x| {
            let mut rows = vec![0usize; d.size()];
            for b in 0..d.size() {
                let (c, k, r) = move_point(d, d2, axis, shift, (b / m, b % m, x.row(b)));
                rows[c * m + k] = r;
            }
            dst.index_of(Generator::from_rows(&rows))
                .map(|i| i as u32)
                .ok_or_else(|| Error::CheckFailed("image is not a generator".into()))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicCheck {
    pub bijective: bool,
    pub alexander_preserved: bool,
    /// the map carries the mod 2 differential onto the target's
    pub f2_isomorphism: bool,
    /// up to a sign on each generator, it carries the signed differential onto the target's
    pub z_isomorphism: bool,
}

impl CyclicCheck {
    pub fn all(&self) -> bool {
        self.bijective && self.alexander_preserved && self.f2_isomorphism && self.z_isomorphism
    }
}

/// Builds both complexes and checks the map.
pub fn check_cyclic(g: &GridDiagram, m: usize, axis: Axis, shift: i64) -> Result<CyclicCheck> {
    let h = g.cyclic_permute(axis, shift);
    let src = GradedComplex::build(&build_lifted(g, m))?;
    let dst = GradedComplex::build(&build_lifted(&h, m))?;
    let image = cyclic_map(&src, &dst, axis, shift)?;
    let mut seen = vec![false; dst.len()];
    let bijective = src.len() == dst.len()
        && image
            .iter()
            .all(|&i| !std::mem::replace(&mut seen[i as usize], true));
    let alexander_preserved =
        (0..src.len()).all(|i| src.alexander(i) == dst.alexander(image[i] as usize));
    let mut mapped: Vec<(u32, u32)> = src
        .edges()
        .iter()
        .map(|e| (image[e.source as usize], image[e.target as usize]))
        .collect();
    let mut target: Vec<(u32, u32)> = dst.edges().iter().map(|e| (e.source, e.target)).collect();
    mapped.sort_unstable();
    target.sort_unstable();
    let f2_isomorphism = bijective && mapped == target;
    let z_isomorphism = f2_isomorphism && {
        let s1 = solve_signs(&src, &build_constraints(&src)?, VariableOrder::Canonical)?;
        let s2 = solve_signs(&dst, &build_constraints(&dst)?, VariableOrder::Canonical)?;
        let d1 = signed_differential(&src, &s1);
        let d2 = signed_differential(&dst, &s2);
        let mut inverse = vec![0u32; dst.len()];
        for (i, &j) in image.iter().enumerate() {
            inverse[j as usize] = i as u32;
        }
        let pulled: Entries = d2
            .iter()
            .map(|&(a, b, c)| (inverse[a as usize], inverse[b as usize], c))
            .collect();
        match matrix_gauge(&d1, &pulled, src.len()) {
            None => false,
            Some(u) => {
                // the corrected map is a chain map on the nose
                let phi: Entries = image
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| (i as u32, j, u[i]))
                    .collect();
                sum(&[
                    &compose(&d1, &phi),
                    &compose(&phi, &d2)
                        .iter()
                        .map(|&(a, b, c)| (a, b, -c))
                        .collect(),
                ])
                .is_empty()
            }
        }
    };
    Ok(CyclicCheck {
        bijective,
        alexander_preserved,
        f2_isomorphism,
        z_isomorphism,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup;

    #[test]
    fn winding_relation() {
        for name in ["trefoil5", "fig8_6", "unknot4c"] {
            let g = lookup(name).unwrap();
            for s in [-1, 1, 2] {
                assert!(winding_relation_holds(&g, s), "{name} {s}");
            }
        }
    }

    #[test]
    fn moves_are_isomorphisms() {
        let g = lookup("trefoil5").unwrap();
        for m in [1, 2] {
            for axis in [Axis::Row, Axis::Column] {
                for s in [-1, 1] {
                    let c = check_cyclic(&g, m, axis, s).unwrap();
                    assert!(c.all(), "{m} {axis:?} {s} {c:?}");
                }
            }
        }
    }

    #[test]
    fn full_cycle_returns_to_start() {
        let g = lookup("unknot4c").unwrap();
        let m = 2;
        for axis in [Axis::Row, Axis::Column] {
            let mut grid = g.clone();
            let first = GradedComplex::build(&build_lifted(&g, m)).unwrap();
            let mut perm: Vec<u32> = (0..first.len() as u32).collect();
            let mut cur = GradedComplex::build(&build_lifted(&grid, m)).unwrap();
            for _ in 0..g.n() {
                let next_grid = grid.cyclic_permute(axis, 1);
                let next = GradedComplex::build(&build_lifted(&next_grid, m)).unwrap();
                let step = cyclic_map(&cur, &next, axis, 1).unwrap();
                perm = perm.iter().map(|&i| step[i as usize]).collect();
                grid = next_grid;
                cur = next;
            }
            assert_eq!(grid, g);
            let d = first.lifted();
            // a full turn is a power of the deck transformation
            let matches = (0..m).any(|p| {
                (0..first.len()).all(|i| {
                    let mut x = first.generators()[i];
                    for _ in 0..p {
                        x = x.deck(d);
                    }
                    first.index_of(x) == Some(perm[i] as usize)
                })
            });
            assert!(matches, "{axis:?}");
        }
    }
}

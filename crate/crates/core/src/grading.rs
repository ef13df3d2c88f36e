//! Gradings from the planar pair-counting functions.
//!
//! Points are stored with doubled coordinates so lattice points (even) and
//! cell centres (odd) are both integral. A formal sum of points carries
//! rational weights; `I` and `J` extend bilinearly.

use num_rational::Ratio;
use num_traits::Zero;

use crate::complex::Generator;
use crate::cover::LiftedDiagram;
use crate::error::{Error, Result};
use crate::grid::GridDiagram;

pub type Q = Ratio<i64>;

/// A formal rational combination of points in the plane (doubled coordinates).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PointSet {
    pub points: Vec<((i64, i64), Q)>,
}

impl PointSet {
    pub fn lattice(points: impl IntoIterator<Item = (usize, usize)>) -> Self {
        PointSet {
            points: points
                .into_iter()
                .map(|(c, r)| ((2 * c as i64, 2 * r as i64), Q::from_integer(1)))
                .collect(),
        }
    }

    pub fn x_markers(g: &GridDiagram) -> Self {
        Self::centres((0..g.n()).map(|c| (c, g.x_row(c))))
    }

    pub fn o_markers(g: &GridDiagram) -> Self {
        Self::centres((0..g.n()).map(|c| (c, g.o_row(c))))
    }

    fn centres(cells: impl IntoIterator<Item = (usize, usize)>) -> Self {
        PointSet {
            points: cells
                .into_iter()
                .map(|(c, r)| ((2 * c as i64 + 1, 2 * r as i64 + 1), Q::from_integer(1)))
                .collect(),
        }
    }

    pub fn scaled(&self, k: Q) -> Self {
        PointSet {
            points: self.points.iter().map(|&(p, w)| (p, w * k)).collect(),
        }
    }

    pub fn plus(&self, other: &PointSet) -> Self {
        let mut points = self.points.clone();
        points.extend(other.points.iter().cloned());
        PointSet { points }
    }

    pub fn minus(&self, other: &PointSet) -> Self {
        self.plus(&other.scaled(Q::from_integer(-1)))
    }
}

/// Weighted number of pairs `(a, b)` with `a` strictly south-west of `b`.
pub fn pair_count(a: &PointSet, b: &PointSet) -> Q {
    let mut s = Q::zero();
    for &((ax, ay), wa) in &a.points {
        for &((bx, by), wb) in &b.points {
            if ax < bx && ay < by {
                s += wa * wb;
            }
        }
    }
    s
}

/// Symmetrized pair count.
pub fn symmetric_pairs(a: &PointSet, b: &PointSet) -> Q {
    (pair_count(a, b) + pair_count(b, a)) / 2
}

/// Grading of a base generator (`rows[c]` is the row of the point on column `c`)
/// from `J(x - (X + O)/2, X - O) - (n - 1)/2`.
pub fn alexander_base(g: &GridDiagram, rows: &[usize]) -> Q {
    let x = PointSet::lattice(rows.iter().copied().enumerate());
    let xs = PointSet::x_markers(g);
    let os = PointSet::o_markers(g);
    let half = Q::new(1, 2);
    let shifted = x.minus(&xs.plus(&os).scaled(half));
    symmetric_pairs(&shifted, &xs.minus(&os)) - Q::new(g.n() as i64 - 1, 2)
}

/// Classical homological grading of a base generator, `J(x - O, x - O) + 1`.
pub fn maslov_base(g: &GridDiagram, rows: &[usize]) -> Q {
    let x = PointSet::lattice(rows.iter().copied().enumerate());
    let d = x.minus(&PointSet::o_markers(g));
    symmetric_pairs(&d, &d) + 1
}

/// A partition of a lifted generator into `m` sets, each projecting onto a
/// generator of the base grid. `parts[i][c]` is the lifted circle `c * m + k`
/// contributing the point of part `i` on column `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub parts: Vec<Vec<usize>>,
}

impl Decomposition {
    /// Base rows of part `i`.
    pub fn base_rows(&self, x: Generator, i: usize) -> Vec<usize> {
        self.parts[i].iter().map(|&b| x.row(b)).collect()
    }
}

/// Every decomposition, with parts listed so that part `i` holds the
/// smallest circle not in earlier parts; each unordered partition appears once.
pub fn decompositions(d: &LiftedDiagram, x: Generator) -> Vec<Decomposition> {
    let n = d.n();
    let mut used = vec![false; d.size()];
    let mut parts: Vec<Vec<usize>> = Vec::new();
    let mut out = Vec::new();
    fn rec(
        d: &LiftedDiagram,
        x: Generator,
        used: &mut Vec<bool>,
        parts: &mut Vec<Vec<usize>>,
        current: &mut Vec<usize>,
        rows_used: &mut Vec<bool>,
        out: &mut Vec<Decomposition>,
    ) {
        let (n, m) = (d.n(), d.m());
        if current.len() == n {
            parts.push(std::mem::take(current));
            if parts.len() == m {
                out.push(Decomposition {
                    parts: parts.clone(),
                });
            } else {
                let mut rows = vec![false; n];
                rec(d, x, used, parts, &mut Vec::new(), &mut rows, out);
            }
            *current = parts.pop().unwrap();
            return;
        }
        let c = current.len();
        // the first part member on column 0 is forced to be the smallest free circle
        let choices: Vec<usize> = if c == 0 {
            (0..m).filter(|&k| !used[k]).take(1).collect()
        } else {
            (0..m).map(|k| c * m + k).filter(|&b| !used[b]).collect()
        };
        for b in choices {
            let r = x.row(b);
            if rows_used[r] {
                continue;
            }
            used[b] = true;
            rows_used[r] = true;
            current.push(b);
            rec(d, x, used, parts, current, rows_used, out);
            current.pop();
            rows_used[r] = false;
            used[b] = false;
        }
    }
    let mut rows = vec![false; n];
    rec(
        d,
        x,
        &mut used,
        &mut parts,
        &mut Vec::new(),
        &mut rows,
        &mut out,
    );
    out
}

/// `(1/m) * sum of the base gradings of the parts`.
pub fn alexander(d: &LiftedDiagram, x: Generator, dec: &Decomposition) -> Q {
    let g = d.base();
    let s: Q = (0..dec.parts.len())
        .map(|i| alexander_base(g, &dec.base_rows(x, i)))
        .sum();
    s / d.m() as i64
}

/// Grading through the first decomposition found.
pub fn alexander_via_decomposition(d: &LiftedDiagram, x: Generator) -> Result<Q> {
    let decs = decompositions(d, x);
    let dec = decs.first().ok_or(Error::NoDecomposition)?;
    Ok(alexander(d, x, dec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{enumerate_generators, AlexanderWeights, GradedComplex};
    use crate::cover::build_lifted;
    use crate::grid::parse_grid;

    fn q(a: i64) -> Q {
        Q::from_integer(a)
    }

    #[test]
    fn pair_counts() {
        let a = PointSet::lattice([(0, 0)]);
        let b = PointSet::lattice([(1, 1)]);
        assert_eq!(pair_count(&a, &b), q(1));
        assert_eq!(pair_count(&b, &a), q(0));
        assert_eq!(pair_count(&a, &a), q(0));
        assert_eq!(symmetric_pairs(&a, &b), Q::new(1, 2));
    }

    #[test]
    fn small_unknot_gradings() {
        let g = parse_grid("n=2; O: 0 1; X: 1 0").unwrap();
        let a0 = alexander_base(&g, &[0, 1]);
        let a1 = alexander_base(&g, &[1, 0]);
        assert_eq!(a1 - a0, q(1));
        assert_eq!(maslov_base(&g, &[1, 0]) - maslov_base(&g, &[0, 1]), q(1));
    }

    #[test]
    fn formula_matches_point_weights() {
        for s in [
            "n=5; O: 4 0 1 2 3; X: 1 2 3 4 0",
            "n=4; O: 0 2 1 3; X: 1 3 2 0",
        ] {
            let g = parse_grid(s).unwrap();
            let w = AlexanderWeights::new(&g);
            let d = build_lifted(&g, 1);
            for x in enumerate_generators(&d).unwrap() {
                let rows = x.rows(g.n());
                assert_eq!(alexander_base(&g, &rows), w.base(&rows));
            }
        }
    }

    #[test]
    fn all_decompositions_agree_on_small_double_cover() {
        let g = parse_grid("n=2; O: 0 1; X: 1 0").unwrap();
        let d = build_lifted(&g, 2);
        let c = GradedComplex::build(&d).unwrap();
        for (i, &x) in c.generators().iter().enumerate() {
            let decs = decompositions(&d, x);
            assert!(!decs.is_empty());
            for dec in &decs {
                assert_eq!(alexander(&d, x, dec), c.alexander(i));
            }
        }
    }

    #[test]
    fn decompositions_cover_the_generator() {
        let g = parse_grid("n=5; O: 4 0 1 2 3; X: 1 2 3 4 0").unwrap();
        let d = build_lifted(&g, 2);
        let gens = enumerate_generators(&d).unwrap();
        for &x in gens.iter().step_by(97) {
            let decs = decompositions(&d, x);
            assert!(!decs.is_empty());
            for dec in &decs {
                let mut all: Vec<usize> = dec.parts.concat();
                all.sort();
                assert_eq!(all, (0..d.size()).collect::<Vec<_>>());
            }
            let deck = x.deck(&d);
            assert_eq!(
                alexander_via_decomposition(&d, x).unwrap(),
                alexander_via_decomposition(&d, deck).unwrap()
            );
        }
    }

    #[test]
    fn levels_match_classical_maslov() {
        for s in [
            "n=5; O: 4 0 1 2 3; X: 1 2 3 4 0",
            "n=4; O: 0 2 1 3; X: 1 3 2 0",
        ] {
            let g = parse_grid(s).unwrap();
            let c = GradedComplex::build(&build_lifted(&g, 1)).unwrap();
            let levels = c.relative_maslov().unwrap();
            let mut offset: Vec<Option<Q>> = vec![None; c.component_count()];
            for i in 0..c.len() {
                let mval = maslov_base(&g, &c.generators()[i].rows(g.n()));
                let diff = mval - q(levels[i] as i64);
                let slot = &mut offset[c.component(i)];
                assert!(slot.map_or(true, |o| o == diff));
                *slot = Some(diff);
            }
        }
    }
}

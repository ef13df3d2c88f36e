//! Commutation of two columns.
//!
//! The circle between the two columns is replaced, one lift at a time, by a
//! curve that passes left of the first column's markers on the arc holding
//! them and right of the second column's markers on the other arc. Wrt the new
//! curve the columns appear swapped. Each replacement step gets a pair of
//! pentagon maps and a pair of hexagon homotopies; after all `m` steps the
//! diagram is identified with the lifted commuted grid.

use super::domains::{FineDiagram, PolygonTerms};
use super::fine::{
    find_polygons, grid_curves, Curve, CurveKind, FineSurface, Lift, PolygonSpec, SideClass, SCALE,
};
use super::signing::{unsigned, SignProblem};
use super::sparse::{compose, identity, mod2, sum, Entries};
use crate::complex::{Generator, GradedComplex};
use crate::cover::build_lifted;
use crate::error::{Error, Result};
use crate::grid::{GridDiagram, GridError};

/// The replacement curve for commuting columns `j` and `j + 1`.
pub fn replacement_curve(g: &GridDiagram, j: usize) -> Result<Curve> {
    let n = g.n();
    if !g.is_commutable(j) {
        return Err(Error::Grid(GridError::NotCommutable {
            left: j,
            right: (j + 1) % n,
        }));
    }
    let k = (j + 1) % n;
    let (llo, lhi) = g.marker_span(j);
    let (rlo, rhi) = g.marker_span(k);
    // arc of rows holding the second column's markers but not the first's
    let (s, e) = if (rlo..=rhi).contains(&llo) {
        (lhi + 1, llo + n - 1)
    } else {
        (rlo, rhi)
    };
    let size = SCALE * n as i64;
    let (xl, xb, xr) = (
        SCALE * j as i64 + 1,
        SCALE * j as i64 + 4,
        SCALE * j as i64 + 7,
    );
    let y0 = SCALE * s as i64 - 1;
    let y1 = SCALE * (e as i64 + 1) + 1;
    let mut pts = Vec::new();
    pts.extend((xb..xr).map(|x| (x, y0)));
    pts.extend((y0..y1).map(|y| (xr, y)));
    pts.extend(((xl + 1)..=xr).rev().map(|x| (x, y1)));
    pts.extend((y1..y0 + size).map(|y| (xl, y)));
    pts.extend((xl..xb).map(|x| (x, y0 + size)));
    Ok(Curve {
        kind: CurveKind::Vertical(k),
        pts,
        period: (0, size),
    })
}

/// The surface carrying both the straight circles and the replacement curve.
pub struct CommutationSurface {
    pub base: GridDiagram,
    pub moved: GridDiagram,
    pub column: usize,
    pub surface: FineSurface,
    pub beta: usize,
    pub gamma: usize,
}

impl CommutationSurface {
    pub fn new(g: &GridDiagram, j: usize, m: usize) -> Result<Self> {
        let n = g.n();
        let moved = g.commute(j)?;
        let mut curves = grid_curves(n);
        curves.push(replacement_curve(g, j)?);
        let surface = FineSurface::new(g, m, curves);
        let gamma = 2 * n;
        if surface.curve_total(gamma).rem_euclid(m as i32) != 0 {
            return Err(Error::CheckFailed(
                "replacement curve does not lift to closed curves".into(),
            ));
        }
        Ok(CommutationSurface {
            base: g.clone(),
            moved,
            column: j,
            surface,
            beta: n + (j + 1) % n,
            gamma,
        })
    }

    fn slot_column(&self) -> usize {
        (self.column + 1) % self.base.n()
    }

    /// The diagram after replacing the first `t` lifts.
    pub fn stage(&self, t: usize) -> Result<FineDiagram<'_>> {
        let (n, m) = (self.base.n(), self.surface.m());
        let moved = self.slot_column();
        let verticals: Vec<Lift> = (0..n * m)
            .map(|b| {
                let (c, k) = (b / m, b % m);
                if c == moved && k < t {
                    (self.gamma, k)
                } else {
                    (n + c, k)
                }
            })
            .collect();
        FineDiagram::new(&self.surface, verticals)
    }
}

/// The maps of one replacement step.
pub struct CommutationStep<'s> {
    pub step: usize,
    pub before: FineDiagram<'s>,
    pub after: FineDiagram<'s>,
    pub rect_before: PolygonTerms,
    pub rect_after: PolygonTerms,
    pub forward: PolygonTerms,
    pub backward: PolygonTerms,
    pub homotopy_before: PolygonTerms,
    pub homotopy_after: PolygonTerms,
}

impl CommutationSurface {
    pub fn step(&self, t: usize) -> Result<CommutationStep<'_>> {
        let before = self.stage(t)?;
        let after = self.stage(t + 1)?;
        let old: Lift = (self.beta, t);
        let new: Lift = (self.gamma, t);
        let shared = SideClass::of(before.verticals().iter().copied().filter(|&l| l != old));
        let alpha = before.alpha_lifts();
        let one = |l: Lift| SideClass::of([l]);
        let both = vec![(1, 0), (-1, 0)];
        let spec = |tail: Vec<SideClass>| {
            let mut sides = vec![alpha.clone(), shared.clone(), alpha.clone()];
            sides.extend(tail);
            PolygonSpec {
                sides,
                first_headings: both.clone(),
            }
        };
        let s = &self.surface;
        let forward = PolygonTerms::build(
            &before,
            &after,
            find_polygons(s, &spec(vec![one(new), one(old)])),
            &[0, 2],
            &[1, 3],
        )?;
        let backward = PolygonTerms::build(
            &after,
            &before,
            find_polygons(s, &spec(vec![one(old), one(new)])),
            &[0, 2],
            &[1, 3],
        )?;
        let homotopy_before = PolygonTerms::build(
            &before,
            &before,
            find_polygons(s, &spec(vec![one(old), one(new), one(old)])),
            &[0, 2],
            &[1, 3],
        )?;
        let homotopy_after = PolygonTerms::build(
            &after,
            &after,
            find_polygons(s, &spec(vec![one(new), one(old), one(new)])),
            &[0, 2],
            &[1, 3],
        )?;
        Ok(CommutationStep {
            step: t,
            rect_before: before.rectangles()?,
            rect_after: after.rectangles()?,
            before,
            after,
            forward,
            backward,
            homotopy_before,
            homotopy_after,
        })
    }
}

/// Outcome of checking one step over one ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepCheck {
    pub forward_chain_map: bool,
    pub backward_chain_map: bool,
    /// `I + backward * forward + d H + H d = 0` on the complex before the step
    pub homotopy_before: bool,
    pub homotopy_after: bool,
}

impl StepCheck {
    pub fn all(&self) -> bool {
        self.forward_chain_map
            && self.backward_chain_map
            && self.homotopy_before
            && self.homotopy_after
    }
}

struct Coefficients {
    d0: Entries,
    d1: Entries,
    f: Entries,
    b: Entries,
    h0: Entries,
    h1: Entries,
}

fn check(c: &Coefficients, len0: usize, len1: usize, reduce: fn(&Entries) -> Entries) -> StepCheck {
    let zero = |parts: &[&Entries]| reduce(&sum(parts)).is_empty();
    let (i0, i1) = (identity(len0), identity(len1));
    StepCheck {
        forward_chain_map: zero(&[&compose(&c.f, &c.d1), &compose(&c.d0, &c.f)]),
        backward_chain_map: zero(&[&compose(&c.b, &c.d0), &compose(&c.d1, &c.b)]),
        homotopy_before: zero(&[
            &i0,
            &compose(&c.f, &c.b),
            &compose(&c.h0, &c.d0),
            &compose(&c.d0, &c.h0),
        ]),
        homotopy_after: zero(&[
            &i1,
            &compose(&c.b, &c.f),
            &compose(&c.h1, &c.d1),
            &compose(&c.d1, &c.h1),
        ]),
    }
}

fn keep(v: &Entries) -> Entries {
    v.clone()
}

impl CommutationStep<'_> {
    pub fn check_f2(&self) -> StepCheck {
        let c = Coefficients {
            d0: unsigned(&self.rect_before),
            d1: unsigned(&self.rect_after),
            f: unsigned(&self.forward),
            b: unsigned(&self.backward),
            h0: unsigned(&self.homotopy_before),
            h1: unsigned(&self.homotopy_after),
        };
        check(&c, self.before.len(), self.after.len(), mod2)
    }

    /// Solves for signs of all six families at once and checks the identities
    /// over the integers.
    pub fn check_z(&self) -> Result<(StepCheck, usize)> {
        let mut p = SignProblem::new(vec![
            &self.rect_before,
            &self.rect_after,
            &self.forward,
            &self.backward,
            &self.homotopy_before,
            &self.homotopy_after,
        ]);
        p.fix_forest(0, self.before.len());
        p.fix_forest(1, self.after.len());
        p.add_identity(&[(0, 0)], false);
        p.add_identity(&[(1, 1)], false);
        p.add_identity(&[(2, 1), (0, 2)], false);
        p.add_identity(&[(3, 0), (1, 3)], false);
        p.add_identity(&[(2, 3), (4, 0), (0, 4)], true);
        p.add_identity(&[(3, 2), (5, 1), (1, 5)], true);
        let anomalies = p.anomalies;
        let v = p.solve()?;
        let c = Coefficients {
            d0: v[0].clone(),
            d1: v[1].clone(),
            f: v[2].clone(),
            b: v[3].clone(),
            h0: v[4].clone(),
            h1: v[5].clone(),
        };
        Ok((
            check(&c, self.before.len(), self.after.len(), keep),
            anomalies,
        ))
    }
}

/// Identifies the fully replaced diagram with the lifted commuted grid: the
/// bijection on generators and whether it carries one differential onto the
/// other.
pub fn identify_with_commuted(cs: &CommutationSurface) -> Result<(Vec<u32>, bool)> {
    let m = cs.surface.m();
    let last = cs.stage(m)?;
    let lifted = build_lifted(&cs.moved, m);
    let h = GradedComplex::build(&lifted)?;
    let n = cs.base.n();
    let moved = cs.slot_column();
    // lift of the moved circle upstairs meeting each horizontal lift
    let mut relabel = vec![usize::MAX; m];
    for k in 0..m {
        let b = moved * m + k;
        for r in 0..n {
            let a = last.incidence(b, r);
            let target = (0..m)
                .find(|&k2| lifted.incidence(moved, k2, r) == a)
                .expect("some lift meets it");
            if relabel[k] != usize::MAX && relabel[k] != target {
                return Err(Error::CheckFailed(
                    "replacement lift spreads over several lifts".into(),
                ));
            }
            relabel[k] = target;
        }
    }
    for c in 0..n {
        for k in 0..m {
            for r in 0..n {
                let b = c * m + k;
                let k2 = if c == moved { relabel[k] } else { k };
                if last.incidence(b, r) != lifted.incidence(c, k2, r) {
                    return Err(Error::CheckFailed(format!(
                        "incidence differs at column {c}, sheet {k}, row {r}"
                    )));
                }
            }
        }
    }
    let map: Vec<u32> = last
        .generators()
        .iter()
        .map(|x| {
            let mut rows = x.rows(n * m);
            for k in 0..m {
                rows[moved * m + relabel[k]] = x.row(moved * m + k);
            }
            h.index_of(Generator::from_rows(&rows))
                .map(|i| i as u32)
                .ok_or_else(|| Error::CheckFailed("identified generator missing".into()))
        })
        .collect::<Result<_>>()?;
    let rects = last.rectangles()?;
    let mut a: Vec<(u32, u32)> = rects
        .terms
        .iter()
        .map(|&(x, y, _)| (map[x as usize], map[y as usize]))
        .collect();
    let mut b: Vec<(u32, u32)> = h.edges().iter().map(|e| (e.source, e.target)).collect();
    a.sort_unstable();
    b.sort_unstable();
    Ok((map, a == b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::lookup;

    #[test]
    fn replacement_curve_is_a_vertical_circle() {
        let g = lookup("unknot4c").unwrap();
        for j in [0, 2] {
            let c = replacement_curve(&g, j).unwrap();
            assert_eq!(c.pts.len(), 16 + 12);
            for w in 0..c.pts.len() {
                let (a, b) = (c.at(w as i64), c.at(w as i64 + 1));
                assert_eq!((a.0 - b.0).abs() + (a.1 - b.1).abs(), 1);
            }
        }
        assert!(replacement_curve(&g, 1).is_err());
    }

    #[test]
    fn single_sheet_commutation_identities() {
        let g = lookup("unknot4c").unwrap();
        for j in [0, 2] {
            let cs = CommutationSurface::new(&g, j, 1).unwrap();
            let (_, same) = identify_with_commuted(&cs).unwrap();
            assert!(same);
            let st = cs.step(0).unwrap();
            assert!(!st.forward.terms.is_empty());
            assert!(st.check_f2().all(), "{:?}", st.check_f2());
            let (z, anomalies) = st.check_z().unwrap();
            assert_eq!(anomalies, 0);
            assert!(z.all(), "{z:?}");
        }
    }
}

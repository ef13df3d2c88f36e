//! Stabilization: the complex of the stabilized diagram maps to two copies
//! of the complex of the original one.
//!
//! Let `x_0` be the point where the new horizontal circle meets the left
//! boundary of the new column. With `O_1` directly above `x_0` and `X_1`
//! directly below (right of the left boundary), a generator all of whose
//! points over `x_0` are used is identified with a generator of the original
//! diagram by forgetting those points.
//!
//! A double region picks one piece on each sheet, chosen independently. Every
//! piece contains the new column on its sheet between two row lines, so the
//! cut through that column never separates a piece. `F^L` uses, on each
//! sheet, either the whole column (when the point over `x_0` is already there)
//! or an L-shaped hexagon with reflex corner `x_0` and no marker besides
//! `O_1` and `X_1`. `F^R` uses, on each sheet, a rectangle with upper-left
//! corner `x_0` whose only marker is `X_1`.
//!
//! `F^L` is a chain map and onto in homology on every instance we tried.
//! `F^R` is a chain map only on the smallest ones: a rectangle with `x_0` on
//! its right edge followed by a type R rectangle has no second decomposition.
//!
//! Only the `(Left, Upper)` placement has this local picture. Its half-turn
//! rotation is `(Right, Lower)`; the other two placements are mirror images
//! and are not handled.

use num_rational::Ratio;

use super::sparse::{compose, mod2, normalize, sum, Entries};
use crate::complex::{Generator, GradedComplex};
use crate::cover::{build_lifted, BaseRect};
use crate::error::{Error, Result};
use crate::gf2::{solve, XorSystem};
use crate::grid::{GridDiagram, GridError, Half, Side, Stabilization, StabilizeVariant};
use crate::homology::{homology, ChainData, Ring};
use crate::signs::{
    build_constraints, signed_differential, solve_signs, SignAssignment, VariableOrder,
};

/// The part of a double region on one sheet. Line indices refer to the
/// stabilized grid; the sheet is that of the vertical circle through the
/// lift of `x_0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Piece {
    /// the whole new column; the point over `x_0` is already used
    Column,
    /// hexagon: the new column from row line `bottom` to `top`, together with
    /// the strip left of it from `left` between the new horizontal circle and `top`
    LShape {
        bottom: usize,
        top: usize,
        left: usize,
    },
    /// rectangle from the left boundary of the new column to `right`, from
    /// row line `bottom` up to the new horizontal circle
    Rect { right: usize, bottom: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DoubleRegion {
    /// the generator already uses every point over `x_0`
    Trivial,
    /// one piece per sheet, each a column or a hexagon, not all columns
    Left(Vec<Piece>),
    /// one rectangle per sheet
    Right(Vec<Piece>),
}

impl DoubleRegion {
    pub fn is_left(&self) -> bool {
        !matches!(self, DoubleRegion::Right(_))
    }
}

pub struct StabilizationPair {
    pub stabilization: Stabilization,
    pub m: usize,
    pub base: GradedComplex,
    pub stabilized: GradedComplex,
    /// index in `stabilized` of the image of each base generator
    phi: Vec<u32>,
}

pub const SUPPORTED: StabilizeVariant = StabilizeVariant {
    side: Side::Left,
    x_half: Half::Upper,
};

impl StabilizationPair {
    pub fn new(g: &GridDiagram, row: usize, variant: StabilizeVariant, m: usize) -> Result<Self> {
        if variant != SUPPORTED {
            return Err(Error::Unsupported(format!(
                "stabilization maps for placement {variant:?}"
            )));
        }
        let stabilization = g.stabilize(row, variant)?;
        let base = GradedComplex::build(&build_lifted(g, m))?;
        let stabilized = GradedComplex::build(&build_lifted(&stabilization.result, m))?;
        let mut pair = StabilizationPair {
            stabilization,
            m,
            base,
            stabilized,
            phi: Vec::new(),
        };
        pair.phi = (0..pair.base.len())
            .map(|i| {
                let y = pair.embed(pair.base.generators()[i]);
                pair.stabilized
                    .index_of(y)
                    .map(|j| j as u32)
                    .ok_or_else(|| Error::CheckFailed("identified generator missing".into()))
            })
            .collect::<Result<_>>()?;
        Ok(pair)
    }

    /// Finds the row of `g` whose supported stabilization is `h`.
    pub fn from_grids(g: &GridDiagram, h: &GridDiagram, m: usize) -> Result<Self> {
        let row = (0..g.n())
            .find(|&r| {
                g.stabilize(r, SUPPORTED)
                    .map(|s| s.result == *h)
                    .unwrap_or(false)
            })
            .ok_or(Error::Grid(GridError::NotAStabilizationPair))?;
        Self::new(g, row, SUPPORTED, m)
    }

    fn lines(&self) -> (usize, usize, usize) {
        let s = &self.stabilization;
        (s.beta1, s.beta1 + 1, s.alpha)
    }

    /// The generator of the stabilized diagram identified with `x`: every
    /// point keeps its sheet and acquires the points over `x_0`.
    pub fn embed(&self, x: Generator) -> Generator {
        let m = self.m;
        let s = &self.stabilization;
        let size = (s.result.n()) * m;
        let mut rows = vec![0usize; size];
        for b in 0..s.base.n() * m {
            let (c, k) = (b / m, b % m);
            rows[s.map_column_line(c) * m + k] = s.map_row_line(x.row(b));
        }
        for k in 0..m {
            rows[s.beta1 * m + k] = s.alpha;
        }
        Generator::from_rows(&rows)
    }

    pub fn phi(&self, i: usize) -> usize {
        self.phi[i] as usize
    }

    fn forget(&self) -> Vec<Option<u32>> {
        let mut inv = vec![None; self.stabilized.len()];
        for (i, &j) in self.phi.iter().enumerate() {
            inv[j as usize] = Some(i as u32);
        }
        inv
    }

    fn markers(&self, rect: &BaseRect) -> usize {
        let g = &self.stabilization.result;
        let n = g.n();
        rect.columns(n)
            .map(|c| rect.rows(n).filter(|&r| g.has_marker(c, r)).count())
            .sum()
    }

    /// No point of `x` lies over the interior of the lift of `rect` whose
    /// left edge is on sheet `k`.
    fn avoids(&self, x: Generator, rect: &BaseRect, k: usize) -> bool {
        let d = self.stabilized.lifted();
        let n = d.n();
        (1..rect.width).all(|t| {
            let c = (rect.col + t) % n;
            let s = d.sheet_add(k, d.strip_shift(rect.col, rect.row, t));
            let off = (x.row(c * self.m + s) + n - rect.row) % n;
            off == 0 || off >= rect.height
        })
    }

    /// Choices on sheet `k` with the circle rows they change.
    fn pieces(&self, x: Generator, k: usize, left: bool) -> Vec<(Piece, Vec<(usize, usize)>)> {
        let d = self.stabilized.lifted();
        let (n, m) = (d.n(), self.m);
        let (b1, b2, a) = self.lines();
        let bottom = x.row(b1 * m + k);
        if bottom == a {
            return if left {
                vec![(Piece::Column, Vec::new())]
            } else {
                Vec::new()
            };
        }
        let below = (a + n - bottom) % n;
        let mut out = Vec::new();
        if !left {
            for w in 1..n {
                let right = (b1 + w) % n;
                let k2 = d.sheet_add(k, d.strip_shift(b1, bottom, w));
                let rect = BaseRect::new(b1, bottom, w, below);
                if x.row(right * m + k2) == a
                    && self.markers(&rect) == 1
                    && self.avoids(x, &rect, k)
                {
                    out.push((
                        Piece::Rect { right, bottom },
                        vec![(b1 * m + k, a), (right * m + k2, bottom)],
                    ));
                }
            }
            return out;
        }
        let top = x.row(b2 * m + k);
        let above = (top + n - a) % n;
        if above == 0 || below + above >= n {
            return out;
        }
        for w in 1..n - 1 {
            let left = (b1 + n - w) % n;
            let k2 = d.sheet_add(k, -d.strip_shift(left, a, w));
            let arm = BaseRect::new(left, a, w, above);
            if x.row(left * m + k2) == a && self.markers(&arm) == 0 && self.avoids(x, &arm, k2) {
                out.push((
                    Piece::LShape { bottom, top, left },
                    vec![(b1 * m + k, a), (b2 * m + k, bottom), (left * m + k2, top)],
                ));
            }
        }
        out
    }

    /// Double regions out of `x` with their targets.
    pub fn double_regions(&self, x: Generator) -> Vec<(DoubleRegion, Generator)> {
        let (b1, _, a) = self.lines();
        if (0..self.m).all(|k| x.row(b1 * self.m + k) == a) {
            return vec![(DoubleRegion::Trivial, x)];
        }
        let mut out = Vec::new();
        for left in [true, false] {
            let options: Vec<_> = (0..self.m).map(|k| self.pieces(x, k, left)).collect();
            if options.iter().any(|o| o.is_empty()) {
                continue;
            }
            let mut choice = vec![0usize; self.m];
            loop {
                let mut y = x;
                for (k, &c) in choice.iter().enumerate() {
                    for &(b, r) in &options[k][c].1 {
                        y = y.with_row(b, r);
                    }
                }
                let pieces: Vec<Piece> = choice
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| options[k][c].0)
                    .collect();
                out.push((
                    if left {
                        DoubleRegion::Left(pieces)
                    } else {
                        DoubleRegion::Right(pieces)
                    },
                    y,
                ));
                // next choice
                let mut k = 0;
                while k < self.m && choice[k] + 1 == options[k].len() {
                    choice[k] = 0;
                    k += 1;
                }
                if k == self.m {
                    break;
                }
                choice[k] += 1;
            }
        }
        out
    }

    /// Terms `(source in stabilized, target in base, region)` of `F^L` and `F^R`.
    pub fn terms(&self) -> (Vec<(u32, u32, DoubleRegion)>, Vec<(u32, u32, DoubleRegion)>) {
        let forget = self.forget();
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for (i, &x) in self.stabilized.generators().iter().enumerate() {
            for (p, y) in self.double_regions(x) {
                let Some(j) = self.stabilized.index_of(y).and_then(|j| forget[j]) else {
                    panic!(
                        "double region {p:?} from {:?} ends at {:?}",
                        x.rows(self.stabilized.lifted().size()),
                        y.rows(self.stabilized.lifted().size())
                    )
                };
                if p.is_left() {
                    left.push((i as u32, j, p));
                } else {
                    right.push((i as u32, j, p));
                }
            }
        }
        (left, right)
    }

    /// `A(x) = A(phi(x)) + 1` for every base generator.
    pub fn alexander_shift_holds(&self) -> bool {
        (0..self.base.len()).all(|i| {
            self.base.alexander(i)
                == self.stabilized.alexander(self.phi(i)) + Ratio::from_integer(1)
        })
    }

    /// Every term keeps the Alexander grading, with the left copy shifted down by one.
    pub fn filtered(&self) -> bool {
        let (left, right) = self.terms();
        let one = Ratio::from_integer(1);
        left.iter().all(|&(x, y, _)| {
            self.base.alexander(y as usize) - one <= self.stabilized.alexander(x as usize)
        }) && right.iter().all(|&(x, y, _)| {
            self.base.alexander(y as usize) <= self.stabilized.alexander(x as usize)
        })
    }

    /// Checks both maps over `ring`. Over Z the term signs are solved from
    /// the chain-map equations, given solved signs on both complexes.
    pub fn check(&self, ring: Ring) -> Result<StabilizationCheck> {
        let (left, right) = self.terms();
        let alexander_shift = self.alexander_shift_holds();
        let filtered = self.filtered();
        let (d_h, d_b, f_l, f_r, left_ok, right_ok) = match ring {
            Ring::F2 => {
                let d_h = mod2(&normalize(
                    self.stabilized
                        .differential_f2()
                        .into_iter()
                        .map(|(a, b)| (a, b, 1))
                        .collect(),
                ));
                let d_b = mod2(&normalize(
                    self.base
                        .differential_f2()
                        .into_iter()
                        .map(|(a, b)| (a, b, 1))
                        .collect(),
                ));
                let f_l = mod2(&unsigned(&left));
                let f_r = mod2(&unsigned(&right));
                let chain =
                    |f: &Entries| mod2(&sum(&[&compose(&d_h, f), &compose(f, &d_b)])).is_empty();
                let (l, r) = (chain(&f_l), chain(&f_r));
                (d_h, d_b, f_l, f_r, l, r)
            }
            Ring::Z => {
                let s_h = solve_signs(
                    &self.stabilized,
                    &build_constraints(&self.stabilized)?,
                    VariableOrder::Canonical,
                )?;
                let s_b = solve_signs(
                    &self.base,
                    &build_constraints(&self.base)?,
                    VariableOrder::Canonical,
                )?;
                let d_h = signed_differential(&self.stabilized, &s_h);
                let d_b = signed_differential(&self.base, &s_b);
                let f_l = self.signed_terms(&left, &s_h, &s_b, 1);
                let f_r = self.signed_terms(&right, &s_h, &s_b, -1);
                let chain = |f: &Option<Entries>, eps: i64| {
                    f.as_ref().is_some_and(|f| {
                        let back: Entries = compose(f, &d_b)
                            .into_iter()
                            .map(|(a, b, c)| (a, b, -eps * c))
                            .collect();
                        sum(&[&compose(&d_h, f), &back]).is_empty()
                    })
                };
                let (l, r) = (chain(&f_l, 1), chain(&f_r, -1));
                (
                    d_h,
                    d_b,
                    f_l.unwrap_or_default(),
                    f_r.unwrap_or_default(),
                    l,
                    r,
                )
            }
        };
        // a cone is only a complex when its maps are chain maps
        let quasi_isomorphism = left_ok
            && right_ok
            && self.cone_rank(&d_h, &d_b, &[(&f_l, 1, -1), (&f_r, -1, 0)], ring) == Some((0, 0));
        let rank = |c: &GradedComplex, d: &Entries| {
            ChainData::from_complex(c, d.clone())
                .and_then(|d| homology(&d, ring))
                .map(|h| h.total_rank())
        };
        let (rank_h, rank_b) = (rank(&self.stabilized, &d_h)?, rank(&self.base, &d_b)?);
        // rank of the cone is rank_h + rank_b - 2 rank(F^L)
        let left_surjective = left_ok
            && self
                .cone_rank(&d_h, &d_b, &[(&f_l, 1, -1)], ring)
                .is_some_and(|(r, _)| r + rank_b == rank_h);
        Ok(StabilizationCheck {
            left_chain_map: left_ok,
            right_chain_map: right_ok,
            alexander_shift,
            filtered,
            left_surjective,
            quasi_isomorphism,
        })
    }

    /// A pair `(x, z)` where the mod 2 chain-map identity of `F^L` (or `F^R`)
    /// fails, as rows of the stabilized and the base generator.
    pub fn counterexample(&self, left_map: bool) -> Option<(Vec<usize>, Vec<usize>)> {
        let (left, right) = self.terms();
        let d_h = mod2(&normalize(
            self.stabilized
                .differential_f2()
                .into_iter()
                .map(|(a, b)| (a, b, 1))
                .collect(),
        ));
        let d_b = mod2(&normalize(
            self.base
                .differential_f2()
                .into_iter()
                .map(|(a, b)| (a, b, 1))
                .collect(),
        ));
        let f = mod2(&unsigned(if left_map { &left } else { &right }));
        let bad = mod2(&sum(&[&compose(&d_h, &f), &compose(&f, &d_b)]));
        bad.first().map(|&(x, z, _)| {
            (
                self.stabilized.generators()[x as usize].rows(self.stabilized.lifted().size()),
                self.base.generators()[z as usize].rows(self.base.lifted().size()),
            )
        })
    }

    /// Signs on `terms` with `F ∂ = eps ∂ F`. Composites with the same
    /// endpoints come in pairs when the unsigned map is a chain map, and each
    /// pair gives one equation. `None` if some composite is unpaired or the
    /// system has no solution.
    pub fn signed_terms(
        &self,
        terms: &[(u32, u32, DoubleRegion)],
        s_h: &SignAssignment,
        s_b: &SignAssignment,
        eps: i64,
    ) -> Option<Entries> {
        let from = |x: u32| terms.partition_point(|t| t.0 < x)..terms.partition_point(|t| t.0 <= x);
        let mut sys = XorSystem::new(terms.len());
        // (end, term variable, edge sign is negative, map applied first)
        let mut local: Vec<(u32, u32, bool, bool)> = Vec::new();
        for x in 0..self.stabilized.len() as u32 {
            local.clear();
            for e in self.stabilized.edge_range(x as usize) {
                let y = self.stabilized.edges()[e].target;
                local.extend(from(y).map(|t| (terms[t].1, t as u32, s_h.sign(e) < 0, false)));
            }
            for t in from(x) {
                let w = terms[t].1 as usize;
                local.extend(
                    self.base
                        .edge_range(w)
                        .map(|e| (self.base.edges()[e].target, t as u32, s_b.sign(e) < 0, true)),
                );
            }
            local.sort_unstable();
            for group in local.chunk_by(|a, b| a.0 == b.0) {
                let [p, q] = group else { return None };
                // same order: the two must cancel; opposite orders: agree up to eps
                let rhs = if p.3 == q.3 { true } else { eps < 0 };
                sys.push(vec![p.1, q.1], rhs ^ p.2 ^ q.2);
            }
        }
        let bits = solve(&sys, vec![None; terms.len()]).ok()?;
        Some(normalize(
            terms
                .iter()
                .zip(&bits)
                .map(|(t, &b)| (t.0, t.1, if b { -1 } else { 1 }))
                .collect(),
        ))
    }

    /// Rank of the homology of the cone of `f` into copies of the base
    /// complex, each given by its map, the sign on its differential and its
    /// Alexander shift.
    fn cone_rank(
        &self,
        d_h: &Entries,
        d_b: &Entries,
        copies: &[(&Entries, i64, i64)],
        ring: Ring,
    ) -> Option<(usize, usize)> {
        let nh = self.stabilized.len() as u32;
        let nb = self.base.len() as u32;
        let mut entries: Entries = d_h.iter().map(|&(a, b, c)| (a, b, -c)).collect();
        let mut alexander: Vec<Ratio<i64>> = (0..nh as usize)
            .map(|i| self.stabilized.alexander(i))
            .collect();
        for (j, &(f, eps, shift)) in copies.iter().enumerate() {
            let off = nh + j as u32 * nb;
            entries.extend(f.iter().map(|&(a, b, c)| (a, off + b, c)));
            entries.extend(d_b.iter().map(|&(a, b, c)| (off + a, off + b, eps * c)));
            alexander.extend(
                (0..nb as usize).map(|i| self.base.alexander(i) + Ratio::from_integer(shift)),
            );
        }
        let h = ChainData::with_relative_levels(alexander, entries)
            .and_then(|d| homology(&d, ring))
            .ok()?;
        Some((h.total_rank(), h.torsion_count()))
    }
}

fn unsigned(terms: &[(u32, u32, DoubleRegion)]) -> Entries {
    normalize(terms.iter().map(|&(a, b, _)| (a, b, 1)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizationCheck {
    pub left_chain_map: bool,
    pub right_chain_map: bool,
    pub alexander_shift: bool,
    pub filtered: bool,
    /// `F^L` is onto in homology
    pub left_surjective: bool,
    /// the cone of `F` is acyclic; false unless both maps are chain maps
    pub quasi_isomorphism: bool,
}

impl StabilizationCheck {
    pub fn all(&self) -> bool {
        self.left_chain_map
            && self.right_chain_map
            && self.alexander_shift
            && self.filtered
            && self.left_surjective
            && self.quasi_isomorphism
    }
}

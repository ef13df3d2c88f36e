//! The m-sheeted cover of the grid torus, branched at the markers.
//!
//! The sheets `T_0..T_{m-1}` are copies of the torus cut along the vertical
//! segment joining the two markers of every column. A path moving rightward
//! across the cut of a column with X above O passes from sheet `k` to `k + 1`;
//! with O above X it passes to `k - 1`. Vertical circles never meet a cut, so
//! `beta_c` lifts to the `m` circles `beta_c^k`. The lift `alpha_r^l` of a
//! horizontal circle is labelled by its sheet on the left edge of the grid, so
//! `beta_c^k` meets `alpha_r^l` exactly when `l = k - w(c, r) mod m`.

use crate::grid::{GridDiagram, WindingTable};

/// A rectangle on the base torus: lower-left lattice point `(col, row)`,
/// extending `width` columns right and `height` rows up, with wraparound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BaseRect {
    pub col: usize,
    pub row: usize,
    pub width: usize,
    pub height: usize,
}

impl BaseRect {
    pub fn new(col: usize, row: usize, width: usize, height: usize) -> Self {
        BaseRect {
            col,
            row,
            width,
            height,
        }
    }

    /// Columns covered, left to right (mod `n`).
    pub fn columns(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        let c0 = self.col;
        (0..self.width).map(move |t| (c0 + t) % n)
    }

    pub fn rows(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        let r0 = self.row;
        (0..self.height).map(move |t| (r0 + t) % n)
    }

    /// Whether some cell of the rectangle holds a marker.
    pub fn contains_marker(&self, g: &GridDiagram) -> bool {
        let n = g.n();
        self.columns(n)
            .any(|c| self.rows(n).any(|r| g.has_marker(c, r)))
    }

    pub fn right_col(&self, n: usize) -> usize {
        (self.col + self.width) % n
    }

    pub fn top_row(&self, n: usize) -> usize {
        (self.row + self.height) % n
    }
}

/// One lift of a marker-free base rectangle.
///
/// `line_sheets[t]` is the sheet of the vertical edge segment at column offset
/// `t` (`t = 0` is the left edge, `t = width` the right edge). The cell at
/// column offset `t` has its left half on sheet `line_sheets[t]` and its right
/// half on sheet `line_sheets[t + 1]`; they differ exactly when the column's
/// cut runs through the rectangle.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LiftedRegion {
    pub rect: BaseRect,
    pub start_sheet: usize,
    pub line_sheets: Vec<usize>,
}

impl LiftedRegion {
    pub fn end_sheet(&self) -> usize {
        *self.line_sheets.last().unwrap()
    }

    /// Sheets of the left and right halves of the cell at column offset `t`.
    pub fn cell_sheets(&self, t: usize) -> (usize, usize) {
        (self.line_sheets[t], self.line_sheets[t + 1])
    }
}

#[derive(Clone, Debug)]
pub struct LiftedDiagram {
    base: GridDiagram,
    m: usize,
    winding: WindingTable,
    /// `alpha_label[(c * n + r) * m + k]` is the lift index of the horizontal
    /// circle through the lattice point `(c, r)` on sheet `k`.
    alpha_label: Vec<u8>,
    rects: RectTable,
}

/// Marker-freeness of every base rectangle, and the signed sheet shift along
/// each row strip. Inside a marker-free rectangle every column strip is cut
/// either completely or not at all, so the shift depends only on the bottom
/// row.
#[derive(Clone, Debug)]
struct RectTable {
    n: usize,
    free: Vec<bool>,
    /// partial shifts at column offsets `0..=n`, indexed by `(c, r)`, stride `n + 1`
    prefix: Vec<i16>,
}

impl RectTable {
    fn index(&self, c: usize, r: usize, w: usize, h: usize) -> usize {
        let n = self.n;
        ((c * n + r) * n + (w - 1)) * n + (h - 1)
    }

    fn build(g: &GridDiagram) -> Self {
        let n = g.n();
        let mut t = RectTable {
            n,
            free: vec![false; n * n * n * n],
            prefix: vec![0; n * n * (n + 1)],
        };
        for c in 0..n {
            for r in 0..n {
                for w in 1..=n {
                    for h in 1..=n {
                        let idx = t.index(c, r, w, h);
                        t.free[idx] = !BaseRect::new(c, r, w, h).contains_marker(g);
                    }
                }
                let base = (c * n + r) * (n + 1);
                let mut acc = 0i16;
                for j in 0..n {
                    let col = (c + j) % n;
                    if g.cell_fully_cut(col, r) {
                        acc += g.cut_dir(col) as i16;
                    }
                    t.prefix[base + j + 1] = acc;
                }
            }
        }
        t
    }
}

impl LiftedDiagram {
    pub fn new(base: &GridDiagram, m: usize) -> Self {
        assert!(m >= 1, "number of sheets must be positive");
        let n = base.n();
        let winding = base.winding_table();
        let mut alpha_label = vec![0u8; n * n * m];
        for c in 0..n {
            for r in 0..n {
                for k in 0..m {
                    let l = (k as i64 - winding.at(c, r) as i64).rem_euclid(m as i64);
                    alpha_label[(c * n + r) * m + k] = l as u8;
                }
            }
        }
        LiftedDiagram {
            base: base.clone(),
            m,
            winding,
            alpha_label,
            rects: RectTable::build(base),
        }
    }

    pub fn base(&self) -> &GridDiagram {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn winding(&self) -> &WindingTable {
        &self.winding
    }

    /// Number of lifted vertical (equivalently horizontal) circles.
    pub fn size(&self) -> usize {
        self.base.n() * self.m
    }

    pub fn cut_dir(&self, col: usize) -> i32 {
        self.base.cut_dir(col)
    }

    /// Index of `beta_c^k`.
    pub fn beta_index(&self, c: usize, k: usize) -> usize {
        c * self.m + k
    }

    /// Index of `alpha_r^l`.
    pub fn alpha_index(&self, r: usize, l: usize) -> usize {
        r * self.m + l
    }

    /// Lift index of the horizontal circle through `(c, r)` on sheet `k`.
    pub fn alpha_label(&self, c: usize, r: usize, k: usize) -> usize {
        let n = self.n();
        self.alpha_label[((c % n) * n + (r % n)) * self.m + k] as usize
    }

    /// The horizontal circle lift met by `beta_c^k` at height `r`.
    pub fn incidence(&self, c: usize, k: usize, r: usize) -> usize {
        self.alpha_index(r % self.n(), self.alpha_label(c, r, k))
    }

    pub fn rect_is_free(&self, rect: &BaseRect) -> bool {
        rect.width >= 1
            && rect.height >= 1
            && rect.width <= self.n()
            && rect.height <= self.n()
            && self.rects.free[self
                .rects
                .index(rect.col, rect.row, rect.width, rect.height)]
    }

    /// Signed sheet shift accumulated from the left edge to column offset `t`
    /// (meaningful for marker-free rectangles).
    pub fn rect_shift(&self, rect: &BaseRect, t: usize) -> i32 {
        self.strip_shift(rect.col, rect.row, t)
    }

    /// Signed cut crossings of the row strip `r` between column lines `c` and `c + t`.
    pub fn strip_shift(&self, c: usize, r: usize, t: usize) -> i32 {
        let n = self.n();
        self.rects.prefix[(c * n + r) * (n + 1) + t] as i32
    }

    pub fn sheet_add(&self, k: usize, delta: i32) -> usize {
        (k as i64 + delta as i64).rem_euclid(self.m as i64) as usize
    }

    /// Lifts a marker-free base rectangle starting on `start_sheet` at its
    /// left edge. Returns `None` when the rectangle holds a marker (such a
    /// region has no rectangular lift).
    pub fn lift_rectangle(&self, rect: BaseRect, start_sheet: usize) -> Option<LiftedRegion> {
        if !self.rect_is_free(&rect) {
            return None;
        }
        let k = start_sheet % self.m;
        let line_sheets = (0..=rect.width)
            .map(|t| self.sheet_add(k, self.rect_shift(&rect, t)))
            .collect();
        Some(LiftedRegion {
            rect,
            start_sheet: k,
            line_sheets,
        })
    }

    /// All `m` lifts of a marker-free rectangle.
    pub fn lifts(&self, rect: BaseRect) -> Vec<LiftedRegion> {
        (0..self.m)
            .filter_map(|k| self.lift_rectangle(rect, k))
            .collect()
    }
}

/// Builds the lifted diagram; `m = 1` gives the base torus diagram.
pub fn build_lifted(g: &GridDiagram, m: usize) -> LiftedDiagram {
    LiftedDiagram::new(g, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::parse_grid;

    fn unknot2() -> GridDiagram {
        parse_grid("n=2; O: 0 1; X: 1 0").unwrap()
    }

    fn trefoil5() -> GridDiagram {
        parse_grid("n=5; O: 4 0 1 2 3; X: 1 2 3 4 0").unwrap()
    }

    /// Recomputes the incidence by walking each horizontal lift rightward from
    /// the left edge and counting cut crossings.
    fn incidence_by_walking(g: &GridDiagram, m: usize) -> Vec<Vec<usize>> {
        let n = g.n();
        let mut table = vec![vec![usize::MAX; n * m]; n * m];
        for r in 0..n {
            for l in 0..m {
                let mut sheet = l as i64;
                for c in 0..n {
                    let k = sheet.rem_euclid(m as i64) as usize;
                    table[c * m + k][r] = r * m + l;
                    let (lo, hi) = g.marker_span(c);
                    if lo < r && r <= hi {
                        sheet += g.cut_dir(c) as i64;
                    }
                }
                assert_eq!(sheet.rem_euclid(m as i64), l as i64, "lift closes up");
            }
        }
        table
    }

    fn check_regular(d: &LiftedDiagram) {
        let n = d.n();
        let m = d.m();
        let mut alpha_degree = vec![0; n * m];
        for c in 0..n {
            for k in 0..m {
                let mut rows = vec![false; n];
                for r in 0..n {
                    let a = d.incidence(c, k, r);
                    assert_eq!(a / m, r);
                    rows[r] = true;
                    alpha_degree[a] += 1;
                }
                assert!(rows.into_iter().all(|b| b));
            }
        }
        assert!(alpha_degree.iter().all(|&deg| deg == n));
    }

    #[test]
    fn single_sheet_is_base() {
        let d = build_lifted(&trefoil5(), 1);
        for c in 0..5 {
            for r in 0..5 {
                assert_eq!(d.incidence(c, 0, r), r);
            }
        }
    }

    #[test]
    fn incidence_matches_walk() {
        for g in [unknot2(), trefoil5()] {
            for m in 1..=3 {
                let d = build_lifted(&g, m);
                check_regular(&d);
                let walk = incidence_by_walking(&g, m);
                for c in 0..g.n() {
                    for k in 0..m {
                        for r in 0..g.n() {
                            assert_eq!(walk[c * m + k][r], d.incidence(c, k, r));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn unknot_two_sheets() {
        let d = build_lifted(&unknot2(), 2);
        assert_eq!(d.size(), 4);
        // w(1, 1) = 1: beta_1^0 meets alpha_1^1 and beta_1^1 meets alpha_1^0
        assert_eq!(d.winding().at(1, 1), 1);
        assert_eq!(d.incidence(1, 0, 1), d.alpha_index(1, 1));
        assert_eq!(d.incidence(1, 1, 1), d.alpha_index(1, 0));
        assert_eq!(d.incidence(0, 0, 1), d.alpha_index(1, 0));
    }

    #[test]
    fn rectangle_profiles() {
        // column 1 of the trefoil has X above O (rows 0..2), the cut runs through row 1
        let g = trefoil5();
        let d = build_lifted(&g, 2);
        let no_cut = BaseRect::new(2, 0, 1, 1);
        assert!(d.rect_is_free(&no_cut));
        assert_eq!(d.lift_rectangle(no_cut, 0).unwrap().line_sheets, vec![0, 0]);
        let r = BaseRect::new(1, 1, 1, 1);
        assert!(d.rect_is_free(&r));
        assert_eq!(g.cut_dir(1), 1);
        assert_eq!(d.lift_rectangle(r, 0).unwrap().line_sheets, vec![0, 1]);
        assert_eq!(d.lift_rectangle(r, 1).unwrap().line_sheets, vec![1, 0]);
        assert!(d.lift_rectangle(BaseRect::new(0, 0, 2, 2), 0).is_none());
    }

    #[test]
    fn lifts_are_disjoint_and_deck_equivariant() {
        let g = trefoil5();
        let d = build_lifted(&g, 2);
        let n = g.n();
        for c in 0..n {
            for r in 0..n {
                for w in 1..n {
                    for h in 1..n {
                        let rect = BaseRect::new(c, r, w, h);
                        let lifts = d.lifts(rect);
                        if lifts.is_empty() {
                            continue;
                        }
                        assert_eq!(lifts.len(), 2);
                        for t in 0..w {
                            assert_ne!(lifts[0].cell_sheets(t), lifts[1].cell_sheets(t));
                        }
                        let shifted: Vec<usize> =
                            lifts[0].line_sheets.iter().map(|&s| (s + 1) % 2).collect();
                        assert_eq!(shifted, lifts[1].line_sheets);
                        // the lift's corners lie on the horizontal lifts predicted by the incidence
                        let l = &lifts[0];
                        let bottom_left = d.alpha_label(c, r, l.start_sheet);
                        let bottom_right = d.alpha_label(rect.right_col(n), r, l.end_sheet());
                        assert_eq!(bottom_left, bottom_right);
                        let top_left = d.alpha_label(c, rect.top_row(n), l.start_sheet);
                        let top_right =
                            d.alpha_label(rect.right_col(n), rect.top_row(n), l.end_sheet());
                        assert_eq!(top_left, top_right);
                    }
                }
            }
        }
    }
}

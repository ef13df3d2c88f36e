//! Toroidal grid diagrams, winding numbers and the Cromwell moves.
//!
//! Coordinates: columns `0..n` run left to right, rows `0..n` bottom to top.
//! The markers of column `c` sit at the cell centres `(c + 1/2, o_perm[c] + 1/2)`
//! and `(c + 1/2, x_perm[c] + 1/2)`. Lattice point `(c, r)` is the intersection of
//! the vertical circle `beta_c` (the line `x = c`) with the horizontal circle
//! `alpha_r` (the line `y = r`).
//!
//! The knot is oriented with vertical segments running X -> O and horizontal
//! segments running O -> X; winding numbers are counted counterclockwise.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("malformed grid file: {0}")]
    Malformed(String),
    #[error("grid size must be at least 2, got {0}")]
    TooSmall(usize),
    #[error("{which} list has {got} entries, expected {expected}")]
    WrongLength {
        which: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("{which} entry {value} is out of range 0..{n}")]
    OutOfRange {
        which: &'static str,
        value: usize,
        n: usize,
    },
    #[error("{which} row {row} is used by more than one column")]
    DuplicateRow { which: &'static str, row: usize },
    #[error("X and O collide in column {column}")]
    Collision { column: usize },
    #[error("columns {left} and {right} are not commutable")]
    NotCommutable { left: usize, right: usize },
    #[error("index {index} out of range for grid of size {n}")]
    BadIndex { index: usize, n: usize },
    #[error("column {column} is not a destabilization column")]
    NotDestabilizable { column: usize },
    #[error("the second diagram is not a stabilization of the first")]
    NotAStabilizationPair,
}

/// A grid diagram of a knot: one X and one O in every row and column.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridDiagram {
    n: usize,
    o_perm: Vec<usize>,
    x_perm: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    Row,
    Column,
}

/// Which side of the anchor marker receives the new column in a stabilization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Which of the two rows produced by splitting keeps the old X.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Half {
    Lower,
    Upper,
}

/// A reduced stabilization of a row: the new column is placed next to the X
/// of the row, on `side`, and the old X goes to the `x_half` of the split row.
/// The new column carries `O_1` in the row of the old X and `X_1` in the row of
/// the old O, so `O_1` and `X_2` (the old X) are horizontally adjacent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StabilizeVariant {
    pub side: Side,
    pub x_half: Half,
}

impl StabilizeVariant {
    pub const ALL: [StabilizeVariant; 4] = [
        StabilizeVariant {
            side: Side::Left,
            x_half: Half::Lower,
        },
        StabilizeVariant {
            side: Side::Left,
            x_half: Half::Upper,
        },
        StabilizeVariant {
            side: Side::Right,
            x_half: Half::Lower,
        },
        StabilizeVariant {
            side: Side::Right,
            x_half: Half::Upper,
        },
    ];
}

/// Bookkeeping produced by [`GridDiagram::stabilize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilization {
    pub base: GridDiagram,
    pub result: GridDiagram,
    pub variant: StabilizeVariant,
    /// Row of `base` that was split.
    pub row: usize,
    /// Column of `result` holding `O_1` and `X_1`.
    pub new_column: usize,
    /// Index of the new horizontal circle `alpha` separating `O_1` from `X_1`.
    pub alpha: usize,
    /// `beta_1` is the left boundary of the new column, `beta_2 = beta_1 + 1`.
    pub beta1: usize,
}

impl Stabilization {
    /// Maps a vertical circle of the base grid to the circle of the result it
    /// is identified with. The circle on which the new column is inserted maps
    /// to `beta_2`.
    pub fn map_column_line(&self, c: usize) -> usize {
        if c <= self.beta1 {
            if c == self.beta1 {
                self.beta1 + 1
            } else {
                c
            }
        } else {
            c + 1
        }
    }

    /// Maps a horizontal circle of the base grid to the result.
    pub fn map_row_line(&self, r: usize) -> usize {
        if r <= self.row {
            r
        } else {
            r + 1
        }
    }

    /// `O_1` sits above `alpha` (and `X_1` below) in the new column.
    pub fn o1_above(&self) -> bool {
        self.result.o_perm[self.new_column] == self.alpha
    }
}

impl GridDiagram {
    pub fn new(o_perm: Vec<usize>, x_perm: Vec<usize>) -> Result<Self, GridError> {
        let n = o_perm.len();
        if n < 2 {
            return Err(GridError::TooSmall(n));
        }
        if x_perm.len() != n {
            return Err(GridError::WrongLength {
                which: "X",
                got: x_perm.len(),
                expected: n,
            });
        }
        for (which, perm) in [("O", &o_perm), ("X", &x_perm)] {
            let mut seen = vec![false; n];
            for &v in perm.iter() {
                if v >= n {
                    return Err(GridError::OutOfRange { which, value: v, n });
                }
                if seen[v] {
                    return Err(GridError::DuplicateRow { which, row: v });
                }
                seen[v] = true;
            }
        }
        if let Some(column) = (0..n).find(|&j| o_perm[j] == x_perm[j]) {
            return Err(GridError::Collision { column });
        }
        Ok(GridDiagram { n, o_perm, x_perm })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn o_perm(&self) -> &[usize] {
        &self.o_perm
    }

    pub fn x_perm(&self) -> &[usize] {
        &self.x_perm
    }

    pub fn o_row(&self, col: usize) -> usize {
        self.o_perm[col % self.n]
    }

    pub fn x_row(&self, col: usize) -> usize {
        self.x_perm[col % self.n]
    }

    /// `+1` when X is above O in the column, `-1` otherwise.
    pub fn cut_dir(&self, col: usize) -> i32 {
        if self.x_row(col) > self.o_row(col) {
            1
        } else {
            -1
        }
    }

    /// Whether cell `(col, row)` contains a marker.
    pub fn has_marker(&self, col: usize, row: usize) -> bool {
        let c = col % self.n;
        let r = row % self.n;
        self.o_perm[c] == r || self.x_perm[c] == r
    }

    /// Whether the branch cut of column `col` (the vertical segment joining its
    /// markers without wrapping) passes through the whole cell `(col, row)`.
    pub fn cell_fully_cut(&self, col: usize, row: usize) -> bool {
        let (lo, hi) = self.marker_span(col);
        lo < row && row < hi
    }

    /// Whether the lattice height `row` lies strictly inside the cut of `col`.
    pub fn line_crosses_cut(&self, col: usize, row: usize) -> bool {
        let (lo, hi) = self.marker_span(col);
        lo < row && row <= hi
    }

    pub fn marker_span(&self, col: usize) -> (usize, usize) {
        let o = self.o_row(col);
        let x = self.x_row(col);
        (o.min(x), o.max(x))
    }

    pub fn winding_table(&self) -> WindingTable {
        WindingTable::new(self)
    }

    /// Column of the O (resp. X) in `row`.
    pub fn o_col_of_row(&self, row: usize) -> usize {
        self.o_perm.iter().position(|&r| r == row % self.n).unwrap()
    }

    pub fn x_col_of_row(&self, row: usize) -> usize {
        self.x_perm.iter().position(|&r| r == row % self.n).unwrap()
    }

    /// Cyclically permutes rows (every marker moves up by `shift`) or columns
    /// (every marker moves right by `shift`).
    pub fn cyclic_permute(&self, axis: Axis, shift: i64) -> GridDiagram {
        let n = self.n as i64;
        let s = shift.rem_euclid(n) as usize;
        match axis {
            Axis::Row => GridDiagram {
                n: self.n,
                o_perm: self.o_perm.iter().map(|&r| (r + s) % self.n).collect(),
                x_perm: self.x_perm.iter().map(|&r| (r + s) % self.n).collect(),
            },
            Axis::Column => {
                let mut o = vec![0; self.n];
                let mut x = vec![0; self.n];
                for j in 0..self.n {
                    o[(j + s) % self.n] = self.o_perm[j];
                    x[(j + s) % self.n] = self.x_perm[j];
                }
                GridDiagram {
                    n: self.n,
                    o_perm: o,
                    x_perm: x,
                }
            }
        }
    }

    /// Whether the markers of two columns do not interleave on the vertical circle.
    fn pairs_unlinked(a: (usize, usize), b: (usize, usize)) -> bool {
        let (a0, a1) = (a.0.min(a.1), a.0.max(a.1));
        let inside = |v: usize| a0 < v && v < a1;
        let shared = b.0 == a0 || b.0 == a1 || b.1 == a0 || b.1 == a1;
        !shared && inside(b.0) == inside(b.1)
    }

    /// Whether columns `j` and `j + 1` (mod n) may be swapped.
    pub fn is_commutable(&self, j: usize) -> bool {
        let k = (j + 1) % self.n;
        Self::pairs_unlinked(
            (self.o_perm[j % self.n], self.x_perm[j % self.n]),
            (self.o_perm[k], self.x_perm[k]),
        )
    }

    /// Swaps columns `j` and `j + 1` (mod n).
    pub fn commute(&self, j: usize) -> Result<GridDiagram, GridError> {
        if j >= self.n {
            return Err(GridError::BadIndex {
                index: j,
                n: self.n,
            });
        }
        let k = (j + 1) % self.n;
        if !self.is_commutable(j) {
            return Err(GridError::NotCommutable { left: j, right: k });
        }
        let mut g = self.clone();
        g.o_perm.swap(j, k);
        g.x_perm.swap(j, k);
        Ok(g)
    }

    /// Whether rows `i` and `i + 1` (mod n) may be swapped.
    pub fn is_row_commutable(&self, i: usize) -> bool {
        let k = (i + 1) % self.n;
        Self::pairs_unlinked(
            (self.o_col_of_row(i), self.x_col_of_row(i)),
            (self.o_col_of_row(k), self.x_col_of_row(k)),
        )
    }

    /// Swaps rows `i` and `i + 1` (mod n).
    pub fn commute_rows(&self, i: usize) -> Result<GridDiagram, GridError> {
        if i >= self.n {
            return Err(GridError::BadIndex {
                index: i,
                n: self.n,
            });
        }
        let k = (i + 1) % self.n;
        if !self.is_row_commutable(i) {
            return Err(GridError::NotCommutable { left: i, right: k });
        }
        let swap = |r: usize| {
            if r == i {
                k
            } else if r == k {
                i
            } else {
                r
            }
        };
        Ok(GridDiagram {
            n: self.n,
            o_perm: self.o_perm.iter().map(|&r| swap(r)).collect(),
            x_perm: self.x_perm.iter().map(|&r| swap(r)).collect(),
        })
    }

    /// Splits `row` in two and inserts a new column next to the X of that row.
    pub fn stabilize(
        &self,
        row: usize,
        variant: StabilizeVariant,
    ) -> Result<Stabilization, GridError> {
        let n = self.n;
        if row >= n {
            return Err(GridError::BadIndex { index: row, n });
        }
        let xc = self.x_col_of_row(row);
        let oc = self.o_col_of_row(row);
        // new column index in the result
        let new_column = match variant.side {
            Side::Left => xc,
            Side::Right => xc + 1,
        };
        let (x_row, o_row) = match variant.x_half {
            Half::Lower => (row, row + 1),
            Half::Upper => (row + 1, row),
        };
        let lift_row = |r: usize| if r > row { r + 1 } else { r };
        let mut o = Vec::with_capacity(n + 1);
        let mut x = Vec::with_capacity(n + 1);
        for c in 0..=n {
            if c == new_column {
                o.push(x_row);
                x.push(o_row);
                continue;
            }
            let old = if c > new_column { c - 1 } else { c };
            let oo = if old == oc {
                o_row
            } else {
                lift_row(self.o_perm[old])
            };
            let xx = if old == xc {
                x_row
            } else {
                lift_row(self.x_perm[old])
            };
            o.push(oo);
            x.push(xx);
        }
        let result = GridDiagram::new(o, x).expect("stabilization yields a valid grid");
        Ok(Stabilization {
            base: self.clone(),
            result,
            variant,
            row,
            new_column,
            alpha: row + 1,
            beta1: new_column,
        })
    }

    /// Removes a column whose two markers sit in vertically adjacent rows
    /// (not wrapping), merging those rows.
    pub fn destabilize(&self, column: usize) -> Result<GridDiagram, GridError> {
        let n = self.n;
        if column >= n {
            return Err(GridError::BadIndex { index: column, n });
        }
        let (lo, hi) = self.marker_span(column);
        if hi != lo + 1 || n < 3 {
            return Err(GridError::NotDestabilizable { column });
        }
        let merge = |r: usize| if r > lo { r - 1 } else { r };
        let mut o = Vec::with_capacity(n - 1);
        let mut x = Vec::with_capacity(n - 1);
        for c in (0..n).filter(|&c| c != column) {
            o.push(merge(self.o_perm[c]));
            x.push(merge(self.x_perm[c]));
        }
        GridDiagram::new(o, x).map_err(|_| GridError::NotDestabilizable { column })
    }

    /// Rotates the diagram by a half turn. This preserves the knot type and
    /// maps rectangles to rectangles.
    pub fn rotate_half_turn(&self) -> GridDiagram {
        let n = self.n;
        let mut o = vec![0; n];
        let mut x = vec![0; n];
        for c in 0..n {
            o[n - 1 - c] = n - 1 - self.o_perm[c];
            x[n - 1 - c] = n - 1 - self.x_perm[c];
        }
        GridDiagram {
            n,
            o_perm: o,
            x_perm: x,
        }
    }

    /// Canonical single-line form used in cache keys.
    pub fn canonical_form(&self) -> String {
        let join = |v: &[usize]| {
            v.iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!(
            "n={}; O: {}; X: {}",
            self.n,
            join(&self.o_perm),
            join(&self.x_perm)
        )
    }

    /// Serializes to the three-line grid file format.
    pub fn to_file_string(&self) -> String {
        let join = |v: &[usize]| {
            v.iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!(
            "n={}\nO: {}\nX: {}\n",
            self.n,
            join(&self.o_perm),
            join(&self.x_perm)
        )
    }
}

/// Parses the grid file format. Line breaks and `;` are both accepted as
/// separators, and blank lines or `#` comments are ignored.
pub fn parse_grid(text: &str) -> Result<GridDiagram, GridError> {
    let mut n: Option<usize> = None;
    let mut o: Option<Vec<usize>> = None;
    let mut x: Option<Vec<usize>> = None;
    let fields = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(';'))
        .map(str::trim)
        .filter(|f| !f.is_empty());
    for field in fields {
        if let Some(rest) = field.strip_prefix("n=") {
            let v = rest
                .trim()
                .parse::<usize>()
                .map_err(|_| GridError::Malformed(format!("bad size `{}`", rest.trim())))?;
            n = Some(v);
        } else if let Some((key, rest)) = field.split_once(':') {
            let vals = rest
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| GridError::Malformed(format!("bad entry `{t}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            match key.trim() {
                "O" => o = Some(vals),
                "X" => x = Some(vals),
                other => return Err(GridError::Malformed(format!("unknown field `{other}`"))),
            }
        } else {
            return Err(GridError::Malformed(format!("unrecognized line `{field}`")));
        }
    }
    let n = n.ok_or_else(|| GridError::Malformed("missing `n=`".into()))?;
    let o = o.ok_or_else(|| GridError::Malformed("missing `O:`".into()))?;
    let x = x.ok_or_else(|| GridError::Malformed("missing `X:`".into()))?;
    if n < 2 {
        return Err(GridError::TooSmall(n));
    }
    if o.len() != n {
        return Err(GridError::WrongLength {
            which: "O",
            got: o.len(),
            expected: n,
        });
    }
    GridDiagram::new(o, x)
}

impl FromStr for GridDiagram {
    type Err = GridError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_grid(s)
    }
}

impl fmt::Display for GridDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in (0..self.n).rev() {
            for c in 0..self.n {
                let ch = if self.o_perm[c] == r {
                    'O'
                } else if self.x_perm[c] == r {
                    'X'
                } else {
                    '.'
                };
                write!(f, "{ch}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Winding numbers of the knot projection at the lattice points.
///
/// `w(c, r)` is computed by casting a ray from `(c, r)` to the left, past the
/// leftmost column: every vertical knot strand it crosses contributes `+1`
/// when running downward (X above O) and `-1` when running upward. Points on
/// the left edge of the grid therefore have winding number zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindingTable {
    n: usize,
    w: Vec<i32>,
}

impl WindingTable {
    fn new(g: &GridDiagram) -> Self {
        let n = g.n;
        let mut w = vec![0i32; (n + 1) * (n + 1)];
        for r in 0..=n {
            let mut acc = 0;
            for c in 0..=n {
                w[c * (n + 1) + r] = acc;
                if c < n && g.line_crosses_cut(c, r) {
                    acc += g.cut_dir(c);
                }
            }
        }
        WindingTable { n, w }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Winding number at lattice point `(c, r)`, `0 <= c, r <= n`.
    pub fn at(&self, c: usize, r: usize) -> i32 {
        self.w[c * (self.n + 1) + r]
    }

    /// Winding number with toroidal indices reduced into the fundamental square.
    pub fn at_mod(&self, c: usize, r: usize) -> i32 {
        self.at(c % self.n, r % self.n)
    }

    pub fn max_abs(&self) -> i32 {
        self.w.iter().map(|v| v.abs()).max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unknot2() -> GridDiagram {
        parse_grid("n=2; O: 0 1; X: 1 0").unwrap()
    }

    fn trefoil5() -> GridDiagram {
        parse_grid("n=5; O: 4 0 1 2 3; X: 1 2 3 4 0").unwrap()
    }

    /// Independent winding number: sum of signed crossings of a rightward ray
    /// with the vertical knot strands, oriented X -> O.
    fn winding_by_right_ray(g: &GridDiagram, c: usize, r: usize) -> i32 {
        let mut total = 0;
        for col in c..g.n() {
            let (o, x) = (g.o_row(col) as f64 + 0.5, g.x_row(col) as f64 + 0.5);
            let (lo, hi) = (o.min(x), o.max(x));
            let y = r as f64;
            if lo < y && y < hi {
                // rising strand (O below X means strand runs X -> O downward)
                total += if x < o { 1 } else { -1 };
            }
        }
        total
    }

    #[test]
    fn parse_examples() {
        assert_eq!(unknot2().n(), 2);
        assert_eq!(trefoil5().x_perm(), &[1, 2, 3, 4, 0]);
        assert_eq!(
            parse_grid("n=2; O: 0 1; X: 0 1"),
            Err(GridError::Collision { column: 0 })
        );
        assert_eq!(
            parse_grid("n=3; O: 0 0 1; X: 1 2 0"),
            Err(GridError::DuplicateRow { which: "O", row: 0 })
        );
        assert_eq!(parse_grid("n=1; O: 0; X: 0"), Err(GridError::TooSmall(1)));
        assert!(matches!(
            parse_grid("n=2; O: 0 q; X: 1 0"),
            Err(GridError::Malformed(_))
        ));
        assert!(matches!(
            parse_grid("n=3; O: 0 1 5; X: 1 2 0"),
            Err(GridError::OutOfRange { .. })
        ));
        assert!(matches!(
            parse_grid("n=3; O: 0 1; X: 1 2 0"),
            Err(GridError::WrongLength { .. })
        ));
    }

    #[test]
    fn file_round_trip() {
        let g = trefoil5();
        assert_eq!(parse_grid(&g.to_file_string()).unwrap(), g);
        assert_eq!(parse_grid(&g.canonical_form()).unwrap(), g);
    }

    #[test]
    fn unknot_winding() {
        let w = unknot2().winding_table();
        for c in 0..=2 {
            for r in 0..=2 {
                let v = w.at(c, r);
                if (c, r) == (1, 1) {
                    assert_eq!(v.abs(), 1);
                } else {
                    assert_eq!(v, 0, "({c},{r})");
                }
            }
        }
    }

    #[test]
    fn trefoil_winding_matches_ray_oracle() {
        let g = trefoil5();
        let w = g.winding_table();
        // this presentation never winds twice around any lattice point
        assert_eq!(w.max_abs(), 1);
        for c in 0..=5 {
            for r in 0..=5 {
                assert_eq!(w.at(c, r), winding_by_right_ray(&g, c, r));
            }
        }
    }

    #[test]
    fn cyclic_examples() {
        let g = trefoil5();
        assert_eq!(g.cyclic_permute(Axis::Row, 0), g);
        assert_eq!(g.cyclic_permute(Axis::Column, 5), g);
        let h = g.cyclic_permute(Axis::Row, 1);
        assert_eq!(h.o_perm(), &[0, 1, 2, 3, 4]);
        assert_eq!(h.x_perm(), &[2, 3, 4, 0, 1]);
    }

    #[test]
    fn commutation_examples() {
        // markers of adjacent columns share heights: not a commutation
        assert!(matches!(
            unknot2().commute(0),
            Err(GridError::NotCommutable { .. })
        ));
        let g = parse_grid("n=4; O: 0 2 1 3; X: 1 3 2 0").unwrap();
        let h = g.commute(0).unwrap();
        assert_eq!(h.o_perm(), &[2, 0, 1, 3]);
        assert_eq!(h.commute(0).unwrap(), g);
        assert!(matches!(
            trefoil5().commute(1),
            Err(GridError::NotCommutable { .. })
        ));
    }

    #[test]
    fn stabilization_examples() {
        let g = unknot2();
        for v in StabilizeVariant::ALL {
            for row in 0..2 {
                let s = g.stabilize(row, v).unwrap();
                assert_eq!(s.result.n(), 3);
                assert_eq!(s.result.destabilize(s.new_column).unwrap(), g);
                let (lo, hi) = s.result.marker_span(s.new_column);
                assert_eq!((lo + 1, hi), (s.alpha, s.alpha));
            }
        }
        let t = trefoil5().stabilize(2, StabilizeVariant::ALL[0]).unwrap();
        assert_eq!(t.result.n(), 6);
        assert!(matches!(
            trefoil5().stabilize(7, StabilizeVariant::ALL[0]),
            Err(GridError::BadIndex { .. })
        ));
    }

    fn arb_grid() -> impl Strategy<Value = GridDiagram> {
        (2usize..8)
            .prop_flat_map(|n| {
                (
                    Just(n),
                    Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                    Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
                )
            })
            .prop_filter_map("collision", |(_, o, x)| GridDiagram::new(o, x).ok())
    }

    proptest! {
        #[test]
        fn cell_corners_differ_across_strands(g in arb_grid()) {
            let w = g.winding_table();
            let n = g.n();
            for c in 0..n {
                for r in 0..n {
                    // edge-adjacent lattice points differ by at most one (diagonal
                    // neighbours differ by two at crossings)
                    prop_assert!((w.at(c, r + 1) - w.at(c, r)).abs() <= 1);
                    let vert = (w.at(c, r + 1) - w.at(c, r)).abs() == 1;
                    // a horizontal strand (O -> X in row r) separates the two points iff
                    // exactly one of the row's markers lies left of column c
                    let left = |col: usize| col < c;
                    prop_assert_eq!(vert, left(g.o_col_of_row(r)) != left(g.x_col_of_row(r)));
                    let crosses = g.line_crosses_cut(c, r);
                    prop_assert_eq!(w.at(c + 1, r) != w.at(c, r), crosses);
                }
            }
            for r in 0..=n { prop_assert_eq!(w.at(n, r), 0); prop_assert_eq!(w.at(0, r), 0); }
        }

        #[test]
        fn cyclic_inverse(g in arb_grid(), s in -20i64..20) {
            for axis in [Axis::Row, Axis::Column] {
                prop_assert_eq!(g.cyclic_permute(axis, s).cyclic_permute(axis, -s), g.clone());
            }
        }

        #[test]
        fn stabilize_then_destabilize(g in arb_grid(), row in 0usize..8, v in 0usize..4) {
            let row = row % g.n();
            let s = g.stabilize(row, StabilizeVariant::ALL[v]).unwrap();
            prop_assert_eq!(s.result.n(), g.n() + 1);
            prop_assert_eq!(s.result.destabilize(s.new_column).unwrap(), g.clone());
        }

        #[test]
        fn commute_is_involution(g in arb_grid(), j in 0usize..8) {
            let j = j % g.n();
            if let Ok(h) = g.commute(j) {
                prop_assert_eq!(h.commute(j).unwrap(), g.clone());
            }
            if let Ok(h) = g.commute_rows(j) {
                prop_assert_eq!(h.commute_rows(j).unwrap(), g.clone());
            }
        }
    }
}

//! A refined model of the lifted torus for curves that are not straight grid
//! lines.
//!
//! Coordinates are scaled by four: horizontal circle `r` runs along `y = 4r`,
//! vertical circle `c` along `x = 4c`, markers sit at `(4c + 2, 4r + 2)` and
//! the cut of column `c` runs along `x = 4c + 2` between its markers. Every
//! curve is a closed lattice path; its lifts are labelled by the sheet at the
//! curve's first vertex.
//!
//! Polygons are found by walking their boundary counterclockwise along lifts
//! of the curves, turning left at each corner. The walk is tracked in the
//! universal cover of the base torus, which is enough to recover the enclosed
//! region: a disk avoiding the branch points lifts isomorphically.

use rustc_hash::{FxHashMap, FxHashSet};

use crate::grid::GridDiagram;

pub const SCALE: i64 = 4;

pub type Point = (i64, i64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CurveKind {
    /// horizontal circle of the given row line
    Alpha(usize),
    /// vertical curve occupying the given column slot
    Vertical(usize),
}

#[derive(Clone, Debug)]
pub struct Curve {
    pub kind: CurveKind,
    /// one period of the path; consecutive points differ by a unit step
    pub pts: Vec<Point>,
    pub period: Point,
}

impl Curve {
    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn at(&self, i: i64) -> Point {
        let l = self.pts.len() as i64;
        let q = i.div_euclid(l);
        let p = self.pts[i.rem_euclid(l) as usize];
        (p.0 + q * self.period.0, p.1 + q * self.period.1)
    }
}

/// A lift of a curve: `(curve id, label)`.
pub type Lift = (usize, usize);

#[derive(Clone, Debug)]
pub struct FineSurface {
    n: usize,
    m: usize,
    size: i64,
    /// sheet change when crossing the vertical edge `(x, y)-(x, y + 1)` rightward
    cut_delta: Vec<i32>,
    marker: Vec<bool>,
    curves: Vec<Curve>,
    through: Vec<Vec<(usize, usize)>>,
    /// `prefix[c][i]`: sheet change accumulated along curve `c` from vertex 0 to vertex `i`
    prefix: Vec<Vec<i32>>,
    total: Vec<i32>,
}

impl FineSurface {
    pub fn new(g: &GridDiagram, m: usize, curves: Vec<Curve>) -> Self {
        let n = g.n();
        let size = SCALE * n as i64;
        let cells = (size * size) as usize;
        let mut cut_delta = vec![0i32; cells];
        let mut marker = vec![false; cells];
        for c in 0..n {
            let (lo, hi) = g.marker_span(c);
            let x = SCALE * c as i64 + 2;
            for y in (SCALE * lo as i64 + 2)..(SCALE * hi as i64 + 2) {
                cut_delta[(x * size + y) as usize] = g.cut_dir(c);
            }
            for r in [lo, hi] {
                marker[(x * size + SCALE * r as i64 + 2) as usize] = true;
            }
        }
        let mut s = FineSurface {
            n,
            m,
            size,
            cut_delta,
            marker,
            curves: Vec::new(),
            through: vec![Vec::new(); cells],
            prefix: Vec::new(),
            total: Vec::new(),
        };
        for c in curves {
            s.add_curve(c);
        }
        s
    }

    fn add_curve(&mut self, c: Curve) {
        let id = self.curves.len();
        let l = c.len();
        let mut prefix = vec![0i32; l + 1];
        for i in 1..=l {
            prefix[i] = prefix[i - 1] + self.pass_delta(&c, i as i64);
        }
        for (i, &p) in c.pts.iter().enumerate() {
            let v = self.vertex_index(p);
            self.through[v].push((id, i));
        }
        self.total.push(prefix[l]);
        prefix.truncate(l);
        self.prefix.push(prefix);
        self.curves.push(c);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn size(&self) -> i64 {
        self.size
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn curve_total(&self, c: usize) -> i32 {
        self.total[c]
    }

    pub fn wrap(&self, p: Point) -> Point {
        (p.0.rem_euclid(self.size), p.1.rem_euclid(self.size))
    }

    pub fn vertex_index(&self, p: Point) -> usize {
        let (x, y) = self.wrap(p);
        (x * self.size + y) as usize
    }

    pub fn is_marker(&self, p: Point) -> bool {
        self.marker[self.vertex_index(p)]
    }

    fn edge_delta(&self, x: i64, y: i64) -> i32 {
        self.cut_delta[self.vertex_index((x, y))]
    }

    /// Whether a vertex lies on a cut strictly between its markers, where the
    /// sheet is ambiguous.
    pub fn on_cut(&self, p: Point) -> bool {
        self.edge_delta(p.0, p.1) != 0 && self.edge_delta(p.0, p.1 - 1) != 0
    }

    /// Sheet change picked up by a curve passing through its vertex `i`.
    fn pass_delta(&self, c: &Curve, i: i64) -> i32 {
        let p = c.at(i);
        if !self.on_cut(p) {
            return 0;
        }
        let before = c.at(i - 1);
        let after = c.at(i + 1);
        assert!(
            before.1 == p.1 && after.1 == p.1,
            "curves cross cuts transversally"
        );
        self.edge_delta(p.0, p.1) * (after.0 - before.0).signum() as i32
    }

    /// Accumulated sheet change along curve `c` up to unwrapped index `i`.
    pub fn prefix(&self, c: usize, i: i64) -> i32 {
        let l = self.curves[c].len() as i64;
        self.prefix[c][i.rem_euclid(l) as usize] + i.div_euclid(l) as i32 * self.total[c]
    }

    pub fn sheet_add(&self, k: usize, d: i32) -> usize {
        (k as i64 + d as i64).rem_euclid(self.m as i64) as usize
    }

    /// Sheet of the lift `label` of curve `c` at unwrapped index `i`.
    pub fn sheet_on(&self, c: usize, label: usize, i: i64) -> usize {
        self.sheet_add(label, self.prefix(c, i))
    }

    /// Label of the lift of `c` passing through index `i` on `sheet`.
    pub fn label_at(&self, c: usize, i: i64, sheet: usize) -> usize {
        self.sheet_add(sheet, -self.prefix(c, i))
    }

    /// Curves through a vertex, with their index there.
    pub fn through(&self, p: Point) -> &[(usize, usize)] {
        &self.through[self.vertex_index(p)]
    }

    /// Sheet change crossing from cell `(x - 1, y)` into cell `(x, y)`.
    pub fn cell_step_right(&self, x: i64, y: i64) -> i32 {
        self.edge_delta(x, y)
    }

    /// Folded id of a lifted cell.
    pub fn cell_id(&self, cell: Point, sheet: usize) -> u32 {
        (self.vertex_index(cell) * self.m + sheet) as u32
    }

    /// Folded id of a lifted vertex (away from cuts).
    pub fn vertex_id(&self, p: Point, sheet: usize) -> u32 {
        (self.vertex_index(p) * self.m + sheet) as u32
    }
}

pub fn alpha_curve(n: usize, r: usize) -> Curve {
    let size = SCALE * n as i64;
    Curve {
        kind: CurveKind::Alpha(r),
        pts: (0..size).map(|x| (x, SCALE * r as i64)).collect(),
        period: (size, 0),
    }
}

pub fn beta_curve(n: usize, c: usize) -> Curve {
    let size = SCALE * n as i64;
    Curve {
        kind: CurveKind::Vertical(c),
        pts: (0..size).map(|y| (SCALE * c as i64, y)).collect(),
        period: (0, size),
    }
}

/// The straight grid lines of a diagram.
pub fn grid_curves(n: usize) -> Vec<Curve> {
    let mut v: Vec<Curve> = (0..n).map(|r| alpha_curve(n, r)).collect();
    v.extend((0..n).map(|c| beta_curve(n, c)));
    v
}

/// One class of allowed curve lifts for a polygon side.
#[derive(Clone, Debug, Default)]
pub struct SideClass {
    pub lifts: FxHashSet<Lift>,
}

impl SideClass {
    pub fn of(lifts: impl IntoIterator<Item = Lift>) -> Self {
        SideClass {
            lifts: lifts.into_iter().collect(),
        }
    }
}

/// Shape of a polygon: the allowed lifts of each side in order, the first side
/// leaving the start corner.
#[derive(Clone, Debug)]
pub struct PolygonSpec {
    pub sides: Vec<SideClass>,
    /// allowed initial headings, as unit vectors
    pub first_headings: Vec<Point>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Corner {
    pub pos: Point,
    pub sheet: usize,
    /// lift of the side arriving at the corner
    pub incoming: Lift,
    /// lift of the side leaving the corner
    pub outgoing: Lift,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polygon {
    /// corner `i` is where side `i - 1` ends and side `i` begins
    pub corners: Vec<Corner>,
    /// folded lifted cells, sorted
    pub cells: Vec<u32>,
    /// folded lifted vertices strictly inside
    pub interior: Vec<u32>,
    /// additive hash of `cells`, so composite domains compare by sum
    pub digest: (u64, u64),
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Order independent digest of a multiset of cells.
pub fn cell_digest(cells: &[u32]) -> (u64, u64) {
    cells.iter().fold((0u64, 0u64), |(a, b), &c| {
        (
            a.wrapping_add(mix(c as u64)),
            b.wrapping_add(mix(c as u64 ^ 0x5555_0000_0000)),
        )
    })
}

fn cross(a: Point, b: Point) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

fn sub(a: Point, b: Point) -> Point {
    (a.0 - b.0, a.1 - b.1)
}

struct Walk<'a> {
    s: &'a FineSurface,
    spec: &'a PolygonSpec,
    start: Point,
    first_heading: Point,
    path: Vec<Point>,
    visited: FxHashSet<Point>,
    corners: Vec<Corner>,
    out: Vec<Polygon>,
}

/// Finds every embedded lifted polygon of the given shape avoiding the
/// markers. Each polygon is reported once, from its first corner.
pub fn find_polygons(s: &FineSurface, spec: &PolygonSpec) -> Vec<Polygon> {
    let last = spec.sides.len() - 1;
    let mut found = Vec::new();
    for (c0, curve) in s.curves().iter().enumerate() {
        for (i0, &raw) in curve.pts.iter().enumerate() {
            if s.on_cut(raw) {
                continue;
            }
            // each corner is started from its representative in the base square
            let p0 = s.wrap(raw);
            let off = sub(p0, raw);
            for &(cl, il) in s.through(p0) {
                if cl == c0 {
                    continue;
                }
                for sheet in 0..s.m() {
                    let l0 = s.label_at(c0, i0 as i64, sheet);
                    let ll = s.label_at(cl, il as i64, sheet);
                    if !spec.sides[0].lifts.contains(&(c0, l0))
                        || !spec.sides[last].lifts.contains(&(cl, ll))
                    {
                        continue;
                    }
                    for dir in [1i64, -1] {
                        let h0 = sub(curve.at(i0 as i64 + dir), raw);
                        if !spec.first_headings.contains(&h0) {
                            continue;
                        }
                        let mut w = Walk {
                            s,
                            spec,
                            start: p0,
                            first_heading: h0,
                            path: vec![p0],
                            visited: [p0].into_iter().collect(),
                            corners: vec![Corner {
                                pos: p0,
                                sheet,
                                incoming: (cl, ll),
                                outgoing: (c0, l0),
                            }],
                            out: Vec::new(),
                        };
                        w.side(0, c0, l0, i0 as i64, dir, off);
                        found.append(&mut w.out);
                    }
                }
            }
        }
    }
    found
}

impl<'a> Walk<'a> {
    /// Walks side `k` along lift `(c, label)` from unwrapped index `i`,
    /// where the curve is translated by `off`.
    fn side(&mut self, k: usize, c: usize, label: usize, i: i64, dir: i64, off: Point) {
        let s = self.s;
        let curve = &s.curves()[c];
        let last = self.spec.sides.len() - 1;
        let pushed = self.path.len();
        let pos = |t: i64| {
            let p = curve.at(t);
            (p.0 + off.0, p.1 + off.1)
        };
        for step in 1..curve.len() as i64 {
            let t = i + dir * step;
            let p = pos(t);
            let h_in = sub(p, pos(t - dir));
            if p == self.start {
                if k == last
                    && cross(h_in, self.first_heading) == 1
                    && s.sheet_on(c, label, t) == self.corners[0].sheet
                {
                    self.close();
                }
                break;
            }
            if !self.visited.insert(p) {
                break;
            }
            self.path.push(p);
            if k == last || s.on_cut(p) {
                continue;
            }
            let sheet = s.sheet_on(c, label, t);
            let next = &self.spec.sides[k + 1];
            for &(c2, i2) in s.through(p) {
                if c2 == c {
                    continue;
                }
                let l2 = s.label_at(c2, i2 as i64, sheet);
                if !next.lifts.contains(&(c2, l2)) {
                    continue;
                }
                let curve2 = &s.curves()[c2];
                let base = curve2.at(i2 as i64);
                let off2 = sub(p, base);
                for dir2 in [1i64, -1] {
                    let q = curve2.at(i2 as i64 + dir2);
                    let h_out = sub(q, base);
                    if cross(h_in, h_out) != 1 {
                        continue;
                    }
                    self.corners.push(Corner {
                        pos: s.wrap(p),
                        sheet,
                        incoming: (c, label),
                        outgoing: (c2, l2),
                    });
                    self.side(k + 1, c2, l2, i2 as i64, dir2, off2);
                    self.corners.pop();
                }
            }
        }
        for p in self.path.drain(pushed..) {
            self.visited.remove(&p);
        }
    }

    fn close(&mut self) {
        if let Some(poly) = region(self.s, &self.path, &self.corners) {
            self.out.push(poly);
        }
    }
}

/// Region enclosed by a simple closed counterclockwise path, lifted to the
/// cover starting from the sheet of the first corner.
fn region(s: &FineSurface, path: &[Point], corners: &[Corner]) -> Option<Polygon> {
    // winding number by a rightward ray from each cell
    let mut by_row: FxHashMap<i64, Vec<(i64, i32)>> = FxHashMap::default();
    let l = path.len();
    for t in 0..l {
        let a = path[t];
        let b = path[(t + 1) % l];
        if a.0 == b.0 {
            let dy = b.1 - a.1;
            by_row
                .entry(a.1.min(b.1))
                .or_default()
                .push((a.0, dy.signum() as i32));
        }
    }
    let mut cells: Vec<Point> = Vec::new();
    for (&y, edges) in by_row.iter_mut() {
        edges.sort_unstable();
        // cells between consecutive edges, scanning right to left
        let mut acc = 0;
        for w in (0..edges.len()).rev() {
            acc += edges[w].1;
            if acc < 0 || acc > 1 {
                return None;
            }
            if acc == 1 {
                let x_hi = edges[w].0;
                let x_lo = if w == 0 { return None } else { edges[w - 1].0 };
                for x in x_lo..x_hi {
                    cells.push((x, y));
                }
            }
        }
        if acc != 0 {
            return None;
        }
    }
    if cells.is_empty() {
        return None;
    }
    let cell_set: FxHashSet<Point> = cells.iter().copied().collect();
    // no marker on the closure of the region
    for &(x, y) in &cells {
        for v in [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)] {
            if s.is_marker(v) {
                return None;
            }
        }
    }
    // sheets by flood fill from the cell inside the first corner
    let c0 = corners[0];
    let h_out = sub(path[1 % l], path[0]);
    let h_back = sub(path[l - 1], path[0]);
    let q = (h_out.0 + h_back.0, h_out.1 + h_back.1);
    let start_cell = (
        path[0].0 + if q.0 > 0 { 0 } else { -1 },
        path[0].1 + if q.1 > 0 { 0 } else { -1 },
    );
    if !cell_set.contains(&start_cell) {
        return None;
    }
    let mut sheet: FxHashMap<Point, usize> = FxHashMap::default();
    sheet.insert(start_cell, c0.sheet);
    let mut stack = vec![start_cell];
    while let Some(cell) = stack.pop() {
        let k = sheet[&cell];
        let (x, y) = cell;
        let nbrs = [
            ((x + 1, y), s.cell_step_right(x + 1, y)),
            ((x - 1, y), -s.cell_step_right(x, y)),
            ((x, y + 1), 0),
            ((x, y - 1), 0),
        ];
        for (nb, d) in nbrs {
            if !cell_set.contains(&nb) {
                continue;
            }
            let want = s.sheet_add(k, d);
            match sheet.get(&nb) {
                None => {
                    sheet.insert(nb, want);
                    stack.push(nb);
                }
                Some(&have) if have != want => return None,
                _ => {}
            }
        }
    }
    let mut folded: Vec<u32> = cells.iter().map(|&c| s.cell_id(c, sheet[&c])).collect();
    folded.sort_unstable();
    if folded.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    let on_path: FxHashSet<Point> = path.iter().copied().collect();
    let mut interior = Vec::new();
    for &(x, y) in &cells {
        // visit each vertex once via its lower-left cell
        let v = (x + 1, y + 1);
        if on_path.contains(&v) {
            continue;
        }
        let around = [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)];
        if around.iter().all(|c| cell_set.contains(c)) && !s.on_cut(v) {
            interior.push(s.vertex_id(v, sheet[&(x, y)]));
        }
    }
    interior.sort_unstable();
    let digest = cell_digest(&folded);
    Some(Polygon {
        corners: corners.to_vec(),
        cells: folded,
        interior,
        digest,
    })
}

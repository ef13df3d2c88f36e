//! Generators of the lifted diagram, their gradings, and the rectangle
//! differential.

use num_rational::Ratio;

use crate::cover::{BaseRect, LiftedDiagram, LiftedRegion};
use crate::error::{Error, Result};
use crate::grid::GridDiagram;

/// Largest number of lifted circles a generator key can hold.
pub const MAX_ARCS: usize = 32;

/// A generator: for every lifted vertical circle `b = c * m + k` the row of
/// its chosen intersection point. Packed four bits per circle with `b = 0`
/// most significant, so key order is lexicographic order of the row array.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator(pub u128);

impl Generator {
    fn shift(b: usize) -> u32 {
        4 * (MAX_ARCS - 1 - b) as u32
    }

    pub fn from_rows(rows: &[usize]) -> Self {
        let mut key = 0u128;
        for (b, &r) in rows.iter().enumerate() {
            key |= (r as u128) << Self::shift(b);
        }
        Generator(key)
    }

    #[inline]
    pub fn row(&self, b: usize) -> usize {
        ((self.0 >> Self::shift(b)) & 0xf) as usize
    }

    pub fn rows(&self, size: usize) -> Vec<usize> {
        (0..size).map(|b| self.row(b)).collect()
    }

    pub fn with_row(&self, b: usize, r: usize) -> Self {
        let mask = !(0xfu128 << Self::shift(b));
        Generator((self.0 & mask) | ((r as u128) << Self::shift(b)))
    }

    /// Replaces the rows of two circles.
    #[inline]
    pub fn with_rows(&self, b1: usize, r1: usize, b2: usize, r2: usize) -> Self {
        let mask = (0xfu128 << Self::shift(b1)) | (0xfu128 << Self::shift(b2));
        Generator(
            (self.0 & !mask)
                | ((r1 as u128) << Self::shift(b1))
                | ((r2 as u128) << Self::shift(b2)),
        )
    }

    /// Sorted quadruples `(column, sheet, row, alpha lift)`.
    pub fn points(&self, d: &LiftedDiagram) -> Vec<(usize, usize, usize, usize)> {
        let m = d.m();
        (0..d.size())
            .map(|b| {
                let (c, k) = (b / m, b % m);
                let r = self.row(b);
                (c, k, r, d.alpha_label(c, r, k))
            })
            .collect()
    }

    /// Image under the deck transformation (every sheet index raised by one).
    pub fn deck(&self, d: &LiftedDiagram) -> Self {
        let m = d.m();
        let mut rows = vec![0; d.size()];
        for b in 0..d.size() {
            let (c, k) = (b / m, b % m);
            rows[c * m + (k + 1) % m] = self.row(b);
        }
        Generator::from_rows(&rows)
    }

    /// Whether the row array is a bijection onto the lifted horizontal circles.
    pub fn is_valid(&self, d: &LiftedDiagram) -> bool {
        let mut seen = vec![false; d.size()];
        let m = d.m();
        for b in 0..d.size() {
            let r = self.row(b);
            if r >= d.n() {
                return false;
            }
            let a = d.incidence(b / m, b % m, r);
            if std::mem::replace(&mut seen[a], true) {
                return false;
            }
        }
        true
    }
}

pub fn check_size(n: usize, m: usize) -> Result<()> {
    if n * m > MAX_ARCS || n > 16 {
        return Err(Error::TooLarge {
            n,
            m,
            what: "generator keys hold at most 32 lifted circles",
        });
    }
    Ok(())
}

/// All generators, in increasing key order.
pub fn enumerate_generators(d: &LiftedDiagram) -> Result<Vec<Generator>> {
    let m = d.m();
    enumerate_with(d.n(), m, |b, r| d.incidence(b / m, b % m, r))
}

/// Generators of any diagram with `n * m` vertical and horizontal circles,
/// given which horizontal circle the vertical circle `b` meets at row `r`.
pub fn enumerate_with(
    n: usize,
    m: usize,
    incidence: impl Fn(usize, usize) -> usize,
) -> Result<Vec<Generator>> {
    check_size(n, m)?;
    let size = n * m;
    let table: Vec<usize> = (0..size)
        .flat_map(|b| (0..n).map(move |r| (b, r)))
        .map(|(b, r)| incidence(b, r))
        .collect();
    let mut out = Vec::new();
    let mut rows = vec![0usize; size];
    fn rec(
        n: usize,
        table: &[usize],
        b: usize,
        used: u32,
        rows: &mut [usize],
        out: &mut Vec<Generator>,
    ) {
        if b == rows.len() {
            out.push(Generator::from_rows(rows));
            return;
        }
        for r in 0..n {
            let a = table[b * n + r];
            if used & (1 << a) == 0 {
                rows[b] = r;
                rec(n, table, b + 1, used | (1 << a), rows, out);
            }
        }
    }
    rec(n, &table, 0, 0, &mut rows, &mut out);
    Ok(out)
}

/// Compact description of a lifted rectangle: its base rectangle and the
/// sheet of its left edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RectKey {
    pub col: u8,
    pub row: u8,
    pub width: u8,
    pub height: u8,
    pub sheet: u8,
}

impl RectKey {
    pub fn base(&self) -> BaseRect {
        BaseRect::new(
            self.col as usize,
            self.row as usize,
            self.width as usize,
            self.height as usize,
        )
    }

    pub fn region(&self, d: &LiftedDiagram) -> LiftedRegion {
        d.lift_rectangle(self.base(), self.sheet as usize)
            .expect("rectangle keys are marker-free")
    }
}

/// Empty lifted rectangles out of `x`, with their targets.
pub fn empty_rectangles(d: &LiftedDiagram, x: Generator) -> Vec<(RectKey, Generator)> {
    let mut out = Vec::new();
    for_each_empty_rectangle(d, x, |key, y| out.push((key, y)));
    out
}

pub(crate) fn for_each_empty_rectangle(
    d: &LiftedDiagram,
    x: Generator,
    mut f: impl FnMut(RectKey, Generator),
) {
    let n = d.n();
    let m = d.m();
    let mut rows = [0usize; MAX_ARCS];
    for (b, slot) in rows.iter_mut().enumerate().take(d.size()) {
        *slot = x.row(b);
    }
    for b1 in 0..d.size() {
        let (c1, k1) = (b1 / m, b1 % m);
        let r1 = rows[b1];
        'width: for w in 1..n {
            let c2 = (c1 + w) % n;
            let k2 = d.sheet_add(k1, d.strip_shift(c1, r1, w));
            let b2 = c2 * m + k2;
            let r2 = rows[b2];
            let h = (r2 + n - r1) % n;
            if h == 0 {
                continue;
            }
            let rect = BaseRect::new(c1, r1, w, h);
            if !d.rect_is_free(&rect) {
                continue;
            }
            for t in 1..w {
                let c = (c1 + t) % n;
                let s = d.sheet_add(k1, d.strip_shift(c1, r1, t));
                let off = (rows[c * m + s] + n - r1) % n;
                if off >= 1 && off < h {
                    continue 'width;
                }
            }
            let key = RectKey {
                col: c1 as u8,
                row: r1 as u8,
                width: w as u8,
                height: h as u8,
                sheet: k1 as u8,
            };
            f(key, x.with_rows(b1, r2, b2, r1));
        }
    }
}

/// One differential edge: a lifted rectangle from `source` to `target`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: u32,
    pub target: u32,
    pub rect: RectKey,
}

/// The generators of the lifted diagram with their Alexander gradings, the
/// rectangle edges, and the partition into rectangle-connected components.
#[derive(Clone, Debug)]
pub struct GradedComplex {
    lifted: LiftedDiagram,
    generators: Vec<Generator>,
    /// Alexander grading times `2m`
    alexander_scaled: Vec<i64>,
    /// edges grouped by source, ordered by target then rectangle
    edges: Vec<Edge>,
    edge_start: Vec<u32>,
    component: Vec<u32>,
    component_count: usize,
}

impl GradedComplex {
    pub fn build(d: &LiftedDiagram) -> Result<Self> {
        let generators = enumerate_generators(d)?;
        if generators.len() >= u32::MAX as usize {
            return Err(Error::TooLarge {
                n: d.n(),
                m: d.m(),
                what: "generator count",
            });
        }
        let weights = AlexanderWeights::new(d.base());
        let alexander_scaled = generators.iter().map(|g| weights.scaled(d, *g)).collect();
        let mut edges = Vec::new();
        let mut edge_start = Vec::with_capacity(generators.len() + 1);
        for (i, &x) in generators.iter().enumerate() {
            edge_start.push(edges.len() as u32);
            let from = edges.len();
            for_each_empty_rectangle(d, x, |rect, y| {
                let j = generators
                    .binary_search(&y)
                    .expect("rectangle target is a generator");
                edges.push(Edge {
                    source: i as u32,
                    target: j as u32,
                    rect,
                });
            });
            edges[from..].sort_unstable();
        }
        edge_start.push(edges.len() as u32);
        let (component, component_count) = components(generators.len(), &edges);
        Ok(GradedComplex {
            lifted: d.clone(),
            generators,
            alexander_scaled,
            edges,
            edge_start,
            component,
            component_count,
        })
    }

    pub fn lifted(&self) -> &LiftedDiagram {
        &self.lifted
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn index_of(&self, x: Generator) -> Option<usize> {
        self.generators.binary_search(&x).ok()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edges_from(&self, i: usize) -> &[Edge] {
        &self.edges[self.edge_range(i)]
    }

    /// Positions in `edges()` of the edges leaving generator `i`.
    pub fn edge_range(&self, i: usize) -> std::ops::Range<usize> {
        self.edge_start[i] as usize..self.edge_start[i + 1] as usize
    }

    pub fn alexander(&self, i: usize) -> Ratio<i64> {
        Ratio::new(self.alexander_scaled[i], 2 * self.lifted.m() as i64)
    }

    /// Alexander grading times `2m` (an integer).
    pub fn alexander_scaled(&self, i: usize) -> i64 {
        self.alexander_scaled[i]
    }

    pub fn component(&self, i: usize) -> usize {
        self.component[i] as usize
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    /// F2 differential: `(source, target)` pairs with an odd number of
    /// rectangles.
    pub fn differential_f2(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            let es = self.edges_from(i);
            let mut t = 0;
            while t < es.len() {
                let mut u = t;
                while u < es.len() && es[u].target == es[t].target {
                    u += 1;
                }
                if (u - t) % 2 == 1 {
                    out.push((i as u32, es[t].target));
                }
                t = u;
            }
        }
        out
    }

    /// Relative homological levels: `level(x) - level(y) = 1` along every edge,
    /// minimum zero in every component.
    pub fn relative_maslov(&self) -> Result<Vec<i32>> {
        let mut adj: Vec<Vec<(u32, i32)>> = vec![Vec::new(); self.len()];
        for e in &self.edges {
            adj[e.source as usize].push((e.target, -1));
            adj[e.target as usize].push((e.source, 1));
        }
        let mut level = vec![i32::MIN; self.len()];
        let mut members: Vec<Vec<u32>> = vec![Vec::new(); self.component_count];
        for s in 0..self.len() {
            if level[s] != i32::MIN {
                continue;
            }
            level[s] = 0;
            let mut stack = vec![s as u32];
            while let Some(v) = stack.pop() {
                members[self.component[v as usize] as usize].push(v);
                for &(u, dl) in &adj[v as usize] {
                    let want = level[v as usize] + dl;
                    let lu = &mut level[u as usize];
                    if *lu == i32::MIN {
                        *lu = want;
                        stack.push(u);
                    } else if *lu != want {
                        return Err(Error::InconsistentGrading {
                            component: self.component[v as usize] as usize,
                        });
                    }
                }
            }
        }
        for ms in &members {
            let lo = ms.iter().map(|&v| level[v as usize]).min().unwrap_or(0);
            for &v in ms {
                level[v as usize] -= lo;
            }
        }
        Ok(level)
    }
}

fn components(count: usize, edges: &[Edge]) -> (Vec<u32>, usize) {
    let mut parent: Vec<u32> = (0..count as u32).collect();
    fn find(p: &mut [u32], mut v: u32) -> u32 {
        while p[v as usize] != v {
            p[v as usize] = p[p[v as usize] as usize];
            v = p[v as usize];
        }
        v
    }
    for e in edges {
        let a = find(&mut parent, e.source);
        let b = find(&mut parent, e.target);
        if a != b {
            parent[a.max(b) as usize] = a.min(b);
        }
    }
    // label components in order of their smallest generator
    let mut label = vec![u32::MAX; count];
    let mut out = vec![0u32; count];
    let mut next = 0u32;
    for v in 0..count {
        let r = find(&mut parent, v as u32) as usize;
        if label[r] == u32::MAX {
            label[r] = next;
            next += 1;
        }
        out[v] = label[r];
    }
    (out, next as usize)
}

/// Per-point contributions to the Alexander grading.
///
/// For a lattice point `p`, `weight(p)` counts X markers minus O markers
/// strictly north-east of `p` plus those strictly south-west. Summed over the
/// projected points of a generator, with the constant from the marker pairs,
/// this is `2m` times the grading.
#[derive(Clone, Debug)]
pub struct AlexanderWeights {
    n: usize,
    weight: Vec<i64>,
    constant: i64,
}

impl AlexanderWeights {
    pub fn new(g: &GridDiagram) -> Self {
        let n = g.n();
        let mut weight = vec![0i64; n * n];
        for c in 0..n {
            for r in 0..n {
                let mut s = 0i64;
                for col in 0..n {
                    for (row, sign) in [(g.x_row(col), 1i64), (g.o_row(col), -1)] {
                        let ne = col >= c && row >= r;
                        let sw = col < c && row < r;
                        if ne || sw {
                            s += sign;
                        }
                    }
                }
                weight[c * n + r] = s;
            }
        }
        let pairs = |rows: &dyn Fn(usize) -> usize| {
            let mut t = 0i64;
            for a in 0..n {
                for b in a + 1..n {
                    if rows(a) < rows(b) {
                        t += 1;
                    }
                }
            }
            t
        };
        let xx = pairs(&|c| g.x_row(c));
        let oo = pairs(&|c| g.o_row(c));
        AlexanderWeights {
            n,
            weight,
            constant: xx - oo + n as i64 - 1,
        }
    }

    pub fn point(&self, c: usize, r: usize) -> i64 {
        self.weight[c * self.n + r]
    }

    /// Grading of `x` times `2m`.
    pub fn scaled(&self, d: &LiftedDiagram, x: Generator) -> i64 {
        let m = d.m();
        let s: i64 = (0..d.size()).map(|b| self.point(b / m, x.row(b))).sum();
        s - m as i64 * self.constant
    }

    /// Grading of a permutation generator of the base grid (`rows[c]`).
    pub fn base(&self, rows: &[usize]) -> Ratio<i64> {
        let s: i64 = rows
            .iter()
            .enumerate()
            .map(|(c, &r)| self.point(c, r))
            .sum();
        Ratio::new(s - self.constant, 2)
    }
}

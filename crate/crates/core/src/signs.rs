//! Sign assignments on the empty lifted rectangles, found by solving the
//! composition relations as a linear system over GF(2).
//!
//! One variable per rectangle edge (`0` for sign `+1`). Two rectangles in a
//! row `x -> y -> z` with `z != x` make a composite domain; it has (generically)
//! one other factorization `x -> y' -> z`, and the two products of signs must
//! be opposite. Since every column and row of the grid carries markers, no
//! pair of marker-free rectangles composes to a full annulus, so `z = x` never
//! occurs.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{GradedComplex, RectKey};
use crate::cover::LiftedDiagram;
use crate::error::{Error, Result};

/// Sign of a rectangle, as a GF(2) value (`false` is `+1`).
pub type Bit = bool;

/// Relation `s1 + s2 + s3 + s4 = 1` between the edges of two factorizations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    pub first: (u32, u32),
    pub second: (u32, u32),
}

#[derive(Clone, Debug)]
pub struct SignSystem {
    pub edge_count: usize,
    pub relations: Vec<Relation>,
    /// composite domains found with a single factorization
    pub unpaired: usize,
    /// composite domains found with more than two factorizations
    pub crowded: usize,
}

/// Which edges are fixed first, and which unknown each elimination step
/// solves for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariableOrder {
    Canonical,
    Reversed,
    Shuffled(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignAssignment {
    domain: Domain,
    bits: Vec<Bit>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Domain {
    grid: String,
    m: usize,
    edges: usize,
}

fn domain_of(c: &GradedComplex) -> Domain {
    Domain {
        grid: c.lifted().base().canonical_form(),
        m: c.lifted().m(),
        edges: c.edges().len(),
    }
}

impl SignAssignment {
    pub fn from_bits(c: &GradedComplex, bits: Vec<Bit>) -> Self {
        assert_eq!(bits.len(), c.edges().len());
        SignAssignment {
            domain: domain_of(c),
            bits,
        }
    }

    pub fn all_positive(c: &GradedComplex) -> Self {
        Self::from_bits(c, vec![false; c.edges().len()])
    }

    pub fn bits(&self) -> &[Bit] {
        &self.bits
    }

    /// Sign of edge `e` as `+1` or `-1`.
    pub fn sign(&self, e: usize) -> i64 {
        if self.bits[e] {
            -1
        } else {
            1
        }
    }
}

/// A sign per generator (`true` is `-1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gauge(pub Vec<Bit>);

/// Cells of a lifted rectangle as a bit set over (column, row, sheet of the
/// left half of the cell).
#[derive(Clone, Debug)]
pub struct CellTable {
    n: usize,
    m: usize,
    cells: Vec<u128>,
}

impl CellTable {
    pub fn new(d: &LiftedDiagram) -> Result<Self> {
        let (n, m) = (d.n(), d.m());
        if n * n * m > 128 {
            return Err(Error::TooLarge {
                n,
                m,
                what: "cell sets hold at most 128 lifted cells",
            });
        }
        let mut cells = vec![0u128; n * n * n * n * m];
        for col in 0..n {
            for row in 0..n {
                for w in 1..n {
                    for h in 1..n {
                        for sheet in 0..m {
                            let key = RectKey {
                                col: col as u8,
                                row: row as u8,
                                width: w as u8,
                                height: h as u8,
                                sheet: sheet as u8,
                            };
                            let Some(region) = d.lift_rectangle(key.base(), sheet) else {
                                continue;
                            };
                            let mut bits = 0u128;
                            for t in 0..w {
                                let c = (col + t) % n;
                                let k = region.cell_sheets(t).0;
                                for s in 0..h {
                                    let r = (row + s) % n;
                                    bits |= 1u128 << ((c * n + r) * m + k);
                                }
                            }
                            let idx = Self::index_of(n, m, &key);
                            cells[idx] = bits;
                        }
                    }
                }
            }
        }
        Ok(CellTable { n, m, cells })
    }

    fn index_of(n: usize, m: usize, k: &RectKey) -> usize {
        ((((k.col as usize * n + k.row as usize) * n + k.width as usize - 1) * n
            + k.height as usize
            - 1)
            * m)
            + k.sheet as usize
    }

    pub fn cells(&self, k: &RectKey) -> u128 {
        self.cells[Self::index_of(self.n, self.m, k)]
    }
}

pub fn build_constraints(c: &GradedComplex) -> Result<SignSystem> {
    let table = CellTable::new(c.lifted())?;
    let mut relations = Vec::new();
    let (mut unpaired, mut crowded) = (0, 0);
    let mut local: Vec<(u32, u128, u128, u32, u32)> = Vec::new();
    for x in 0..c.len() {
        local.clear();
        let first_index = c.edge_range(x).start;
        for (i1, e1) in c.edges_from(x).iter().enumerate() {
            let b1 = table.cells(&e1.rect);
            let y = e1.target as usize;
            let first_y = c.edge_range(y).start;
            for (i2, e2) in c.edges_from(y).iter().enumerate() {
                if e2.target as usize == x {
                    return Err(Error::Unsupported(
                        "rectangle pair composing to an annulus".into(),
                    ));
                }
                let b2 = table.cells(&e2.rect);
                local.push((
                    e2.target,
                    b1 ^ b2,
                    b1 & b2,
                    (first_index + i1) as u32,
                    (first_y + i2) as u32,
                ));
            }
        }
        local.sort_unstable();
        let mut t = 0;
        while t < local.len() {
            let mut u = t + 1;
            while u < local.len()
                && local[u].0 == local[t].0
                && local[u].1 == local[t].1
                && local[u].2 == local[t].2
            {
                u += 1;
            }
            match u - t {
                1 => unpaired += 1,
                2 => {}
                _ => crowded += 1,
            }
            for a in t..u {
                for b in a + 1..u {
                    relations.push(Relation {
                        first: (local[a].3, local[a].4),
                        second: (local[b].3, local[b].4),
                    });
                }
            }
            t = u;
        }
    }
    Ok(SignSystem {
        edge_count: c.edges().len(),
        relations,
        unpaired,
        crowded,
    })
}

impl SignSystem {
    pub fn is_satisfied_by(&self, s: &SignAssignment) -> bool {
        s.bits.len() == self.edge_count && self.violations(&s.bits) == 0
    }

    pub fn violations(&self, bits: &[Bit]) -> usize {
        self.relations
            .iter()
            .filter(|r| {
                let v = bits[r.first.0 as usize]
                    ^ bits[r.first.1 as usize]
                    ^ bits[r.second.0 as usize]
                    ^ bits[r.second.1 as usize];
                !v
            })
            .count()
    }
}

fn order_permutation(len: usize, order: VariableOrder) -> Vec<u32> {
    let mut p: Vec<u32> = (0..len as u32).collect();
    match order {
        VariableOrder::Canonical => {}
        VariableOrder::Reversed => p.reverse(),
        VariableOrder::Shuffled(seed) => p.shuffle(&mut ChaCha8Rng::seed_from_u64(seed)),
    }
    p
}

/// Finds a solution. Edges of a spanning forest of the generator graph
/// (chosen greedily in the given order) are fixed to `+1` using the gauge
/// freedom, relations with a single unknown are propagated, and the rest is
/// eliminated densely.
pub fn solve_signs(
    c: &GradedComplex,
    system: &SignSystem,
    order: VariableOrder,
) -> Result<SignAssignment> {
    let edges = c.edges();
    let ne = edges.len();
    let perm = order_permutation(ne, order);
    let mut rank = vec![0u32; ne];
    for (i, &e) in perm.iter().enumerate() {
        rank[e as usize] = i as u32;
    }
    let mut value: Vec<Option<Bit>> = vec![None; ne];
    let mut parent: Vec<u32> = (0..c.len() as u32).collect();
    fn find(p: &mut [u32], mut v: u32) -> u32 {
        while p[v as usize] != v {
            p[v as usize] = p[p[v as usize] as usize];
            v = p[v as usize];
        }
        v
    }
    for &e in &perm {
        let ed = &edges[e as usize];
        let (a, b) = (find(&mut parent, ed.source), find(&mut parent, ed.target));
        if a != b {
            parent[a as usize] = b;
            value[e as usize] = Some(false);
        }
    }
    // incidence of edges in relations
    let rels = &system.relations;
    let mut start = vec![0u32; ne + 1];
    for r in rels {
        for e in [r.first.0, r.first.1, r.second.0, r.second.1] {
            start[e as usize + 1] += 1;
        }
    }
    for i in 0..ne {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut inc = vec![0u32; start[ne] as usize];
    for (ri, r) in rels.iter().enumerate() {
        for e in [r.first.0, r.first.1, r.second.0, r.second.1] {
            inc[fill[e as usize] as usize] = ri as u32;
            fill[e as usize] += 1;
        }
    }
    let vars = |r: &Relation| [r.first.0, r.first.1, r.second.0, r.second.1];
    let mut unknown: Vec<u8> = rels
        .iter()
        .map(|r| {
            vars(r)
                .iter()
                .filter(|&&e| value[e as usize].is_none())
                .count() as u8
        })
        .collect();
    let mut queue: Vec<u32> = (0..rels.len() as u32)
        .filter(|&r| unknown[r as usize] <= 1)
        .collect();
    let mut done = vec![false; rels.len()];
    let propagate = |queue: &mut Vec<u32>,
                     value: &mut Vec<Option<Bit>>,
                     unknown: &mut Vec<u8>,
                     done: &mut Vec<bool>|
     -> Result<()> {
        while let Some(ri) = queue.pop() {
            if done[ri as usize] {
                continue;
            }
            let r = &rels[ri as usize];
            let vs = vars(r);
            let mut acc = true;
            let mut free = None;
            for &e in &vs {
                match value[e as usize] {
                    Some(b) => acc ^= b,
                    None => free = Some(e),
                }
            }
            match free {
                None => {
                    if acc {
                        return Err(Error::InconsistentSigns(format!(
                            "relation {ri} violated after propagation"
                        )));
                    }
                    done[ri as usize] = true;
                }
                Some(e) => {
                    if vs.iter().filter(|&&v| value[v as usize].is_none()).count() > 1 {
                        continue;
                    }
                    value[e as usize] = Some(acc);
                    done[ri as usize] = true;
                    for &rj in &inc[start[e as usize] as usize..start[e as usize + 1] as usize] {
                        // a variable may appear twice in one relation
                        unknown[rj as usize] = vars(&rels[rj as usize])
                            .iter()
                            .filter(|&&v| value[v as usize].is_none())
                            .count() as u8;
                        if unknown[rj as usize] <= 1 && !done[rj as usize] {
                            queue.push(rj);
                        }
                    }
                }
            }
        }
        Ok(())
    };
    propagate(&mut queue, &mut value, &mut unknown, &mut done)?;
    // residual system: dense elimination in the chosen order
    let residual: Vec<u32> = (0..rels.len() as u32)
        .filter(|&r| !done[r as usize])
        .collect();
    if !residual.is_empty() {
        let mut unk: Vec<u32> = Vec::new();
        for &ri in &residual {
            for e in vars(&rels[ri as usize]) {
                if value[e as usize].is_none() {
                    unk.push(e);
                }
            }
        }
        unk.sort_unstable_by_key(|&e| rank[e as usize]);
        unk.dedup();
        let pos: rustc_hash::FxHashMap<u32, usize> =
            unk.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let words = unk.len().div_ceil(64) + 1;
        let rhs_bit = unk.len();
        let mut rows: Vec<Vec<u64>> = Vec::with_capacity(residual.len());
        for &ri in &residual {
            let mut row = vec![0u64; words];
            let mut acc = true;
            for e in vars(&rels[ri as usize]) {
                match value[e as usize] {
                    Some(b) => acc ^= b,
                    None => {
                        let p = pos[&e];
                        row[p / 64] ^= 1 << (p % 64);
                    }
                }
            }
            if acc {
                row[rhs_bit / 64] ^= 1 << (rhs_bit % 64);
            }
            rows.push(row);
        }
        let get = |row: &[u64], p: usize| row[p / 64] >> (p % 64) & 1 == 1;
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut r0 = 0;
        for col in 0..unk.len() {
            let Some(p) = (r0..rows.len()).find(|&i| get(&rows[i], col)) else {
                continue;
            };
            rows.swap(r0, p);
            let pivot = rows[r0].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r0 && get(row, col) {
                    for (a, b) in row.iter_mut().zip(pivot.iter()) {
                        *a ^= *b;
                    }
                }
            }
            pivots.push((r0, col));
            r0 += 1;
        }
        for row in &rows[r0..] {
            if get(row, rhs_bit) {
                return Err(Error::InconsistentSigns(
                    "residual system has no solution".into(),
                ));
            }
        }
        // free unknowns are +1; pivots then read off their rows
        let mut sol = vec![false; unk.len()];
        for &(r, col) in pivots.iter().rev() {
            let mut v = get(&rows[r], rhs_bit);
            for k in col + 1..unk.len() {
                if get(&rows[r], k) {
                    v ^= sol[k];
                }
            }
            sol[col] = v;
        }
        for (i, &e) in unk.iter().enumerate() {
            value[e as usize] = Some(sol[i]);
        }
    }
    let bits: Vec<Bit> = value.into_iter().map(|v| v.unwrap_or(false)).collect();
    let s = SignAssignment::from_bits(c, bits);
    let bad = system.violations(&s.bits);
    if bad > 0 {
        return Err(Error::InconsistentSigns(format!(
            "{bad} relations violated by the solution"
        )));
    }
    Ok(s)
}

pub fn gauge_transform(c: &GradedComplex, s: &SignAssignment, u: &Gauge) -> SignAssignment {
    let bits = c
        .edges()
        .iter()
        .zip(&s.bits)
        .map(|(e, &b)| b ^ u.0[e.source as usize] ^ u.0[e.target as usize])
        .collect();
    SignAssignment {
        domain: s.domain.clone(),
        bits,
    }
}

/// Looks for `u` with `s2 = u . s1 . u`. Returns `Ok(None)` when none exists.
pub fn gauge_equivalent(
    c: &GradedComplex,
    s1: &SignAssignment,
    s2: &SignAssignment,
) -> Result<Option<Gauge>> {
    let dom = domain_of(c);
    if s1.domain != s2.domain || s1.domain != dom {
        return Err(Error::IncomparableDomains);
    }
    let mut adj: Vec<Vec<(u32, Bit)>> = vec![Vec::new(); c.len()];
    for (i, e) in c.edges().iter().enumerate() {
        let d = s1.bits[i] ^ s2.bits[i];
        adj[e.source as usize].push((e.target, d));
        adj[e.target as usize].push((e.source, d));
    }
    let mut u: Vec<Option<Bit>> = vec![None; c.len()];
    for s in 0..c.len() {
        if u[s].is_some() {
            continue;
        }
        u[s] = Some(false);
        let mut stack = vec![s as u32];
        while let Some(v) = stack.pop() {
            let uv = u[v as usize].unwrap();
            for &(w, d) in &adj[v as usize] {
                let want = uv ^ d;
                match u[w as usize] {
                    None => {
                        u[w as usize] = Some(want);
                        stack.push(w);
                    }
                    Some(x) if x != want => return Ok(None),
                    _ => {}
                }
            }
        }
    }
    Ok(Some(Gauge(u.into_iter().map(|v| v.unwrap()).collect())))
}

/// Integer differential as `(source, target, coefficient)`, coefficients summed
/// over rectangles and zeros dropped.
pub fn signed_differential(c: &GradedComplex, s: &SignAssignment) -> Vec<(u32, u32, i64)> {
    let mut out: Vec<(u32, u32, i64)> = Vec::new();
    for (i, e) in c.edges().iter().enumerate() {
        let v = s.sign(i);
        match out.last_mut() {
            Some(last) if last.0 == e.source && last.1 == e.target => last.2 += v,
            _ => out.push((e.source, e.target, v)),
        }
    }
    out.retain(|e| e.2 != 0);
    out
}

/// Whether the integer differential squares to zero, entry by entry.
pub fn squares_to_zero(count: usize, entries: &[(u32, u32, i64)]) -> bool {
    let mut rows: Vec<Vec<(u32, i64)>> = vec![Vec::new(); count];
    for &(s, t, v) in entries {
        rows[s as usize].push((t, v));
    }
    let mut acc: rustc_hash::FxHashMap<u32, i64> = Default::default();
    for row in &rows {
        acc.clear();
        for &(y, a) in row {
            for &(z, b) in &rows[y as usize] {
                *acc.entry(z).or_default() += a * b;
            }
        }
        if acc.values().any(|&v| v != 0) {
            return false;
        }
    }
    true
}

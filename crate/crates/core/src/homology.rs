//! Bigraded homology over F2 and Z.
//!
//! Every complex is split into blocks by (Alexander grading, component). Each
//! block is first shrunk by cancelling unit entries of the differential; the
//! residual complex, whose entries are all non-units, is finished with dense
//! Smith normal forms.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::complex::GradedComplex;
use crate::error::{Error, Result};
use crate::snf;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ring {
    F2,
    Z,
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ring::F2 => "F2",
            Ring::Z => "Z",
        })
    }
}

/// Grading data of one generator of an abstract complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Grading {
    pub alexander: Ratio<i64>,
    pub component: u32,
    pub level: i32,
}

/// A finitely generated complex with integer coefficients given as a list of
/// `(source, target, coefficient)` entries. Over F2 only the parity counts.
#[derive(Clone, Debug, Default)]
pub struct ChainData {
    pub gradings: Vec<Grading>,
    pub entries: Vec<(u32, u32, i64)>,
}

impl ChainData {
    pub fn from_complex(c: &GradedComplex, entries: Vec<(u32, u32, i64)>) -> Result<Self> {
        let levels = c.relative_maslov()?;
        let gradings = (0..c.len())
            .map(|i| Grading {
                alexander: c.alexander(i),
                component: c.component(i) as u32,
                level: levels[i],
            })
            .collect();
        Ok(ChainData { gradings, entries })
    }

    /// Builds gradings for an abstract complex from its Alexander gradings:
    /// components are the connected pieces of the entry graph and levels are
    /// the relative levels within them.
    pub fn with_relative_levels(
        alexander: Vec<Ratio<i64>>,
        entries: Vec<(u32, u32, i64)>,
    ) -> Result<Self> {
        let count = alexander.len();
        let mut adj: Vec<Vec<(u32, i32)>> = vec![Vec::new(); count];
        for &(s, t, v) in &entries {
            if v != 0 {
                adj[s as usize].push((t, -1));
                adj[t as usize].push((s, 1));
            }
        }
        let mut level = vec![i32::MIN; count];
        let mut component = vec![0u32; count];
        let mut members: Vec<Vec<u32>> = Vec::new();
        for s in 0..count {
            if level[s] != i32::MIN {
                continue;
            }
            let id = members.len() as u32;
            members.push(Vec::new());
            level[s] = 0;
            let mut stack = vec![s as u32];
            while let Some(v) = stack.pop() {
                component[v as usize] = id;
                members[id as usize].push(v);
                for &(u, dl) in &adj[v as usize] {
                    let want = level[v as usize] + dl;
                    if level[u as usize] == i32::MIN {
                        level[u as usize] = want;
                        stack.push(u);
                    } else if level[u as usize] != want {
                        return Err(Error::InconsistentGrading {
                            component: id as usize,
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
        let gradings = (0..count)
            .map(|i| Grading {
                alexander: alexander[i],
                component: component[i],
                level: level[i],
            })
            .collect();
        Ok(ChainData { gradings, entries })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HomologyEntry {
    pub alexander: Ratio<i64>,
    pub component: u32,
    pub level: i32,
    pub rank: usize,
    /// prime-power orders of the torsion summands, sorted
    pub torsion: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BigradedHomology {
    pub ring: Ring,
    /// nonzero groups sorted by (alexander, component, level)
    pub entries: Vec<HomologyEntry>,
}

impl BigradedHomology {
    pub fn total_rank(&self) -> usize {
        self.entries.iter().map(|e| e.rank).sum()
    }

    /// Free rank summed over levels and components, per Alexander grading.
    pub fn rank_by_alexander(&self) -> BTreeMap<Ratio<i64>, usize> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            if e.rank > 0 {
                *out.entry(e.alexander).or_insert(0) += e.rank;
            }
        }
        out
    }

    pub fn torsion_count(&self) -> usize {
        self.entries.iter().map(|e| e.torsion.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Groups by block: `(alexander, component) -> level -> entry`.
    pub fn blocks(&self) -> BTreeMap<(Ratio<i64>, u32), BTreeMap<i32, &HomologyEntry>> {
        let mut out: BTreeMap<(Ratio<i64>, u32), BTreeMap<i32, &HomologyEntry>> = BTreeMap::new();
        for e in &self.entries {
            out.entry((e.alexander, e.component))
                .or_default()
                .insert(e.level, e);
        }
        out
    }

    /// Serializable view following the external JSON schema.
    pub fn to_report(&self, knot: &str, n: usize, m: usize) -> HomologyReport {
        let blocks = self
            .blocks()
            .into_iter()
            .map(|((a, comp), levels)| BlockReport {
                alexander: format_ratio(a),
                component: comp,
                levels: levels
                    .into_values()
                    .map(|e| LevelReport {
                        level: e.level,
                        rank: e.rank,
                        torsion: e.torsion.clone(),
                    })
                    .collect(),
            })
            .collect();
        HomologyReport {
            knot: knot.to_string(),
            n,
            m,
            ring: self.ring.to_string(),
            blocks,
        }
    }
}

pub fn format_ratio(a: Ratio<i64>) -> String {
    format!("{}/{}", a.numer(), a.denom())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyReport {
    pub knot: String,
    pub n: usize,
    pub m: usize,
    pub ring: String,
    pub blocks: Vec<BlockReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockReport {
    pub alexander: String,
    pub component: u32,
    pub levels: Vec<LevelReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: i32,
    pub rank: usize,
    pub torsion: Vec<u64>,
}

pub fn homology_f2(c: &GradedComplex) -> Result<BigradedHomology> {
    let entries = c
        .differential_f2()
        .into_iter()
        .map(|(s, t)| (s, t, 1))
        .collect();
    homology(&ChainData::from_complex(c, entries)?, Ring::F2)
}

/// `signed` lists the integer differential as `(source, target, coefficient)`.
pub fn homology_z(c: &GradedComplex, signed: &[(u32, u32, i64)]) -> Result<BigradedHomology> {
    homology(&ChainData::from_complex(c, signed.to_vec())?, Ring::Z)
}

/// Homology of an abstract graded complex.
pub fn homology(data: &ChainData, ring: Ring) -> Result<BigradedHomology> {
    let mut blocks: BTreeMap<(Ratio<i64>, u32), Vec<u32>> = BTreeMap::new();
    for (i, g) in data.gradings.iter().enumerate() {
        blocks
            .entry((g.alexander, g.component))
            .or_default()
            .push(i as u32);
    }
    let mut local = vec![u32::MAX; data.gradings.len()];
    for members in blocks.values() {
        for (t, &v) in members.iter().enumerate() {
            local[v as usize] = t as u32;
        }
    }
    let mut block_entries: FxHashMap<(Ratio<i64>, u32), Vec<(u32, u32, i64)>> =
        FxHashMap::default();
    for &(s, t, v) in &data.entries {
        let gs = &data.gradings[s as usize];
        let gt = &data.gradings[t as usize];
        if (gs.alexander, gs.component) != (gt.alexander, gt.component) {
            return Err(Error::CheckFailed(format!(
                "differential entry {s}->{t} leaves its block"
            )));
        }
        if gs.level != gt.level + 1 {
            return Err(Error::CheckFailed(format!(
                "differential entry {s}->{t} does not drop the level by one"
            )));
        }
        block_entries
            .entry((gs.alexander, gs.component))
            .or_default()
            .push((local[s as usize], local[t as usize], v));
    }
    let mut entries = Vec::new();
    for ((a, comp), members) in &blocks {
        let levels: Vec<i32> = members
            .iter()
            .map(|&v| data.gradings[v as usize].level)
            .collect();
        let es = block_entries.remove(&(*a, *comp)).unwrap_or_default();
        for (level, rank, torsion) in block_homology(&levels, &es, ring)? {
            entries.push(HomologyEntry {
                alexander: *a,
                component: *comp,
                level,
                rank,
                torsion,
            });
        }
    }
    entries.sort();
    Ok(BigradedHomology { ring, entries })
}

/// Sparse complex under cancellation.
struct Reducer {
    ring: Ring,
    out: Vec<Vec<(u32, i64)>>,
    inc: Vec<Vec<u32>>,
    alive: Vec<bool>,
}

impl Reducer {
    fn new(count: usize, entries: &[(u32, u32, i64)], ring: Ring) -> Result<Self> {
        let mut r = Reducer {
            ring,
            out: vec![Vec::new(); count],
            inc: vec![Vec::new(); count],
            alive: vec![true; count],
        };
        for &(s, t, v) in entries {
            r.add(s, t, v)?;
        }
        Ok(r)
    }

    fn normalize(&self, v: i64) -> i64 {
        match self.ring {
            Ring::F2 => v.rem_euclid(2),
            Ring::Z => v,
        }
    }

    fn add(&mut self, s: u32, t: u32, v: i64) -> Result<()> {
        let v = self.normalize(v);
        if v == 0 {
            return Ok(());
        }
        let row = &mut self.out[s as usize];
        if let Some(p) = row.iter().position(|e| e.0 == t) {
            let nv = row[p]
                .1
                .checked_add(v)
                .ok_or(Error::Overflow("cancellation"))?;
            let nv = match self.ring {
                Ring::F2 => nv.rem_euclid(2),
                Ring::Z => nv,
            };
            if nv == 0 {
                row.swap_remove(p);
                let inc = &mut self.inc[t as usize];
                let q = inc.iter().position(|&x| x == s).unwrap();
                inc.swap_remove(q);
            } else {
                row[p].1 = nv;
            }
        } else {
            row.push((t, v));
            self.inc[t as usize].push(s);
        }
        Ok(())
    }

    /// Cancels the unit entry `x -> y`.
    fn cancel(&mut self, x: u32, y: u32) -> Result<()> {
        let c = self.out[x as usize].iter().find(|e| e.0 == y).unwrap().1;
        debug_assert!(c == 1 || c == -1);
        let xs: Vec<(u32, i64)> = self.out[x as usize]
            .iter()
            .copied()
            .filter(|e| e.0 != y)
            .collect();
        let zs: Vec<u32> = self.inc[y as usize]
            .iter()
            .copied()
            .filter(|&z| z != x)
            .collect();
        for &z in &zs {
            let a = self.out[z as usize].iter().find(|e| e.0 == y).unwrap().1;
            let f = a.checked_mul(c).ok_or(Error::Overflow("cancellation"))?;
            for &(w, b) in &xs {
                let delta = f
                    .checked_mul(b)
                    .and_then(|v| v.checked_neg())
                    .ok_or(Error::Overflow("cancellation"))?;
                self.add(z, w, delta)?;
            }
        }
        for v in [x, y] {
            for (t, _) in std::mem::take(&mut self.out[v as usize]) {
                let inc = &mut self.inc[t as usize];
                if let Some(q) = inc.iter().position(|&s| s == v) {
                    inc.swap_remove(q);
                }
            }
            for s in std::mem::take(&mut self.inc[v as usize]) {
                let row = &mut self.out[s as usize];
                if let Some(p) = row.iter().position(|e| e.0 == v) {
                    row.swap_remove(p);
                }
            }
            self.alive[v as usize] = false;
        }
        Ok(())
    }

    fn run(&mut self) -> Result<()> {
        let count = self.out.len();
        loop {
            let mut progressed = false;
            for x in 0..count {
                if !self.alive[x] {
                    continue;
                }
                // among unit targets prefer the one with fewest incoming entries
                let best = self.out[x]
                    .iter()
                    .filter(|e| e.1 == 1 || e.1 == -1)
                    .min_by_key(|e| (self.inc[e.0 as usize].len(), e.0))
                    .map(|e| e.0);
                if let Some(y) = best {
                    self.cancel(x as u32, y)?;
                    progressed = true;
                }
            }
            if !progressed {
                return Ok(());
            }
        }
    }
}

/// Homology of one block, as `(level, rank, torsion)` for nonzero groups.
fn block_homology(
    levels: &[i32],
    entries: &[(u32, u32, i64)],
    ring: Ring,
) -> Result<Vec<(i32, usize, Vec<u64>)>> {
    let mut red = Reducer::new(levels.len(), entries, ring)?;
    red.run()?;
    let mut by_level: BTreeMap<i32, Vec<u32>> = BTreeMap::new();
    for (v, &alive) in red.alive.iter().enumerate() {
        if alive {
            by_level.entry(levels[v]).or_default().push(v as u32);
        }
    }
    if ring == Ring::F2 {
        // no unit entries survive, so the residual differential vanishes
        return Ok(by_level
            .into_iter()
            .map(|(l, vs)| (l, vs.len(), Vec::new()))
            .collect());
    }
    // invariant factors of the residual map out of each level
    let mut factors: BTreeMap<i32, Vec<BigInt>> = BTreeMap::new();
    for (&l, sources) in &by_level {
        let Some(targets) = by_level.get(&(l - 1)) else {
            continue;
        };
        let tpos: FxHashMap<u32, usize> =
            targets.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        let mut mat = vec![vec![BigInt::zero(); sources.len()]; targets.len()];
        let mut any = false;
        for (j, &s) in sources.iter().enumerate() {
            for &(t, v) in &red.out[s as usize] {
                mat[tpos[&t]][j] = BigInt::from(v);
                any = true;
            }
        }
        if any {
            factors.insert(l, snf::invariant_factors(&mat));
        }
    }
    let mut out = Vec::new();
    for (&l, vs) in &by_level {
        let rank_out = factors.get(&l).map_or(0, |f| f.len());
        let incoming = factors.get(&(l + 1));
        let rank_in = incoming.map_or(0, |f| f.len());
        let rank = vs.len() - rank_out - rank_in;
        let mut torsion = Vec::new();
        if let Some(f) = incoming {
            for d in f.iter().filter(|d| d.abs() > BigInt::from(1)) {
                for q in snf::prime_powers(d) {
                    torsion.push(q.to_u64().ok_or(Error::Overflow("torsion order"))?);
                }
            }
        }
        torsion.sort_unstable();
        if rank > 0 || !torsion.is_empty() {
            out.push((l, rank, torsion));
        }
    }
    Ok(out)
}

/// Whether two homologies agree after shifting the Alexander gradings of `h2`
/// by `shift`, allowing each block its own level offset. Blocks are matched as
/// multisets of level profiles, so component labels need not agree.
pub fn compare(h1: &BigradedHomology, h2: &BigradedHomology, shift: Ratio<i64>) -> bool {
    if h1.ring != h2.ring {
        return false;
    }
    profile_multiset(h1, Ratio::zero()) == profile_multiset(h2, shift)
}

type Profile = Vec<(i32, usize, Vec<u64>)>;

fn profile_multiset(h: &BigradedHomology, shift: Ratio<i64>) -> BTreeMap<Ratio<i64>, Vec<Profile>> {
    let mut out: BTreeMap<Ratio<i64>, Vec<Profile>> = BTreeMap::new();
    for ((a, _), levels) in h.blocks() {
        let lo = *levels.keys().next().unwrap();
        let p: Profile = levels
            .values()
            .map(|e| (e.level - lo, e.rank, e.torsion.clone()))
            .collect();
        out.entry(a + shift).or_default().push(p);
    }
    for v in out.values_mut() {
        v.sort();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::GradedComplex;
    use crate::cover::build_lifted;
    use crate::grid::parse_grid;

    fn grading(level: i32) -> Grading {
        Grading {
            alexander: Ratio::zero(),
            component: 0,
            level,
        }
    }

    /// Dense rank over F2 of a 0/1 matrix given as rows of bits.
    fn rank_f2(mut rows: Vec<Vec<u8>>) -> usize {
        let mut rank = 0;
        let cols = rows.first().map_or(0, |r| r.len());
        for c in 0..cols {
            if let Some(p) = (rank..rows.len()).find(|&i| rows[i][c] == 1) {
                rows.swap(rank, p);
                for i in 0..rows.len() {
                    if i != rank && rows[i][c] == 1 {
                        for k in 0..cols {
                            rows[i][k] ^= rows[rank][k];
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn zero_differential_is_free() {
        let data = ChainData {
            gradings: vec![grading(0), grading(1), grading(1)],
            entries: vec![],
        };
        for ring in [Ring::F2, Ring::Z] {
            let h = homology(&data, ring).unwrap();
            assert_eq!(h.total_rank(), 3);
        }
    }

    #[test]
    fn torsion_from_multiplication_by_two() {
        let data = ChainData {
            gradings: vec![grading(1), grading(0)],
            entries: vec![(0, 1, 2)],
        };
        let z = homology(&data, Ring::Z).unwrap();
        assert_eq!(z.total_rank(), 0);
        assert_eq!(
            z.entries,
            vec![HomologyEntry {
                alexander: Ratio::zero(),
                component: 0,
                level: 0,
                rank: 0,
                torsion: vec![2]
            }]
        );
        assert_eq!(homology(&data, Ring::F2).unwrap().total_rank(), 2);
    }

    #[test]
    fn cancellation_with_fill_in() {
        // a -> b, a -> c, d -> b, d -> c over Z with signs making d^2 = 0 impossible to violate
        let data = ChainData {
            gradings: vec![grading(1), grading(0), grading(0), grading(1)],
            entries: vec![(0, 1, 1), (0, 2, 1), (3, 1, 1), (3, 2, 3)],
        };
        let z = homology(&data, Ring::Z).unwrap();
        // cokernel of [[1,1],[1,3]] is Z/2
        assert_eq!(z.torsion_count(), 1);
        assert_eq!(z.total_rank(), 0);
        assert_eq!(homology(&data, Ring::F2).unwrap().total_rank(), 2);
    }

    #[test]
    fn small_unknot_total_dimension() {
        let g = parse_grid("n=2; O: 0 1; X: 1 0").unwrap();
        let c = GradedComplex::build(&build_lifted(&g, 1)).unwrap();
        assert_eq!(homology_f2(&c).unwrap().total_rank(), 2);
    }

    #[test]
    fn trefoil_matches_dense_oracle() {
        let g = parse_grid("n=5; O: 4 0 1 2 3; X: 1 2 3 4 0").unwrap();
        let c = GradedComplex::build(&build_lifted(&g, 1)).unwrap();
        let h = homology_f2(&c).unwrap();
        // dense oracle: dim C - 2 rank(d)
        let size = c.len();
        let mut rows = vec![vec![0u8; size]; size];
        for (s, t) in c.differential_f2() {
            rows[t as usize][s as usize] ^= 1;
        }
        assert_eq!(h.total_rank(), size - 2 * rank_f2(rows));
        assert_eq!(h.total_rank(), 3 * 16);
        let ranks: Vec<usize> = h.rank_by_alexander().into_values().collect();
        assert_eq!(ranks, vec![1, 5, 11, 14, 11, 5, 1]);
    }

    #[test]
    fn compare_basics() {
        let g = parse_grid("n=5; O: 4 0 1 2 3; X: 1 2 3 4 0").unwrap();
        let c = GradedComplex::build(&build_lifted(&g, 1)).unwrap();
        let h = homology_f2(&c).unwrap();
        assert!(compare(&h, &h, Ratio::zero()));
        let empty = BigradedHomology {
            ring: Ring::F2,
            entries: vec![],
        };
        assert!(!compare(&h, &empty, Ratio::zero()));
        assert!(compare(&empty, &empty, Ratio::new(1, 2)));
        assert!(!compare(&h, &h, Ratio::from_integer(1)));
    }
}

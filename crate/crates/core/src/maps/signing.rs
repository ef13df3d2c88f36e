//! Signs for families of polygon counts, solved jointly over GF(2).
//!
//! Every polygon term gets one sign variable. A decomposable composite domain
//! that is counted twice by an identity forces the two products to differ; a
//! composite counted once from a generator to itself must cancel the identity
//! term, so its product is `-1`. Both are XOR equations with right side one.

use super::domains::PolygonTerms;
use super::sparse::{normalize, Entries};
use crate::error::Result;
use crate::gf2::{solve, XorSystem};

pub struct SignProblem<'a> {
    families: Vec<&'a PolygonTerms>,
    offsets: Vec<u32>,
    system: XorSystem,
    preset: Vec<Option<bool>>,
    /// composites that neither pair up nor cancel an identity term
    pub anomalies: usize,
}

impl<'a> SignProblem<'a> {
    pub fn new(families: Vec<&'a PolygonTerms>) -> Self {
        let mut offsets = Vec::with_capacity(families.len());
        let mut total = 0u32;
        for f in &families {
            offsets.push(total);
            total += f.terms.len() as u32;
        }
        SignProblem {
            families,
            offsets,
            system: XorSystem::new(total as usize),
            preset: vec![None; total as usize],
            anomalies: 0,
        }
    }

    /// Uses the gauge freedom of a complex: a spanning forest of its
    /// differential gets positive signs.
    pub fn fix_forest(&mut self, family: usize, vertices: usize) {
        let mut parent: Vec<u32> = (0..vertices as u32).collect();
        fn find(p: &mut [u32], mut v: u32) -> u32 {
            while p[v as usize] != v {
                p[v as usize] = p[p[v as usize] as usize];
                v = p[v as usize];
            }
            v
        }
        for (t, &(a, b, _)) in self.families[family].terms.iter().enumerate() {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra as usize] = rb;
                self.preset[self.offsets[family] as usize + t] = Some(false);
            }
        }
    }

    /// Adds the equations of `sum over compositions (first then second) [+ identity] = 0`.
    pub fn add_identity(&mut self, compositions: &[(usize, usize)], with_identity: bool) {
        let fams = &self.families;
        let sources = fams
            .iter()
            .map(|f| f.terms.last().map_or(0, |t| t.0 + 1))
            .max()
            .unwrap_or(0);
        let range = |f: &PolygonTerms, x: u32| {
            let lo = f.terms.partition_point(|t| t.0 < x);
            let hi = f.terms.partition_point(|t| t.0 <= x);
            lo..hi
        };
        // (target, digest, first variable, second variable)
        let mut local: Vec<(u32, (u64, u64), u32, u32)> = Vec::new();
        let mut lonely: Vec<(u32, u32, u32)> = Vec::new();
        for x in 0..sources {
            local.clear();
            for &(f1, f2) in compositions {
                let (p1, p2) = (fams[f1], fams[f2]);
                for t1 in range(p1, x) {
                    let (_, y, q1) = p1.terms[t1];
                    let d1 = p1.polygons[q1 as usize].digest;
                    for t2 in range(p2, y) {
                        let (_, z, q2) = p2.terms[t2];
                        let d2 = p2.polygons[q2 as usize].digest;
                        let d = (d1.0.wrapping_add(d2.0), d1.1.wrapping_add(d2.1));
                        local.push((
                            z,
                            d,
                            self.offsets[f1] + t1 as u32,
                            self.offsets[f2] + t2 as u32,
                        ));
                    }
                }
            }
            local.sort_unstable();
            lonely.clear();
            let mut t = 0;
            while t < local.len() {
                let mut u = t + 1;
                while u < local.len() && local[u].0 == local[t].0 && local[u].1 == local[t].1 {
                    u += 1;
                }
                match u - t {
                    2 => self.system.push(
                        vec![local[t].2, local[t].3, local[t + 1].2, local[t + 1].3],
                        true,
                    ),
                    1 => lonely.push((local[t].0, local[t].2, local[t].3)),
                    _ => self.anomalies += 1,
                }
                t = u;
            }
            // composites with a unique decomposition, by endpoints
            let mut t = 0;
            while t < lonely.len() {
                let mut u = t + 1;
                while u < lonely.len() && lonely[u].0 == lonely[t].0 {
                    u += 1;
                }
                let diagonal = with_identity && lonely[t].0 == x;
                match u - t {
                    1 if diagonal => self.system.push(vec![lonely[t].1, lonely[t].2], true),
                    2 if !diagonal => self.system.push(
                        vec![lonely[t].1, lonely[t].2, lonely[t + 1].1, lonely[t + 1].2],
                        true,
                    ),
                    _ => self.anomalies += 1,
                }
                t = u;
            }
        }
    }

    pub fn equation_count(&self) -> usize {
        self.system.equations.len()
    }

    /// Signed coefficients of every family.
    pub fn solve(self) -> Result<Vec<Entries>> {
        let bits = solve(&self.system, self.preset)?;
        Ok(self
            .families
            .iter()
            .zip(&self.offsets)
            .map(|(f, &o)| {
                normalize(
                    f.terms
                        .iter()
                        .enumerate()
                        .map(|(t, &(a, b, _))| (a, b, if bits[o as usize + t] { -1 } else { 1 }))
                        .collect(),
                )
            })
            .collect())
    }
}

/// Unsigned coefficients of a family.
pub fn unsigned(f: &PolygonTerms) -> Entries {
    normalize(f.terms.iter().map(|&(a, b, _)| (a, b, 1)).collect())
}

//! Sparse linear systems over GF(2).
//!
//! Equations are XORs of variables with a right-hand side.

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct XorSystem {
    pub vars: usize,
    pub equations: Vec<(Vec<u32>, bool)>,
}

impl XorSystem {
    pub fn new(vars: usize) -> Self {
        XorSystem {
            vars,
            equations: Vec::new(),
        }
    }

    pub fn push(&mut self, mut vars: Vec<u32>, rhs: bool) {
        // repeated variables cancel
        vars.sort_unstable();
        let mut out: Vec<u32> = Vec::with_capacity(vars.len());
        for v in vars {
            if out.last() == Some(&v) {
                out.pop();
            } else {
                out.push(v);
            }
        }
        self.equations.push((out, rhs));
    }

    pub fn violations(&self, x: &[bool]) -> usize {
        self.equations
            .iter()
            .filter(|(vs, rhs)| vs.iter().fold(false, |a, &v| a ^ x[v as usize]) != *rhs)
            .count()
    }
}

/// Variables bound by `x_v = x_root + parity`.
struct Classes {
    parent: Vec<u32>,
    parity: Vec<bool>,
    value: Vec<Option<bool>>,
}

impl Classes {
    fn find(&mut self, v: u32) -> (u32, bool) {
        let mut path = Vec::new();
        let mut r = v;
        while self.parent[r as usize] != r {
            path.push(r);
            r = self.parent[r as usize];
        }
        // compress, accumulating parity from the root down
        let mut acc = false;
        for &u in path.iter().rev() {
            acc ^= self.parity[u as usize];
            self.parity[u as usize] = acc;
            self.parent[u as usize] = r;
        }
        (
            r,
            if path.is_empty() {
                false
            } else {
                self.parity[v as usize]
            },
        )
    }

    fn set(&mut self, root: u32, b: bool) -> Result<()> {
        match self.value[root as usize] {
            Some(old) if old != b => Err(Error::InconsistentSigns("conflicting values".into())),
            _ => {
                self.value[root as usize] = Some(b);
                Ok(())
            }
        }
    }

    /// Imposes `x_a + x_b = c` on two roots.
    fn union(&mut self, a: u32, b: u32, c: bool) -> Result<()> {
        debug_assert!(a != b);
        self.parent[a as usize] = b;
        self.parity[a as usize] = c;
        if let Some(va) = self.value[a as usize] {
            self.set(b, va ^ c)?;
        }
        Ok(())
    }
}

/// Solves the system with some variables preset. Free variables are set to
/// zero. Fails if the system is inconsistent.
///
/// Equations with one or two unknown classes are absorbed into a union-find
/// with parities until nothing changes; the rest is eliminated densely.
pub fn solve(sys: &XorSystem, preset: Vec<Option<bool>>) -> Result<Vec<bool>> {
    assert_eq!(preset.len(), sys.vars);
    let mut cl = Classes {
        parent: (0..sys.vars as u32).collect(),
        parity: vec![false; sys.vars],
        value: preset,
    };
    let eqs = &sys.equations;
    let mut open: Vec<u32> = (0..eqs.len() as u32).collect();
    let mut roots: Vec<u32> = Vec::new();
    let reduce = |cl: &mut Classes, e: u32, roots: &mut Vec<u32>| -> bool {
        let (vs, rhs) = &eqs[e as usize];
        let mut acc = *rhs;
        roots.clear();
        for &v in vs {
            let (r, p) = cl.find(v);
            acc ^= p;
            match cl.value[r as usize] {
                Some(b) => acc ^= b,
                None => roots.push(r),
            }
        }
        roots.sort_unstable();
        let mut k = 0;
        for i in 0..roots.len() {
            if k > 0 && roots[k - 1] == roots[i] {
                k -= 1;
            } else {
                roots[k] = roots[i];
                k += 1;
            }
        }
        roots.truncate(k);
        acc
    };
    loop {
        let before = open.len();
        let mut keep = Vec::with_capacity(open.len());
        for &e in &open {
            let acc = reduce(&mut cl, e, &mut roots);
            match roots.len() {
                0 if acc => return Err(Error::InconsistentSigns(format!("equation {e} fails"))),
                0 => {}
                1 => cl.set(roots[0], acc)?,
                2 => cl.union(roots[0], roots[1], acc)?,
                _ => keep.push(e),
            }
        }
        open = keep;
        if open.len() == before {
            break;
        }
    }
    if !open.is_empty() {
        let mut rows_in: Vec<(Vec<u32>, bool)> = Vec::with_capacity(open.len());
        for &e in &open {
            let acc = reduce(&mut cl, e, &mut roots);
            rows_in.push((roots.clone(), acc));
        }
        let mut cols: Vec<u32> = rows_in.iter().flat_map(|r| r.0.iter().copied()).collect();
        cols.sort_unstable();
        cols.dedup();
        if (rows_in.len() as u128) * (cols.len() as u128) > 8 * (1u128 << 33) {
            return Err(Error::TooLarge {
                n: rows_in.len(),
                m: cols.len(),
                what: "residual sign system",
            });
        }
        let words = cols.len() / 64 + 1;
        let mut rows: Vec<(Vec<u64>, bool)> = rows_in
            .iter()
            .map(|(rs, acc)| {
                let mut bits = vec![0u64; words];
                for &r in rs {
                    let c = cols.binary_search(&r).unwrap();
                    bits[c / 64] ^= 1 << (c % 64);
                }
                (bits, *acc)
            })
            .collect();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut r = 0;
        for c in 0..cols.len() {
            let (w, bit) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (r..rows.len()).find(|&i| rows[i].0[w] & bit != 0) else {
                continue;
            };
            rows.swap(r, p);
            let (pivot_bits, pivot_rhs) = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.0[w] & bit != 0 {
                    for (a, b) in row.0.iter_mut().zip(&pivot_bits) {
                        *a ^= b;
                    }
                    row.1 ^= pivot_rhs;
                }
            }
            pivots.push((r, c));
            r += 1;
        }
        if rows[r..].iter().any(|row| row.1) {
            return Err(Error::InconsistentSigns("no solution".into()));
        }
        // free columns are zero, so each pivot equals its row's right-hand side
        for &v in &cols {
            cl.value[v as usize] = Some(false);
        }
        for (ri, c) in pivots {
            cl.value[cols[c] as usize] = Some(rows[ri].1);
        }
    }
    let x: Vec<bool> = (0..sys.vars as u32)
        .map(|v| {
            let (r, p) = cl.find(v);
            cl.value[r as usize].unwrap_or(false) ^ p
        })
        .collect();
    debug_assert_eq!(sys.violations(&x), 0);
    Ok(x)
}

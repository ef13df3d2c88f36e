//! Integer matrices stored as `(source, target, coefficient)` triples.

use rustc_hash::FxHashMap;

pub type Entries = Vec<(u32, u32, i64)>;

/// Sorts, merges repeated positions and drops zeros.
pub fn normalize(mut v: Entries) -> Entries {
    v.sort_unstable_by_key(|e| (e.0, e.1));
    let mut out: Entries = Vec::with_capacity(v.len());
    for (a, b, c) in v {
        match out.last_mut() {
            Some(last) if last.0 == a && last.1 == b => last.2 += c,
            _ => out.push((a, b, c)),
        }
    }
    out.retain(|e| e.2 != 0);
    out
}

/// `second` after `first`.
pub fn compose(first: &Entries, second: &Entries) -> Entries {
    let mut by_source: FxHashMap<u32, Vec<(u32, i64)>> = FxHashMap::default();
    for &(a, b, c) in second {
        by_source.entry(a).or_default().push((b, c));
    }
    let mut out = Vec::new();
    for &(x, y, c1) in first {
        if let Some(list) = by_source.get(&y) {
            out.extend(list.iter().map(|&(z, c2)| (x, z, c1 * c2)));
        }
    }
    normalize(out)
}

pub fn sum(parts: &[&Entries]) -> Entries {
    normalize(parts.iter().flat_map(|p| p.iter().copied()).collect())
}

pub fn identity(len: usize) -> Entries {
    (0..len as u32).map(|i| (i, i, 1)).collect()
}

pub fn mod2(v: &Entries) -> Entries {
    v.iter()
        .filter(|e| e.2.rem_euclid(2) == 1)
        .map(|&(a, b, _)| (a, b, 1))
        .collect()
}

/// Signs `u` with `b[x][y] = u(x) u(y) a[x][y]`, where both matrices act on
/// the same index set of size `len`. Returns `None` when the supports differ
/// or no such signs exist.
pub fn matrix_gauge(a: &Entries, b: &Entries, len: usize) -> Option<Vec<i64>> {
    let a = normalize(a.clone());
    let b = normalize(b.clone());
    if a.len() != b.len()
        || a.iter()
            .zip(&b)
            .any(|(p, q)| p.0 != q.0 || p.1 != q.1 || p.2.abs() != q.2.abs())
    {
        return None;
    }
    let mut adj: Vec<Vec<(u32, bool)>> = vec![Vec::new(); len];
    for (p, q) in a.iter().zip(&b) {
        let flip = p.2 != q.2;
        adj[p.0 as usize].push((p.1, flip));
        adj[p.1 as usize].push((p.0, flip));
    }
    let mut u: Vec<i64> = vec![0; len];
    for s in 0..len {
        if u[s] != 0 {
            continue;
        }
        u[s] = 1;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &(w, flip) in &adj[v] {
                let want = if flip { -u[v] } else { u[v] };
                if u[w as usize] == 0 {
                    u[w as usize] = want;
                    stack.push(w as usize);
                } else if u[w as usize] != want {
                    return None;
                }
            }
        }
    }
    Some(u)
}

//! Smith normal form of dense integer matrices, with unimodular certificates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    /// nonzero invariant factors `d1 | d2 | ...`, all positive
    pub diagonal: Vec<BigInt>,
    /// `rows x rows`, unimodular
    pub u: Matrix,
    /// `cols x cols`, unimodular
    pub v: Matrix,
}

pub fn identity(k: usize) -> Matrix {
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn from_i64(rows: &[Vec<i64>]) -> Matrix {
    rows.iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect()
}

pub fn multiply(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for t in 0..inner {
                        if !row[t].is_zero() && !b[t][j].is_zero() {
                            s += &row[t] * &b[t][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Computes `U M V = D`. Pivots are chosen with minimal absolute value.
pub fn smith_normal_form(m: &Matrix) -> SmithForm {
    smith_impl(m, true)
}

/// Invariant factors only.
pub fn invariant_factors(m: &Matrix) -> Vec<BigInt> {
    smith_impl(m, false).diagonal
}

fn smith_impl(m: &Matrix, certify: bool) -> SmithForm {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a = m.clone();
    let mut u = if certify { identity(rows) } else { Vec::new() };
    let mut v = if certify { identity(cols) } else { Vec::new() };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // minimal nonzero entry in the trailing submatrix
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero()
                    && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        if certify {
            u.swap(t, pi);
        }
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        if certify {
            for row in v.iter_mut() {
                row.swap(t, pj);
            }
        }
        loop {
            let mut dirty = false;
            // clear column t below the pivot
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &q);
                if certify {
                    row_axpy(&mut u, i, t, &q);
                }
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            // clear row t right of the pivot
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, j, t, &q);
                if certify {
                    col_axpy(&mut v, j, t, &q);
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                // divisibility of the remaining block
                let mut bad = None;
                'scan: for i in t + 1..rows {
                    for j in t + 1..cols {
                        if !(&a[i][j] % &a[t][t]).is_zero() {
                            bad = Some(i);
                            break 'scan;
                        }
                    }
                }
                match bad {
                    None => break,
                    Some(i) => {
                        // add row i to row t and continue reducing
                        let one = -BigInt::one();
                        row_axpy(&mut a, t, i, &one);
                        if certify {
                            row_axpy(&mut u, t, i, &one);
                        }
                    }
                }
            }
            // re-pick the smallest entry of row/column t as pivot
            let mut best = (t, t);
            for i in t..rows {
                if !a[i][t].is_zero()
                    && (a[best.0][best.1].is_zero() || a[i][t].abs() < a[best.0][best.1].abs())
                {
                    best = (i, t);
                }
            }
            for j in t..cols {
                if !a[t][j].is_zero()
                    && (a[best.0][best.1].is_zero() || a[t][j].abs() < a[best.0][best.1].abs())
                {
                    best = (t, j);
                }
            }
            if best.0 != t {
                a.swap(t, best.0);
                if certify {
                    u.swap(t, best.0);
                }
            } else if best.1 != t {
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
                if certify {
                    for row in v.iter_mut() {
                        row.swap(t, best.1);
                    }
                }
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            if certify {
                for x in u[t].iter_mut() {
                    *x = -&*x;
                }
            }
        }
        diag.push(a[t][t].clone());
        t += 1;
    }
    SmithForm {
        diagonal: diag,
        u,
        v,
    }
}

/// row[i] -= q * row[t]
fn row_axpy(a: &mut Matrix, i: usize, t: usize, q: &BigInt) {
    let (src, dst) = if i < t {
        let (lo, hi) = a.split_at_mut(t);
        (&hi[0], &mut lo[i])
    } else {
        let (lo, hi) = a.split_at_mut(i);
        (&lo[t], &mut hi[0])
    };
    for (d, s) in dst.iter_mut().zip(src.iter()) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

/// col[j] -= q * col[t]
fn col_axpy(a: &mut Matrix, j: usize, t: usize, q: &BigInt) {
    for row in a.iter_mut() {
        if !row[t].is_zero() {
            let s = q * &row[t];
            row[j] -= s;
        }
    }
}

/// Splits an invariant factor into prime powers.
pub fn prime_powers(d: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut x = d.abs();
    let mut p = BigInt::from(2);
    while &p * &p <= x {
        if (&x % &p).is_zero() {
            let mut q = BigInt::one();
            while (&x % &p).is_zero() {
                x /= &p;
                q *= &p;
            }
            out.push(q);
        }
        p += 1;
    }
    if x > BigInt::one() {
        out.push(x);
    }
    out
}

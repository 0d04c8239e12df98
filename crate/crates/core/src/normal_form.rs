//! Hermite and Smith normal forms over arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn to_big(m: &[Vec<i64>]) -> IntMatrix {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn transpose(m: &IntMatrix, cols: usize) -> IntMatrix {
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

fn combine_rows(m: &mut IntMatrix, p: usize, r: usize, x: &BigInt, y: &BigInt, u: &BigInt, v: &BigInt) {
    // (row_p, row_r) ← (x·row_p + y·row_r, u·row_p + v·row_r)
    let cols = m[p].len();
    for c in 0..cols {
        let a = m[p][c].clone();
        let b = m[r][c].clone();
        m[p][c] = x * &a + y * &b;
        m[r][c] = u * &a + v * &b;
    }
}

/// Row-style Hermite form: returns (H, U, rank) with U unimodular and U·A = H,
/// H in echelon form with positive pivots and reduced entries above them.
pub fn hermite(a: &IntMatrix, cols: usize) -> (IntMatrix, IntMatrix, usize) {
    let rows = a.len();
    let mut h = a.clone();
    let mut u = identity(rows);
    let mut pivot_row = 0;
    for c in 0..cols {
        if pivot_row == rows {
            break;
        }
        for r in pivot_row + 1..rows {
            if h[r][c].is_zero() {
                continue;
            }
            let a0 = h[pivot_row][c].clone();
            let b0 = h[r][c].clone();
            let eg = a0.extended_gcd(&b0);
            let g = eg.gcd;
            let (x, y) = (eg.x, eg.y);
            let uu = -(&b0 / &g);
            let vv = &a0 / &g;
            combine_rows(&mut h, pivot_row, r, &x, &y, &uu, &vv);
            combine_rows(&mut u, pivot_row, r, &x, &y, &uu, &vv);
        }
        if h[pivot_row][c].is_zero() {
            continue;
        }
        if h[pivot_row][c].is_negative() {
            for x in h[pivot_row].iter_mut() {
                *x = -x.clone();
            }
            for x in u[pivot_row].iter_mut() {
                *x = -x.clone();
            }
        }
        let p = h[pivot_row][c].clone();
        for r in 0..pivot_row {
            let q = h[r][c].div_floor(&p);
            if !q.is_zero() {
                for k in 0..cols {
                    let t = &q * &h[pivot_row][k];
                    h[r][k] -= t;
                }
                for k in 0..rows {
                    let t = &q * &u[pivot_row][k];
                    u[r][k] -= t;
                }
            }
        }
        pivot_row += 1;
    }
    (h, u, pivot_row)
}

/// Canonical Hermite basis of the row lattice of `a`; zero rows removed.
pub fn row_hnf(a: &IntMatrix, cols: usize) -> IntMatrix {
    let (h, _, rank) = hermite(a, cols);
    h.into_iter().take(rank).collect()
}

/// Basis of {x : x·A = 0} (left kernel), saturated, in Hermite form.
pub fn left_kernel(a: &IntMatrix, cols: usize) -> IntMatrix {
    let rows = a.len();
    let (_, u, rank) = hermite(a, cols);
    let ker: IntMatrix = u.into_iter().skip(rank).collect();
    row_hnf(&ker, rows)
}

/// Basis of {x : A·x = 0} as rows, saturated, in Hermite form.
pub fn right_kernel(a: &IntMatrix, cols: usize) -> IntMatrix {
    left_kernel(&transpose(a, cols), a.len())
}

/// Invariant factors of the Smith form (nonzero diagonal entries, ascending divisibility).
pub fn smith_invariants(a: &IntMatrix, cols: usize) -> Vec<BigInt> {
    let mut m = a.clone();
    let rows = m.len();
    let mut diag = vec![];
    let mut t = 0;
    while t < rows.min(cols) {
        // pick the smallest nonzero entry in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                if !m[r][c].is_zero() && best.is_none_or(|(br, bc)| m[r][c].abs() < m[br][bc].abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((br, bc)) = best else { break };
        m.swap(t, br);
        for row in m.iter_mut() {
            row.swap(t, bc);
        }
        loop {
            let p = m[t][t].clone();
            let mut dirty = false;
            for r in t + 1..rows {
                let q = m[r][t].div_floor(&p);
                if !q.is_zero() {
                    for c in t..cols {
                        let s = &q * &m[t][c];
                        m[r][c] -= s;
                    }
                }
                if !m[r][t].is_zero() {
                    dirty = true;
                }
            }
            for c in t + 1..cols {
                let q = m[t][c].div_floor(&p);
                if !q.is_zero() {
                    for r in t..rows {
                        let s = &q * &m[r][t];
                        m[r][c] -= s;
                    }
                }
                if !m[t][c].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
            // move the smallest remaining entry of row/column t to the pivot
            let mut best = (t, t);
            for r in t..rows {
                if !m[r][t].is_zero() && m[r][t].abs() < m[best.0][best.1].abs() {
                    best = (r, t);
                }
            }
            for c in t..cols {
                if !m[t][c].is_zero() && m[t][c].abs() < m[best.0][best.1].abs() {
                    best = (t, c);
                }
            }
            m.swap(t, best.0);
            for row in m.iter_mut() {
                row.swap(t, best.1);
            }
        }
        diag.push(m[t][t].abs());
        t += 1;
    }
    // enforce the divisibility chain
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let g = diag[i].gcd(&diag[j]);
            let l = diag[i].lcm(&diag[j]);
            diag[i] = g;
            diag[j] = l;
        }
    }
    diag
}

/// Whether `v` lies in the row lattice spanned by the Hermite basis `h`.
pub fn in_lattice(h: &IntMatrix, v: &[BigInt]) -> bool {
    let mut w = v.to_vec();
    for row in h {
        let Some(c) = row.iter().position(|x| !x.is_zero()) else { continue };
        let (q, r) = w[c].div_rem(&row[c]);
        if !r.is_zero() {
            return false;
        }
        for k in 0..w.len() {
            w[k] -= &q * &row[k];
        }
    }
    w.iter().all(|x| x.is_zero())
}

/// Two integer row sets span the same lattice.
pub fn same_lattice(a: &IntMatrix, b: &IntMatrix, cols: usize) -> bool {
    row_hnf(a, cols) == row_hnf(b, cols)
}

pub fn mat_vec(a: &IntMatrix, x: &[BigInt]) -> Vec<BigInt> {
    a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

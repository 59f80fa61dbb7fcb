//! Exact integer and rational linear algebra: Smith normal form, integer
//! kernels, row Hermite form, rational solving.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

pub fn to_big(rows: &[Vec<i64>]) -> Matrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

pub fn to_i64(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(|x| x.to_i64()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pivot {
    /// Smallest absolute value in the remaining block.
    MinAbs,
    /// First nonzero entry in column-major order.
    FirstNonzero,
}

/// `u * a * v = d` with `d` diagonal, each entry dividing the next.
#[derive(Clone, Debug)]
pub struct Smith {
    pub diag: Vec<BigInt>,
    pub u: Matrix,
    pub v: Matrix,
    pub rows: usize,
    pub cols: usize,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    /// Invariant factors greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diag.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect()
}

fn swap_cols(m: &mut Matrix, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// Row `dst -= q * row src`.
fn row_axpy(m: &mut Matrix, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let s = m[src].clone();
    for (x, y) in m[dst].iter_mut().zip(&s) {
        *x -= q * y;
    }
}

/// Column `dst -= q * column src`.
fn col_axpy(m: &mut Matrix, dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        let y = row[src].clone();
        row[dst] -= q * y;
    }
}

pub fn smith(a: &Matrix, cols: usize, pivot: Pivot) -> Smith {
    let rows = a.len();
    let mut m = a.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pi, pj)) = choose(&m, t, pivot) else {
            break;
        };
        m.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut m, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = m[i][t].div_floor(&m[t][t]);
                row_axpy(&mut m, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                if !m[i][t].is_zero() {
                    m.swap(t, i);
                    u.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = m[t][j].div_floor(&m[t][t]);
                col_axpy(&mut m, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                if !m[t][j].is_zero() {
                    swap_cols(&mut m, t, j);
                    swap_cols(&mut v, t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Divisibility of the remaining block by the pivot.
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&m[i][j] % &m[t][t]).is_zero()));
            match bad {
                Some(i) => {
                    let one = BigInt::from(-1);
                    row_axpy(&mut m, t, i, &one);
                    row_axpy(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if m[t][t].is_negative() {
            for x in m[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        diag.push(m[t][t].clone());
        t += 1;
    }
    Smith { diag, u, v, rows, cols }
}

fn choose(m: &Matrix, t: usize, pivot: Pivot) -> Option<(usize, usize)> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    match pivot {
        Pivot::MinAbs => {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if m[i][j].is_zero() {
                        continue;
                    }
                    if best.map_or(true, |(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            best
        }
        Pivot::FirstNonzero => {
            for j in t..cols {
                for i in t..rows {
                    if !m[i][j].is_zero() {
                        return Some((i, j));
                    }
                }
            }
            None
        }
    }
}

/// A basis of the integer kernel `{x : a x = 0}`.
pub fn integer_kernel(a: &Matrix, cols: usize) -> Matrix {
    let s = smith(a, cols, Pivot::MinAbs);
    (s.rank()..cols)
        .map(|j| s.v.iter().map(|row| row[j].clone()).collect())
        .collect()
}

/// Row-style Hermite normal form of the lattice spanned by `rows`, zero
/// rows dropped. Pivots are positive and entries above a pivot are reduced
/// into `[0, pivot)`.
pub fn hermite(rows: &Matrix, cols: usize) -> Matrix {
    let mut m = rows.clone();
    let mut r = 0;
    for c in 0..cols {
        if r >= m.len() {
            break;
        }
        loop {
            let best = (r..m.len())
                .filter(|&i| !m[i][c].is_zero())
                .min_by(|&a, &b| m[a][c].abs().cmp(&m[b][c].abs()));
            let Some(p) = best else { break };
            m.swap(r, p);
            let mut clean = true;
            for i in r + 1..m.len() {
                if m[i][c].is_zero() {
                    continue;
                }
                let q = m[i][c].div_floor(&m[r][c]);
                row_axpy(&mut m, i, r, &q);
                if !m[i][c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if r < m.len() && !m[r][c].is_zero() {
            if m[r][c].is_negative() {
                for x in m[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            for i in 0..r {
                let q = m[i][c].div_floor(&m[r][c]);
                row_axpy(&mut m, i, r, &q);
            }
            r += 1;
        }
    }
    m.truncate(r);
    m
}

pub fn rank(a: &Matrix, cols: usize) -> usize {
    smith(a, cols, Pivot::MinAbs).rank()
}

/// Solve `x * rows = target` over the rationals; `None` if inconsistent.
pub fn solve_left(rows: &Matrix, target: &[BigInt]) -> Option<Vec<BigRational>> {
    let k = rows.len();
    let n = target.len();
    // Columns of the system are the equations: sum_i x_i rows[i][j] = t_j.
    let mut aug: Vec<Vec<BigRational>> = (0..n)
        .map(|j| {
            let mut r: Vec<BigRational> = (0..k).map(|i| BigRational::from_integer(rows[i][j].clone())).collect();
            r.push(BigRational::from_integer(target[j].clone()));
            r
        })
        .collect();
    let mut piv_cols = Vec::new();
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..n).find(|&i| !aug[i][c].is_zero()) else {
            continue;
        };
        aug.swap(r, p);
        let inv = aug[r][c].recip();
        for x in aug[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..n {
            if i != r && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                let src = aug[r].clone();
                for (x, y) in aug[i].iter_mut().zip(&src) {
                    *x = &*x - &f * y;
                }
            }
        }
        piv_cols.push(c);
        r += 1;
    }
    if aug[r..].iter().any(|row| !row[k].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); k];
    for (i, &c) in piv_cols.iter().enumerate() {
        x[c] = aug[i][k].clone();
    }
    Some(x)
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

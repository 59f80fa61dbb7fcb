//! Exact feasibility of `A x = b, x >= 0` by a phase-one simplex over the
//! rationals with Bland's rule.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub fn feasible(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let width = n + m + 1;
    let rhs = n + m;
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        let mut row = vec![BigRational::zero(); width];
        for j in 0..n {
            row[j] = if flip { -a[i][j].clone() } else { a[i][j].clone() };
        }
        row[n + i] = BigRational::from_integer(1.into());
        row[rhs] = if flip { -b[i].clone() } else { b[i].clone() };
        t.push(row);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut z = vec![BigRational::zero(); width];
    for row in &t {
        for j in 0..n {
            z[j] -= &row[j];
        }
        z[rhs] -= &row[rhs];
    }
    loop {
        let Some(enter) = (0..n + m).find(|&j| z[j].is_negative()) else {
            break;
        };
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let better = match leave {
                None => true,
                Some(l) => {
                    let r = &t[i][rhs] / &t[i][enter];
                    let rl = &t[l][rhs] / &t[l][enter];
                    r < rl || (r == rl && basis[i] < basis[l])
                }
            };
            if better {
                leave = Some(i);
            }
        }
        // Phase one is bounded below by zero.
        let l = leave?;
        let p = t[l][enter].clone();
        for x in t[l].iter_mut() {
            *x /= &p;
        }
        let pivot_row = t[l].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == l || row[enter].is_zero() {
                continue;
            }
            let f = row[enter].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
        let f = z[enter].clone();
        for (x, y) in z.iter_mut().zip(&pivot_row) {
            *x -= &f * y;
        }
        basis[l] = enter;
    }
    if !z[rhs].is_zero() {
        return None;
    }
    let mut x = vec![BigRational::zero(); n];
    for (i, &v) in basis.iter().enumerate() {
        if v < n {
            x[v] = t[i][rhs].clone();
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x: i64) -> BigRational {
        BigRational::from_integer(x.into())
    }

    #[test]
    fn simple_systems() {
        // x + y = 2, x - y = 0
        let a = vec![vec![r(1), r(1)], vec![r(1), r(-1)]];
        let x = feasible(&a, &[r(2), r(0)]).unwrap();
        assert_eq!(x, vec![r(1), r(1)]);
        // x + y = -1 has no nonnegative solution
        assert!(feasible(&[vec![r(1), r(1)]], &[r(-1)]).is_none());
        // x - y = -3
        let x = feasible(&[vec![r(1), r(-1)]], &[r(-3)]).unwrap();
        assert_eq!(&x[0] - &x[1], r(-3));
    }
}

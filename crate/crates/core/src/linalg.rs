//! Dense linear algebra helpers: exact elimination over rationals and a
//! partial-pivoting inverse for floating matrices.

use num_traits::{One, Zero};

use crate::scalar::Real;
use crate::{Rational, RationalMatrix};

pub fn identity(n: usize) -> RationalMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect()
}

pub fn transpose(a: &RationalMatrix) -> RationalMatrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn mat_mul(a: &RationalMatrix, b: &RationalMatrix) -> RationalMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Rational::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
fn rref(m: &mut RationalMatrix, cols: usize) -> Vec<usize> {
    let rows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Rational::one() / m[r][c].clone();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (v, pv) in m[i].iter_mut().zip(&pivot_row) {
                    *v = &*v - &(&f * pv);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(a: &RationalMatrix) -> usize {
    let cols = a.first().map_or(0, Vec::len);
    let mut m = a.clone();
    rref(&mut m, cols).len()
}

/// Some solution of `A x = b`, free variables set to zero.
pub fn solve(a: &RationalMatrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let cols = a.first().map_or(0, Vec::len);
    let mut m: RationalMatrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m, cols + 1);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][cols].clone();
    }
    Some(x)
}

pub fn inverse(a: &RationalMatrix) -> Option<RationalMatrix> {
    let n = a.len();
    let mut m: RationalMatrix = a
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let pivots = rref(&mut m, n);
    if pivots.len() < n {
        return None;
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Inverse by Gauss–Jordan elimination with partial pivoting.
pub fn invert_float<F: Real>(a: &[Vec<F>]) -> Option<Vec<Vec<F>>> {
    let n = a.len();
    let mut m: Vec<Vec<F>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            r
        })
        .collect();
    let scale = a.iter().flatten().fold(F::zero(), |acc, v| acc.max(v.abs()));
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())?;
        if m[p][c].abs() <= F::epsilon() * scale {
            return None;
        }
        m.swap(c, p);
        let inv = F::one() / m[c][c];
        for v in m[c].iter_mut() {
            *v = *v * inv;
        }
        for i in 0..n {
            if i != c {
                let f = m[i][c];
                if f != F::zero() {
                    for j in 0..2 * n {
                        let t = m[c][j];
                        m[i][j] = m[i][j] - f * t;
                    }
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Determinant by elimination with partial pivoting.
pub fn det_float<F: Real>(a: &[Vec<F>]) -> F {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = F::one();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap())
            .expect("nonempty range");
        if m[p][c] == F::zero() {
            return F::zero();
        }
        if p != c {
            m.swap(c, p);
            det = -det;
        }
        det = det * m[c][c];
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            for j in c..n {
                let t = m[c][j];
                m[i][j] = m[i][j] - f * t;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Scalar;

    fn q(a: i64, b: i64) -> Rational {
        Rational::from_ratio(a, b)
    }

    #[test]
    fn exact_inverse_and_solve() {
        let a = vec![vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]];
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        assert_eq!(solve(&a, &[q(3, 1), q(2, 1)]).unwrap(), vec![q(1, 1), q(1, 1)]);
        let sing = vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]];
        assert!(inverse(&sing).is_none());
        assert_eq!(rank(&sing), 1);
        assert!(solve(&sing, &[q(1, 1), q(0, 1)]).is_none());
    }

    #[test]
    fn float_inverse_and_det() {
        let a: Vec<Vec<f64>> = vec![vec![0.0, 2.0], vec![1.0, 3.0]];
        let inv: Vec<Vec<f64>> = invert_float(&a).unwrap();
        assert!((inv[0][0] + 1.5).abs() < 1e-15 && (inv[0][1] - 1.0).abs() < 1e-15);
        assert!((det_float(&a) + 2.0_f64).abs() < 1e-15);
        assert!(invert_float(&[vec![1.0_f64, 2.0], vec![2.0, 4.0]]).is_none());
    }
}

//! Exact dense linear algebra over ℚ.

use crate::rational::Rational;

pub type Vector = Vec<Rational>;
pub type Matrix = Vec<Vec<Rational>>;

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(k: &Rational, a: &[Rational]) -> Vector {
    a.iter().map(|x| k * x).collect()
}

pub fn norm_inf(a: &[Rational]) -> Rational {
    a.iter().map(Rational::abs).max().unwrap_or_else(Rational::zero)
}

pub fn norm_1(a: &[Rational]) -> Rational {
    a.iter().map(Rational::abs).sum()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            debug_assert_eq!(row.len(), inner);
            (0..cols)
                .map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).sum())
                .collect()
        })
        .collect()
}

/// Row echelon form in place; returns the pivot columns.
fn eliminate(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for j in c..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut work = m.clone();
    eliminate(&mut work).len()
}

/// Unique solution of the square system `a·x = rhs`, if `a` is nonsingular.
pub fn solve(a: &Matrix, rhs: &[Rational]) -> Option<Vector> {
    let n = a.len();
    let mut aug: Matrix = a
        .iter()
        .zip(rhs)
        .map(|(row, v)| {
            let mut r = row.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let pivots = eliminate(&mut aug);
    if pivots.len() != n || pivots.iter().any(|&c| c >= n) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n].clone()).collect())
}

/// A nonzero vector spanning the null space of `m` when that space is a line.
pub fn null_line(m: &Matrix, cols: usize) -> Option<Vector> {
    let mut work = m.clone();
    let pivots = eliminate(&mut work);
    if pivots.len() + 1 != cols {
        return None;
    }
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut v = vec![Rational::zero(); cols];
    v[free] = Rational::one();
    for (row, &pc) in pivots.iter().enumerate() {
        v[pc] = -work[row][free].clone();
    }
    Some(v)
}

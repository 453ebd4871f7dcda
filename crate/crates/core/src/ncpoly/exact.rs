//! Dense Gauss–Jordan elimination over the rationals.

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Row-major square matrix of rationals.
pub type RationalMatrix = Vec<Vec<BigRational>>;

/// Inverse of a square rational matrix, or `None` if singular.
pub fn invert(m: &RationalMatrix) -> Option<RationalMatrix> {
    let n = m.len();
    let mut aug: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "matrix must be square");
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, pivot);
        let inv = aug[col][col].recip();
        for x in aug[col].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = aug[col].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                *x -= &factor * p;
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Solves `m x = rhs` exactly.
pub fn solve(m: &RationalMatrix, rhs: &[BigRational]) -> Option<Vec<BigRational>> {
    let inv = invert(m)?;
    Some(mat_vec(&inv, rhs))
}

pub fn mat_vec(m: &RationalMatrix, v: &[BigRational]) -> Vec<BigRational> {
    m.iter()
        .map(|row| {
            row.iter().zip(v).filter(|(a, b)| !a.is_zero() && !b.is_zero()).fold(BigRational::zero(), |acc, (a, b)| acc + a * b)
        })
        .collect()
}

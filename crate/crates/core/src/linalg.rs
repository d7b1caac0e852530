//! Exact Gaussian elimination over any field-like scalar.

use num_rational::BigRational;
use num_traits::{One, Zero};

pub trait Scalar: Clone {
    fn vanishes(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    /// Only called with a nonzero divisor.
    fn over(&self, o: &Self) -> Self;
}

impl Scalar for BigRational {
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn over(&self, o: &Self) -> Self {
        self / o
    }
}

/// Row echelon form in place; returns the pivot columns.
pub fn row_reduce<T: Scalar>(m: &mut [Vec<T>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].vanishes()) else {
            continue;
        };
        m.swap(r, p);
        let pivot = m[r][c].clone();
        for j in c..cols {
            m[r][j] = m[r][j].over(&pivot);
        }
        for i in 0..rows {
            if i != r && !m[i][c].vanishes() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = f.times(&m[r][j]);
                    m[i][j] = m[i][j].minus(&t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<T: Scalar>(rows: &[Vec<T>]) -> usize {
    let mut m = rows.to_vec();
    row_reduce(&mut m).len()
}

/// Determinant of a square matrix; `None` for the empty matrix.
pub fn determinant<T: Scalar>(m: &[Vec<T>]) -> Option<T> {
    let n = m.len();
    let first = m.first()?.first()?.clone();
    assert!(m.iter().all(|r| r.len() == n), "determinant of a non-square matrix");
    let mut a = m.to_vec();
    let mut det = first.one_like();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].vanishes()) else {
            return Some(first.zero_like());
        };
        if p != c {
            a.swap(p, c);
            det = det.zero_like().minus(&det);
        }
        let pivot = a[c][c].clone();
        det = det.times(&pivot);
        for i in c + 1..n {
            if a[i][c].vanishes() {
                continue;
            }
            let f = a[i][c].over(&pivot);
            for j in c..n {
                let t = f.times(&a[c][j]);
                a[i][j] = a[i][j].minus(&t);
            }
        }
    }
    Some(det)
}

/// Basis of the right kernel `{y : rows * y = 0}` over Q.
pub fn nullspace(rows: &[Vec<BigRational>], ncols: usize) -> Vec<Vec<BigRational>> {
    let mut m = rows.to_vec();
    let pivots = row_reduce(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut y = vec![BigRational::zero(); ncols];
            y[f] = BigRational::one();
            for (r, &pc) in pivots.iter().enumerate() {
                y[pc] = -m[r][f].clone();
            }
            y
        })
        .collect()
}

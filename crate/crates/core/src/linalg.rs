//! Exact Gaussian elimination over `Scalar`.

use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// Row-reduced echelon form of a dense matrix.
#[derive(Clone, Debug)]
pub struct Rref {
    pub rows: Vec<Vec<Scalar>>,
    /// Pivot column of each nonzero row, increasing.
    pub pivots: Vec<usize>,
    pub ncols: usize,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn nullity(&self) -> usize {
        self.ncols - self.rank()
    }

    /// Columns without a pivot.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ncols)
            .filter(|c| !self.pivots.contains(c))
            .collect()
    }

    /// Reduce `v` against the rows so that every pivot entry becomes zero.
    pub fn reduce(&self, v: &mut [Scalar]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let f = v[p].clone();
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x -= &(&f * r);
                }
            }
        }
    }

    /// Basis of the right kernel `{x : A x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        self.free_columns()
            .into_iter()
            .map(|free| {
                let mut x = vec![Scalar::zero(); self.ncols];
                x[free] = Scalar::one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    x[p] = -&row[free];
                }
                x
            })
            .collect()
    }
}

/// Incrementally maintained reduced row-echelon basis.
#[derive(Clone, Debug)]
pub struct RowSpace {
    rref: Rref,
}

impl RowSpace {
    pub fn new(ncols: usize) -> Self {
        RowSpace {
            rref: Rref {
                rows: Vec::new(),
                pivots: Vec::new(),
                ncols,
            },
        }
    }

    pub fn rref(&self) -> &Rref {
        &self.rref
    }

    /// Insert a row; returns true if it enlarged the span.
    pub fn insert(&mut self, mut v: Vec<Scalar>) -> bool {
        assert_eq!(v.len(), self.rref.ncols);
        self.rref.reduce(&mut v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].inv().expect("nonzero pivot");
        for x in v.iter_mut() {
            *x = &*x * &inv;
        }
        for row in self.rref.rows.iter_mut() {
            if row[p].is_zero() {
                continue;
            }
            let f = row[p].clone();
            for (x, r) in row.iter_mut().zip(&v) {
                if !r.is_zero() {
                    *x -= &(&f * r);
                }
            }
        }
        let at = self.rref.pivots.partition_point(|&q| q < p);
        self.rref.pivots.insert(at, p);
        self.rref.rows.insert(at, v);
        true
    }
}

pub fn rref(rows: &[Vec<Scalar>], ncols: usize) -> Rref {
    let mut space = RowSpace::new(ncols);
    for r in rows {
        space.insert(r.clone());
    }
    space.rref
}

/// Outcome of solving `A x = b`.
#[derive(Clone, Debug, PartialEq)]
pub enum Solution {
    /// A particular solution plus the dimension of the solution space.
    Solved {
        x: Vec<Scalar>,
        nullity: usize,
    },
    Inconsistent,
}

/// Solve `A x = b` with the augmented rows `[A | b]`.
pub fn solve_augmented(rows: &[Vec<Scalar>], nunknowns: usize) -> Solution {
    let r = rref(rows, nunknowns + 1);
    solution_from_rref(&r, nunknowns)
}

pub fn solution_from_rref(r: &Rref, nunknowns: usize) -> Solution {
    if r.pivots.contains(&nunknowns) {
        return Solution::Inconsistent;
    }
    let mut x = vec![Scalar::zero(); nunknowns];
    for (row, &p) in r.rows.iter().zip(&r.pivots) {
        x[p] = row[nunknowns].clone();
    }
    Solution::Solved {
        x,
        nullity: nunknowns - r.rank(),
    }
}

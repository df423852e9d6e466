//! Dense matrices over GF(q) with Gaussian elimination.

use crate::error::{Error, Result};
use crate::gf::{Felt, Field};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Felt>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Felt::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Felt::ONE;
        }
        m
    }

    pub fn from_rows<R: AsRef<[Felt]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.as_ref().len(), cols, "ragged matrix");
            data.extend_from_slice(r.as_ref());
        }
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Felt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul(&self, field: &Field, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = field.add(out[(i, j)], field.mul(a, other[(k, j)]));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, field: &Field, v: &[Felt]) -> Vec<Felt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| field.sum(self.row(i).iter().zip(v).map(|(&a, &b)| field.mul(a, b))))
            .collect()
    }

    /// Reduces in place to reduced row echelon form; returns the pivot columns.
    pub fn rref_in_place(&mut self, field: &Field) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = field.inv(self[(r, c)]).expect("pivot is nonzero");
            for j in c..self.cols {
                self[(r, j)] = field.mul(self[(r, j)], inv);
            }
            for i in 0..self.rows {
                if i == r {
                    continue;
                }
                let k = self[(i, c)];
                if k.is_zero() {
                    continue;
                }
                for j in c..self.cols {
                    let sub = field.mul(k, self[(r, j)]);
                    self[(i, j)] = field.sub(self[(i, j)], sub);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&self, field: &Field) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let p = m.rref_in_place(field);
        (m, p)
    }

    pub fn rank(&self, field: &Field) -> usize {
        self.rref(field).1.len()
    }

    /// Basis of `{x : self · x = 0}`, one vector per free column.
    pub fn nullspace(&self, field: &Field) -> Vec<Vec<Felt>> {
        let (r, pivots) = self.rref(field);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![Felt::ZERO; self.cols];
                v[fc] = Felt::ONE;
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = field.neg(r[(i, fc)]);
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self, field: &Field) -> Result<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(i, n + i)] = Felt::ONE;
        }
        let pivots = aug.rref_in_place(field);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::SingularMatrix);
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)];
            }
        }
        Ok(inv)
    }

    pub fn det(&self, field: &Field) -> Felt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Felt::ONE;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Felt::ZERO;
            };
            if pr != c {
                m.swap_rows(pr, c);
                det = field.neg(det);
            }
            let pivot = m[(c, c)];
            det = field.mul(det, pivot);
            let inv = field.inv(pivot).expect("pivot is nonzero");
            for i in c + 1..n {
                let k = field.mul(m[(i, c)], inv);
                if k.is_zero() {
                    continue;
                }
                for j in c..n {
                    let sub = field.mul(k, m[(c, j)]);
                    m[(i, j)] = field.sub(m[(i, j)], sub);
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Felt;
    fn index(&self, (i, j): (usize, usize)) -> &Felt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Felt {
        &mut self.data[i * self.cols + j]
    }
}

/// Cross product; for two points of PG(2,q) this is the line through them.
pub fn cross(field: &Field, a: &[Felt; 3], b: &[Felt; 3]) -> [Felt; 3] {
    let m = |x, y| field.mul(x, y);
    [
        field.sub(m(a[1], b[2]), m(a[2], b[1])),
        field.sub(m(a[2], b[0]), m(a[0], b[2])),
        field.sub(m(a[0], b[1]), m(a[1], b[0])),
    ]
}

pub fn dot(field: &Field, a: &[Felt], b: &[Felt]) -> Felt {
    field.sum(a.iter().zip(b).map(|(&x, &y)| field.mul(x, y)))
}

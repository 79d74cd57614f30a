//! Dense exact matrices over a `Field`, with Gaussian elimination based
//! solving, inversion, determinants and kernel computation.

use crate::field::{Field, FieldElement};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    pub field: Field,
    pub rows: usize,
    pub cols: usize,
    data: Vec<FieldElement>,
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{} ", self.at(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zero(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn scalar(field: &Field, n: usize, c: &FieldElement) -> Matrix {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<FieldElement>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend(row);
        }
        Matrix {
            field: field.clone(),
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_int_rows(field: &Field, rows: &[Vec<i64>]) -> Matrix {
        Matrix::from_rows(
            field,
            rows.iter()
                .map(|r| r.iter().map(|&v| field.from_int(v)).collect())
                .collect(),
        )
    }

    pub fn at(&self, i: usize, j: usize) -> &FieldElement {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<FieldElement> {
        (0..self.cols).map(|j| self.at(i, j).clone()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zero(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.at(i, j).clone());
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zero(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = self.field.zero();
                for k in 0..self.cols {
                    let a = self.at(i, k);
                    if a.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(other.at(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field.zero();
                for k in 0..self.cols {
                    let a = self.at(i, k);
                    if !a.is_zero() {
                        acc = acc.add(&a.mul(&v[k]));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn scale(&self, c: &FieldElement) -> Matrix {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x = x.mul(c);
        }
        out
    }

    /// Row echelon reduction in place; returns pivot column indices.
    fn row_reduce(&mut self) -> Vec<usize> {
        let mut pivots = vec![];
        let mut r = 0;
        for c in 0..self.cols {
            if r >= self.rows {
                break;
            }
            // find pivot
            let mut piv = None;
            for i in r..self.rows {
                if !self.at(i, c).is_zero() {
                    piv = Some(i);
                    break;
                }
            }
            let Some(piv) = piv else { continue };
            if piv != r {
                for j in 0..self.cols {
                    self.data.swap(r * self.cols + j, piv * self.cols + j);
                }
            }
            let inv = self.at(r, c).inv();
            for j in c..self.cols {
                let v = self.at(r, j).mul(&inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.at(i, c).is_zero() {
                    continue;
                }
                let f = self.at(i, c).clone();
                for j in c..self.cols {
                    let v = self.at(i, j).sub(&f.mul(self.at(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.row_reduce().len()
    }

    pub fn det(&self) -> FieldElement {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let mut det = self.field.one();
        let n = self.rows;
        for c in 0..n {
            let mut piv = None;
            for i in c..n {
                if !m.at(i, c).is_zero() {
                    piv = Some(i);
                    break;
                }
            }
            let Some(piv) = piv else {
                return self.field.zero();
            };
            if piv != c {
                for j in 0..n {
                    m.data.swap(c * n + j, piv * n + j);
                }
                det = det.neg();
            }
            det = det.mul(m.at(c, c));
            let inv = m.at(c, c).inv();
            for i in (c + 1)..n {
                if m.at(i, c).is_zero() {
                    continue;
                }
                let f = m.at(i, c).mul(&inv);
                for j in c..n {
                    let v = m.at(i, j).sub(&f.mul(m.at(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::zero(&self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, n + i, self.field.one());
        }
        let pivots = aug.row_reduce();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        let mut out = Matrix::zero(&self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, aug.at(i, n + j).clone());
            }
        }
        Some(out)
    }

    /// A basis of the right kernel {v : Av = 0}.
    pub fn kernel_basis(&self) -> Vec<Vec<FieldElement>> {
        let mut m = self.clone();
        let pivots = m.row_reduce();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = vec![];
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![self.field.zero(); self.cols];
            v[free] = self.field.one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = m.at(r, free).neg();
            }
            basis.push(v);
        }
        basis
    }

    /// Solve Ax = b; returns one solution if consistent.
    pub fn solve(&self, b: &[FieldElement]) -> Option<Vec<FieldElement>> {
        assert_eq!(self.rows, b.len());
        let mut aug = Matrix::zero(&self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.at(i, j).clone());
            }
            aug.set(i, self.cols, b[i].clone());
        }
        let pivots = aug.row_reduce();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.at(r, self.cols).clone();
        }
        Some(x)
    }

    pub fn canonical_key(&self) -> Vec<u8> {
        let mut out = vec![];
        for x in &self.data {
            out.extend(x.canonical_key());
        }
        out
    }
}

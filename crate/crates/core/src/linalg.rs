//! Dense exact matrices over a [`Scalar`] field.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::scalars::{FieldSpec, Scalar, UniPoly};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Matrix {
        Matrix { field: field.clone(), rows, cols, data: vec![Scalar::zero(field); rows * cols] }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one(field));
        }
        m
    }

    pub fn from_rows(field: &FieldSpec, rows: Vec<Vec<Scalar>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Matrix { field: field.clone(), rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_ints(field: &FieldSpec, rows: &[Vec<i64>]) -> Matrix {
        Matrix::from_rows(
            field,
            rows.iter().map(|r| r.iter().map(|v| Scalar::from_int(field, *v)).collect()).collect(),
        )
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(&self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = &out.data[i * other.cols + j] + &(a * other.get(k, j));
                    out.data[i * other.cols + j] = v;
                }
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> Matrix {
        assert!(self.is_square());
        let mut acc = Matrix::identity(&self.field, self.rows);
        let mut b = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| if i == j { self.get(i, j).is_one() } else { self.get(i, j).is_zero() })
            })
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = m.get(i, j) - &(&factor * m.get(r, j));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right nullspace, one vector per free column in increasing
    /// column order; each vector has a 1 in its free column.
    pub fn nullspace(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Scalar::zero(&self.field); self.cols];
                v[f] = Scalar::one(&self.field);
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r.get(row, f);
                }
                v
            })
            .collect()
    }

    pub fn det(&self) -> Scalar {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = m.rows;
        let mut det = Scalar::one(&self.field);
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Scalar::zero(&self.field);
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pivot = m.get(c, c).clone();
            det = &det * &pivot;
            let inv = pivot.inv().expect("nonzero pivot");
            for i in c + 1..n {
                if m.get(i, c).is_zero() {
                    continue;
                }
                let factor = m.get(i, c) * &inv;
                for j in c..n {
                    let v = m.get(i, j) - &(&factor * m.get(c, j));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert!(self.is_square());
        let n = self.rows;
        let mut aug = Matrix::zeros(&self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one(&self.field));
        }
        let (r, pivots) = aug.rref();
        if n > 0 && (pivots.len() < n || pivots[n - 1] != n - 1) {
            return None;
        }
        let mut out = Matrix::zeros(&self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(out)
    }

    /// Characteristic polynomial det(tI − A), via reduction to Hessenberg form.
    pub fn char_poly(&self) -> UniPoly {
        assert!(self.is_square());
        let n = self.rows;
        let f = &self.field;
        let mut h = self.clone();
        // Similarity reduction to upper Hessenberg form.
        for c in 0..n.saturating_sub(2) {
            let Some(p) = (c + 1..n).find(|&i| !h.get(i, c).is_zero()) else { continue };
            if p != c + 1 {
                h.swap_rows(p, c + 1);
                for i in 0..n {
                    h.data.swap(i * n + p, i * n + c + 1);
                }
            }
            let inv = h.get(c + 1, c).inv().expect("nonzero pivot");
            for r in c + 2..n {
                let u = h.get(r, c) * &inv;
                if u.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let v = h.get(r, j) - &(&u * h.get(c + 1, j));
                    h.set(r, j, v);
                }
                for i in 0..n {
                    let v = h.get(i, c + 1) + &(&u * h.get(i, r));
                    h.set(i, c + 1, v);
                }
            }
        }
        let t = UniPoly::monomial(f, 1);
        let mut p: Vec<UniPoly> = vec![UniPoly::one(f)];
        for m in 1..=n {
            let diag = UniPoly::new(f, vec![h.get(m - 1, m - 1).clone()]);
            let mut next = t.sub(&diag).mul(&p[m - 1]);
            let mut prod = Scalar::one(f);
            for i in (1..m).rev() {
                prod = &prod * h.get(i, i - 1);
                let coef = &prod * h.get(i - 1, m - 1);
                if !coef.is_zero() {
                    next = next.sub(&p[i - 1].scale(&coef));
                }
            }
            p.push(next);
        }
        p.pop().expect("nonempty")
    }

    /// Minimal polynomial: the first power A^k that is a linear combination of
    /// I, A, …, A^{k−1}, found by an exact nullspace computation.
    pub fn min_poly(&self) -> UniPoly {
        assert!(self.is_square());
        let n = self.rows;
        let f = &self.field;
        let mut powers = vec![Matrix::identity(f, n)];
        for k in 1..=n {
            powers.push(powers[k - 1].mul(self));
            let mut cols = Matrix::zeros(f, n * n, k + 1);
            for (j, pw) in powers.iter().enumerate() {
                for (idx, v) in pw.data.iter().enumerate() {
                    cols.set(idx, j, v.clone());
                }
            }
            let ns = cols.nullspace();
            if let Some(v) = ns.first() {
                // The kernel is one-dimensional here and its free column is k.
                return UniPoly::new(f, v.clone()).monic();
            }
        }
        unreachable!("Cayley–Hamilton bounds the minimal polynomial degree by n")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} over {}", self.field)
    }
}

/// Integer matrix as a rational matrix.
pub fn int_matrix(m: &[Vec<i64>]) -> Matrix {
    Matrix::from_ints(&FieldSpec::Rationals, m)
}

/// Inverse in GL_t(ℤ), or `None` if the matrix is singular or the inverse is not integral.
pub fn int_matrix_inverse(m: &[Vec<i64>]) -> Option<Vec<Vec<i64>>> {
    let inv = int_matrix(m).inverse()?;
    inv.to_rows()
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| {
                    let r: BigRational = v.as_rational()?;
                    if !r.is_integer() {
                        return None;
                    }
                    i64::try_from(r.to_integer()).ok()
                })
                .collect()
        })
        .collect()
}

pub fn int_matrix_det(m: &[Vec<i64>]) -> BigInt {
    int_matrix(m).det().as_integer().unwrap_or_else(BigInt::zero)
}

pub fn int_matrix_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    (0..n)
        .map(|i| (0..m).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn int_matrix_is_identity(a: &[Vec<i64>]) -> bool {
    a.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, v)| *v == i64::from(i == j)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    #[test]
    fn charpoly_and_minpoly_examples() {
        let a = Matrix::from_ints(&q(), &[vec![0, -1], vec![1, 0]]);
        assert_eq!(a.char_poly(), UniPoly::from_ints(&q(), &[1, 0, 1]));
        let j = Matrix::from_ints(&q(), &[vec![1, 1], vec![0, 1]]);
        assert_eq!(j.min_poly(), UniPoly::from_ints(&q(), &[1, -2, 1]));
        let neg = Matrix::from_ints(&q(), &[vec![-1, 0], vec![0, -1]]);
        assert_eq!(neg.min_poly(), UniPoly::from_ints(&q(), &[1, 1]));
        assert_eq!(neg.char_poly(), UniPoly::from_ints(&q(), &[1, 2, 1]));
    }

    #[test]
    fn nullspace_of_collinear_points() {
        // columns 1, x, y evaluated at (0,0), (1,1)
        let m = Matrix::from_ints(&q(), &[vec![1, 0, 0], vec![1, 1, 1]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        let expect: Vec<Scalar> = [0, -1, 1].iter().map(|v| Scalar::from_int(&q(), *v)).collect();
        assert_eq!(ns[0], expect);
    }

    #[test]
    fn gl2z_inverse() {
        let m = vec![vec![2, 1], vec![1, 1]];
        let inv = int_matrix_inverse(&m).unwrap();
        assert_eq!(inv, vec![vec![1, -1], vec![-1, 2]]);
        assert!(int_matrix_inverse(&[vec![2, 0], vec![0, 1]]).is_none());
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        prop::collection::vec(prop::collection::vec(-3i64..=3, n), n)
    }

    proptest! {
        // Cayley–Hamilton and det(A) = (−1)^n χ(0) give an independent check of the
        // Hessenberg recurrence.
        #[test]
        fn charpoly_annihilates(rows in (1usize..=4).prop_flat_map(small_matrix)) {
            let a = Matrix::from_ints(&q(), &rows);
            let n = a.rows();
            let chi = a.char_poly();
            prop_assert_eq!(chi.degree(), Some(n));
            let mut acc = Matrix::zeros(&q(), n, n);
            for (k, c) in chi.coeffs().iter().enumerate() {
                let term = a.pow(k as u64);
                for i in 0..n {
                    for j in 0..n {
                        let v = acc.get(i, j) + &(c * term.get(i, j));
                        acc.set(i, j, v);
                    }
                }
            }
            prop_assert!(acc.data.iter().all(|v| v.is_zero()));
            let sign = if n % 2 == 0 { 1 } else { -1 };
            prop_assert_eq!(a.det(), &chi.coeff(0) * &Scalar::from_int(&q(), sign));
        }

        #[test]
        fn minpoly_divides_charpoly(rows in (1usize..=4).prop_flat_map(small_matrix)) {
            let a = Matrix::from_ints(&q(), &rows);
            let (_, r) = a.char_poly().div_rem(&a.min_poly()).unwrap();
            prop_assert!(r.is_zero());
        }
    }
}

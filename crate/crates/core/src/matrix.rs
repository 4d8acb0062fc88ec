//! Dense square matrices over a [`Coeff`] ring.

use crate::coeff::{Coeff, Reach, Term};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<C> {
    n: usize,
    data: Vec<C>,
}

/// Location of a nonzero matrix entry.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryTerm {
    pub row: usize,
    pub col: usize,
    pub term: Term,
}

impl<C: Coeff> Matrix<C> {
    pub fn zeros(proto: &C, n: usize) -> Self {
        let z = proto.zero_like();
        Matrix {
            n,
            data: vec![z; n * n],
        }
    }

    pub fn identity(proto: &C, n: usize) -> Self {
        let mut m = Self::zeros(proto, n);
        for i in 0..n {
            m.data[i * n + i] = proto.one_like();
        }
        m
    }

    /// `E_alpha`: the single unit at `(alpha, alpha)` (0-based).
    pub fn unit(proto: &C, n: usize, alpha: usize) -> Self {
        let mut m = Self::zeros(proto, n);
        m.data[alpha * n + alpha] = proto.one_like();
        m
    }

    pub fn diagonal_scalars(proto: &C, diag: &[Scalar]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(proto, n);
        for (i, d) in diag.iter().enumerate() {
            m.data[i * n + i] = proto.constant_like(d);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Matrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C) {
        self.data[i * self.n + j] = value;
    }

    pub fn proto(&self) -> &C {
        &self.data[0]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &C)> {
        let n = self.n;
        self.data
            .iter()
            .enumerate()
            .map(move |(k, c)| (k / n, k % n, c))
    }

    pub fn map(&self, f: impl Fn(&C) -> C) -> Self {
        Matrix {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(&C, &C) -> C) -> Self {
        assert_eq!(self.n, other.n, "matrix dimension mismatch");
        Matrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    /// Keeps only the diagonal.
    pub fn diagonal_part(&self) -> Self {
        Self::from_fn(self.n, |i, j| {
            if i == j {
                self.get(i, j).clone()
            } else {
                self.get(i, j).zero_like()
            }
        })
    }

    pub fn first_nonzero_entry(&self) -> Option<EntryTerm> {
        self.entries().find_map(|(row, col, c)| {
            c.first_nonzero().map(|term| EntryTerm { row, col, term })
        })
    }
}

impl<C: Coeff> Coeff for Matrix<C> {
    fn zero_like(&self) -> Self {
        Self::zeros(self.proto(), self.n)
    }

    fn one_like(&self) -> Self {
        Self::identity(self.proto(), self.n)
    }

    fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a.add(b))
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a.sub(b))
    }

    fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "matrix dimension mismatch");
        let n = self.n;
        Self::from_fn(n, |i, j| {
            let mut acc = self.proto().zero_like();
            for k in 0..n {
                let a = self.get(i, k);
                let b = rhs.get(k, j);
                if a.is_exact_zero() || b.is_exact_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(b));
            }
            acc
        })
    }

    fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    fn scale(&self, s: &Scalar) -> Self {
        self.map(|c| c.scale(s))
    }

    fn is_exact_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_exact_zero())
    }

    fn is_exact_one(&self) -> bool {
        self.entries().all(|(i, j, c)| {
            if i == j {
                c.is_exact_one()
            } else {
                c.is_exact_zero()
            }
        })
    }

    fn first_nonzero(&self) -> Option<Term> {
        self.first_nonzero_entry().map(|e| e.term)
    }

    fn reach(&self) -> Reach {
        self.data
            .iter()
            .map(|c| c.reach())
            .reduce(Reach::meet)
            .expect("matrices are never empty")
    }

    fn map_x(&self, f: &dyn Fn(&crate::xseries::XSeries) -> crate::xseries::XSeries) -> Self {
        self.map(|c| c.map_x(f))
    }

    fn constant_like(&self, s: &Scalar) -> Self {
        self.one_like().scale(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use crate::xseries::XSeries;

    fn m(vals: [[i64; 2]; 2]) -> Matrix<XSeries> {
        Matrix::from_fn(2, |i, j| XSeries::constant(3, int(vals[i][j])))
    }

    #[test]
    fn product_and_transpose() {
        let a = m([[1, 2], [3, 4]]);
        let b = m([[0, 1], [1, 0]]);
        assert_eq!(a.mul(&b), m([[2, 1], [4, 3]]));
        assert_eq!(a.mul(&b).transpose(), b.transpose().mul(&a.transpose()));
        assert!(a.mul(&a.one_like()) == a);
    }

    #[test]
    fn first_nonzero_reports_indices() {
        let a = m([[0, 0], [5, 0]]);
        let e = a.first_nonzero_entry().unwrap();
        assert_eq!((e.row, e.col, e.term.value), (1, 0, int(5)));
    }
}

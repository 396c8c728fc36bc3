//! Small dense square matrices and the handful of operations the module code needs.

use super::poly::{PolyRing, Polynomial};
use super::ram::{RamRing, RamSeries};
use super::ring::CoeffRing;
use crate::error::{Error, Result};

/// Row-major `d × d` matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat<T> {
    d: usize,
    entries: Vec<T>,
}

impl<T> Mat<T> {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.d + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.entries[i * self.d + j] = v;
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }
}

impl<T: Clone> Mat<T> {
    pub fn from_fn(d: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                entries.push(f(i, j));
            }
        }
        Self { d, entries }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch(format!("expected {d} entries in every row")));
        }
        Ok(Self { d, entries: rows.into_iter().flatten().collect() })
    }

    /// From a flat row-major list of length `d²`.
    pub fn from_flat(d: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != d * d {
            return Err(Error::DimensionMismatch(format!("expected {} entries, got {}", d * d, entries.len())));
        }
        Ok(Self { d, entries })
    }

    pub fn map<U: Clone>(&self, mut f: impl FnMut(&T) -> U) -> Mat<U> {
        Mat { d: self.d, entries: self.entries.iter().map(&mut f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.d, |i, j| self.get(j, i).clone())
    }

    fn minor(&self, row: usize, col: usize) -> Self {
        let mut entries = Vec::with_capacity((self.d - 1) * (self.d - 1));
        for i in (0..self.d).filter(|&i| i != row) {
            for j in (0..self.d).filter(|&j| j != col) {
                entries.push(self.get(i, j).clone());
            }
        }
        Self { d: self.d - 1, entries }
    }
}

/// Matrices over `R[u]`.
impl<R: CoeffRing> PolyRing<R> {
    pub fn mat_identity(&self, d: usize) -> Mat<Polynomial<R::Elem>> {
        Mat::from_fn(d, |i, j| if i == j { self.one() } else { self.zero() })
    }

    pub fn mat_mul(
        &self,
        a: &Mat<Polynomial<R::Elem>>,
        b: &Mat<Polynomial<R::Elem>>,
    ) -> Mat<Polynomial<R::Elem>> {
        Mat::from_fn(a.dim(), |i, j| {
            (0..a.dim()).fold(self.zero(), |acc, k| self.add(&acc, &self.mul(a.get(i, k), b.get(k, j))))
        })
    }

    /// Determinant by cofactor expansion along the first column, skipping zero entries.
    pub fn det(&self, a: &Mat<Polynomial<R::Elem>>) -> Polynomial<R::Elem> {
        match a.dim() {
            0 => self.one(),
            1 => a.get(0, 0).clone(),
            d => {
                let mut acc = self.zero();
                for i in 0..d {
                    let entry = a.get(i, 0);
                    if entry.is_zero() {
                        continue;
                    }
                    let term = self.mul(entry, &self.det(&a.minor(i, 0)));
                    acc = if i % 2 == 0 { self.add(&acc, &term) } else { self.sub(&acc, &term) };
                }
                acc
            }
        }
    }

    /// Classical adjugate, so `A · adj(A) = det(A) · I`.
    pub fn adjugate(&self, a: &Mat<Polynomial<R::Elem>>) -> Mat<Polynomial<R::Elem>> {
        let d = a.dim();
        if d == 1 {
            return self.mat_identity(1);
        }
        Mat::from_fn(d, |i, j| {
            let c = self.det(&a.minor(j, i));
            if (i + j) % 2 == 0 {
                c
            } else {
                self.neg(&c)
            }
        })
    }
}

/// Matrices over the truncated series ring.
impl RamRing {
    pub fn mat_identity(&self, d: usize) -> Mat<RamSeries> {
        Mat::from_fn(d, |i, j| if i == j { self.one() } else { self.zero() })
    }

    pub fn mat_mul(&self, a: &Mat<RamSeries>, b: &Mat<RamSeries>) -> Mat<RamSeries> {
        Mat::from_fn(a.dim(), |i, j| {
            (0..a.dim()).fold(self.zero(), |acc, k| {
                let (x, y) = (a.get(i, k), b.get(k, j));
                if (x.is_exact() && x.is_zero_known()) || (y.is_exact() && y.is_zero_known()) {
                    acc
                } else {
                    self.add(&acc, &self.mul(x, y))
                }
            })
        })
    }

    pub fn mat_phi(&self, a: &Mat<RamSeries>) -> Mat<RamSeries> {
        a.map(|x| self.phi(x))
    }

    pub fn mat_tau(&self, a: &Mat<RamSeries>) -> Mat<RamSeries> {
        a.map(|x| self.tau(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::field::Field;

    #[test]
    fn determinant_and_adjugate() {
        let r = PolyRing::new(Field::prime(5).unwrap());
        let k = r.base().clone();
        let u = |e: usize, c: i64| r.monomial(k.from_int(c), e);
        let a = Mat::from_rows(vec![
            vec![u(2, 1), u(0, 3), u(1, 1)],
            vec![r.zero(), u(0, 2), u(3, 4)],
            vec![r.zero(), r.zero(), u(4, 1)],
        ])
        .unwrap();
        assert_eq!(r.det(&a), u(6, 2));
        let adj = r.adjugate(&a);
        let prod = r.mat_mul(&a, &adj);
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { r.det(&a) } else { r.zero() };
                assert_eq!(prod.get(i, j), &expected);
            }
        }
    }

    #[test]
    fn flat_constructor_checks_length() {
        assert!(Mat::from_flat(2, vec![1, 2, 3]).is_err());
        let m = Mat::from_flat(2, vec![1, 2, 3, 4]).unwrap();
        assert_eq!(m.transpose().entries(), &[1, 3, 2, 4]);
    }
}

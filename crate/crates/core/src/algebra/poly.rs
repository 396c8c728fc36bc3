//! Exact univariate polynomials in `u` over a coefficient ring.

use super::field::FieldElem;
use super::ring::CoeffRing;
use super::witt::WittScalar;
use crate::error::{Error, Result};

/// Polynomial with ascending coefficients; trailing zeros are always trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial<E> {
    coeffs: Vec<E>,
}

/// Polynomials over `k_E`, i.e. elements of `k_E[u]`.
pub type PolySeries = Polynomial<FieldElem>;

/// Polynomials over the truncated Witt ring, i.e. elements of `O_E[u] / p^M`.
pub type WittPoly = Polynomial<WittScalar>;

impl<E> Polynomial<E> {
    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&E> {
        self.coeffs.last()
    }

    /// Number of stored coefficients (degree + 1, or 0).
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<E: Clone> Polynomial<E> {
    pub fn coeff_or(&self, k: usize, zero: &E) -> E {
        self.coeffs.get(k).cloned().unwrap_or_else(|| zero.clone())
    }
}

/// Arithmetic context for polynomials over `R`.
#[derive(Debug, Clone)]
pub struct PolyRing<R: CoeffRing> {
    base: R,
}

impl<R: CoeffRing> PolyRing<R> {
    pub fn new(base: R) -> Self {
        Self { base }
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn from_coeffs(&self, mut coeffs: Vec<R::Elem>) -> Polynomial<R::Elem> {
        while coeffs.last().is_some_and(|c| self.base.is_zero(c)) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero(&self) -> Polynomial<R::Elem> {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one(&self) -> Polynomial<R::Elem> {
        self.constant(self.base.one())
    }

    pub fn constant(&self, c: R::Elem) -> Polynomial<R::Elem> {
        self.from_coeffs(vec![c])
    }

    /// `c · u^k`.
    pub fn monomial(&self, c: R::Elem, k: usize) -> Polynomial<R::Elem> {
        if self.base.is_zero(&c) {
            return self.zero();
        }
        let mut coeffs = vec![self.base.zero(); k + 1];
        coeffs[k] = c;
        Polynomial { coeffs }
    }

    pub fn coeff(&self, a: &Polynomial<R::Elem>, k: usize) -> R::Elem {
        a.coeffs.get(k).cloned().unwrap_or_else(|| self.base.zero())
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self, a: &Polynomial<R::Elem>) -> Option<usize> {
        a.coeffs.iter().position(|c| !self.base.is_zero(c))
    }

    pub fn add(&self, a: &Polynomial<R::Elem>, b: &Polynomial<R::Elem>) -> Polynomial<R::Elem> {
        let n = a.len().max(b.len());
        let zero = self.base.zero();
        let coeffs = (0..n)
            .map(|k| {
                let x = a.coeffs.get(k).unwrap_or(&zero);
                let y = b.coeffs.get(k).unwrap_or(&zero);
                self.base.add(x, y)
            })
            .collect();
        self.from_coeffs(coeffs)
    }

    pub fn neg(&self, a: &Polynomial<R::Elem>) -> Polynomial<R::Elem> {
        self.from_coeffs(a.coeffs.iter().map(|c| self.base.neg(c)).collect())
    }

    pub fn sub(&self, a: &Polynomial<R::Elem>, b: &Polynomial<R::Elem>) -> Polynomial<R::Elem> {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &Polynomial<R::Elem>, c: &R::Elem) -> Polynomial<R::Elem> {
        self.from_coeffs(a.coeffs.iter().map(|x| self.base.mul(x, c)).collect())
    }

    pub fn mul(&self, a: &Polynomial<R::Elem>, b: &Polynomial<R::Elem>) -> Polynomial<R::Elem> {
        if a.is_zero() || b.is_zero() {
            return self.zero();
        }
        let mut out = vec![self.base.zero(); a.len() + b.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                out[i + j] = self.base.add(&out[i + j], &self.base.mul(x, y));
            }
        }
        self.from_coeffs(out)
    }

    pub fn pow(&self, a: &Polynomial<R::Elem>, mut e: u32) -> Polynomial<R::Elem> {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Multiply by `u^k`.
    pub fn shift(&self, a: &Polynomial<R::Elem>, k: usize) -> Polynomial<R::Elem> {
        if a.is_zero() {
            return self.zero();
        }
        let mut coeffs = vec![self.base.zero(); k];
        coeffs.extend(a.coeffs.iter().cloned());
        Polynomial { coeffs }
    }

    /// Euclidean division by a divisor with unit leading coefficient.
    pub fn div_rem(
        &self,
        a: &Polynomial<R::Elem>,
        b: &Polynomial<R::Elem>,
    ) -> Result<(Polynomial<R::Elem>, Polynomial<R::Elem>)> {
        let db = b.degree().ok_or(Error::DivisionByZero)?;
        let lead_inv = self
            .base
            .unit_inverse(b.leading().expect("nonzero"))
            .ok_or(Error::NonUnitLeading)?;
        let mut rem = a.coeffs.clone();
        let mut quot = vec![self.base.zero(); a.len().saturating_sub(db)];
        while rem.len() > db {
            let top = rem.len() - 1;
            let c = self.base.mul(&rem[top], &lead_inv);
            if !self.base.is_zero(&c) {
                let shift = top - db;
                for (k, bk) in b.coeffs.iter().enumerate() {
                    rem[shift + k] = self.base.sub(&rem[shift + k], &self.base.mul(&c, bk));
                }
                quot[shift] = c;
            }
            rem.pop();
            while rem.last().is_some_and(|x| self.base.is_zero(x)) {
                rem.pop();
            }
        }
        Ok((self.from_coeffs(quot), self.from_coeffs(rem)))
    }

    /// Whether `d` divides `a` exactly.
    pub fn divides(&self, d: &Polynomial<R::Elem>, a: &Polynomial<R::Elem>) -> Result<bool> {
        if d.is_zero() {
            return Ok(a.is_zero());
        }
        Ok(self.div_rem(a, d)?.1.is_zero())
    }

    /// `a / b`, failing with [`Error::NotDivisible`] when `b` does not divide `a`.
    pub fn exact_div(&self, a: &Polynomial<R::Elem>, b: &Polynomial<R::Elem>) -> Result<Polynomial<R::Elem>> {
        let (q, r) = self.div_rem(a, b)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::NotDivisible)
        }
    }

    /// Frobenius `u ↦ u^p`, trivial on coefficients.
    pub fn phi(&self, a: &Polynomial<R::Elem>, p: usize) -> Polynomial<R::Elem> {
        if a.is_zero() {
            return self.zero();
        }
        let mut coeffs = vec![self.base.zero(); (a.len() - 1) * p + 1];
        for (k, c) in a.coeffs.iter().enumerate() {
            coeffs[k * p] = c.clone();
        }
        Polynomial { coeffs }
    }

    /// Terms of degree `>= k`, divided by `u^k`.
    pub fn high_part(&self, a: &Polynomial<R::Elem>, k: usize) -> Polynomial<R::Elem> {
        self.from_coeffs(a.coeffs.iter().skip(k).cloned().collect())
    }

    /// Map coefficients into another ring.
    pub fn map_into<S: CoeffRing>(
        &self,
        target: &PolyRing<S>,
        a: &Polynomial<R::Elem>,
        f: impl Fn(&R::Elem) -> S::Elem,
    ) -> Polynomial<S::Elem> {
        target.from_coeffs(a.coeffs.iter().map(f).collect())
    }

    /// If `a = c · u^k` with `c` nonzero, return `(c, k)`.
    pub fn as_monomial(&self, a: &Polynomial<R::Elem>) -> Option<(R::Elem, usize)> {
        let k = a.degree()?;
        if a.coeffs[..k].iter().all(|c| self.base.is_zero(c)) {
            Some((a.coeffs[k].clone(), k))
        } else {
            None
        }
    }
}

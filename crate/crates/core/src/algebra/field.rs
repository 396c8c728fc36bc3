//! The residue field `k_E = F_{p^f}`.
//!
//! Elements are packed as the base-`p` integer `c_0 + c_1 p + ... + c_{f-1} p^{f-1}`
//! of their coordinates in the power basis of the defining polynomial. Multiplication
//! goes through discrete log tables, so the field size is capped at [`MAX_FIELD_SIZE`].

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// Largest supported `p^f`.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

/// `p`, `f` and the monic defining polynomial (ascending coefficients, length `f + 1`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldParams {
    p: u32,
    f: usize,
    defining_poly: Vec<u32>,
}

impl FieldParams {
    pub fn new(p: u32, f: usize, defining_poly: Vec<u32>) -> Result<Self> {
        if p <= 2 || !is_prime(p as u64) {
            return Err(Error::InvalidField(format!("p = {p} must be an odd prime")));
        }
        if f == 0 {
            return Err(Error::InvalidField("extension degree must be at least 1".into()));
        }
        let q = (p as u64).checked_pow(f as u32).unwrap_or(u64::MAX);
        if q > MAX_FIELD_SIZE {
            return Err(Error::InvalidField(format!(
                "field size {p}^{f} exceeds the supported maximum {MAX_FIELD_SIZE}"
            )));
        }
        if defining_poly.len() != f + 1 {
            return Err(Error::InvalidField(format!(
                "defining polynomial must have {} coefficients, got {}",
                f + 1,
                defining_poly.len()
            )));
        }
        if defining_poly.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField("defining polynomial coefficients must lie in [0, p)".into()));
        }
        if defining_poly[f] != 1 {
            return Err(Error::InvalidField("defining polynomial must be monic".into()));
        }
        let g: Vec<u64> = defining_poly.iter().map(|&c| c as u64).collect();
        if !fp_poly::is_irreducible(&g, p as u64) {
            return Err(Error::InvalidField("defining polynomial is not irreducible over F_p".into()));
        }
        Ok(Self { p, f, defining_poly })
    }

    /// The prime field `F_p` with defining polynomial `y`.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, vec![0, 1])
    }

    /// `F_{p^f}` with the lexicographically first monic irreducible polynomial.
    pub fn first_irreducible(p: u32, f: usize) -> Result<Self> {
        if f == 1 {
            return Self::prime(p);
        }
        let q = (p as u64).checked_pow(f as u32).filter(|&q| q <= MAX_FIELD_SIZE);
        let Some(q) = q.filter(|_| p > 2 && is_prime(p as u64)) else {
            return Err(Error::InvalidField(format!("no supported field F_{p}^{f}")));
        };
        for n in 0..q {
            let mut coeffs = Vec::with_capacity(f + 1);
            let mut m = n;
            for _ in 0..f {
                coeffs.push((m % p as u64) as u32);
                m /= p as u64;
            }
            coeffs.push(1);
            let g: Vec<u64> = coeffs.iter().map(|&c| c as u64).collect();
            if fp_poly::is_irreducible(&g, p as u64) {
                return Self::new(p, f, coeffs);
            }
        }
        Err(Error::InvalidField(format!("no irreducible polynomial of degree {f} over F_{p}")))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn defining_poly(&self) -> &[u32] {
        &self.defining_poly
    }
}

/// A packed element of `k_E`. Only meaningful together with its [`Field`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// The packed base-`p` index of the element.
    pub fn index(self) -> u32 {
        self.0
    }
}

struct FieldData {
    params: FieldParams,
    q: u32,
    // exp[k] = g^k for a fixed primitive element g, k in [0, q - 1)
    exp: Vec<u32>,
    // log[a] for a != 0
    log: Vec<u32>,
}

/// Arithmetic context for `k_E`. Cloning is cheap.
#[derive(Clone)]
pub struct Field(Arc<FieldData>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field(F_{}^{})", self.0.params.p, self.0.params.f)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.params == other.0.params
    }
}

impl Eq for Field {}

impl Field {
    pub fn new(params: FieldParams) -> Self {
        let p = params.p as u64;
        let q = p.pow(params.f as u32) as u32;
        let modulus: Vec<u64> = params.defining_poly.iter().map(|&c| c as u64).collect();
        let slow_mul = |a: u32, b: u32| -> u32 {
            let pa = unpack(a, params.p, params.f);
            let pb = unpack(b, params.p, params.f);
            let prod = fp_poly::mul(&pa, &pb, p);
            let r = fp_poly::rem(&prod, &modulus, p);
            pack(&r, params.p)
        };
        let order = q as u64 - 1;
        let prime_factors = factor(order);
        let generator = (2..q.max(3))
            .chain(std::iter::once(1))
            .find(|&c| {
                c < q
                    && prime_factors.iter().all(|&l| {
                        let e = order / l;
                        let mut acc = 1u32;
                        let mut base = c;
                        let mut k = e;
                        while k > 0 {
                            if k & 1 == 1 {
                                acc = slow_mul(acc, base);
                            }
                            base = slow_mul(base, base);
                            k >>= 1;
                        }
                        acc != 1
                    })
            })
            .expect("the multiplicative group of a finite field is cyclic");
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; q as usize];
        let mut cur = 1u32;
        for k in 0..order as u32 {
            exp.push(cur);
            log[cur as usize] = k;
            cur = slow_mul(cur, generator);
        }
        Field(Arc::new(FieldData { params, q, exp, log }))
    }

    /// `F_p`.
    pub fn prime(p: u32) -> Result<Self> {
        Ok(Self::new(FieldParams::prime(p)?))
    }

    pub fn params(&self) -> &FieldParams {
        &self.0.params
    }

    pub fn p(&self) -> u32 {
        self.0.params.p
    }

    pub fn degree(&self) -> usize {
        self.0.params.f
    }

    pub fn size(&self) -> u32 {
        self.0.q
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    pub fn one(&self) -> FieldElem {
        FieldElem::ONE
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.p() as i64) as u32)
    }

    pub fn from_coords(&self, coords: &[u32]) -> Result<FieldElem> {
        let f = self.degree();
        if coords.len() > f {
            return Err(Error::Input(format!(
                "field element has {} coordinates, expected at most {f}",
                coords.len()
            )));
        }
        if coords.iter().any(|&c| c >= self.p()) {
            return Err(Error::Input(format!("field coordinates must lie in [0, {})", self.p())));
        }
        Ok(FieldElem(pack_u32(coords, self.p())))
    }

    /// Coordinates in the power basis, always of length `f`.
    pub fn coords(&self, a: FieldElem) -> Vec<u32> {
        unpack(a.0, self.p(), self.degree()).into_iter().map(|c| c as u32).collect()
    }

    /// The generator `y` of the power basis.
    pub fn gen(&self) -> FieldElem {
        if self.degree() == 1 {
            // y is a root of y + c_0
            self.neg(FieldElem(self.0.params.defining_poly[0]))
        } else {
            FieldElem(self.p())
        }
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.p();
        if self.degree() == 1 {
            let s = a.0 + b.0;
            return FieldElem(if s >= p { s - p } else { s });
        }
        let (mut x, mut y) = (a.0, b.0);
        let (mut out, mut place) = (0u32, 1u32);
        while x > 0 || y > 0 {
            let d = (x % p + y % p) % p;
            out += d * place;
            place *= p;
            x /= p;
            y /= p;
        }
        FieldElem(out)
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        let p = self.p();
        if self.degree() == 1 {
            return FieldElem(if a.0 == 0 { 0 } else { p - a.0 });
        }
        let mut x = a.0;
        let (mut out, mut place) = (0u32, 1u32);
        while x > 0 {
            let d = x % p;
            out += ((p - d) % p) * place;
            place *= p;
            x /= p;
        }
        FieldElem(out)
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        if self.degree() == 1 {
            return FieldElem(((a.0 as u64 * b.0 as u64) % self.p() as u64) as u32);
        }
        let order = self.0.q - 1;
        let k = self.0.log[a.0 as usize] + self.0.log[b.0 as usize];
        FieldElem(self.0.exp[(if k >= order { k - order } else { k }) as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let order = self.0.q - 1;
        let k = self.0.log[a.0 as usize];
        Ok(FieldElem(self.0.exp[((order - k) % order) as usize]))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return FieldElem::ONE;
        }
        if a.0 == 0 {
            return FieldElem::ZERO;
        }
        let order = (self.0.q - 1) as u64;
        let k = (self.0.log[a.0 as usize] as u64 * (e % order)) % order;
        FieldElem(self.0.exp[k as usize])
    }

    /// The absolute Frobenius `a ↦ a^p`.
    pub fn frobenius(&self, a: FieldElem) -> FieldElem {
        self.pow(a, self.p() as u64)
    }

    /// Whether `a` lies in the prime field.
    pub fn in_prime_field(&self, a: FieldElem) -> bool {
        a.0 < self.p()
    }

    /// All elements in packed order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.0.q).map(FieldElem)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        FieldElem(rng.gen_range(0..self.0.q))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        FieldElem(rng.gen_range(1..self.0.q))
    }
}

fn unpack(mut a: u32, p: u32, f: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(f);
    for _ in 0..f {
        out.push((a % p) as u64);
        a /= p;
    }
    out
}

fn pack(coeffs: &[u64], p: u32) -> u32 {
    coeffs.iter().rev().fold(0u32, |acc, &c| acc * p + c as u32)
}

fn pack_u32(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn factor(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Dense polynomials over `F_p` used only to validate and tabulate the field.
mod fp_poly {
    fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn inv_mod(a: u64, p: u64) -> u64 {
        let mut r = 1u64;
        let mut b = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(out)
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let m = trim(m.to_vec());
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p);
        while r.len() > dm {
            let dr = r.len() - 1;
            let c = r[dr] * lead_inv % p;
            for (k, &mk) in m.iter().enumerate() {
                let idx = dr - dm + k;
                r[idx] = (r[idx] + p - c * mk % p) % p;
            }
            r = trim(r);
        }
        r
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    fn pow_mod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &b, p), m, p);
            }
            b = rem(&mul(&b, &b, p), m, p);
            e >>= 1;
        }
        acc
    }

    /// Rabin's test for a monic polynomial.
    pub fn is_irreducible(g: &[u64], p: u64) -> bool {
        let n = g.len() - 1;
        if n == 1 {
            return true;
        }
        let x = vec![0u64, 1];
        // x^{p^k} mod g for k = 0..=n
        let mut frob = vec![rem(&x, g, p)];
        for k in 0..n {
            let next = pow_mod(&frob[k], p, g, p);
            frob.push(next);
        }
        if sub(&frob[n], &rem(&x, g, p), p) != Vec::<u64>::new() {
            return false;
        }
        super::factor(n as u64).into_iter().all(|l| {
            let k = n / l as usize;
            let h = sub(&frob[k], &x, p);
            gcd(g, &h, p).len() == 1
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f9() -> Field {
        Field::new(FieldParams::new(3, 2, vec![1, 0, 1]).unwrap())
    }

    #[test]
    fn prime_field_inverse_and_frobenius() {
        let k = Field::prime(5).unwrap();
        assert_eq!(k.inv(k.from_int(2)).unwrap(), k.from_int(3));
        assert_eq!(k.frobenius(k.from_int(2)), k.from_int(2));
        assert_eq!(k.inv(k.zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn frobenius_of_generator_in_f9() {
        let k = f9();
        let y = k.gen();
        assert_eq!(k.coords(y), vec![0, 1]);
        // y^3 = -y = 2y
        assert_eq!(k.coords(k.frobenius(y)), vec![0, 2]);
        assert_eq!(k.mul(y, y), k.from_int(-1));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FieldParams::new(2, 1, vec![0, 1]).is_err());
        assert!(FieldParams::new(9, 1, vec![0, 1]).is_err());
        // y^2 + 2 = y^2 - 1 = (y - 1)(y + 1) over F_3
        assert!(FieldParams::new(3, 2, vec![2, 0, 1]).is_err());
        assert!(FieldParams::new(3, 2, vec![1, 0, 2]).is_err());
        assert!(FieldParams::new(5, 2, vec![2, 0]).is_err());
    }

    #[test]
    fn irreducible_cubic_over_f5() {
        // y^3 + y + 1 has no root in F_5
        let params = FieldParams::new(5, 3, vec![1, 1, 0, 1]).unwrap();
        let k = Field::new(params);
        assert_eq!(k.size(), 125);
        let mut count = 0;
        for a in k.elements() {
            if a.is_zero() {
                continue;
            }
            assert_eq!(k.mul(a, k.inv(a).unwrap()), k.one());
            count += 1;
        }
        assert_eq!(count, 124);
    }

    #[test]
    fn linear_defining_polynomial_shifts_nothing() {
        // y + 3 over F_5: the field is still F_5 with y = 2
        let k = Field::new(FieldParams::new(5, 1, vec![3, 1]).unwrap());
        assert_eq!(k.gen(), k.from_int(2));
    }
}

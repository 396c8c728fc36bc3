//! Truncated Witt vectors `W(k_E) / p^M`, modelling `O_E` for unramified `E`.
//!
//! `W(F_{p^f}) = Z_p[y] / (g̃)` for any monic lift `g̃` of the defining polynomial, so
//! a scalar is an `f`-tuple of residues mod `p^M` in the power basis of `g̃`.

use rand::Rng;

use super::field::{Field, FieldElem};
use super::poly::{PolyRing, WittPoly};
use super::ring::CoeffRing;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WittScalar {
    coeffs: Vec<u64>,
}

impl WittScalar {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
}

#[derive(Debug, Clone)]
pub struct WittRing {
    field: Field,
    precision: u32,
    modulus: u64,
    lift_poly: Vec<u64>,
}

impl WittRing {
    pub fn new(field: Field, precision: u32) -> Result<Self> {
        if precision == 0 {
            return Err(Error::InvalidField("Witt precision must be at least 1".into()));
        }
        let modulus = (field.p() as u64)
            .checked_pow(precision)
            .filter(|&m| m < (1u64 << 62))
            .ok_or_else(|| Error::InvalidField(format!("p^{precision} overflows")))?;
        let lift_poly = field.params().defining_poly().iter().map(|&c| c as u64).collect();
        Ok(Self { field, precision, modulus, lift_poly })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `p^M`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn polys(&self) -> PolyRing<WittRing> {
        PolyRing::new(self.clone())
    }

    pub fn from_coords(&self, coords: &[u64]) -> Result<WittScalar> {
        let f = self.field.degree();
        if coords.len() > f {
            return Err(Error::Input(format!("Witt scalar has {} coordinates, expected {f}", coords.len())));
        }
        if coords.iter().any(|&c| c >= self.modulus) {
            return Err(Error::Input(format!("Witt coordinates must lie in [0, {})", self.modulus)));
        }
        let mut c = coords.to_vec();
        c.resize(f, 0);
        Ok(WittScalar { coeffs: c })
    }

    /// Coordinatewise lift of a residue (not multiplicative, see [`Self::teichmuller`]).
    pub fn lift(&self, a: FieldElem) -> WittScalar {
        WittScalar { coeffs: self.field.coords(a).into_iter().map(|c| c as u64).collect() }
    }

    pub fn reduce_mod_p(&self, a: &WittScalar) -> FieldElem {
        let p = self.field.p() as u64;
        let coords: Vec<u32> = a.coeffs.iter().map(|&c| (c % p) as u32).collect();
        self.field.from_coords(&coords).expect("reduced coordinates are in range")
    }

    pub fn reduce_poly(&self, a: &WittPoly) -> super::poly::PolySeries {
        let target = PolyRing::new(self.field.clone());
        self.polys().map_into(&target, a, |c| self.reduce_mod_p(c))
    }

    /// Teichmüller representative: the unique `T ≡ a (mod p)` with `T^{p^f} = T`.
    pub fn teichmuller(&self, a: FieldElem) -> WittScalar {
        let q = self.field.size() as u64;
        let mut t = self.lift(a);
        // each application of x ↦ x^q gains one p-adic digit
        for _ in 0..self.precision {
            t = self.pow(&t, q);
        }
        t
    }

    pub fn pow(&self, a: &WittScalar, mut e: u64) -> WittScalar {
        let mut acc = CoeffRing::one(self);
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = CoeffRing::mul(self, &acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = CoeffRing::mul(self, &base, &base);
            }
        }
        acc
    }

    pub fn is_unit(&self, a: &WittScalar) -> bool {
        !self.reduce_mod_p(a).is_zero()
    }

    /// `E(u) = u - p`.
    pub fn eisenstein(&self) -> WittPoly {
        let polys = self.polys();
        polys.from_coeffs(vec![CoeffRing::from_int(self, -(self.field.p() as i64)), CoeffRing::one(self)])
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> WittScalar {
        WittScalar {
            coeffs: (0..self.field.degree()).map(|_| rng.gen_range(0..self.modulus)).collect(),
        }
    }

    /// A random lift of `a`: `a + p·w` with `w` random.
    pub fn random_lift<R: Rng + ?Sized>(&self, a: FieldElem, rng: &mut R) -> WittScalar {
        let base = self.lift(a);
        let noise = self.random(rng);
        let p = CoeffRing::from_int(self, self.field.p() as i64);
        CoeffRing::add(self, &base, &CoeffRing::mul(self, &p, &noise))
    }

    fn reduce_coeffs(&self, mut c: Vec<u128>) -> WittScalar {
        let m = self.modulus as u128;
        let f = self.field.degree();
        for k in (f..c.len()).rev() {
            let top = c[k] % m;
            if top == 0 {
                continue;
            }
            for i in 0..f {
                let idx = k - f + i;
                let sub = top * self.lift_poly[i] as u128 % m;
                c[idx] = (c[idx] % m + m - sub) % m;
            }
            c[k] = 0;
        }
        c.truncate(f);
        c.resize(f, 0);
        WittScalar { coeffs: c.into_iter().map(|x| (x % m) as u64).collect() }
    }
}

impl PartialEq for WittRing {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.precision == other.precision
    }
}

impl CoeffRing for WittRing {
    type Elem = WittScalar;

    fn zero(&self) -> WittScalar {
        WittScalar { coeffs: vec![0; self.field.degree()] }
    }

    fn one(&self) -> WittScalar {
        let mut c = vec![0; self.field.degree()];
        c[0] = 1;
        WittScalar { coeffs: c }
    }

    fn add(&self, a: &WittScalar, b: &WittScalar) -> WittScalar {
        let m = self.modulus;
        WittScalar { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| (x + y) % m).collect() }
    }

    fn neg(&self, a: &WittScalar) -> WittScalar {
        let m = self.modulus;
        WittScalar { coeffs: a.coeffs.iter().map(|&x| (m - x) % m).collect() }
    }

    fn mul(&self, a: &WittScalar, b: &WittScalar) -> WittScalar {
        let m = self.modulus as u128;
        let f = self.field.degree();
        let mut prod = vec![0u128; 2 * f - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % m;
            }
        }
        self.reduce_coeffs(prod)
    }

    fn is_zero(&self, a: &WittScalar) -> bool {
        a.coeffs.iter().all(|&c| c == 0)
    }

    fn unit_inverse(&self, a: &WittScalar) -> Option<WittScalar> {
        let r = self.reduce_mod_p(a);
        let r_inv = self.field.inv(r).ok()?;
        // Newton: x ← x (2 - a x)
        let mut x = self.lift(r_inv);
        let two = self.from_int(2);
        for _ in 0..self.precision {
            let ax = CoeffRing::mul(self, a, &x);
            x = CoeffRing::mul(self, &x, &CoeffRing::sub(self, &two, &ax));
        }
        Some(x)
    }

    fn from_int(&self, n: i64) -> WittScalar {
        let mut c = vec![0; self.field.degree()];
        c[0] = n.rem_euclid(self.modulus as i64) as u64;
        WittScalar { coeffs: c }
    }
}

//! Truncated series `k_E[x] / (x^N)` with `u = x^{p-1}`, carrying `φ` and `τ`.
//!
//! Each series records how many low coefficients are known. An exact series is a
//! genuine polynomial of degree `< N`; otherwise only coefficients below `precision()`
//! are meaningful.

use num_rational::Rational64;

use super::field::{Field, FieldElem};
use super::poly::PolySeries;
use super::valuation::Valuation;
use super::zp::ZpInt;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamSeries {
    coeffs: Vec<FieldElem>,
    prec: usize,
    exact: bool,
}

impl RamSeries {
    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    /// Number of known low coefficients.
    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn coeff(&self, k: usize) -> FieldElem {
        self.coeffs.get(k).copied().unwrap_or(FieldElem::ZERO)
    }

    /// Lowest exponent with a nonzero known coefficient.
    pub fn lowest_term(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Whether every known coefficient vanishes.
    pub fn is_zero_known(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Nonzero terms `(exponent, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, FieldElem)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, &c)| (k, c))
    }

    fn effective(&self) -> usize {
        if self.exact {
            usize::MAX
        } else {
            self.prec
        }
    }
}

/// Outcome of comparing two truncated series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    EqualExact,
    /// Equal in every coefficient below the given exponent.
    EqualUpTo(usize),
    /// First differing exponent.
    DifferAt(usize),
}

impl Comparison {
    pub fn is_equal(self) -> bool {
        !matches!(self, Comparison::DifferAt(_))
    }
}

/// The model 1-unit `ε = 1 + x^p · g(x)`; `g` has coefficients in `F_p` and `g(0) ≠ 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EpsilonModel {
    g: Vec<u32>,
}

impl EpsilonModel {
    pub fn new(g: Vec<u32>) -> Self {
        Self { g }
    }

    /// `ε = 1 + x^p`.
    pub fn standard() -> Self {
        Self { g: vec![1] }
    }

    /// The three variants used for model-independence checks.
    pub fn variants() -> Vec<Self> {
        vec![Self::standard(), Self { g: vec![1, 1] }, Self { g: vec![2] }]
    }

    /// Parse a comma-separated coefficient list such as `"1,1"`.
    pub fn parse(s: &str) -> Result<Self> {
        let g = s
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|e| Error::Input(format!("epsilon model `{s}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if g[0] == 0 {
            return Err(Error::Input(format!("epsilon model `{s}`: g(0) must be nonzero")));
        }
        Ok(Self { g })
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.g
    }

    fn validate(&self, p: u32) -> Result<()> {
        if self.g.is_empty() || self.g[0].is_multiple_of(p) {
            return Err(Error::Input("epsilon model needs g(0) nonzero mod p".into()));
        }
        if self.g.iter().any(|&c| c >= p) {
            return Err(Error::Input(format!("epsilon model coefficients must lie in F_{p}")));
        }
        Ok(())
    }
}

impl Default for EpsilonModel {
    fn default() -> Self {
        Self::standard()
    }
}

/// Arithmetic context for [`RamSeries`] at truncation `N`.
#[derive(Debug, Clone)]
pub struct RamRing {
    field: Field,
    p: usize,
    n: usize,
    eps: EpsilonModel,
    // x^r · (τ(x)/x)^r for 0 ≤ r < p - 1
    tau_twists: Vec<RamSeries>,
    // sparse terms of τ(u) = x^{p-1} ε
    tau_u: Vec<(usize, FieldElem)>,
}

impl RamRing {
    pub fn new(field: Field, n: usize, eps: EpsilonModel) -> Result<Self> {
        let p = field.p();
        eps.validate(p)?;
        if n == 0 {
            return Err(Error::Input("series precision must be positive".into()));
        }
        let mut ring = Self { field, p: p as usize, n, eps, tau_twists: Vec::new(), tau_u: Vec::new() };
        let z = ring.eps_minus_one();
        let mut twists = Vec::with_capacity(ring.p - 1);
        for r in 0..ring.p - 1 {
            let alpha = ZpInt::from_rational(p, r as i64, p as i64 - 1)?;
            let w = ring.unit_pow_zp(&z, &alpha)?;
            twists.push(ring.mul(&ring.x_pow(r), &w));
        }
        let mut tau_u = vec![(ring.p - 1, FieldElem::ONE)];
        for (k, &c) in ring.eps.g.iter().enumerate() {
            if c != 0 {
                tau_u.push((2 * ring.p - 1 + k, ring.field.from_int(c as i64)));
            }
        }
        ring.tau_twists = twists;
        ring.tau_u = tau_u;
        Ok(ring)
    }

    pub fn with_default_epsilon(field: Field, n: usize) -> Result<Self> {
        Self::new(field, n, EpsilonModel::standard())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Truncation exponent `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epsilon_model(&self) -> &EpsilonModel {
        &self.eps
    }

    /// Same model at a different truncation.
    pub fn with_precision(&self, n: usize) -> Result<Self> {
        Self::new(self.field.clone(), n, self.eps.clone())
    }

    fn build(&self, mut coeffs: Vec<FieldElem>, prec: usize, exact: bool) -> RamSeries {
        let prec = prec.min(self.n);
        coeffs.truncate(prec);
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RamSeries { coeffs, prec, exact: exact && prec == self.n }
    }

    /// An exact polynomial in `x`; terms at or beyond `x^N` make it inexact.
    pub fn series(&self, coeffs: Vec<FieldElem>) -> RamSeries {
        let overflow = coeffs.iter().skip(self.n).any(|c| !c.is_zero());
        self.build(coeffs, self.n, !overflow)
    }

    /// A series known only below `x^prec`.
    pub fn truncated(&self, coeffs: Vec<FieldElem>, prec: usize) -> RamSeries {
        self.build(coeffs, prec, false)
    }

    pub fn zero(&self) -> RamSeries {
        self.series(Vec::new())
    }

    pub fn one(&self) -> RamSeries {
        self.constant(FieldElem::ONE)
    }

    pub fn constant(&self, c: FieldElem) -> RamSeries {
        self.series(vec![c])
    }

    /// `c · x^k`.
    pub fn monomial(&self, c: FieldElem, k: usize) -> RamSeries {
        if c.is_zero() {
            return self.zero();
        }
        if k >= self.n {
            return self.truncated(Vec::new(), self.n);
        }
        let mut coeffs = vec![FieldElem::ZERO; k + 1];
        coeffs[k] = c;
        self.series(coeffs)
    }

    pub fn x_pow(&self, k: usize) -> RamSeries {
        self.monomial(FieldElem::ONE, k)
    }

    /// `u^k = x^{k(p-1)}`.
    pub fn u_pow(&self, k: usize) -> RamSeries {
        self.monomial(FieldElem::ONE, k * (self.p - 1))
    }

    /// Embed `k_E[u]` via `u = x^{p-1}`.
    pub fn from_poly(&self, a: &PolySeries) -> RamSeries {
        let mut coeffs = vec![FieldElem::ZERO; a.len().saturating_sub(1) * (self.p - 1) + 1];
        for (k, &c) in a.coeffs().iter().enumerate() {
            coeffs[k * (self.p - 1)] = c;
        }
        if a.is_zero() {
            coeffs.clear();
        }
        self.series(coeffs)
    }

    /// The model `ε - 1 = x^p · g`.
    pub fn eps_minus_one(&self) -> RamSeries {
        let mut coeffs = vec![FieldElem::ZERO; self.p];
        coeffs.extend(self.eps.g.iter().map(|&c| self.field.from_int(c as i64)));
        self.series(coeffs)
    }

    pub fn epsilon(&self) -> RamSeries {
        self.add(&self.one(), &self.eps_minus_one())
    }

    /// Restrict to coefficients below `x^prec`.
    pub fn truncate(&self, a: &RamSeries, prec: usize) -> RamSeries {
        if a.exact && a.coeffs.len() <= prec {
            return a.clone();
        }
        self.build(a.coeffs.clone(), prec.min(a.prec), false)
    }

    pub fn add(&self, a: &RamSeries, b: &RamSeries) -> RamSeries {
        let prec = a.effective().min(b.effective()).min(self.n);
        let len = a.coeffs.len().max(b.coeffs.len()).min(prec);
        let coeffs = (0..len).map(|k| self.field.add(a.coeff(k), b.coeff(k))).collect();
        self.build(coeffs, prec, a.exact && b.exact)
    }

    pub fn neg(&self, a: &RamSeries) -> RamSeries {
        RamSeries { coeffs: a.coeffs.iter().map(|&c| self.field.neg(c)).collect(), ..a.clone() }
    }

    pub fn sub(&self, a: &RamSeries, b: &RamSeries) -> RamSeries {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &RamSeries, c: FieldElem) -> RamSeries {
        let coeffs = a.coeffs.iter().map(|&x| self.field.mul(x, c)).collect();
        self.build(coeffs, a.prec, a.exact)
    }

    pub fn mul(&self, a: &RamSeries, b: &RamSeries) -> RamSeries {
        let zero_a = a.exact && a.coeffs.is_empty();
        let zero_b = b.exact && b.coeffs.is_empty();
        if zero_a || zero_b {
            return self.zero();
        }
        let va = a.lowest_term().unwrap_or(a.prec);
        let vb = b.lowest_term().unwrap_or(b.prec);
        let prec = a.effective().saturating_add(vb).min(b.effective().saturating_add(va)).min(self.n);
        let coeffs = mul_trunc(&self.field, &a.coeffs, &b.coeffs, prec);
        let exact = a.exact && b.exact && a.coeffs.len() + b.coeffs.len() <= self.n + 1;
        self.build(coeffs, prec, exact)
    }

    pub fn pow(&self, a: &RamSeries, mut e: u64) -> RamSeries {
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

    /// `v_R`: lowest exponent over `p - 1`.
    pub fn valuation(&self, a: &RamSeries) -> Result<Valuation> {
        match a.lowest_term() {
            Some(k) => Ok(Valuation::Finite(Rational64::new(k as i64, self.p as i64 - 1))),
            None if a.exact => Ok(Valuation::Infinite),
            None => Err(Error::IndeterminateValuation(a.prec)),
        }
    }

    /// Frobenius `x ↦ x^p`, coefficients fixed.
    pub fn phi(&self, a: &RamSeries) -> RamSeries {
        let prec = a.effective().saturating_mul(self.p).min(self.n);
        let mut coeffs = vec![FieldElem::ZERO; a.coeffs.len().saturating_sub(1) * self.p + 1];
        for (k, c) in a.terms() {
            coeffs[k * self.p] = c;
        }
        if a.coeffs.is_empty() {
            coeffs.clear();
        }
        let exact = a.exact && (a.coeffs.len().max(1) - 1) * self.p < self.n;
        self.build(coeffs, prec, exact)
    }

    /// `a^{p^i}`, computed termwise since Frobenius is additive.
    pub fn frob_power(&self, a: &RamSeries, i: u32) -> RamSeries {
        let q = (self.p as u64).pow(i);
        let step = q as usize;
        let prec = a.effective().saturating_mul(step).min(self.n);
        let mut coeffs = Vec::new();
        for (k, c) in a.terms() {
            let e = k.saturating_mul(step);
            if e >= prec {
                break;
            }
            if coeffs.len() <= e {
                coeffs.resize(e + 1, FieldElem::ZERO);
            }
            coeffs[e] = self.field.pow(c, q);
        }
        let exact = a.exact && (a.coeffs.len().max(1) - 1).saturating_mul(step) < self.n;
        self.build(coeffs, prec, exact)
    }

    /// `(1 + z)^α` for `α ∈ Z_p`, as `∏ (1 + z^{p^i})^{α_i}` over the base-`p` digits of `α`.
    pub fn unit_pow_zp(&self, z: &RamSeries, alpha: &ZpInt) -> Result<RamSeries> {
        if !z.coeff(0).is_zero() {
            return Err(Error::NotTopologicallyNilpotent);
        }
        if z.prec == 0 {
            return Err(Error::IndeterminateValuation(0));
        }
        if z.exact && z.coeffs.is_empty() {
            return Ok(self.one());
        }
        let v = z.lowest_term().unwrap_or(z.prec);
        let prec = z.effective().min(self.n);
        let mut acc = vec![FieldElem::ONE];
        let mut i = 0u32;
        let mut reach = v;
        while reach < prec {
            let digit = alpha.digit(i as usize);
            if digit > 0 {
                let zi = self.frob_power(z, i);
                let mut factor = zi.coeffs.clone();
                factor.truncate(prec);
                if factor.is_empty() {
                    factor.push(FieldElem::ZERO);
                }
                factor[0] = self.field.add(factor[0], FieldElem::ONE);
                for _ in 0..digit {
                    acc = mul_trunc(&self.field, &acc, &factor, prec);
                }
            }
            i += 1;
            reach = match reach.checked_mul(self.p) {
                Some(r) => r,
                None => break,
            };
        }
        let exact = z.exact
            && alpha
                .to_natural()
                .and_then(|a| a.checked_mul(z.coeffs.len() as u128 - 1))
                .is_some_and(|deg| deg < self.n as u128);
        Ok(self.build(acc, prec, exact))
    }

    /// The ring endomorphism with `τ(x) = x · ε^{1/(p-1)}`, so `τ(u) = u · ε`.
    pub fn tau(&self, a: &RamSeries) -> RamSeries {
        let pm1 = self.p - 1;
        let prec = a.effective().min(self.n);
        let mut out = vec![FieldElem::ZERO; 0];
        for r in 0..pm1 {
            // Horner in y = τ(u) over the coefficients c_{q(p-1)+r}
            let top = match (r..a.coeffs.len()).step_by(pm1).next_back() {
                Some(k) => (k - r) / pm1,
                None => continue,
            };
            let mut acc: Vec<FieldElem> = Vec::new();
            for q in (0..=top).rev() {
                acc = mul_sparse(&self.field, &acc, &self.tau_u, prec);
                let c = a.coeff(q * pm1 + r);
                if !c.is_zero() {
                    if acc.is_empty() {
                        acc.push(FieldElem::ZERO);
                    }
                    acc[0] = self.field.add(acc[0], c);
                }
            }
            if acc.iter().all(|c| c.is_zero()) {
                continue;
            }
            let part = mul_trunc(&self.field, &acc, &self.tau_twists[r].coeffs, prec);
            if out.len() < part.len() {
                out.resize(part.len(), FieldElem::ZERO);
            }
            for (k, c) in part.into_iter().enumerate() {
                out[k] = self.field.add(out[k], c);
            }
        }
        let exact = a.exact && a.coeffs.len() <= 1;
        self.build(out, prec, exact)
    }

    /// Compare coefficients below the common precision.
    pub fn compare(&self, a: &RamSeries, b: &RamSeries) -> Comparison {
        let limit = a.effective().min(b.effective()).min(self.n);
        let len = a.coeffs.len().max(b.coeffs.len()).min(limit);
        for k in 0..len {
            if a.coeff(k) != b.coeff(k) {
                return Comparison::DifferAt(k);
            }
        }
        if a.exact && b.exact {
            Comparison::EqualExact
        } else {
            Comparison::EqualUpTo(limit)
        }
    }
}

/// Product of coefficient lists truncated below `x^limit`.
pub(crate) fn mul_trunc(field: &Field, a: &[FieldElem], b: &[FieldElem], limit: usize) -> Vec<FieldElem> {
    if a.is_empty() || b.is_empty() || limit == 0 {
        return Vec::new();
    }
    let len = (a.len() + b.len() - 1).min(limit);
    let mut out = vec![FieldElem::ZERO; len];
    let b_terms: Vec<(usize, FieldElem)> =
        b.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, &c)| (k, c)).collect();
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() || i >= len {
            continue;
        }
        for &(j, y) in &b_terms {
            let k = i + j;
            if k >= len {
                break;
            }
            out[k] = field.add(out[k], field.mul(x, y));
        }
    }
    out
}

fn mul_sparse(field: &Field, a: &[FieldElem], terms: &[(usize, FieldElem)], limit: usize) -> Vec<FieldElem> {
    let max_shift = terms.iter().map(|t| t.0).max().unwrap_or(0);
    let len = (a.len() + max_shift).min(limit);
    let mut out = vec![FieldElem::ZERO; len];
    for (i, &x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for &(j, y) in terms {
            let k = i + j;
            if k < len {
                out[k] = field.add(out[k], field.mul(x, y));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::PolyRing;

    fn ring(p: u32, n: usize) -> RamRing {
        RamRing::with_default_epsilon(Field::prime(p).unwrap(), n).unwrap()
    }

    fn c(r: &RamRing, n: i64) -> FieldElem {
        r.field().from_int(n)
    }

    #[test]
    fn embedding_of_u() {
        let r = ring(5, 40);
        let polys = PolyRing::new(r.field().clone());
        let u = polys.monomial(FieldElem::ONE, 1);
        assert_eq!(r.from_poly(&u), r.x_pow(4));
        let u2_plus_1 = polys.from_coeffs(vec![FieldElem::ONE, FieldElem::ZERO, FieldElem::ONE]);
        assert_eq!(r.from_poly(&u2_plus_1), r.add(&r.x_pow(8), &r.one()));
        let r3 = ring(3, 40);
        assert_eq!(r3.from_poly(&polys.monomial(FieldElem::ONE, 3)), r3.x_pow(6));
    }

    #[test]
    fn valuations() {
        let r = ring(5, 40);
        assert_eq!(r.valuation(&r.x_pow(4)).unwrap(), Valuation::finite(1, 1));
        assert_eq!(r.valuation(&r.zero()).unwrap(), Valuation::Infinite);
        let a = r.add(&r.x_pow(5), &r.x_pow(8));
        assert_eq!(r.valuation(&a).unwrap(), Valuation::finite(5, 4));
        let hidden = r.truncated(Vec::new(), 10);
        assert_eq!(r.valuation(&hidden), Err(Error::IndeterminateValuation(10)));
    }

    #[test]
    fn frobenius() {
        let r = ring(5, 40);
        assert_eq!(r.phi(&r.x_pow(1)), r.x_pow(5));
        let a = r.add(&r.one(), &r.x_pow(4));
        assert_eq!(r.phi(&a), r.add(&r.one(), &r.x_pow(20)));
        let t = r.truncated(vec![FieldElem::ZERO, FieldElem::ONE], 3);
        assert_eq!(r.phi(&t).precision(), 15);
    }

    #[test]
    fn trivial_unit_powers() {
        let r = ring(5, 60);
        let z = r.add(&r.x_pow(2), &r.scale(&r.x_pow(3), c(&r, 3)));
        assert_eq!(r.unit_pow_zp(&z, &ZpInt::from_int(5, 1)).unwrap(), r.add(&r.one(), &z));
        assert_eq!(r.unit_pow_zp(&z, &ZpInt::from_int(5, 0)).unwrap(), r.one());
        assert_eq!(r.unit_pow_zp(&r.one(), &ZpInt::from_int(5, 1)), Err(Error::NotTopologicallyNilpotent));
    }

    #[test]
    fn root_of_one_plus_z() {
        let r = ring(5, 80);
        let z = r.add(&r.x_pow(1), &r.x_pow(7));
        let alpha = ZpInt::from_rational(5, 1, 4).unwrap();
        let w = r.unit_pow_zp(&z, &alpha).unwrap();
        let lhs = r.pow(&w, 4);
        assert!(r.compare(&lhs, &r.add(&r.one(), &z)).is_equal());
    }

    #[test]
    fn tau_of_u_is_u_epsilon() {
        let r = ring(5, 60);
        let tu = r.tau(&r.x_pow(4));
        let expected = r.mul(&r.x_pow(4), &r.epsilon());
        assert_eq!(r.compare(&tu, &expected), Comparison::EqualUpTo(60));
        assert_eq!(r.tau(&r.constant(c(&r, 3))), r.constant(c(&r, 3)));
    }

    #[test]
    fn tau_is_multiplicative_on_x() {
        let r = ring(3, 50);
        let tx = r.tau(&r.x_pow(1));
        let tx2 = r.tau(&r.x_pow(2));
        assert!(r.compare(&r.mul(&tx, &tx), &tx2).is_equal());
    }
}
